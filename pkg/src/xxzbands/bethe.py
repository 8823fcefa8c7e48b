"""Closed-form droplet eigenvalues, eigenvector coefficients, and droplet bands.

Every quantity is derived twice: the gap-decay coefficients come from a direct
tridiagonal (Thomas) solve and from the hyperbolic closed form, and the
droplet energy comes from the dispersion formula and from evaluating the
eigenvalue equation at the all-gaps-one site.  The two routes must agree to
1e-12 or the solver raises.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .hamiltonians import ModelParams, normalize_theta

DUAL_ROUTE_TOL = 1e-12

GENERIC = "generic"
SINGLE_PARTICLE = "n1"
TWO_PARTICLE = "n2"
THETA_MINUS_PI_EVEN = "theta_minus_pi_even"


class DualRouteMismatch(ArithmeticError):
    """The tridiagonal solve and the closed form disagree beyond tolerance."""


@dataclass(frozen=True)
class Band:
    """Closed real energy interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"band endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Band") -> "Band":
        """Minkowski sum of intervals."""
        return Band(self.lo + other.lo, self.hi + other.hi)

    def repeated(self, k: int) -> "Band":
        """k-fold Minkowski sum of the band with itself (k >= 0; 0 gives {0})."""
        if k < 0:
            raise ValueError("repetition count must be nonnegative")
        return Band(k * self.lo, k * self.hi)

    def shifted(self, c: float) -> "Band":
        return Band(self.lo + c, self.hi + c)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def overlaps(self, other: "Band", tol: float = 0.0) -> bool:
        return self.lo <= other.hi + tol and other.lo <= self.hi + tol


@dataclass(frozen=True)
class BetheSolution:
    """Droplet eigendata at one quasimomentum.

    coefficients holds a_1..a_{N-1}; b_values are the symmetrized
    intermediates (half-integer index relabeling, internal) and c_plus the
    transfer-matrix amplitude.  special_case records which construction path
    produced the solution.
    """

    theta: float
    n: int
    delta: float
    coefficients: tuple[complex, ...]
    b_values: tuple[complex, ...]
    c_plus: complex
    energy: float
    special_case: str

    def eigenfunction(self, gaps: tuple[int, ...]) -> complex:
        """Amplitude at the given gap configuration (all gaps >= 1)."""
        if len(gaps) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} gaps, got {len(gaps)}")
        if any(g < 1 for g in gaps):
            raise ValueError(f"gaps must be >= 1: {gaps}")
        if self.special_case == THETA_MINUS_PI_EVEN:
            half = self.n // 2
            if gaps[half - 1] != 1:
                return 0.0 + 0.0j
            amp = 1.0 + 0.0j
            for k, g in enumerate(gaps, start=1):
                if k != half:
                    amp *= self.coefficients[k - 1] ** g
            return amp
        amp = 1.0 + 0.0j
        for a, g in zip(self.coefficients, gaps):
            amp *= a**g
        return amp


def _closed_form_coefficient(n: int, rho: float, theta: float, k: int) -> complex:
    """Hyperbolic closed form for a_k, k in 1..n-1."""
    half = 0.5 * theta
    shift = (k - 0.5 * n) * rho
    return cmath.exp(-1j * half) * (
        math.cos(half) * math.cosh(shift) / math.cosh(0.5 * n * rho)
        + 1j * math.sin(half) * math.sinh(shift) / math.sinh(0.5 * n * rho)
    )


def _thomas_solve(delta: float, theta: float, m: int) -> list[complex]:
    """Tridiagonal solve: diag 2*delta, off-diag -1, rhs (e^{-i theta},0,..,0,1)."""
    d = [2.0 * delta] * m
    rhs = [0.0 + 0.0j] * m
    rhs[0] = cmath.exp(-1j * theta)
    rhs[-1] += 1.0
    # forward elimination with the constant -1 off-diagonals
    for i in range(1, m):
        w = -1.0 / d[i - 1]
        d[i] = d[i] - w * (-1.0)
        rhs[i] = rhs[i] - w * rhs[i - 1]
    out = [0.0 + 0.0j] * m
    out[-1] = rhs[-1] / d[-1]
    for i in range(m - 2, -1, -1):
        out[i] = (rhs[i] - (-1.0) * out[i + 1]) / d[i]
    return out


def solve_coefficients(p: ModelParams, theta: float) -> BetheSolution:
    """Droplet coefficients and energy at quasimomentum theta.

    n >= 3 runs the generic dual-route construction; n = 1, 2 use their
    explicit forms.  theta = -pi with even n switches the eigenfunction to
    the hypersurface-supported form; with odd n the generic path is used and
    verified to stay nondegenerate.
    """
    theta = normalize_theta(theta)
    n, rho = p.n, p.rho

    if n == 1:
        return BetheSolution(
            theta=theta, n=1, delta=p.delta, coefficients=(), b_values=(),
            c_plus=0.0 + 0.0j, energy=droplet_energy(p, theta),
            special_case=SINGLE_PARTICLE,
        )
    if n == 2:
        a1 = (1.0 + cmath.exp(-1j * theta)) / (2.0 * p.delta)
        special = TWO_PARTICLE
        if theta == -math.pi:
            special = THETA_MINUS_PI_EVEN
        return BetheSolution(
            theta=theta, n=2, delta=p.delta, coefficients=(a1,),
            b_values=(cmath.exp(1j * theta / 2.0) * a1,),
            c_plus=_c_plus(n, rho, theta), energy=droplet_energy(p, theta),
            special_case=special,
        )

    m = n - 1
    direct = _thomas_solve(p.delta, theta, m)
    closed = [_closed_form_coefficient(n, rho, theta, k) for k in range(1, n)]
    mismatch = max(abs(d - c) for d, c in zip(direct, closed))
    if mismatch > DUAL_ROUTE_TOL:
        raise DualRouteMismatch(
            f"tridiagonal solve vs closed form differ by {mismatch:.3e} "
            f"(n={n}, delta={p.delta}, theta={theta})"
        )

    special = GENERIC
    if theta == -math.pi:
        if n % 2 == 0:
            special = THETA_MINUS_PI_EVEN
        else:
            # odd n: the generic product must stay nondegenerate
            if min(abs(a) for a in closed) == 0.0:
                raise DualRouteMismatch(
                    f"generic construction degenerates at theta=-pi for odd n={n}"
                )

    energy = droplet_energy(p, theta, _coefficients=closed)
    phase = cmath.exp(1j * theta / 2.0)
    return BetheSolution(
        theta=theta, n=n, delta=p.delta, coefficients=tuple(closed),
        b_values=tuple(phase * a for a in closed),
        c_plus=_c_plus(n, rho, theta), energy=energy, special_case=special,
    )


def _c_plus(n: int, rho: float, theta: float) -> complex:
    return complex(
        math.cos(0.5 * theta) / (2.0 * math.cosh(0.5 * n * rho)),
        -math.sin(0.5 * theta) / (2.0 * math.sinh(0.5 * n * rho)),
    )


def droplet_energy(p: ModelParams, theta: float, _coefficients=None) -> float:
    """Droplet dispersion E_N(theta) = tanh(rho) (cosh(N rho) - cos theta) / sinh(N rho).

    For n >= 3 the value is cross-checked against evaluating the eigenvalue
    relation at the all-gaps-one site, E = 1 - (e^{i theta} a_1 + a_{N-1}) / (2 delta).
    """
    rho, n = p.rho, p.n
    energy = math.tanh(rho) * (math.cosh(n * rho) - math.cos(theta)) / math.sinh(n * rho)
    if n >= 3:
        coeffs = _coefficients
        if coeffs is None:
            theta_f = normalize_theta(theta)
            coeffs = [_closed_form_coefficient(n, rho, theta_f, k) for k in range(1, n)]
        site = 1.0 - (cmath.exp(1j * theta) * coeffs[0] + coeffs[-1]) / (2.0 * p.delta)
        if abs(site - energy) > DUAL_ROUTE_TOL:
            raise DualRouteMismatch(
                f"dispersion formula vs site evaluation differ by "
                f"{abs(site - energy):.3e} (n={n}, delta={p.delta}, theta={theta})"
            )
    elif n == 2:
        site = 1.0 - (1.0 + math.cos(theta)) / (2.0 * p.delta**2)
        if abs(site - energy) > DUAL_ROUTE_TOL:
            raise DualRouteMismatch(
                f"n=2 dispersion inconsistency: {abs(site - energy):.3e}"
            )
    return energy


def droplet_band(p: ModelParams) -> Band:
    """The droplet band: dispersion range between theta = 0 and theta = +-pi."""
    rho, n = p.rho, p.n
    t = math.tanh(rho) / math.sinh(n * rho)
    return Band(t * (math.cosh(n * rho) - 1.0), t * (math.cosh(n * rho) + 1.0))


def droplet_limit_point(delta: float) -> float:
    """Common point sqrt(1 - 1/delta^2) of all droplet bands (their N -> inf limit)."""
    return math.sqrt(1.0 - 1.0 / delta**2)
