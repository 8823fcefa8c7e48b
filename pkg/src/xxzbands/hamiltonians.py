"""Sparse Hermitian builders for the four N-magnon Hamiltonian representations.

All four builders produce the same physics on matched truncations:

* ``build_spin_sector``   -- the finite chain restricted to N down-spins,
* ``build_lattice_xn``    -- the operator on ordered N-tuples (window
  compression of the infinite-volume operator),
* ``build_relative``      -- anchor + gap coordinates (translation-invariant
  form, field-free only),
* ``build_fiber``         -- the Bloch fiber at quasimomentum theta acting on
  gap coordinates alone.

Entries are stored once per unordered index pair (row <= col); the conjugate
transpose is completed at conversion time, so Hermiticity is structural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .basis import BasisIndex, Window, enumerate_window_basis, from_relative

FieldMap = dict[int, float]


class RepresentationMismatchError(ValueError):
    """Raised when a builder is asked for something its representation cannot express."""


@dataclass(frozen=True)
class ModelParams:
    """Anisotropy, particle number, and optional on-site field.

    delta must exceed 1 (Ising phase); rho = arccosh(delta) is the decay rate
    entering every closed-form band expression.  The in-plane coupling is
    fixed to 1; it is not a parameter.
    """

    delta: float
    n: int
    nu: FieldMap | None = None

    def __post_init__(self) -> None:
        if not self.delta > 1.0:
            raise ValueError(f"anisotropy must satisfy delta > 1, got {self.delta}")
        if self.n < 1:
            raise ValueError(f"particle number must be >= 1, got {self.n}")
        if self.nu is not None and any(v < 0 for v in self.nu.values()):
            raise ValueError("field values must be nonnegative")

    @property
    def rho(self) -> float:
        # log form rather than acosh: stable evaluation near delta = 1.
        return math.log(self.delta + math.sqrt(self.delta**2 - 1.0))

    def nu_at(self, x: int) -> float:
        if self.nu is None:
            return 0.0
        return self.nu.get(x, 0.0)

    @property
    def nu_max(self) -> float:
        if not self.nu:
            return 0.0
        return max(self.nu.values())

    def with_(self, **changes) -> "ModelParams":
        merged = {"delta": self.delta, "n": self.n, "nu": self.nu}
        merged.update(changes)
        return ModelParams(**merged)


@dataclass
class SparseHermitian:
    """Hermitian matrix stored as one entry per unordered index pair.

    rows[k] <= cols[k] for every stored entry; diagonal values are real.
    Duplicate (row, col) pairs are summed.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    basis: object
    tag: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if np.any(self.rows > self.cols):
            raise ValueError("entries must be stored with row <= col")
        diag = self.rows == self.cols
        if np.any(np.abs(self.vals[diag].imag) > 0):
            raise ValueError("diagonal entries must be real")

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.vals.imag == 0))

    def to_csr(self) -> sp.csr_matrix:
        """Hermitian completion: upper triangle plus its conjugate transpose."""
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.vals, np.conj(self.vals[off])])
        if self.is_real:
            v = v.real
        m = sp.coo_matrix((v, (r, c)), shape=(self.dim, self.dim))
        return m.tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.to_csr() @ v

    def with_diagonal_shift(self, shift: np.ndarray, tag_suffix: str = "+diag") -> "SparseHermitian":
        """New matrix with `shift` (real, length dim) added to the diagonal."""
        shift = np.asarray(shift, dtype=float)
        rows = np.concatenate([self.rows, np.arange(self.dim)])
        cols = np.concatenate([self.cols, np.arange(self.dim)])
        vals = np.concatenate([self.vals, shift.astype(self.vals.dtype)])
        return SparseHermitian(
            dim=self.dim, rows=rows, cols=cols, vals=vals,
            basis=self.basis, tag=self.tag + tag_suffix, meta=dict(self.meta),
        )


def _entries(dim, rows, cols, vals, basis, tag, dtype, meta=None) -> SparseHermitian:
    return SparseHermitian(
        dim=dim,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=dtype),
        basis=basis,
        tag=tag,
        meta=meta or {},
    )


def build_lattice_xn(p: ModelParams, window: Window) -> SparseHermitian:
    """Window compression of the N-body operator on ordered tuples.

    Diagonal at a configuration: N - (# adjacent pairs) + sum of field values
    at occupied sites.  Off-diagonal -1/(2 delta) between l1-next-neighbor
    configurations inside the window; hoppings that would leave the window
    are dropped while the diagonal is kept in full.
    """
    basis = enumerate_window_basis(p.n, window)
    a, b = window
    hop = -1.0 / (2.0 * p.delta)
    rows, cols, vals = [], [], []
    for i, c in enumerate(basis.configs):
        adjacent = sum(1 for u, v in zip(c, c[1:]) if v == u + 1)
        diag = p.n - adjacent + sum(p.nu_at(x) for x in c)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
        # right-moves only: each unordered neighbor pair is generated once
        for j, x in enumerate(c):
            y = x + 1
            if y > b or (j + 1 < p.n and c[j + 1] == y):
                continue
            moved = c[:j] + (y,) + c[j + 1:]
            k = basis.index[moved]
            lo, hi = (i, k) if i < k else (k, i)
            rows.append(lo)
            cols.append(hi)
            vals.append(hop)
    return _entries(basis.size, rows, cols, vals, basis, "lattice-XN", float,
                    meta={"window": window, "delta": p.delta, "n": p.n})


def build_spin_sector(p: ModelParams, chain: Window) -> SparseHermitian:
    """N-magnon block of the finite chain, summed over edges x..x+1.

    Per edge: -N_x N_{x+1} + N_x/2 + N_{x+1}/2 on the diagonal and
    -1/(2 delta) for a single spin hopping across the edge, plus the field
    term at every occupied site.  Boundary sites touch only one edge, so the
    diagonal carries a deficit of 1/2 per particle at a chain end relative to
    the window compression (see :func:`boundary_correction`).
    """
    first, last = chain
    if p.n > last - first + 1:
        raise ValueError(f"cannot place {p.n} particles on chain {chain}")
    basis = enumerate_window_basis(p.n, chain)
    hop = -1.0 / (2.0 * p.delta)
    rows, cols, vals = [], [], []
    for i, c in enumerate(basis.configs):
        occupied = set(c)
        diag = sum(p.nu_at(x) for x in c)
        for x in range(first, last):
            ox, oy = x in occupied, (x + 1) in occupied
            diag += 0.5 * ox + 0.5 * oy - (ox and oy)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
        for j, x in enumerate(c):
            y = x + 1
            if y > last or y in occupied:
                continue
            moved = c[:j] + (y,) + c[j + 1:]
            k = basis.index[moved]
            lo, hi = (i, k) if i < k else (k, i)
            rows.append(lo)
            cols.append(hi)
            vals.append(hop)
    return _entries(basis.size, rows, cols, vals, basis, "spin-sector", float,
                    meta={"chain": chain, "delta": p.delta, "n": p.n})


def boundary_correction(basis: BasisIndex) -> np.ndarray:
    """Diagonal +1/2 per particle sitting at either end of the window.

    Adding this to the spin-sector matrix reproduces the window compression
    of the infinite-volume operator entrywise.
    """
    a, b = basis.window
    return np.array(
        [0.5 * ((a in c) + (b in c)) for c in basis.configs], dtype=float
    )


@dataclass(frozen=True)
class RelativeBasis:
    """Anchor-plus-gaps configurations (x, n_1..n_m), gaps capped at gap_cap."""

    n: int
    x_window: Window
    gap_cap: int
    configs: tuple[tuple, ...]
    index: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.configs)


def _enumerate_relative(n: int, x_window: Window, gap_cap: int) -> RelativeBasis:
    import itertools

    a, b = x_window
    m = n - 1
    configs = tuple(
        (x,) + gaps
        for x in range(a, b + 1)
        for gaps in itertools.product(range(1, gap_cap + 1), repeat=m)
    )
    index = {c: i for i, c in enumerate(configs)}
    return RelativeBasis(n=n, x_window=x_window, gap_cap=gap_cap,
                         configs=configs, index=index)


def build_relative(p: ModelParams, x_window: Window, gap_cap: int) -> SparseHermitian:
    """Field-free operator in anchor + gap coordinates.

    Graph edges are the images of l1-neighbor moves of the ordered-tuple
    picture under the coordinate change; the vertex potential is
    1 + #(gaps >= 2).
    """
    if p.n < 2:
        raise ValueError("relative coordinates need n >= 2")
    if p.nu:
        raise RepresentationMismatchError(
            "relative representation requires translation invariance (zero field)"
        )
    basis = _enumerate_relative(p.n, x_window, gap_cap)
    a, b = x_window
    hop = -1.0 / (2.0 * p.delta)
    rows, cols, vals = [], [], []
    for i, rc in enumerate(basis.configs):
        x, gaps = rc[0], rc[1:]
        diag = 1 + sum(1 for g in gaps if g >= 2)
        rows.append(i)
        cols.append(i)
        vals.append(float(diag))
        coords = from_relative(x, gaps)
        for j in range(p.n):
            for step in (-1, 1):
                y = coords[j] + step
                if (j > 0 and y <= coords[j - 1]) or (j + 1 < p.n and y >= coords[j + 1]):
                    continue
                moved = coords[:j] + (y,) + coords[j + 1:]
                anchor = moved[0]
                new_gaps = tuple(v - u for u, v in zip(moved, moved[1:]))
                if not (a <= anchor <= b) or any(g > gap_cap for g in new_gaps):
                    continue
                k = basis.index[(anchor,) + new_gaps]
                if i < k:
                    rows.append(i)
                    cols.append(k)
                    vals.append(hop)
    return _entries(basis.size, rows, cols, vals, basis, "relative", float,
                    meta={"x_window": x_window, "gap_cap": gap_cap,
                          "delta": p.delta, "n": p.n})


@dataclass(frozen=True)
class FiberBasis:
    """Gap tuples (n_1..n_m) with 1 <= n_j <= gap_cap, mixed-radix indexed."""

    n: int
    gap_cap: int

    @property
    def m(self) -> int:
        return self.n - 1

    @property
    def size(self) -> int:
        return self.gap_cap**self.m

    def index(self, gaps: tuple[int, ...]) -> int:
        i = 0
        for g in gaps:
            if not 1 <= g <= self.gap_cap:
                raise ValueError(f"gap {g} outside 1..{self.gap_cap}")
            i = i * self.gap_cap + (g - 1)
        return i

    def config(self, i: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.m):
            digits.append(i % self.gap_cap + 1)
            i //= self.gap_cap
        return tuple(reversed(digits))

    def digits(self) -> np.ndarray:
        """(size, m) array of zero-based gap digits, vectorized decode."""
        idx = np.arange(self.size, dtype=np.int64)
        cols = []
        for j in range(self.m):
            stride = self.gap_cap ** (self.m - 1 - j)
            cols.append((idx // stride) % self.gap_cap)
        return np.stack(cols, axis=1)


def normalize_theta(theta: float) -> float:
    """Fold theta into [-pi, pi) by 2 pi periodicity, warning on wrap."""
    if -math.pi <= theta < math.pi:
        return theta
    folded = math.remainder(theta, 2.0 * math.pi)
    if folded >= math.pi:  # remainder returns (-pi, pi]; fold pi to -pi
        folded -= 2.0 * math.pi
    warnings.warn(
        f"quasimomentum {theta} folded to {folded} by 2*pi periodicity",
        stacklevel=2,
    )
    return folded


def build_fiber(p: ModelParams, theta: float, gap_cap: int) -> SparseHermitian:
    """Bloch fiber at quasimomentum theta on gap coordinates, Dirichlet-truncated.

    Hard cap n_j <= gap_cap with dropped hoppings; droplet eigenfunctions
    decay like delta^(-n), so the truncation error is exponentially small in
    gap_cap.
    """
    if p.n < 2:
        raise ValueError("fiber representation needs n >= 2")
    if gap_cap < 1:
        raise ValueError("gap_cap must be >= 1")
    theta = normalize_theta(theta)
    basis = FiberBasis(n=p.n, gap_cap=gap_cap)
    m, cap, dim = basis.m, gap_cap, basis.size
    hop = -1.0 / (2.0 * p.delta)
    digits = basis.digits()  # zero-based gaps
    idx = np.arange(dim, dtype=np.int64)
    strides = np.array([cap ** (m - 1 - j) for j in range(m)], dtype=np.int64)

    rows = [idx]
    cols = [idx]
    vals = [(1.0 + np.count_nonzero(digits >= 1, axis=1)).astype(complex)]

    def add(mask: np.ndarray, col_offset: int, value: complex) -> None:
        r = idx[mask]
        rows.append(r)
        cols.append(r + col_offset)
        vals.append(np.full(r.size, value, dtype=complex))

    # phase-carrying hop on the first gap: H[n, n + e_1] = -e^{i theta}/(2 delta)
    add(digits[:, 0] <= cap - 2, strides[0], hop * np.exp(1j * theta))
    # gap exchange n -> n - e_j + e_{j+1} for n_j >= 2 (stored with row < col
    # when strides[j] > strides[j+1], which the mixed radix guarantees)
    for j in range(m - 1):
        mask = (digits[:, j] >= 1) & (digits[:, j + 1] <= cap - 2)
        r = idx[mask]
        c = r - strides[j] + strides[j + 1]
        rows.append(np.minimum(r, c))
        cols.append(np.maximum(r, c))
        vals.append(np.full(r.size, hop, dtype=complex))
    # last gap stretch: H[n, n + e_m] = -1/(2 delta)
    add(digits[:, m - 1] <= cap - 2, strides[m - 1], hop)

    return _entries(
        dim,
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(vals),
        basis,
        "fiber",
        complex,
        meta={"theta": theta, "gap_cap": gap_cap, "delta": p.delta, "n": p.n},
    )


def norm_bound(p: ModelParams) -> float:
    """Upper bound N (1 + 1/delta + nu_max) on every builder's spectral radius."""
    return p.n * (1.0 + 1.0 / p.delta + p.nu_max)


def dump_coo(h: SparseHermitian, path) -> None:
    """Coordinate-list text dump (0-based; one stored entry per line)."""
    with open(path, "w") as f:
        f.write(f"# dim={h.dim} tag={h.tag} nnz_stored={len(h.vals)}\n")
        for key, value in sorted(h.meta.items()):
            f.write(f"# {key}={value}\n")
        f.write("# row col re im\n")
        for r, c, v in zip(h.rows, h.cols, h.vals):
            f.write(f"{r} {c} {v.real!r} {complex(v).imag!r}\n")
