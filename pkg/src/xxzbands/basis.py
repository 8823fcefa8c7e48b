"""Configuration-space enumeration, gap coordinates, and symmetry projectors.

The working basis everywhere is the set of strictly ordered integer N-tuples
inside a finite window.  The full tensor-product basis is only ever
materialized for small windows, to test the antisymmetrizer against the
ordered-tuple picture.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

Window = tuple[int, int]


class EmptyBasisError(ValueError):
    """Raised when a window is too short to hold the requested particles."""


def to_relative(config: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Map an ordered tuple (x1 < x2 < ... < xN) to (anchor, gaps).

    anchor = x1, gaps[i] = x[i+1] - x[i] >= 1.
    """
    if any(a >= b for a, b in zip(config, config[1:])):
        raise ValueError(f"coordinates not strictly increasing: {config}")
    anchor = config[0]
    gaps = tuple(b - a for a, b in zip(config, config[1:]))
    return anchor, gaps


def from_relative(anchor: int, gaps: tuple[int, ...]) -> tuple[int, ...]:
    """Inverse of :func:`to_relative`."""
    if any(g < 1 for g in gaps):
        raise ValueError(f"gaps must be positive: {gaps}")
    coords = [anchor]
    for g in gaps:
        coords.append(coords[-1] + g)
    return tuple(coords)


@dataclass(frozen=True)
class BasisIndex:
    """Bijection between ordered N-tuples in a window and 0..size-1.

    Enumeration is lexicographic, hence deterministic across runs and
    platforms.
    """

    n: int
    window: Window
    configs: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.configs)

    def __contains__(self, config: tuple[int, ...]) -> bool:
        return config in self.index


def enumerate_window_basis(n: int, window: Window) -> BasisIndex:
    """All ordered n-tuples with coordinates in [window[0], window[1]]."""
    a, b = window
    if n < 1:
        raise ValueError(f"need at least one particle, got n={n}")
    length = b - a + 1
    if length < n:
        raise EmptyBasisError(f"window {window} holds {length} sites < n={n}")
    configs = tuple(itertools.combinations(range(a, b + 1), n))
    index = {c: i for i, c in enumerate(configs)}
    return BasisIndex(n=n, window=window, configs=configs, index=index)


@dataclass(frozen=True)
class TensorBasis:
    """Full n-fold tensor basis over a window, indexed in mixed radix.

    Only intended for small windows (symmetrizer tests); the ordered-tuple
    basis is the working representation everywhere else.
    """

    n: int
    window: Window

    @property
    def sites(self) -> int:
        a, b = self.window
        return b - a + 1

    @property
    def size(self) -> int:
        return self.sites**self.n

    def index(self, config: tuple[int, ...]) -> int:
        a, _ = self.window
        i = 0
        for x in config:
            i = i * self.sites + (x - a)
        return i

    def config(self, i: int) -> tuple[int, ...]:
        a, _ = self.window
        digits = []
        for _ in range(self.n):
            digits.append(i % self.sites)
            i //= self.sites
        return tuple(a + d for d in reversed(digits))


def project_antisymmetric(v: np.ndarray, basis: TensorBasis) -> np.ndarray:
    """Orthogonal projection onto the antisymmetric subspace of window^n.

    (P_a v)(x) = (1/n!) sum_sigma sgn(sigma) v(x o sigma).
    """
    if v.shape != (basis.size,):
        raise ValueError(f"vector length {v.shape} does not match basis size {basis.size}")
    w = basis.sites
    tensor = v.reshape((w,) * basis.n)
    out = np.zeros_like(tensor)
    for perm in itertools.permutations(range(basis.n)):
        out = out + _perm_sign(perm) * np.transpose(tensor, perm)
    return (out / math.factorial(basis.n)).reshape(-1)


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign
