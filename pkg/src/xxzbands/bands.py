"""Interval algebra for cluster bands, total cluster spectra, and gap reports.

Cluster bands are computed from the closed form
C_k(N) = (k-1) * delta_1 + delta_(N-k+1); a brute-force Minkowski union over
all k-part partitions is kept alongside as an independent oracle.

Known discrepancy: the printed three-particle two-cluster interval in the
source material disagrees with the closed form evaluated at k=2, N=3; this
package follows the closed form, which the partition oracle confirms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .bethe import Band, droplet_band, droplet_limit_point
from .hamiltonians import ModelParams

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class BandSet:
    """Sorted, pairwise disjoint bands (gap between consecutive > merge tol)."""

    bands: tuple[Band, ...]

    @staticmethod
    def merge(bands, tol: float = MERGE_TOL) -> "BandSet":
        """Union of arbitrary bands, merging overlapping or touching intervals."""
        ordered = sorted(bands, key=lambda b: (b.lo, b.hi))
        merged: list[Band] = []
        for b in ordered:
            if merged and b.lo <= merged[-1].hi + tol:
                if b.hi > merged[-1].hi:
                    merged[-1] = Band(merged[-1].lo, b.hi)
            else:
                merged.append(b)
        return BandSet(bands=tuple(merged))

    def __iter__(self):
        return iter(self.bands)

    def __len__(self) -> int:
        return len(self.bands)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(b.contains(x, tol) for b in self.bands)

    def covers(self, other: "BandSet", tol: float = MERGE_TOL) -> bool:
        """Every band of `other` lies inside some band of self."""
        return all(
            any(s.lo - tol <= b.lo and b.hi <= s.hi + tol for s in self.bands)
            for b in other.bands
        )

    def close_to(self, other: "BandSet", tol: float = MERGE_TOL) -> bool:
        return len(self) == len(other) and all(
            abs(a.lo - b.lo) <= tol and abs(a.hi - b.hi) <= tol
            for a, b in zip(self.bands, other.bands)
        )


def partitions(n: int, k: int) -> list[tuple[int, ...]]:
    """All partitions of n into exactly k parts, non-increasing, lexicographically
    descending.  Minkowski sums are permutation-invariant, so unordered
    representatives suffice."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, parts: int, cap: int, acc: tuple[int, ...]) -> None:
        if parts == 1:
            if 1 <= remaining <= cap:
                out.append(acc + (remaining,))
            return
        # largest part first; each later part can't exceed it and must leave
        # room for the rest
        for first in range(min(cap, remaining - (parts - 1)), 0, -1):
            if first * parts >= remaining:
                rec(remaining - first, parts - 1, first, acc + (first,))

    rec(n, k, n, ())
    return out


def cluster_band(p: ModelParams, k: int) -> Band:
    """Closed-form k-cluster band for N = p.n particles."""
    if not 1 <= k <= p.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={p.n}")
    single = droplet_band(p.with_(n=1))
    rest = droplet_band(p.with_(n=p.n - k + 1))
    return single.repeated(k - 1) + rest


def cluster_band_minkowski(p: ModelParams, k: int) -> BandSet:
    """Brute-force oracle: union of droplet-band Minkowski sums over all
    k-part partitions of N."""
    sums = []
    for parts in partitions(p.n, k):
        total = Band(0.0, 0.0)
        for part in parts:
            total = total + droplet_band(p.with_(n=part))
        sums.append(total)
    return BandSet.merge(sums)


def total_cluster_spectrum(p: ModelParams) -> BandSet:
    """C(N): merged union of the k-cluster bands, k = 1..N."""
    return BandSet.merge(cluster_band(p, k) for k in range(1, p.n + 1))


def magnon_ladder(delta: float, n_max: int) -> BandSet:
    """{0} together with the bands [k(1 - 1/delta), k(1 + 1/delta)], k <= n_max."""
    bands = [Band(0.0, 0.0)]
    bands += [Band(k * (1.0 - 1.0 / delta), k * (1.0 + 1.0 / delta)) for k in range(1, n_max + 1)]
    return BandSet.merge(bands)


def xxz_cluster_union(p: ModelParams, n_max: int) -> BandSet:
    """{0} plus the union of total cluster spectra over all N <= n_max.

    Equals :func:`magnon_ladder` exactly; both constructions are exposed so
    the identity can be checked numerically.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bands = [Band(0.0, 0.0)]
    for n in range(1, n_max + 1):
        bands.extend(total_cluster_spectrum(p.with_(n=n)))
    return BandSet.merge(bands)


@dataclass(frozen=True)
class GapReport:
    """Analytic enclosure and droplet-gap summary for one (delta, N)."""

    delta: float
    n: int
    enclosure: tuple[Band, ...]           # [k - N/delta, k + N/delta], k = 1..N
    enclosure_disjoint: bool              # true iff delta > 2N
    droplet_band: Band
    droplet_gap: tuple[float, float]      # (max droplet band, 2 - 2/delta)
    droplet_gap_nonempty: bool
    chain_gap_width: float                # 1 - 3/delta, meaningful for delta > 3
    uniform_gap_asserted: bool            # n >= 2 and delta > 2

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "n": self.n,
            "enclosure": [[b.lo, b.hi] for b in self.enclosure],
            "enclosure_disjoint": self.enclosure_disjoint,
            "droplet_band": [self.droplet_band.lo, self.droplet_band.hi],
            "droplet_gap": list(self.droplet_gap),
            "droplet_gap_nonempty": self.droplet_gap_nonempty,
            "chain_gap_width": self.chain_gap_width,
            "uniform_gap_asserted": self.uniform_gap_asserted,
        }


def analytic_gap_report(p: ModelParams) -> GapReport:
    """Enclosure bands, their disjointness, and the gap above the droplet band."""
    n, delta = p.n, p.delta
    enclosure = tuple(Band(k - n / delta, k + n / delta) for k in range(1, n + 1))
    disjoint = all(
        enclosure[i].hi < enclosure[i + 1].lo for i in range(len(enclosure) - 1)
    )
    db = droplet_band(p)
    gap_hi = 2.0 - 2.0 / delta
    return GapReport(
        delta=delta,
        n=n,
        enclosure=enclosure,
        enclosure_disjoint=disjoint,
        droplet_band=db,
        droplet_gap=(db.hi, gap_hi),
        droplet_gap_nonempty=gap_hi > db.hi,
        chain_gap_width=1.0 - 3.0 / delta,
        uniform_gap_asserted=(n >= 2 and delta > 2.0),
    )


def band_table(p: ModelParams, n_max: int) -> list[dict]:
    """Flat rows (N, k, lo, hi) of all cluster bands up to n_max particles."""
    rows = []
    for n in range(1, n_max + 1):
        pn = p.with_(n=n)
        for k in range(1, n + 1):
            b = cluster_band(pn, k)
            rows.append({"n": n, "k": k, "lo": b.lo, "hi": b.hi})
    return rows


def bandset_to_json(bs: BandSet, **params) -> str:
    return json.dumps(
        {"params": params, "bands": [[b.lo, b.hi] for b in bs.bands]},
        sort_keys=True,
    )


def common_point(delta: float, k: int) -> float:
    """k * sqrt(1 - 1/delta^2): the shared point of every k-cluster band."""
    return k * droplet_limit_point(delta)


__all__ = [
    "Band",
    "BandSet",
    "GapReport",
    "analytic_gap_report",
    "band_table",
    "cluster_band",
    "cluster_band_minkowski",
    "common_point",
    "magnon_ladder",
    "partitions",
    "total_cluster_spectrum",
    "xxz_cluster_union",
]
