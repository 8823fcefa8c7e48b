"""Random transversal-field ensembles: sampling, rigor checks, localization data.

Per-sample randomness comes from an independent child stream of a seeded
PCG64 generator, derived by hashing (master_seed, sample index).  Results are
therefore bit-identical across runs and across any parallel schedule.

Two finite-volume facts are asserted per sample: the field is a nonnegative
diagonal, so the ground energy never drops below the fieldless droplet-band
minimum; and every eigenvalue stays inside the field-shifted band enclosure.
Ground-energy statistics and inverse participation ratios are reported as
data only — no localization thresholds are asserted.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bethe import droplet_band
from .hamiltonians import ModelParams, Window, build_lattice_xn
from .spectra import DENSE_CAP, dense_spectrum, enclosure_check, lanczos_lowest

UNIFORM = "uniform"
TWO_POINT = "two_point"
PRNG_NAME = "numpy.random.PCG64 via SeedSequence(master_seed, spawn_key=(index,))"


@dataclass(frozen=True)
class FieldSpec:
    """Distribution of the i.i.d. on-site field.

    uniform: nu_x ~ U[0, nu_max].  two_point: nu_x = nu_max with probability
    p_high, else 0.
    """

    kind: str
    nu_max: float
    p_high: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in (UNIFORM, TWO_POINT):
            raise ValueError(f"unknown field distribution {self.kind!r}")
        if self.nu_max < 0:
            raise ValueError(f"nu_max must be nonnegative, got {self.nu_max}")
        if not 0.0 <= self.p_high <= 1.0:
            raise ValueError(f"p_high must lie in [0, 1], got {self.p_high}")


@dataclass(frozen=True)
class FieldSample:
    """One realization of the random field on a window."""

    window: Window
    values: tuple[float, ...]
    spec: FieldSpec
    master_seed: int
    index: int

    def as_map(self) -> dict[int, float]:
        a, _ = self.window
        return {a + i: v for i, v in enumerate(self.values)}


def sample_field(
    spec: FieldSpec, window: Window, master_seed: int, index: int
) -> FieldSample:
    """Deterministic field draw; the stream depends only on (seed, index)."""
    a, b = window
    sites = b - a + 1
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    rng = np.random.Generator(np.random.PCG64(seq))
    if spec.kind == UNIFORM:
        values = rng.uniform(0.0, spec.nu_max, size=sites)
    else:
        values = np.where(rng.random(sites) < spec.p_high, spec.nu_max, 0.0)
    return FieldSample(
        window=window, values=tuple(float(v) for v in values),
        spec=spec, master_seed=master_seed, index=index,
    )


def ipr(v: np.ndarray) -> float:
    """Inverse participation ratio of a normalized vector: sum |v_i|^4."""
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"vector norm {nrm} differs from 1 beyond 1e-10")
    return float(np.sum(np.abs(v) ** 4))


@dataclass
class EnsembleStats:
    """Per-sample records plus aggregates; records keyed by sample index."""

    params: dict
    records: list[dict]
    aggregates: dict = field(default_factory=dict)

    def all_passed(self) -> bool:
        return all(r["lower_bound_ok"] and r["enclosure_ok"] for r in self.records)

    def to_json(self) -> str:
        return json.dumps(
            {"params": self.params, "aggregates": self.aggregates,
             "records": self.records},
            sort_keys=True,
        )


def _one_sample(args) -> dict:
    p_dict, spec, window, master_seed, index = args
    p = ModelParams(**p_dict)
    sample = sample_field(spec, window, master_seed, index)
    p_field = p.with_(nu=sample.as_map())
    h = build_lattice_xn(p_field, window)

    # the rigor checks need the true spectrum (lower bounds cannot be
    # certified from Ritz values), so the sector must fit the dense path
    if h.dim > DENSE_CAP:
        raise ValueError(
            f"sector dimension {h.dim} exceeds the dense cap {DENSE_CAP}; "
            f"shrink the window"
        )
    eigs = dense_spectrum(h).eigenvalues
    enclosure_ok = enclosure_check(
        p, eigs, field_shift=p.n * spec.nu_max, slack=1e-12
    )
    max_abs = float(np.max(np.abs(eigs)))

    # ground vector only feeds the IPR diagnostic; a short non-strict Lanczos
    # run is accurate under disorder and adequate without it
    low = lanczos_lowest(h, 1, maxiter=min(h.dim, 150), strict=False)
    ground = low.eigenvectors[:, 0]

    band = droplet_band(p)
    ground = ground / np.linalg.norm(ground)
    return {
        "index": index,
        "min_eigenvalue": float(eigs[0]),
        "max_abs_eigenvalue": max_abs,
        "lower_bound_ok": bool(eigs[0] >= band.lo - 1e-12),
        "enclosure_ok": bool(enclosure_ok),
        "ipr": ipr(ground),
        "field_mean": float(np.mean(sample.values)),
        "field_max": float(np.max(sample.values)),
    }


def ensemble_run(
    p: ModelParams,
    spec: FieldSpec,
    window: Window,
    n_samples: int,
    master_seed: int,
    n_jobs: int = 1,
) -> EnsembleStats:
    """Draw n_samples fields, diagonalize each sector, check the rigor bounds.

    Results are merged by sample index, so the parallelism degree never
    changes the output.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if p.nu:
        raise ValueError("pass the field through spec, not through ModelParams")
    args = [
        ({"delta": p.delta, "n": p.n}, spec, window, master_seed, i)
        for i in range(n_samples)
    ]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_one_sample, args))
    else:
        records = [_one_sample(a) for a in args]
    records.sort(key=lambda r: r["index"])

    mins = np.array([r["min_eigenvalue"] for r in records])
    iprs = np.array([r["ipr"] for r in records])
    stats = EnsembleStats(
        params={
            "delta": p.delta, "n": p.n, "window": list(window),
            "spec": {"kind": spec.kind, "nu_max": spec.nu_max,
                     "p_high": spec.p_high},
            "n_samples": n_samples, "master_seed": master_seed,
            "prng": PRNG_NAME,
        },
        records=records,
    )
    stats.aggregates = {
        "min_eigenvalue": {
            "mean": float(mins.mean()), "min": float(mins.min()),
            "max": float(mins.max()),
            "q25": float(np.quantile(mins, 0.25)),
            "q75": float(np.quantile(mins, 0.75)),
        },
        "ipr": {
            "mean": float(iprs.mean()), "min": float(iprs.min()),
            "max": float(iprs.max()),
        },
        "all_passed": stats.all_passed(),
    }
    return stats


__all__ = [
    "EnsembleStats",
    "FieldSample",
    "FieldSpec",
    "PRNG_NAME",
    "TWO_POINT",
    "UNIFORM",
    "ensemble_run",
    "ipr",
    "sample_field",
]
