import math

import numpy as np
import pytest

from xxzbands.bethe import droplet_band, solve_coefficients
from xxzbands.hamiltonians import (
    ModelParams,
    SparseHermitian,
    build_fiber,
    build_lattice_xn,
    build_spin_sector,
    norm_bound,
)
from xxzbands.spectra import (
    DimensionOverCap,
    bethe_fiber_residual,
    dense_spectrum,
    enclosure_bands,
    enclosure_check,
    extremal_eigenvalues,
    fiber_sweep,
    gap_certificate,
    hvz_check,
    hvz_window_scan,
    lanczos_lowest,
)


def _scalar(value: float) -> SparseHermitian:
    return SparseHermitian(
        dim=1, rows=np.array([0]), cols=np.array([0]),
        vals=np.array([value + 0.0j]), basis=None, tag="scalar",
    )


def test_dense_trivial_scalar():
    res = dense_spectrum(_scalar(0.0))
    assert res.eigenvalues.tolist() == [0.0]


def test_dense_two_site_single_magnon():
    h = build_spin_sector(ModelParams(delta=2.0, n=1), (1, 2))
    res = dense_spectrum(h)
    assert np.allclose(res.eigenvalues, [0.25, 0.75], atol=1e-14)


def test_dense_fiber_zone_edge_is_diagonal():
    h = build_fiber(ModelParams(delta=2.0, n=2), -math.pi, 5)
    res = dense_spectrum(h)
    assert np.allclose(res.eigenvalues, [1, 2, 2, 2, 2], atol=1e-14)


def test_dense_cap_raises():
    h = build_lattice_xn(ModelParams(delta=2.0, n=2), (1, 30))
    with pytest.raises(DimensionOverCap, match="extremal"):
        dense_spectrum(h, cap=100)


def test_lanczos_agrees_with_dense():
    for delta, n, window in ((2.0, 2, 45), (1.5, 3, 16), (4.0, 2, 40)):
        h = build_lattice_xn(ModelParams(delta=delta, n=n), (1, window))
        dense = dense_spectrum(h)
        low = lanczos_lowest(h, 4)
        assert np.abs(low.eigenvalues - dense.eigenvalues[:4]).max() <= 1e-9
        high = extremal_eigenvalues(h, 3, end="highest")
        assert np.abs(high.eigenvalues - dense.eigenvalues[-3:]).max() <= 1e-9


def test_lanczos_complex_matrix():
    h = build_fiber(ModelParams(delta=2.0, n=3), 0.9, 25)
    dense = dense_spectrum(h)
    low = lanczos_lowest(h, 2)
    assert np.abs(low.eigenvalues - dense.eigenvalues[:2]).max() <= 1e-9


def test_lanczos_determinism():
    h = build_lattice_xn(ModelParams(delta=2.0, n=2), (1, 40))
    a = lanczos_lowest(h, 2)
    b = lanczos_lowest(h, 2)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert a.meta["iterations"] == b.meta["iterations"]


def test_lanczos_exhausts_small_space():
    # dimension smaller than the iteration budget: exact spectrum via breakdown
    h = build_lattice_xn(ModelParams(delta=2.0, n=1), (1, 6))
    low = lanczos_lowest(h, 6)
    dense = dense_spectrum(h)
    assert np.abs(low.eigenvalues - dense.eigenvalues).max() <= 1e-9


def test_window_compression_bounds():
    p = ModelParams(delta=2.0, n=2)
    band = droplet_band(p)
    prev = math.inf
    for window in (20, 60, 120):
        h = build_lattice_xn(p, (1, window))
        low = lanczos_lowest(h, 1, maxiter=400, strict=False).eigenvalues[0]
        assert low >= band.lo - 1e-12
        assert low <= prev + 1e-12
        prev = low
    assert prev - band.lo <= 1e-3
    high = extremal_eigenvalues(
        build_lattice_xn(p, (1, 60)), 1, end="highest"
    ).eigenvalues[0]
    assert high <= norm_bound(p) + 1e-12


def test_bethe_vector_interior_residual():
    for n in (2, 3):
        for theta in (-math.pi, -0.4, 1.3):
            r = bethe_fiber_residual(ModelParams(delta=2.0, n=n), theta, 30)
            assert r["interior_residual"] <= 1e-13


def test_fiber_sweep_matches_dispersion():
    p = ModelParams(delta=2.0, n=2)
    rows = fiber_sweep(p, [0.0, math.pi / 2], 60, k_low=2)
    row0 = rows[0]
    assert row0["analytic_energy"] == pytest.approx(0.75, abs=1e-13)
    assert abs(row0["lowest_minus_analytic"]) <= 1e-8
    # second eigenvalue sits near the two-particle continuum edge
    theta = math.pi / 2
    edge = 2.0 * (1.0 - math.sqrt((1.0 + math.cos(theta)) / (2.0 * p.delta**2)))
    assert rows[1]["eigenvalues"][1] >= edge - 0.05


def test_gap_certificate_dense_path():
    cert = gap_certificate(ModelParams(delta=4.0, n=3), 0.0, 30)
    assert cert.method == "dense"
    assert cert.threshold == pytest.approx(1.5)
    assert cert.below_threshold_count == 1
    assert cert.min_eig_with_projector >= 1.5 - 1e-10
    assert cert.bound_holds
    assert cert.theorem_applicable
    assert cert.alpha_at_droplet_site == pytest.approx(2.0 - 0.25)
    assert cert.alpha_min_elsewhere >= 1.5 - 1e-12
    assert cert.lowest_eigenvalue == pytest.approx(cert.analytic_energy, abs=1e-10)


def test_gap_certificate_is_diagnostic_below_validity():
    cert = gap_certificate(ModelParams(delta=1.5, n=2), 0.0, 20)
    assert not cert.theorem_applicable
    # empirical counts are still reported; here the droplet energy 0.555...
    # sits below the (now meaningless) threshold 2/3
    assert cert.threshold == pytest.approx(2.0 / 3.0)
    assert cert.lowest_eigenvalue < cert.threshold
    assert cert.below_threshold_count >= 1
    json_text = cert.to_json()
    assert '"theorem_applicable": false' in json_text


def test_enclosure_on_dense_spectra():
    for n in (1, 2, 3):
        p = ModelParams(delta=2.0, n=n)
        h = build_lattice_xn(p, (1, 14))
        eigs = dense_spectrum(h).eigenvalues
        assert enclosure_check(p, eigs, slack=1e-12)
    assert len(enclosure_bands(ModelParams(delta=30.0, n=2)).bands) == 2


def test_hvz_residual_decomposition_is_exact():
    rep = hvz_check(ModelParams(delta=2.0, n=3), 1, 12)
    assert rep["norm"] == pytest.approx(1.0, abs=1e-12)
    assert rep["decomposition_defect"] <= 1e-12
    r1, r2 = rep["component_residuals"]
    assert rep["residual"] == pytest.approx(math.hypot(r1, r2), abs=1e-12)


def test_hvz_residual_shrinks_with_window():
    rows = hvz_window_scan(ModelParams(delta=2.0, n=2), 1, windows=(8, 16))
    assert rows[1]["residual"] <= rows[0]["residual"] + 1e-12
    # the two free particles converge onto min(delta_1 + delta_1) = 1
    assert rows[1]["energy"] == pytest.approx(1.0, abs=0.05)


def test_hvz_rejects_bad_split():
    with pytest.raises(ValueError):
        hvz_check(ModelParams(delta=2.0, n=2), 2, 10)
    with pytest.raises(ValueError):
        hvz_check(ModelParams(delta=2.0, n=3), 1, 10, total_window=15)
