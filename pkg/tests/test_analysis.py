import numpy as np
import pytest

from hermitize.analysis import (classify_reality, continuum_convergence,
                                critical_zeta, endpoint_locus,
                                metric_positivity_sweep, sweep_xi,
                                sweep_zeta)
from hermitize.errors import SingularParameters
from hermitize.model import ModelParams
from hermitize.spectrum import solve_spectrum

from _oracles import max_pair_distance


def test_classify_reality_counts_and_merge_flags():
    roots = np.array([0.2, 0.70002, 0.70006, 1.5 + 0.3j, 1.5 - 0.3j])
    c = classify_reality(roots)
    assert c.n_real == 3
    assert c.n_complex_pairs == 1
    assert not c.all_real
    assert c.near_merge.tolist() == [False, True, True, False, False]


def test_classify_reality_all_real_far_apart():
    c = classify_reality(np.array([0.1, 0.5, 0.9]))
    assert c.all_real and not c.near_merge.any()


def test_sweep_xi_matches_pointwise_solves():
    res = sweep_xi(5, 0.2, 0.0, 1.5, 7)
    assert res.axis == "xi" and res.fixed == {"zeta": 0.2}
    assert res.y_roots.shape == (7, 5)
    for i, xi in enumerate(res.values):
        spec = solve_spectrum(ModelParams(n=5, xi=float(xi), zeta=0.2))
        assert max_pair_distance(res.y_roots[i], spec.y_roots) < 1e-12


def test_sweep_zeta_matches_pointwise_solves():
    res = sweep_zeta(4, 0.6, 0.0, 0.8, 5)
    assert res.axis == "zeta" and res.fixed == {"xi": 0.6}
    for i, zeta in enumerate(res.values):
        spec = solve_spectrum(ModelParams(n=4, xi=0.6, zeta=float(zeta)))
        assert max_pair_distance(res.y_roots[i], spec.y_roots) < 1e-12


def test_sweep_zeta_pole_detection():
    with pytest.raises(SingularParameters):
        sweep_zeta(4, 0.0, 0.0, 2.0, 5)  # grid point hits zeta = 1 exactly
    # nonzero xi passes through zeta = 1 without singularity
    res = sweep_zeta(4, 0.5, 0.0, 2.0, 5)
    assert res.y_roots.shape == (5, 4)


def test_sweep_thread_count_does_not_change_results(monkeypatch):
    base = sweep_xi(6, 0.3, 0.0, 2.0, 40)
    monkeypatch.setenv("HERMITIZE_THREADS", "3")
    threaded = sweep_xi(6, 0.3, 0.0, 2.0, 40)
    assert np.array_equal(base.y_roots, threaded.y_roots)


def test_sweep_rejects_bad_thread_env(monkeypatch):
    monkeypatch.setenv("HERMITIZE_THREADS", "zero")
    with pytest.raises(ValueError):
        sweep_xi(4, 0.1, 0.0, 1.0, 8)
    monkeypatch.setenv("HERMITIZE_THREADS", "0")
    with pytest.raises(ValueError):
        sweep_xi(4, 0.1, 0.0, 1.0, 8)


def test_critical_zeta_two_site_analytic():
    # n = 2 complexifies iff max_xi omega(xi, zeta) = 1/(2(1 - zeta)) > 1,
    # so the critical detuning is exactly 1/2.
    result = critical_zeta(2, xi_max=2.0, xi_steps=400, zeta_tol=1e-4)
    assert result.value == pytest.approx(0.5, abs=1e-3)
    assert result.bracket[0] < 0.5 + 1e-3
    assert result.n == 2


def test_critical_zeta_invalid_bracket():
    with pytest.raises(ValueError):
        critical_zeta(4, xi_max=2.0, xi_steps=100, bracket=(0.6, 0.75))


def test_positivity_sweep_band_two_site():
    res = metric_positivity_sweep("band", 2, -1.5, 1.5, 31)
    assert res.loss_abs == pytest.approx(1.0, abs=1e-5)
    assert res.edge_positive == pytest.approx(1.0, abs=1e-5)
    assert res.edge_negative == pytest.approx(-1.0, abs=1e-5)
    # min eigenvalue of the 2 x 2 family is exactly 1 - |omega|
    assert np.allclose(res.min_eigenvalues, 1 - np.abs(res.values),
                       atol=1e-12)


def test_positivity_sweep_validates_family():
    with pytest.raises(ValueError):
        metric_positivity_sweep("unknown", 2, -1, 1, 5)
    with pytest.raises(ValueError):
        metric_positivity_sweep("n3_special", 4, -1, 1, 5)


def test_positivity_sweep_all_positive_leaves_edges_empty():
    res = metric_positivity_sweep("n4_special", 4, -3.0, 3.0, 11)
    assert res.loss_abs is None
    assert res.edge_positive is None and res.edge_negative is None
    assert np.all(res.min_eigenvalues > 0)


def test_continuum_closed_form_matches_solver():
    # The table's energies must agree with an actual hard-wall solve.
    table = continuum_convergence([5], levels=3)
    spec = solve_spectrum(ModelParams(n=9, omega=0.0, rho=-1.0))
    lowest = np.sort(spec.energies.real)[:3]
    assert np.allclose(table.energies[0], lowest, atol=1e-10)


def test_continuum_richardson_requires_doubling():
    table = continuum_convergence([50, 75], levels=2)
    with pytest.raises(ValueError):
        table.richardson()
    with pytest.raises(ValueError):
        continuum_convergence([1], levels=2)


def test_continuum_extrapolation_hits_box_levels():
    table = continuum_convergence([25, 50, 100], levels=2)
    extrap = table.richardson()
    assert np.max(np.abs(extrap - table.targets) / table.targets) < 1e-4


def test_endpoint_locus_points_solve_secular():
    # Points on each branch must place a root at y = +1 / y = -1.
    loc = endpoint_locus(5, t=np.array([0.21, 0.55, 0.84]))
    for branch, target in ((loc.y_plus, 1.0), (loc.y_minus, -1.0)):
        for zeta, xi in zip(branch.zeta, branch.xi):
            spec = solve_spectrum(ModelParams(n=5, xi=float(xi),
                                              zeta=float(zeta)))
            assert np.min(np.abs(spec.y_roots - target)) < 1e-9


def test_endpoint_locus_geometry():
    loc = endpoint_locus(7, samples=9)
    # y = +1 branch is the circle zeta^2 + xi^2 = 2 zeta / (n + 1)
    lhs = loc.y_plus.zeta ** 2 + loc.y_plus.xi ** 2
    assert np.allclose(lhs, 2 * loc.y_plus.zeta / 8.0, atol=1e-14)
    # both branches start and end on the xi = 0 axis
    assert loc.y_plus.xi[0] == 0.0 and loc.y_plus.xi[-1] == pytest.approx(0.0, abs=1e-8)
    assert loc.y_minus.xi[0] == pytest.approx(0.0, abs=1e-8)
    assert loc.y_minus.xi[-1] == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(ValueError):
        endpoint_locus(5, t=np.array([-0.1]))
