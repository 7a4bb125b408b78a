import numpy as np
import pytest

from hermitize.chebyshev import ChebCombo, eval_combo, eval_t, eval_u
from hermitize.chebyshev import _clenshaw_full

from _oracles import combo_monomial, polyval_low, t_monomial, u_monomial


def test_eval_u_matches_monomial_expansion():
    y = np.linspace(-2.5, 2.5, 41)
    for k in range(0, 15):
        expect = polyval_low(u_monomial(k), y)
        got = eval_u(k, y)
        assert np.max(np.abs(got - expect)) < 1e-10 * np.max(np.abs(expect))


def test_eval_t_matches_monomial_expansion():
    y = np.linspace(-2.5, 2.5, 41)
    for k in range(0, 15):
        expect = polyval_low(t_monomial(k), y)
        got = eval_t(k, y)
        assert np.max(np.abs(got - expect)) < 1e-10 * max(1.0, np.max(np.abs(expect)))


def test_trig_identities_inside_interval():
    theta = np.linspace(0.05, np.pi - 0.05, 37)
    y = np.cos(theta)
    for k in (0, 1, 2, 5, 11, 30):
        assert np.allclose(eval_t(k, y), np.cos(k * theta), atol=1e-12)
        assert np.allclose(eval_u(k, y),
                           np.sin((k + 1) * theta) / np.sin(theta),
                           atol=1e-10)


def test_u_recurrence_consistency_high_degree():
    # U_{k+1} - 2 y U_k + U_{k-1} must vanish relative to the term scale.
    y = np.linspace(-1.0, 1.0, 201)
    for k in (1, 16, 64, 255):
        lhs = eval_u(k + 1, y) - 2 * y * eval_u(k, y) + eval_u(k - 1, y)
        scale = np.maximum(1.0, np.abs(eval_u(k + 1, y)))
        assert np.max(np.abs(lhs) / scale) < 1e-12


def test_eval_u_boundary_degrees():
    y = np.array([0.3, -1.7])
    assert np.all(eval_u(-1, y) == 0)
    assert np.all(eval_u(0, y) == 1)
    with pytest.raises(ValueError):
        eval_u(-2, y)
    with pytest.raises(ValueError):
        eval_t(-1, y)


def test_combo_trims_trailing_negligible_coefficients():
    combo = ChebCombo([1.0, 2.0, 1e-301, 0.0])
    assert combo.degree == 1
    assert combo.coeffs.tolist() == [1.0, 2.0]
    # all-negligible input degenerates to the zero constant
    zero = ChebCombo([0.0, 0.0])
    assert zero.degree == 0


def test_combo_coeffs_are_read_only():
    combo = ChebCombo([1.0, 2.0])
    with pytest.raises(ValueError):
        combo.coeffs[0] = 5.0


def test_combo_leading_monomial_scale():
    # U_d has leading monomial coefficient 2^d.
    combo = ChebCombo([0.0, 0.0, 3.0])
    assert combo.leading_monomial == 3.0 * 4.0


def test_combo_rejects_empty_and_multidim():
    with pytest.raises(ValueError):
        ChebCombo([])
    with pytest.raises(ValueError):
        ChebCombo([[1.0, 2.0]])


def test_eval_combo_matches_direct_sum():
    rng = np.random.RandomState(11)
    coeffs = rng.randn(9)
    combo = ChebCombo(coeffs)
    y = rng.randn(25) + 1j * rng.randn(25)
    direct = sum(c * eval_u(k, y) for k, c in enumerate(coeffs))
    value, _ = eval_combo(combo, y)
    assert np.max(np.abs(value - direct)) < 1e-12 * np.max(np.abs(direct) + 1)


def test_eval_combo_derivative_matches_monomial_derivative():
    rng = np.random.RandomState(3)
    coeffs = rng.randn(7)
    combo = ChebCombo(coeffs)
    mono = combo_monomial(coeffs)
    dmono = [k * c for k, c in enumerate(mono)][1:]
    y = np.linspace(-2.0, 2.0, 31)
    _, deriv = eval_combo(combo, y)
    expect = polyval_low(dmono, y)
    assert np.max(np.abs(deriv - expect)) < 1e-10 * np.max(np.abs(expect) + 1)


def test_eval_combo_scalar_round_trip():
    combo = ChebCombo([1.0, 0.0, 1.0])
    value, deriv = eval_combo(combo, 0.5)
    assert isinstance(value, float) or isinstance(value, complex)
    # U_0 + U_2 at 0.5: 1 + (4*0.25 - 1) = 1
    assert value == pytest.approx(1.0, abs=1e-14)
    assert deriv == pytest.approx(4.0, abs=1e-14)


def test_clenshaw_noise_bounds_true_error():
    # The reported round-off bound must dominate the observed deviation
    # from an exact rational evaluation, including far outside [-1, 1].
    from fractions import Fraction

    rng = np.random.RandomState(5)
    coeffs = np.round(rng.randn(40) * 8)
    points = [Fraction(-1), Fraction(-3, 8), Fraction(0), Fraction(1, 2),
              Fraction(1), Fraction(3), Fraction(-7), Fraction(25, 2)]
    y = np.array([float(p) for p in points])
    value, _, noise = _clenshaw_full(coeffs, y)
    mono = [int(c) for c in combo_monomial(coeffs)]
    for i, p in enumerate(points):
        acc = Fraction(0)
        for c in reversed(mono):
            acc = acc * p + c
        err = abs(value[i] - float(acc))
        assert err <= noise[i] + 1e-300
