import math

import numpy as np
import pytest

from curvgraph import (
    HeatOptions,
    check_gamma_commutation,
    check_sqrt_commutation,
    entropy,
    heat_adjoint,
    heat_apply,
    probe_classical_sqrt_commutation,
)
from curvgraph.errors import NonPositiveField, TruncationFailure


def two_point_heat(f, t):
    """Closed form from the 2-state diagonalization: eigenvalues {0, -1}."""
    mean = 0.5 * (f[0] + f[1])
    dev = 0.5 * (f[0] - f[1])
    return np.array([mean + math.exp(-t) * dev, mean - math.exp(-t) * dev])


def test_heat_two_point_closed_form(two_point):
    f = np.array([0.0, 2.0])
    for t in (0.0, 0.3, 1.0, 5.0, 20.0):
        expected = two_point_heat(f, t)
        assert np.allclose(heat_apply(two_point, f, t), expected, atol=1e-12)
    assert np.allclose(heat_apply(two_point, f, 1.0),
                       [1 - math.exp(-1), 1 + math.exp(-1)], atol=1e-12)


def test_heat_identity_and_constants(hc3):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(8)
    assert np.array_equal(heat_apply(hc3, f, 0.0), f)
    c = np.full(8, 2.5)
    assert np.allclose(heat_apply(hc3, c, 3.0), c, atol=1e-12)


def test_heat_bounds_and_mean(hc3):
    rng = np.random.default_rng(1)
    for t in (0.1, 1.0, 10.0):
        f = rng.standard_normal(8)
        out = heat_apply(hc3, f, t)
        assert out.min() >= f.min() - 1e-12 and out.max() <= f.max() + 1e-12
        assert out @ hc3.pi == pytest.approx(f @ hc3.pi, abs=1e-10)


def test_semigroup_law(hc2):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(4)
    for s, t in [(0.2, 0.7), (1.0, 2.5)]:
        once = heat_apply(hc2, f, s + t)
        twice = heat_apply(hc2, heat_apply(hc2, f, s), t)
        assert np.allclose(once, twice, atol=2e-12)


def test_adjoint_fixes_pi(hc3):
    for t in (0.5, 3.0):
        assert np.allclose(heat_adjoint(hc3, hc3.pi, t), hc3.pi, atol=1e-12)


def test_adjoint_two_point_dirac(two_point):
    delta = np.array([1.0, 0.0])
    for t in (0.1, 1.0, 4.0):
        expected = np.array([(1 + math.exp(-t)) / 2, (1 - math.exp(-t)) / 2])
        assert np.allclose(heat_adjoint(two_point, delta, t), expected, atol=1e-12)


def test_adjoint_mass_and_convergence(hc2):
    delta = np.zeros(4)
    delta[0] = 1.0
    previous = math.inf
    for t in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
        mu = heat_adjoint(hc2, delta, t)
        assert mu.sum() == pytest.approx(1.0, abs=1e-12)
        gap = np.abs(mu - hc2.pi).sum()
        assert gap < previous + 1e-15
        previous = gap
    # slowest mode decays like exp(-t/2) on the 2-cube
    assert previous < 1e-3


def test_entropy_decay_along_heat_flow(hc3):
    rng = np.random.default_rng(3)
    f = np.exp(rng.standard_normal(8))
    f = f / (f @ hc3.pi)
    values = [entropy(heat_apply(hc3, f, t), hc3).value
              for t in (0.0, 0.2, 0.5, 1.0, 2.0, 5.0)]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_truncation_failure(two_point):
    opts = HeatOptions(truncation_tol=1e-12, max_terms=3)
    with pytest.raises(TruncationFailure):
        heat_apply(two_point, np.array([0.0, 1.0]), 50.0, opts)


def test_heat_options_validation():
    with pytest.raises(ValueError):
        HeatOptions(truncation_tol=1e-3)
    with pytest.raises(ValueError):
        HeatOptions(truncation_tol=0.0)
    with pytest.raises(ValueError):
        HeatOptions(max_terms=0)


def test_gamma_commutation_two_point_exactly_tight(two_point):
    f = np.array([0.0, 2.0])
    records = check_gamma_commutation(two_point, 1.0, [f], [1.0])
    assert len(records) == 2
    for r in records:
        assert r.passed
        # Gamma(P_t f) = e^{-2t} Gamma(f) and P_t Gamma(f) = Gamma(f) here
        assert r.lhs == pytest.approx(math.exp(-2.0), abs=1e-12)
        assert abs(r.slack) < 1e-12


def test_gamma_commutation_t_zero_is_equality(hc2):
    rng = np.random.default_rng(4)
    f = rng.standard_normal(4)
    for r in check_gamma_commutation(hc2, 0.5, [f], [0.0]):
        assert abs(r.slack) < 1e-12


def test_gamma_commutation_hypercube_property(hc3):
    rng = np.random.default_rng(5)
    fields = [rng.standard_normal(8) for _ in range(50)]
    records = check_gamma_commutation(hc3, 1.0 / 3.0, fields, [0.1, 1.0, 10.0])
    assert all(r.passed for r in records)


def test_sqrt_commutation_two_point(two_point):
    records = check_sqrt_commutation(two_point, 1.0, [np.array([1.0, 4.0])], [0.5])
    assert {r.theorem_tag for r in records} == {"sqrt_commutation_i", "sqrt_commutation_ii"}
    assert all(r.passed and r.slack >= -1e-12 for r in records)


def test_sqrt_commutation_t_zero_equalities(two_point):
    records = check_sqrt_commutation(two_point, 1.0, [np.array([1.0, 4.0])], [0.0])
    for r in records:
        assert abs(r.slack) < 1e-12


def test_sqrt_commutation_hypercube_property(hc2):
    rng = np.random.default_rng(6)
    fields = [np.exp(rng.standard_normal(4)) for _ in range(50)]
    records = check_sqrt_commutation(hc2, 0.5, fields, [0.1, 1.0, 10.0])
    assert all(r.passed for r in records)


def test_sqrt_commutation_rejects_nonpositive(two_point):
    with pytest.raises(NonPositiveField):
        check_sqrt_commutation(two_point, 1.0, [np.array([1.0, 0.0])], [1.0])


def test_classical_probe_is_informational(hc2):
    rng = np.random.default_rng(7)
    records = probe_classical_sqrt_commutation(
        hc2, 0.5, [rng.standard_normal(4) for _ in range(3)], [0.5, 2.0])
    assert records and all(r.passed is None for r in records)
