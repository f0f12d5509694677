import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvgraph import (
    gamma,
    gamma2,
    gamma2_tilde,
    generator_apply,
    graph_distance,
    local_forms,
    standard_chain,
)
from curvgraph.errors import NonPositiveField
from curvgraph.operators import two_ball


def brute_gamma(chain, f, g):
    out = np.zeros(chain.n)
    for x in range(chain.n):
        acc = 0.0
        for y in range(chain.n):
            acc += (f[y] - f[x]) * (g[y] - g[x]) * chain.kernel[x, y]
        out[x] = 0.5 * acc
    return out


def brute_gamma2(chain, f):
    """Independent expansion of 1/2 L Gamma(f) - Gamma(f, Lf), all loops."""
    lf = np.array([
        sum((f[y] - f[x]) * chain.kernel[x, y] for y in range(chain.n))
        for x in range(chain.n)
    ])
    gf = brute_gamma(chain, f, f)
    lgf = np.array([
        sum((gf[y] - gf[x]) * chain.kernel[x, y] for y in range(chain.n))
        for x in range(chain.n)
    ])
    return 0.5 * lgf - brute_gamma(chain, f, lf)


def test_generator_two_point(two_point):
    f = np.array([0.0, 2.0])
    assert np.allclose(generator_apply(two_point, f), [1.0, -1.0])


def test_generator_annihilates_constants(hc3):
    assert np.allclose(generator_apply(hc3, np.full(8, 3.7)), 0.0, atol=1e-15)


def test_generator_hamming_weight(hc2):
    w = np.array([s.count("1") for s in hc2.states], dtype=float)
    expected = (2.0 - 2.0 * w) / 4.0
    assert np.allclose(generator_apply(hc2, w), expected)


def test_gamma_two_point(two_point):
    f = np.array([0.0, 2.0])
    # 1/4 (f(0) - f(1))^2 at both states
    assert np.allclose(gamma(two_point, f), [1.0, 1.0])


def test_gamma_constant_bilinear(two_point, hc2):
    rng = np.random.default_rng(0)
    for chain in (two_point, hc2):
        g = rng.standard_normal(chain.n)
        assert np.allclose(gamma(chain, np.full(chain.n, 2.0), g), 0.0, atol=1e-15)


def test_gamma_distance_slope_bound(hc3, cycle6, complete4):
    # Gamma(d(x0, .)) <= J(x)/2 pointwise
    for chain in (hc3, cycle6, complete4):
        d = graph_distance(chain).d
        for x0 in range(chain.n):
            g = gamma(chain, d[x0])
            assert (g <= chain.jump_rates / 2.0 + 1e-12).all()


def test_gamma2_equals_gamma_on_two_point(two_point):
    rng = np.random.default_rng(1)
    for _ in range(10):
        f = rng.standard_normal(2)
        assert np.allclose(gamma2(two_point, f), gamma(two_point, f), atol=1e-13)


def test_gamma2_brute_force_oracle(hc2, hc3, cycle6):
    rng = np.random.default_rng(2)
    for chain in (hc2, hc3, cycle6):
        indicator = np.zeros(chain.n)
        indicator[0] = 1.0
        fields = [indicator] + [rng.standard_normal(chain.n) for _ in range(5)]
        for f in fields:
            assert np.allclose(gamma2(chain, f), brute_gamma2(chain, f), atol=1e-12)


def test_gamma2_tilde_two_point_closed_form(two_point):
    # expanding the definition by hand on two states gives
    # Gamma~2(f) = Gamma(f) (1 + Gamma(f)/(f0 f1)), always >= Gamma(f) with
    # the ratio approaching 1 as f flattens; for f = (1, 3) that is 4/3
    f = np.array([1.0, 3.0])
    out = gamma2_tilde(two_point, f)
    assert np.allclose(out, 4.0 / 3.0, atol=1e-13)
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = np.exp(rng.uniform(-2, 2, size=2))
        g = gamma(two_point, f)
        expected = g * (1.0 + g / (f[0] * f[1]))
        assert np.allclose(gamma2_tilde(two_point, f), expected, atol=1e-12)
        # the exponential curvature constant is still exactly 1: the ratio
        # Gamma~2/Gamma never dips below 1
        assert (gamma2_tilde(two_point, f) >= g - 1e-12).all()


def test_gamma2_tilde_homogeneous(hc2):
    w = np.array([s.count("1") for s in hc2.states], dtype=float)
    f = np.exp(w)
    assert np.allclose(gamma2_tilde(hc2, 2.0 * f), 4.0 * gamma2_tilde(hc2, f),
                       atol=1e-10)


def test_gamma2_tilde_rejects_zeros(two_point):
    with pytest.raises(NonPositiveField):
        gamma2_tilde(two_point, np.array([1.0, 0.0]))


def test_local_forms_two_point(two_point):
    forms = local_forms(two_point, 0)
    assert np.allclose(forms.gamma_form, 0.25 * np.array([[1, -1], [-1, 1]]))
    ones = np.ones(2)
    assert abs(ones @ forms.gamma_form @ ones) < 1e-15
    assert abs(ones @ forms.gamma2_form @ ones) < 1e-15


def test_local_forms_hypercube_support(hc3):
    for x in range(hc3.n):
        forms = local_forms(hc3, x)
        assert len(forms.support) == 7  # 1 + 3 + 3


def test_local_forms_match_direct_evaluation(hc2, hc3, cycle6, complete4):
    rng = np.random.default_rng(3)
    for chain in (hc2, hc3, cycle6, complete4):
        for x in range(chain.n):
            forms = local_forms(chain, x)
            for _ in range(25):
                f = rng.standard_normal(chain.n)
                u = f[forms.support]
                assert u @ forms.gamma_form @ u == pytest.approx(
                    gamma(chain, f)[x], abs=1e-12)
                assert u @ forms.gamma2_form @ u == pytest.approx(
                    gamma2(chain, f)[x], abs=1e-12)


def test_values_outside_two_ball_are_irrelevant(cycle6):
    rng = np.random.default_rng(4)
    ball = set(two_ball(cycle6, 0).tolist())
    outside = [x for x in range(6) if x not in ball]
    assert outside  # cycle(6) has states at distance 3
    f = rng.standard_normal(6)
    g = f.copy()
    g[outside] += rng.standard_normal(len(outside))
    assert gamma2(cycle6, f)[0] == pytest.approx(gamma2(cycle6, g)[0], abs=1e-12)


def test_integration_by_parts(random_chains):
    rng = np.random.default_rng(5)
    for chain in random_chains:
        for _ in range(10):
            f = rng.standard_normal(chain.n)
            g = rng.standard_normal(chain.n)
            lhs = gamma(chain, f, g) @ chain.pi
            rhs = -(f * generator_apply(chain, g)) @ chain.pi
            assert lhs == pytest.approx(rhs, abs=1e-10)


def test_cauchy_schwarz_pointwise(random_chains):
    rng = np.random.default_rng(6)
    for chain in random_chains:
        for _ in range(10):
            f = rng.standard_normal(chain.n)
            g = rng.standard_normal(chain.n)
            cross = gamma(chain, f, g) ** 2
            bound = gamma(chain, f) * gamma(chain, g)
            assert (cross <= bound + 1e-12).all()


def test_sqrt_chain_rule(random_chains):
    # 2 sqrt(f) L sqrt(f) = Lf - 2 Gamma(sqrt f) pointwise
    rng = np.random.default_rng(7)
    for chain in random_chains:
        for _ in range(10):
            f = np.exp(rng.standard_normal(chain.n))
            s = np.sqrt(f)
            lhs = 2.0 * s * generator_apply(chain, s)
            rhs = generator_apply(chain, f) - 2.0 * gamma(chain, s)
            assert np.allclose(lhs, rhs, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=4, max_size=4),
       st.lists(st.floats(-50, 50), min_size=4, max_size=4))
def test_gamma_symmetry_and_positivity(fv, gv):
    chain = standard_chain("hypercube", 2)
    f, g = np.array(fv), np.array(gv)
    assert np.allclose(gamma(chain, f, g), gamma(chain, g, f), atol=1e-9)
    assert (gamma(chain, f) >= -1e-12).all()
