import math

import numpy as np
import pytest

from curvgraph import (
    entropy,
    fisher,
    fisher_bar,
    fisher_modified,
    gamma_estimates_check,
    graph_distance,
    heat_apply,
)
from curvgraph.errors import NegativeDensity, NonPositiveField


def test_entropy_examples(two_point, hc2):
    assert entropy(np.array([2.0, 0.0]), two_point).value == pytest.approx(math.log(2))
    assert entropy(np.ones(4), hc2).value == pytest.approx(0.0, abs=1e-15)
    dirac = np.array([4.0, 0.0, 0.0, 0.0])
    assert entropy(dirac, hc2).value == pytest.approx(math.log(4))


def test_entropy_zero_only_at_uniform(hc2):
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = np.exp(rng.standard_normal(4))
        f = f / (f @ hc2.pi)
        ent = entropy(f, hc2).value
        assert ent >= -1e-15
        if np.abs(f - 1.0).max() > 1e-6:
            assert ent > 1e-10


def test_entropy_unnormalized_scaling():
    # the normalization term makes Ent(c f) = c Ent(f) for any density f
    from curvgraph import standard_chain

    chain = standard_chain("two_point")
    f = np.array([1.5, 0.5])
    for c in (2.0, 0.3, 7.5):
        assert entropy(c * f, chain).value == pytest.approx(
            c * entropy(f, chain).value, abs=1e-12)


def test_entropy_rejects_negative(two_point):
    with pytest.raises(NegativeDensity):
        entropy(np.array([-0.1, 1.1]), two_point)


def test_fisher_two_point_saturates_4j(two_point):
    value = fisher(np.array([2.0, 0.0]), two_point).value
    assert value == pytest.approx(2.0, abs=1e-12)
    assert value == pytest.approx(4.0 * two_point.laziness, abs=1e-12)


def test_fisher_uniform_zero(hc3):
    assert fisher(np.ones(8), hc3).value == pytest.approx(0.0, abs=1e-15)


def test_fisher_bounded_by_4j(random_chains):
    rng = np.random.default_rng(1)
    for chain in random_chains:
        for _ in range(50):
            f = np.exp(rng.standard_normal(chain.n))
            f = f / (f @ chain.pi)
            assert fisher(f, chain).value <= 4.0 * chain.laziness + 1e-10


def test_fisher_modified_closed_form(two_point):
    # de Bruijn oracle: -d/dt Ent(P_t f) at t = 0 equals (log 3)/4 for this f
    f = np.array([1.5, 0.5])
    assert fisher_modified(f, two_point).value == pytest.approx(math.log(3.0) / 4.0,
                                                                abs=1e-12)


def test_fisher_modified_uniform_zero(hc2):
    assert fisher_modified(np.ones(4), hc2).value == pytest.approx(0.0, abs=1e-15)


def test_fisher_modified_rejects_zero(two_point):
    with pytest.raises(NonPositiveField):
        fisher_modified(np.array([2.0, 0.0]), two_point)


def test_fisher_bar_values(two_point):
    assert math.isinf(fisher_bar(np.array([2.0, 0.0]), two_point).value)
    assert fisher_bar(np.array([1.5, 0.5]), two_point).value == pytest.approx(1.0 / 3.0,
                                                                              abs=1e-12)
    assert fisher_bar(np.ones(2), two_point).value == pytest.approx(0.0, abs=1e-15)


def test_fisher_orderings(random_chains):
    rng = np.random.default_rng(2)
    for chain in random_chains:
        for _ in range(30):
            f = np.exp(rng.standard_normal(chain.n))
            f = f / (f @ chain.pi)
            base = fisher(f, chain).value
            assert fisher_modified(f, chain).value >= base - 1e-10
            assert fisher_bar(f, chain).value >= base - 1e-10


def test_de_bruijn_identity(hc2):
    # d/dt Ent(P_t f) = -I~(P_t f), centred differences with Richardson
    rng = np.random.default_rng(3)
    f = np.exp(rng.standard_normal(4))
    f = f / (f @ hc2.pi)
    for t in (0.0, 0.4):
        h = 1e-5

        def slope(step):
            up = entropy(heat_apply(hc2, f, t + step), hc2).value
            if t - step < 0:
                down = entropy(heat_apply(hc2, f, t), hc2).value
                return (up - down) / step
            down = entropy(heat_apply(hc2, f, t - step), hc2).value
            return (up - down) / (2 * step)

        d1, d2 = slope(h), slope(h / 2)
        richardson = (4 * d2 - d1) / 3 if t > 0 else 2 * d2 - d1
        expected = -fisher_modified(heat_apply(hc2, f, t), hc2).value
        assert richardson == pytest.approx(expected, abs=1e-6)


def test_gamma_estimates_constant_g(two_point, dg_two_point):
    f = np.array([0.3, 1.7])
    records = gamma_estimates_check(f, np.full(2, 5.0), two_point, dg_two_point)
    for r in records:
        assert r.passed
        if not math.isinf(r.rhs):
            assert r.lhs <= 1e-12 or r.lhs <= r.rhs


def test_gamma_estimates_two_point_indicator(two_point, dg_two_point):
    f = np.array([0.0, 1.0])
    records = gamma_estimates_check(f, f, two_point, dg_two_point)
    assert len(records) == 4
    by_tag = {r.theorem_tag: r for r in records}
    assert all(r.passed for r in records)
    # (i), (iii) strict slack; (ii) exactly tight; (iv) infinite right side
    assert by_tag["gamma_gradient_i"].slack > 0
    assert by_tag["gamma_gradient_ii"].slack == pytest.approx(0.0, abs=1e-12)
    assert by_tag["gamma_gradient_iii"].slack > 0
    assert math.isinf(by_tag["gamma_gradient_iv"].rhs)


def test_gamma_estimates_random_pairs(hc2, dg_hc2):
    rng = np.random.default_rng(4)
    for _ in range(100):
        f = np.exp(rng.standard_normal(4))
        g = rng.standard_normal(4)
        records = gamma_estimates_check(f, g, hc2, dg_hc2)
        assert all(r.passed for r in records)


def test_gamma_estimates_other_chains(cycle6, complete4):
    rng = np.random.default_rng(5)
    for chain in (cycle6, complete4):
        d = graph_distance(chain)
        for _ in range(30):
            f = np.exp(rng.standard_normal(chain.n))
            g = rng.standard_normal(chain.n)
            assert all(r.passed for r in gamma_estimates_check(f, g, chain, d))
