import json

import numpy as np
import pytest

from curvgraph import (
    DistanceMatrix,
    build_chain,
    graph_distance,
    laziness,
    read_chain_csv,
    read_chain_json,
    standard_chain,
    write_chain_csv,
    write_chain_json,
    write_distance_csv,
)
from curvgraph.chains import validate_distance
from curvgraph.errors import (
    NonFiniteDistance,
    NotIrreducible,
    NotReversible,
    RowSumViolation,
    UnsupportedSize,
)


def test_build_two_state_lazy_coin():
    chain = build_chain(["a", "b"], [("a", "b", 0.5), ("b", "a", 0.5),
                                     ("a", "a", 0.5), ("b", "b", 0.5)])
    # stationarity solved by hand: pi K = pi with K symmetric doubly stochastic
    assert np.allclose(chain.pi, [0.5, 0.5], atol=1e-14)
    assert chain.laziness == pytest.approx(0.5)


def test_identity_kernel_rejected():
    with pytest.raises(NotIrreducible):
        build_chain(["a", "b"], [("a", "a", 1.0), ("b", "b", 1.0)])


def test_row_sum_violation():
    with pytest.raises(RowSumViolation):
        build_chain(["a", "b"], [("a", "b", 0.4), ("a", "a", 0.5),
                                 ("b", "a", 0.5), ("b", "b", 0.5)])


def test_negative_rate_rejected():
    with pytest.raises(RowSumViolation):
        build_chain(["a", "b"], [("a", "b", -0.1)])


def test_detailed_balance_rejected():
    # rotating 3-cycle: uniform stationary measure but no reversibility
    entries = []
    fwd, back = 0.7, 0.3
    for i in range(3):
        entries.append((i, (i + 1) % 3, fwd))
        entries.append((i, (i + 2) % 3, back))
    with pytest.raises(NotReversible):
        build_chain(["0", "1", "2"], entries)


def test_two_point_is_hypercube_one():
    tp = standard_chain("two_point")
    h1 = standard_chain("hypercube", 1)
    assert tp.states == h1.states
    assert np.array_equal(tp.kernel, h1.kernel)


def test_hypercube_two():
    chain = standard_chain("hypercube", 2)
    assert chain.n == 4
    assert np.allclose(chain.jump_rates, 0.5)
    assert np.allclose(chain.pi, 0.25, atol=1e-14)


def test_complete_four():
    chain = standard_chain("complete", 4)
    assert np.allclose(chain.jump_rates, 0.75)
    assert np.allclose(chain.pi, 0.25, atol=1e-14)


def test_cycle_laziness_is_one(cycle6):
    rates, global_j = laziness(cycle6)
    assert np.allclose(rates, 1.0)
    assert global_j == pytest.approx(1.0)


def test_builder_guards():
    with pytest.raises(UnsupportedSize):
        standard_chain("cycle", 2)
    with pytest.raises(UnsupportedSize):
        standard_chain("hypercube", 21)
    with pytest.raises(UnsupportedSize):
        standard_chain("complete", 1)
    with pytest.raises(UnsupportedSize):
        standard_chain("moebius", 4)


def test_graph_distance_examples(hc3, two_point, cycle6):
    d3 = graph_distance(hc3).d
    assert d3[hc3.index("000"), hc3.index("111")] == 3
    assert graph_distance(two_point).d[0, 1] == 1
    assert graph_distance(cycle6).d[0, 3] == 3


def test_graph_distance_one_iff_edge(random_chains):
    for chain in random_chains:
        d = graph_distance(chain).d
        for x in range(chain.n):
            for y in range(chain.n):
                if x == y:
                    continue
                assert (d[x, y] == 1) == (chain.kernel[x, y] > 0)


def test_stationarity_and_positivity(random_chains):
    for chain in random_chains:
        assert np.abs(chain.pi @ chain.kernel - chain.pi).max() < 1e-12
        assert (chain.pi > 0).all()
        assert chain.pi.sum() == pytest.approx(1.0, abs=1e-12)


def test_json_round_trip_bit_for_bit(tmp_path, hc3):
    path = tmp_path / "h3.json"
    write_chain_json(hc3, path, meta={"note": "round trip"})
    back = read_chain_json(path)
    assert back.states == hc3.states
    assert np.array_equal(back.kernel, hc3.kernel)
    assert np.array_equal(back.pi, hc3.pi)


def test_csv_round_trip(tmp_path, hc2):
    path = tmp_path / "h2.csv"
    write_chain_csv(hc2, path)
    back = read_chain_csv(path)
    assert np.array_equal(back.kernel, hc2.kernel)


def test_csv_diagonal_completion(tmp_path):
    path = tmp_path / "frag.csv"
    path.write_text("src,dst,rate\na,b,0.5\nb,a,0.5\n")
    with pytest.raises(RowSumViolation):
        read_chain_csv(path)
    chain = read_chain_csv(path, complete_diagonal=True)
    assert chain.kernel[0, 0] == pytest.approx(0.5)
    assert np.allclose(chain.pi, [0.5, 0.5])


def test_csv_header_enforced(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("from,to,weight\na,b,1\n")
    with pytest.raises(RowSumViolation):
        read_chain_csv(path)


def test_distance_csv(tmp_path, two_point):
    dm = graph_distance(two_point)
    path = tmp_path / "d.csv"
    write_distance_csv(dm, two_point, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "0,1"
    assert [float(v) for v in rows[1].split(",")] == [0.0, 1.0]


def test_validate_distance_triangle():
    bad = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
    with pytest.raises(NonFiniteDistance):
        validate_distance(DistanceMatrix(d=bad, kind="custom"))
    good = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    validate_distance(DistanceMatrix(d=good, kind="custom"))


def test_chain_immutable(two_point):
    with pytest.raises(ValueError):
        two_point.kernel[0, 0] = 0.9
