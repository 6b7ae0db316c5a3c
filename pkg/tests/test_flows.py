import itertools

import numpy as np
import pytest

from helpers import circulation_ok, min_cut_brute, nx_max_flow, random_dag_network, random_graph
from netmatch import fixtures
from netmatch.flows import cut_enumeration_oracle, hoffman_feasible, max_flow
from netmatch.netmodel import Edge, Graph, NetworkError, cut_value, reverse_lower_value


def cycle3(edges):
    pairs = [("a", "b"), ("b", "c"), ("c", "a")]
    return Graph(("a", "b", "c"), tuple(Edge(u, v, lo, up) for (u, v), (lo, up) in zip(pairs, edges)))


def conserves_except(net, flow, keep, tol=1e-9):
    bal = {v: 0.0 for v in net.nodes}
    for e, f in zip(net.edges, flow):
        bal[e.tail] -= f
        bal[e.head] += f
    return all(abs(b) <= tol for v, b in bal.items() if v not in keep), bal


# -- max flow ----------------------------------------------------------------


def test_butterfly_max_flows():
    net = fixtures.butterfly()
    assert max_flow(net, {"s1"}, "t1").value == pytest.approx(2, abs=1e-12)
    assert max_flow(net, {"s2"}, "t1").value == pytest.approx(1, abs=1e-12)


def test_unreachable_sink():
    g = Graph(("a", "b", "c"), (Edge("a", "b", 0, 3),))
    res = max_flow(g, {"a"}, "c")
    assert res.value == 0
    assert res.min_cut == frozenset({"a", "b"})
    assert cut_value(g, res.min_cut) == 0


def test_max_flow_rejects_bad_arguments():
    net = fixtures.butterfly()
    with pytest.raises(NetworkError):
        max_flow(net, {"zz"}, "t1")
    with pytest.raises(NetworkError):
        max_flow(net, {"t1"}, "t1")
    with pytest.raises(NetworkError):
        max_flow(net, set(), "t1")


def test_max_flow_duality_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        net = random_dag_network(rng)
        k = int(rng.integers(1, len(net.sources) + 1))
        S = set(rng.choice(net.sources, k, replace=False).tolist())
        t = str(rng.choice(net.sinks))
        res = max_flow(net, S, t)
        brute = min_cut_brute(net, S, t)
        assert res.value == pytest.approx(brute, abs=1e-9)
        assert res.value == pytest.approx(nx_max_flow(net, S, t), abs=1e-9)
        # certificate: the returned cut is admissible and attains the value
        assert S <= res.min_cut and t not in res.min_cut
        assert cut_value(net, res.min_cut) == pytest.approx(res.value, abs=1e-9)
        # witness: bounds, conservation off the terminals, net outflow = value
        for e, f in zip(net.edges, res.flow):
            assert -1e-9 <= f <= e.upper + 1e-9
        ok, bal = conserves_except(net, res.flow, S | {t})
        assert ok
        assert bal[t] == pytest.approx(res.value, abs=1e-9)
        assert -sum(bal[s] for s in S) == pytest.approx(res.value, abs=1e-9)


def test_max_flow_real_valued_capacities():
    # irrational capacities terminate and are exact up to rounding
    r = 2 ** 0.5
    g = Graph(
        ("s", "a", "b", "t"),
        (Edge("s", "a", 0, r), Edge("s", "b", 0, 1), Edge("a", "b", 0, r), Edge("a", "t", 0, 1),
         Edge("b", "t", 0, r)),
    )
    assert max_flow(g, {"s"}, "t").value == pytest.approx(1 + r, abs=1e-12)


# -- circulations ------------------------------------------------------------


def test_forced_unit_circulation():
    g = cycle3([(1, 1)] * 3)
    v = hoffman_feasible(g)
    assert v.feasible and v.flow == pytest.approx((1, 1, 1))
    assert cut_enumeration_oracle(g).feasible


def test_infeasible_cycle():
    g = cycle3([(2, 3), (0, 1), (0, 1)])
    v = hoffman_feasible(g)
    assert not v.feasible
    assert v.violation > 1e-9
    assert reverse_lower_value(g, v.cut) - cut_value(g, v.cut) == pytest.approx(v.violation)
    # the head of the [2,3] edge is inside, its tail outside
    assert "b" in v.cut and "a" not in v.cut
    assert not cut_enumeration_oracle(g).feasible


def test_acyclic_zero_lower_is_feasible():
    net = fixtures.butterfly()
    v = hoffman_feasible(net)
    assert v.feasible and all(f == 0 for f in v.flow)
    assert cut_enumeration_oracle(net).feasible


def test_oracle_trivial_cases():
    assert cut_enumeration_oracle(Graph(("a",), ())).feasible
    assert hoffman_feasible(Graph(("a",), ())).feasible
    g = Graph(("a", "b"), (Edge("a", "b", 1, 2),))
    assert not cut_enumeration_oracle(g).feasible
    assert not hoffman_feasible(g).feasible


def test_oracle_node_guard():
    names = tuple(f"n{i}" for i in range(25))
    with pytest.raises(NetworkError):
        cut_enumeration_oracle(Graph(names, ()))


def test_oracle_matches_definition_on_small_graphs():
    # the vectorized oracle against a plain loop over subsets
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = random_graph(rng, n_max=5)
        worst = max(
            reverse_lower_value(g, M) - cut_value(g, M)
            for r in range(len(g.nodes) + 1)
            for M in itertools.combinations(g.nodes, r)
        )
        v = cut_enumeration_oracle(g)
        assert v.feasible == (worst <= 1e-9)
        if not v.feasible:
            assert v.violation == pytest.approx(worst)


def test_hoffman_agrees_with_oracle_and_certificates_hold():
    rng = np.random.default_rng(2024)
    seen = {True: 0, False: 0}
    for _ in range(500):
        g = random_graph(rng)
        h = hoffman_feasible(g)
        o = cut_enumeration_oracle(g)
        assert h.feasible == o.feasible
        seen[h.feasible] += 1
        if h.feasible:
            assert circulation_ok(g, h.flow)
        else:
            gap = reverse_lower_value(g, h.cut) - cut_value(g, h.cut)
            assert gap > 1e-9
            assert gap == pytest.approx(h.violation)
    assert min(seen.values()) > 50
