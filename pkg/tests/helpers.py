"""Random instance generators and brute-force oracles shared by the tests."""
from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from netmatch.netmodel import Edge, Graph, Network
from netmatch.setfn import JointPMF


def random_dag_network(rng, n_nodes=None, n_src=None, n_snk=None, cap_hi=4.0, lower=False):
    """Acyclic network; sources first and sinks last in a hidden topological order."""
    n = n_nodes or int(rng.integers(3, 9))
    ps = n_src or int(rng.integers(1, min(3, n - 1) + 1))
    qs = n_snk or int(rng.integers(1, min(3, n - ps) + 1))
    names = [f"v{i}" for i in range(n)]
    sources = names[:ps]
    sinks = names[n - qs:]
    edges = []
    for i in range(n):
        for j in range(max(i + 1, ps), n):
            if rng.random() < 0.45:
                up = float(np.round(rng.uniform(0, cap_hi), 3))
                lo = float(np.round(rng.uniform(0, up), 3)) if lower and rng.random() < 0.3 else 0.0
                edges.append(Edge(names[i], names[j], lo, up))
    return Network(tuple(names), tuple(edges), tuple(sources), tuple(sinks))


def random_graph(rng, n_max=8, cap_hi=4.0):
    """Digraph (cycles allowed) with random [lower, upper] pairs."""
    n = int(rng.integers(1, n_max + 1))
    names = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.35:
                a, b = sorted(np.round(rng.uniform(0, cap_hi, 2), 2))
                if rng.random() < 0.4:
                    a = 0.0
                edges.append(Edge(names[i], names[j], float(a), float(b)))
    return Graph(tuple(names), tuple(edges))


def random_pmf(rng, p, max_alpha=3, sparsity=0.3):
    sizes = tuple(int(rng.integers(2, max_alpha + 1)) for _ in range(p))
    w = rng.random(sizes)
    w[rng.random(sizes) < sparsity] = 0.0
    if w.sum() == 0:
        w.flat[0] = 1.0
    return JointPMF(tuple(f"v{i}" for i in range(p)), w / w.sum())


def feasible_hub_network(rng, kind, n_max=7, k_max=3):
    """MA (kind "ma": many sources, one sink) or BC (one source, many sinks)
    network built around a known flow so that some circulation exists."""
    n = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(1, min(k_max, n - 1) + 1))
    names = [f"v{i}" for i in range(n)]
    if kind == "ma":
        sources, sinks = names[:k], names[-1:]
    else:
        sources, sinks = names[:1], names[n - k:]
    first_free = len(sources)
    pairs = {}
    for i in range(n):
        for j in range(max(i + 1, first_free), n):
            if rng.random() < 0.5:
                pairs[(i, j)] = 0.0
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    terminals = [names.index(s) for s in (sources if kind == "ma" else sinks)]
    hub = names.index(sinks[0] if kind == "ma" else sources[0])
    # route a random amount along a few random hub paths
    for term in terminals:
        a, b = (term, hub) if kind == "ma" else (hub, term)
        if nx.has_path(g, a, b):
            paths = list(itertools.islice(nx.all_simple_paths(g, a, b), 4))
            for path in paths:
                amt = float(np.round(rng.uniform(0, 2), 2))
                for u, v in zip(path, path[1:]):
                    pairs[(u, v)] += amt
    edges = []
    for (i, j), flow in pairs.items():
        lo = float(np.round(flow * rng.uniform(0, 1), 3)) if rng.random() < 0.5 else 0.0
        up = float(np.round(flow + rng.uniform(0, 1.5), 3))
        lo = min(lo, flow)
        edges.append(Edge(names[i], names[j], lo, max(up, flow)))
    return Network(tuple(names), tuple(edges), tuple(sources), tuple(sinks))


def nx_max_flow(net, S, t):
    """Independent max-flow via networkx, with parallel edges merged."""
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    g.add_node("__src__")
    for e in net.edges:
        if g.has_edge(e.tail, e.head):
            g[e.tail][e.head]["capacity"] += e.upper
        else:
            g.add_edge(e.tail, e.head, capacity=e.upper)
    for s in S:
        g.add_edge("__src__", s)  # no capacity attribute = infinite
    return nx.maximum_flow_value(g, "__src__", t)


def min_cut_brute(net, S, t):
    """Minimum cut_value over M with S ⊆ M and t ∉ M."""
    from netmatch.netmodel import cut_value

    rest = [v for v in net.nodes if v not in S and v != t]
    best = float("inf")
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            best = min(best, cut_value(net, set(S) | set(extra)))
    return best


def circulation_ok(g, flow, tol=1e-9):
    """Bounds and conservation of a witness circulation."""
    bal = {v: 0.0 for v in g.nodes}
    for e, f in zip(g.edges, flow):
        if not e.lower - tol <= f <= e.upper + tol:
            return False
        bal[e.tail] -= f
        bal[e.head] += f
    return all(abs(b) <= tol for b in bal.values())
