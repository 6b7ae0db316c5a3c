"""Max-flow/min-cut and circulation feasibility with lower bounds.

Max-flow uses Dinic's blocking-flow method (shortest augmenting paths), which
terminates on real capacities.  Circulation feasibility with lower bounds is
reduced to one max-flow between an excess super-node and a deficit
super-node; the exhaustive cut test is kept as an independent oracle.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .netmodel import DEFAULT_TOL, Edge, Graph, NetworkError, cut_value, reverse_lower_value

ORACLE_MAX_NODES = 24


class _Dinic:
    def __init__(self, n: int, eps: float):
        self.n = n
        self.eps = eps
        self.head: list[int] = []
        self.cap: list[float] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, c: float) -> int:
        k = len(self.head)
        self.head += [v, u]
        self.cap += [c, 0.0]
        self.adj[u].append(k)
        self.adj[v].append(k + 1)
        return k

    def _bfs(self, s: int, t: int):
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for k in self.adj[u]:
                v = self.head[k]
                if level[v] < 0 and self.cap[k] > self.eps:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u, t, pushed, level, it):
        if u == t:
            return pushed
        adj = self.adj[u]
        while it[u] < len(adj):
            k = adj[it[u]]
            v = self.head[k]
            if self.cap[k] > self.eps and level[v] == level[u] + 1:
                got = self._dfs(v, t, min(pushed, self.cap[k]), level, it)
                if got > 0:
                    self.cap[k] -= got
                    self.cap[k ^ 1] += got
                    return got
            it[u] += 1
        return 0.0

    def run(self, s: int, t: int) -> float:
        total = 0.0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                f = self._dfs(s, t, float("inf"), level, it)
                if f <= 0:
                    break
                total += f

    def reaching(self, t: int) -> set[int]:
        """Nodes with a residual path to ``t``."""
        seen = {t}
        q = deque([t])
        while q:
            v = q.popleft()
            for k in self.adj[v]:
                u = self.head[k]
                # arc k is v->u; its twin k^1 is u->v
                if u not in seen and self.cap[k ^ 1] > self.eps:
                    seen.add(u)
                    q.append(u)
        return seen

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for k in self.adj[u]:
                v = self.head[k]
                if v not in seen and self.cap[k] > self.eps:
                    seen.add(v)
                    q.append(v)
        return seen


def _eps(edges: Iterable[Edge]) -> float:
    return 1e-13 * max(1.0, sum(e.upper for e in edges))


@dataclass(frozen=True)
class MaxFlowResult:
    value: float
    flow: tuple[float, ...]
    min_cut: frozenset[str]


def max_flow(net: Graph, source_set: Iterable[str], sink: str) -> MaxFlowResult:
    """Maximum flow from the merged ``source_set`` to ``sink`` on upper capacities.

    Lower capacities are ignored.  The returned cut is the largest minimum cut:
    every node without a residual path to the sink.
    """
    sources = frozenset(source_set)
    idx = net.index
    if not sources:
        raise NetworkError("empty source set")
    unknown = (sources | {sink}) - set(idx)
    if unknown:
        raise NetworkError(f"unknown node(s): {sorted(unknown)}")
    if sink in sources:
        raise NetworkError("sink belongs to the source set")
    n = len(net.nodes)
    big = 1.0 + sum(e.upper for e in net.edges)
    d = _Dinic(n + 1, _eps(net.edges))
    arcs = [d.add_edge(idx[e.tail], idx[e.head], e.upper) for e in net.edges]
    for s in sorted(sources):
        d.add_edge(n, idx[s], big)
    value = d.run(n, idx[sink])
    flow = tuple(max(0.0, e.upper - d.cap[k]) for e, k in zip(net.edges, arcs))
    reach = d.reaching(idx[sink])
    cut = frozenset(v for i, v in enumerate(net.nodes) if i not in reach)
    return MaxFlowResult(value, flow, cut)


@dataclass(frozen=True)
class CirculationVerdict:
    """Outcome of a circulation test.

    ``flow`` is a feasible circulation aligned with the graph's edges when
    ``feasible``; otherwise ``cut`` is a node set M with
    c(M, M̄) < d(M̄, M) and ``violation`` is the gap d(M̄, M) - c(M, M̄).
    """

    feasible: bool
    flow: Optional[tuple[float, ...]] = None
    cut: Optional[frozenset[str]] = None
    violation: float = 0.0


def hoffman_feasible(net: Graph, tol: float = DEFAULT_TOL) -> CirculationVerdict:
    """Decide whether a circulation with lower <= g <= upper exists."""
    n = len(net.nodes)
    idx = net.index
    excess = [0.0] * n
    d = _Dinic(n + 2, _eps(net.edges))
    arcs = []
    for e in net.edges:
        u, v = idx[e.tail], idx[e.head]
        arcs.append(d.add_edge(u, v, e.upper - e.lower))
        excess[v] += e.lower
        excess[u] -= e.lower
    src, dst = n, n + 1
    need = 0.0
    for i, b in enumerate(excess):
        if b > 0:
            d.add_edge(src, i, b)
            need += b
        elif b < 0:
            d.add_edge(i, dst, -b)
    got = d.run(src, dst)
    if need - got <= tol:
        flow = tuple(
            min(e.upper, max(e.lower, e.upper - d.cap[k])) for e, k in zip(net.edges, arcs)
        )
        return CirculationVerdict(True, flow=flow)
    reach = d.reachable(src)
    M = frozenset(v for i, v in enumerate(net.nodes) if i in reach)
    gap = reverse_lower_value(net, M) - cut_value(net, M)
    return CirculationVerdict(False, cut=M, violation=gap)


def _membership(n: int, lo: int, hi: int) -> np.ndarray:
    masks = np.arange(lo, hi, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def cut_enumeration_oracle(net: Graph, tol: float = DEFAULT_TOL) -> CirculationVerdict:
    """Exhaustive check of c(M, M̄) >= d(M̄, M) over every node subset M.

    Returns the worst violating subset when infeasible.  No witness flow is
    produced on the feasible side.
    """
    n = len(net.nodes)
    if n > ORACLE_MAX_NODES:
        raise NetworkError(f"cut enumeration limited to {ORACLE_MAX_NODES} nodes, got {n}")
    idx = net.index
    tails = np.array([idx[e.tail] for e in net.edges], dtype=np.int64)
    heads = np.array([idx[e.head] for e in net.edges], dtype=np.int64)
    up = np.array([e.upper for e in net.edges])
    lo = np.array([e.lower for e in net.edges])
    worst, worst_mask = 0.0, None
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        inside = _membership(n, start, min(1 << n, start + chunk))
        if len(net.edges):
            ti, hi = inside[:, tails], inside[:, heads]
            gap = ((~ti & hi) * lo).sum(axis=1) - ((ti & ~hi) * up).sum(axis=1)
        else:
            gap = np.zeros(len(inside))
        k = int(np.argmax(gap))
        if gap[k] > worst:
            worst, worst_mask = float(gap[k]), start + k
    if worst > tol:
        M = frozenset(v for i, v in enumerate(net.nodes) if worst_mask >> i & 1)
        return CirculationVerdict(False, cut=M, violation=worst)
    return CirculationVerdict(True)
