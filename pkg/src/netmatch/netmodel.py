"""Network data model, cut arithmetic and the line-oriented network format.

A network is a directed graph whose edges carry a capacity interval
``[lower, upper]``.  Source and sink roles are declared per node.

File format (``#`` starts a comment)::

    node <name> [source|sink]
    edge <tail> <head> <lower> <upper>
    pair <source> <sink>

Capacities are decimal reals or the shorthand ``h(<p>)`` for the binary
entropy of ``p``.
"""
from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_TOL = 1e-9


class NetworkError(ValueError):
    """Invalid network: syntax error or violated invariant."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class CycleError(NetworkError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__("cycle found: " + " -> ".join(self.cycle + self.cycle[:1]))


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    lower: float
    upper: float


@dataclass(frozen=True)
class Graph:
    """Capacitated digraph without roles.  Cycles are allowed here."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise NetworkError("duplicate node name")
        known = set(self.nodes)
        for e in self.edges:
            if e.tail not in known or e.head not in known:
                raise NetworkError(f"edge {e.tail}->{e.head} uses an unknown node")
            if e.tail == e.head:
                raise NetworkError(f"self-loop on node {e.tail}")
            if not (math.isfinite(e.lower) and math.isfinite(e.upper)):
                raise NetworkError(f"edge {e.tail}->{e.head} has a non-finite capacity")
            if not 0 <= e.lower <= e.upper:
                raise NetworkError(
                    f"edge {e.tail}->{e.head} violates 0 <= lower <= upper "
                    f"(lower={e.lower}, upper={e.upper})"
                )

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    def _member_set(self, M: Iterable[str]) -> frozenset[str]:
        M = frozenset(M)
        unknown = M - set(self.nodes)
        if unknown:
            raise NetworkError(f"unknown node(s) in cut: {sorted(unknown)}")
        return M


@dataclass(frozen=True)
class Network(Graph):
    """Acyclic network with declared source set and sink set."""

    sources: tuple[str, ...] = ()
    sinks: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        known = set(self.nodes)
        if not self.sources:
            raise NetworkError("no source node declared")
        if not self.sinks:
            raise NetworkError("no sink node declared")
        if set(self.sources) & set(self.sinks):
            raise NetworkError("a node cannot be both source and sink")
        if not set(self.sources) <= known or not set(self.sinks) <= known:
            raise NetworkError("role declared for an unknown node")
        src = set(self.sources)
        for e in self.edges:
            if e.head in src:
                raise NetworkError(f"edge {e.tail}->{e.head} enters source node {e.head}")
        for s, t in self.pairs:
            if s not in src or t not in self.sinks:
                raise NetworkError(f"pair ({s}, {t}) must join a source to a sink")
        topological_order(self)


def cut_value(net: Graph, M: Iterable[str]) -> float:
    """Sum of upper capacities on edges leaving ``M``."""
    M = net._member_set(M)
    return sum(e.upper for e in net.edges if e.tail in M and e.head not in M)


def reverse_lower_value(net: Graph, M: Iterable[str]) -> float:
    """Sum of lower capacities on edges entering ``M``."""
    M = net._member_set(M)
    return sum(e.lower for e in net.edges if e.tail not in M and e.head in M)


def topological_order(net: Graph) -> tuple[str, ...]:
    """Kahn's algorithm; ties go to the lexicographically smallest name."""
    indeg = {v: 0 for v in net.nodes}
    succ: dict[str, list[str]] = {v: [] for v in net.nodes}
    for e in net.edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    heap = [v for v in net.nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) < len(net.nodes):
        raise CycleError(_find_cycle(net, {v for v in net.nodes if indeg[v] > 0}))
    return tuple(order)


def _find_cycle(net: Graph, remaining: set[str]) -> list[str]:
    # every remaining node has a predecessor in `remaining`; walk backwards
    pred = {}
    for e in net.edges:
        if e.tail in remaining and e.head in remaining:
            pred.setdefault(e.head, e.tail)
    v = min(remaining)
    seen: dict[str, int] = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = pred[v]
    cycle = path[seen[v]:]
    return cycle[::-1]


# -- text format -------------------------------------------------------------

_H_RE = re.compile(r"^h\(\s*([^()\s]+)\s*\)$")
_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_real(token: str) -> float:
    """Locale-independent real, or ``h(p)`` expanded to the binary entropy."""
    m = _H_RE.match(token)
    if m:
        from .setfn import binary_entropy

        return binary_entropy(parse_real(m.group(1)))
    if not _NUM_RE.match(token):
        raise ValueError(f"not a number: {token!r}")
    return float(token)


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = []
        for m in re.finditer(r"\S+", line):
            toks.append((m.group(0), m.start() + 1))
        if toks:
            yield lineno, toks


def parse_network(text: str) -> Network:
    nodes: list[str] = []
    sources: list[str] = []
    sinks: list[str] = []
    edges: list[Edge] = []
    pairs: list[tuple[str, str]] = []
    for lineno, toks in _tokens(text):
        kw, col = toks[0]
        words = [t for t, _ in toks]
        if kw == "node":
            if len(words) not in (2, 3):
                raise NetworkError("expected 'node <name> [source|sink]'", lineno, col)
            name = words[1]
            if name in nodes:
                raise NetworkError(f"duplicate node {name}", lineno, toks[1][1])
            nodes.append(name)
            if len(words) == 3:
                if words[2] == "source":
                    sources.append(name)
                elif words[2] == "sink":
                    sinks.append(name)
                else:
                    raise NetworkError(f"unknown role {words[2]!r}", lineno, toks[2][1])
        elif kw == "edge":
            if len(words) != 5:
                raise NetworkError("expected 'edge <tail> <head> <lower> <upper>'", lineno, col)
            vals = []
            for tok, c in toks[3:]:
                try:
                    vals.append(parse_real(tok))
                except ValueError as exc:
                    raise NetworkError(str(exc), lineno, c) from None
            edges.append(Edge(words[1], words[2], vals[0], vals[1]))
        elif kw == "pair":
            if len(words) != 3:
                raise NetworkError("expected 'pair <source> <sink>'", lineno, col)
            pairs.append((words[1], words[2]))
        else:
            raise NetworkError(f"unknown directive {kw!r}", lineno, col)
    return Network(tuple(nodes), tuple(edges), tuple(sources), tuple(sinks), tuple(pairs))


def fmt_real(x: float) -> str:
    return f"{x:.12g}"


def render_network(net: Network) -> str:
    lines = []
    for v in net.nodes:
        role = " source" if v in net.sources else " sink" if v in net.sinks else ""
        lines.append(f"node {v}{role}")
    for e in net.edges:
        lines.append(f"edge {e.tail} {e.head} {fmt_real(e.lower)} {fmt_real(e.upper)}")
    for s, t in net.pairs:
        lines.append(f"pair {s} {t}")
    return "\n".join(lines) + "\n"
