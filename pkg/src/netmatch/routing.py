"""Routing capacity regions under lower and upper edge capacities.

A rate vector is routable when the network extended with fictitious return
edges (sink back to source, pinned to ``[R, R]``) carries a circulation.
Hoffman's cut condition on that extended network gives, cut by cut, a linear
inequality in the rates.

For multiple-access (one sink) and broadcast (one source) networks the family
collapses to subset-sum bounds ``sigma(A) <= sum_A R <= rho(A)``.  Each cut
condition reads ``sum R <= c(X, X̄) - d(X̄, X)`` (or the mirrored lower
bound), so both capacity functions include the opposite-direction terms;
without them the region is wrong as soon as a cut is crossed backwards by a
positive-capacity edge.

For interference networks the cut family is only necessary; exact
feasibility at a given rate point is decided over elementary path flows.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import lp
from .netmodel import DEFAULT_TOL, Edge, Graph, Network, NetworkError, fmt_real
from .setfn import MAX_LP, SetFunction, subset_order

MA, BC, INTERFERENCE = "ma", "bc", "interference"
MAX_CUT_NODES = 20
MAX_PATHS = 100_000


class RoutingError(NetworkError):
    pass


@dataclass(frozen=True)
class FictitiousEdge:
    tail: str
    head: str
    rate: int  # index into ModifiedNetwork.rate_names


@dataclass(frozen=True)
class ModifiedNetwork:
    """A graph plus tagged return edges whose interval is ``[R, R]``."""

    graph: Graph
    fictitious: tuple[FictitiousEdge, ...]
    rate_names: tuple[str, ...]
    kind: str

    def instantiate(self, rates: Sequence[float]) -> Graph:
        """Pin every fictitious edge to its rate and return a plain graph."""
        if len(rates) != len(self.rate_names):
            raise RoutingError(f"expected {len(self.rate_names)} rates")
        extra = tuple(Edge(f.tail, f.head, rates[f.rate], rates[f.rate]) for f in self.fictitious)
        return Graph(self.graph.nodes, self.graph.edges + extra)


def _bare(net: Graph) -> Graph:
    return Graph(net.nodes, net.edges)


def modified_network(net: Network, kind: str, pairing=None) -> ModifiedNetwork:
    if kind == MA:
        if len(net.sinks) != 1:
            raise RoutingError("multiple-access routing needs exactly one sink")
        t = net.sinks[0]
        fict = tuple(FictitiousEdge(t, s, i) for i, s in enumerate(net.sources))
        return ModifiedNetwork(_bare(net), fict, net.sources, kind)
    if kind == BC:
        if len(net.sources) != 1:
            raise RoutingError("broadcast routing needs exactly one source")
        s = net.sources[0]
        fict = tuple(FictitiousEdge(t, s, j) for j, t in enumerate(net.sinks))
        return ModifiedNetwork(_bare(net), fict, net.sinks, kind)
    if kind == INTERFERENCE:
        pairs = _pairing(net, pairing)
        fict = tuple(FictitiousEdge(t, s, i) for i, (s, t) in enumerate(pairs))
        return ModifiedNetwork(_bare(net), fict, tuple(s for s, _ in pairs), kind)
    raise RoutingError(f"unknown routing kind {kind!r}")


def _pairing(net: Network, pairing) -> tuple[tuple[str, str], ...]:
    pairs = tuple(tuple(p) for p in (pairing if pairing is not None else net.pairs))
    srcs = [s for s, _ in pairs]
    snks = [t for _, t in pairs]
    if (
        not pairs
        or sorted(srcs) != sorted(net.sources)
        or sorted(snks) != sorted(net.sinks)
        or len(set(srcs)) != len(srcs)
        or len(set(snks)) != len(snks)
    ):
        raise RoutingError("interference routing needs a bijective source/sink pairing")
    return pairs


# -- symbolic cut family -----------------------------------------------------


@dataclass(frozen=True)
class SymbolicInequality:
    """``sum_i coeffs[i] * R_i <= upper_sum - lower_sum``.

    ``upper_sum`` is the upper capacity of real edges leaving the cut,
    ``lower_sum`` the lower capacity of real edges entering it.
    """

    coeffs: tuple[int, ...]
    upper_sum: float
    lower_sum: float

    @property
    def bound(self) -> float:
        return self.upper_sum - self.lower_sum

    def slack(self, rates: Sequence[float]) -> float:
        return self.bound - sum(c * r for c, r in zip(self.coeffs, rates))


def _subset_matrix(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def symbolic_hoffman_cuts(nstar: ModifiedNetwork) -> tuple[SymbolicInequality, ...]:
    """One inequality per node subset M, keeping the tightest per coefficient vector.

    The entry with all-zero coefficients, if present, is the purely numeric
    Hoffman condition on the real edges.
    """
    g = nstar.graph
    n = len(g.nodes)
    if n > MAX_CUT_NODES:
        raise RoutingError(f"cut enumeration limited to {MAX_CUT_NODES} nodes")
    idx = g.index
    inside = _subset_matrix(n)
    up = np.zeros(len(inside))
    low = np.zeros(len(inside))
    for e in g.edges:
        a, b = inside[:, idx[e.tail]], inside[:, idx[e.head]]
        up += (a & ~b) * e.upper
        low += (~a & b) * e.lower
    k = len(nstar.rate_names)
    coef = np.zeros((len(inside), k), dtype=np.int64)
    for f in nstar.fictitious:
        a, b = inside[:, idx[f.tail]], inside[:, idx[f.head]]
        # entering M: its lower value R joins d(M̄, M); leaving: upper R joins c(M, M̄)
        coef[:, f.rate] += (~a & b).astype(np.int64) - (a & ~b).astype(np.int64)
    best: dict[tuple[int, ...], int] = {}
    bound = up - low
    for row in range(len(inside)):
        key = tuple(int(v) for v in coef[row])
        j = best.get(key)
        if j is None or bound[row] < bound[j]:
            best[key] = row
    out = [
        SymbolicInequality(key, float(up[row]), float(low[row]))
        for key, row in best.items()
    ]
    out.sort(key=lambda q: (sum(map(abs, q.coeffs)), tuple(-c for c in q.coeffs)))
    return tuple(out)


@dataclass(frozen=True)
class LinearInequality:
    """``sum coeffs * R <= bound`` over the rate variables."""

    coeffs: tuple[int, ...]
    bound: float

    def slack(self, rates: Sequence[float]) -> float:
        return self.bound - sum(c * r for c, r in zip(self.coeffs, rates))

    def render(self, names: Sequence[str]) -> str:
        pos = [names[i] for i, c in enumerate(self.coeffs) if c > 0 for _ in range(c)]
        neg = [names[i] for i, c in enumerate(self.coeffs) if c < 0 for _ in range(-c)]
        b = self.bound + 0.0
        if not pos:
            rhs = " + ".join(neg) if neg else "0"
            return f"{fmt_real(0.0 - b)} <= {rhs}"
        lhs = " + ".join(pos)
        if not neg:
            return f"{lhs} <= {fmt_real(b)}"
        rhs = " + ".join(neg)
        if b > 0:
            rhs += f" + {fmt_real(b)}"
        elif b < 0:
            rhs += f" - {fmt_real(-b)}"
        return f"{lhs} <= {rhs}"


def irredundant(ineqs: Sequence[LinearInequality], tol: float = DEFAULT_TOL) -> list[LinearInequality]:
    """Drop every inequality implied by the remaining ones.

    Each candidate is maximized over the others (free variables, exact LP);
    it is redundant when that maximum does not exceed its bound by more than
    ``tol``.  Candidates are tried from the last to the first.
    """
    keep = list(ineqs)
    i = len(keep) - 1
    while i >= 0:
        cand = keep[i]
        others = keep[:i] + keep[i + 1:]
        if _implied(cand, others, tol):
            keep = others
        i -= 1
    return keep


def _implied(cand: LinearInequality, others: Sequence[LinearInequality], tol: float) -> bool:
    if not others:
        return all(c == 0 for c in cand.coeffs) and cand.bound >= -tol
    # free rates as x+ - x-
    A = [[c for c in q.coeffs] + [-c for c in q.coeffs] for q in others]
    b = [q.bound for q in others]
    obj = list(cand.coeffs) + [-c for c in cand.coeffs]
    res = lp.linprog_exact(obj, A, b, maximize=True)
    if res.status == "infeasible":
        return True
    if res.status == "unbounded":
        return False
    return float(res.value) <= cand.bound + tol


@dataclass(frozen=True)
class InterferenceRegion:
    """Necessary condition for routability: the Hoffman cut family of N*."""

    rate_names: tuple[str, ...]
    family: tuple[SymbolicInequality, ...]
    inequalities: tuple[LinearInequality, ...]  # irredundant, nonnegativity included

    def contains(self, rates: Sequence[float], tol: float = DEFAULT_TOL) -> bool:
        if any(r < -tol for r in rates):
            return False
        return all(q.slack(rates) >= -tol for q in self.family)

    def render(self, names: Optional[Sequence[str]] = None) -> list[str]:
        names = names or [f"R{i + 1}" for i in range(len(self.rate_names))]
        return [q.render(names) for q in self.inequalities]


def _nonnegativity(k: int) -> list[LinearInequality]:
    return [
        LinearInequality(tuple(-1 if j == i else 0 for j in range(k)), 0.0) for i in range(k)
    ]


def interference_necessary_region(
    net: Network, pairing=None, tol: float = DEFAULT_TOL
) -> InterferenceRegion:
    nstar = modified_network(net, INTERFERENCE, pairing)
    family = symbolic_hoffman_cuts(nstar)
    k = len(nstar.rate_names)
    ineqs = _nonnegativity(k) + [
        LinearInequality(q.coeffs, q.bound) for q in family if any(q.coeffs)
    ]
    numeric = [q for q in family if not any(q.coeffs)]
    if numeric and numeric[0].bound < -tol:
        # no circulation on the real edges at all: region is empty
        ineqs = [LinearInequality((0,) * k, numeric[0].bound)]
    return InterferenceRegion(nstar.rate_names, family, tuple(irredundant(ineqs, tol)))


# -- multiple-access / broadcast ---------------------------------------------


@dataclass(frozen=True)
class SandwichRegion:
    """``sigma(A) <= sum_A R <= rho(A)`` for nonempty A, plus a numeric
    condition on the empty set that decides whether any circulation exists.

    ``empty_upper`` is min c(X, X̄) - d(X̄, X) and ``empty_lower`` max
    d(X, X̄) - c(X̄, X) over the cuts that separate no terminal from the hub;
    the region is nonempty only if ``empty_lower <= 0 <= empty_upper``.
    """

    kind: str
    rho: SetFunction
    sigma: SetFunction
    empty_upper: float
    empty_lower: float

    @property
    def ground(self) -> tuple[str, ...]:
        return self.rho.ground

    @property
    def base_feasible(self) -> bool:
        return self.empty_lower <= DEFAULT_TOL and self.empty_upper >= -DEFAULT_TOL

    def margins(self, rates: Sequence[float]) -> list[float]:
        """Slack of every defining inequality at ``rates`` (negative = violated)."""
        out = [-self.empty_lower, self.empty_upper]
        out += list(rates)
        for m in range(1, 1 << self.rho.p):
            s = sum(r for i, r in enumerate(rates) if m >> i & 1)
            out.append(self.rho.values[m] - s)
            out.append(s - self.sigma.values[m])
        return out

    def contains(self, rates: Sequence[float], tol: float = DEFAULT_TOL) -> bool:
        return min(self.margins(rates)) >= -tol

    def describe(self) -> list[str]:
        lines = []
        for m in subset_order(self.rho.p)[1:]:
            terms = " + ".join(
                f"R[{g}]" for i, g in enumerate(self.ground) if m >> i & 1
            )
            lines.append(
                f"{fmt_real(self.sigma.values[m])} <= {terms} <= {fmt_real(self.rho.values[m])}"
            )
        return lines


def _sandwich(nodes, edges, hub: str, terminals: Sequence[str]):
    """Tabulate U(B), L(B) over sets X not containing ``hub`` with X ∩ terminals = B."""
    others = [v for v in nodes if v != hub]
    n = len(others)
    if n + 1 > MAX_CUT_NODES:
        raise RoutingError(f"cut enumeration limited to {MAX_CUT_NODES} nodes")
    pos = {v: i for i, v in enumerate(others)}
    inside = _subset_matrix(n)

    def member(v):
        if v == hub:
            return np.zeros(len(inside), dtype=bool)
        return inside[:, pos[v]]

    f = np.zeros(len(inside))  # c(X, X̄) - d(X̄, X)
    g = np.zeros(len(inside))  # d(X, X̄) - c(X̄, X)
    for tail, head, lower, upper in edges:
        a, b = member(tail), member(head)
        out = a & ~b
        inn = ~a & b
        f += out * upper - inn * lower
        g += out * lower - inn * upper
    tmask = np.zeros(len(inside), dtype=np.int64)
    for i, t in enumerate(terminals):
        tmask |= member(t).astype(np.int64) << i
    k = len(terminals)
    U = np.full(1 << k, np.inf)
    L = np.full(1 << k, -np.inf)
    np.minimum.at(U, tmask, f)
    np.maximum.at(L, tmask, g)
    return U, L


def _closures(U: np.ndarray, L: np.ndarray, k: int):
    # rho(A) = min over B ⊇ A of U(B); sigma(A) = max over B ⊆ A of L(B)
    rho = U.copy()
    sigma = L.copy()
    for i in range(k):
        bit = 1 << i
        for m in range(1 << k):
            if m & bit:
                rho[m ^ bit] = min(rho[m ^ bit], rho[m])
                sigma[m] = max(sigma[m], sigma[m ^ bit])
    return rho, sigma


def _sandwich_region(kind, nodes, edges, hub, terminals) -> SandwichRegion:
    k = len(terminals)
    if k > MAX_LP:
        raise RoutingError(f"routing tables limited to {MAX_LP} terminals")
    U, L = _sandwich(nodes, edges, hub, terminals)
    rho, sigma = _closures(U, L, k)
    rho_vals = [0.0] + [float(v) for v in rho[1:]]
    sigma_vals = [0.0] + [float(v) for v in sigma[1:]]
    return SandwichRegion(
        kind,
        SetFunction(tuple(terminals), tuple(rho_vals)),
        SetFunction(tuple(terminals), tuple(sigma_vals)),
        float(U[0]),
        float(L[0]),
    )


def ma_region(net: Network) -> SandwichRegion:
    """Multiple-access routing region: ``rho_m`` and ``sigma_m`` over source subsets."""
    if len(net.sinks) != 1:
        raise RoutingError("multiple-access routing needs exactly one sink")
    edges = [(e.tail, e.head, e.lower, e.upper) for e in net.edges]
    return _sandwich_region(MA, net.nodes, edges, net.sinks[0], net.sources)


def bc_region(net: Network) -> SandwichRegion:
    """Broadcast routing region: ``rho_b`` and ``sigma_b`` over sink subsets.

    Same tabulation as the multiple-access case on the reversed graph, with
    the source as hub.
    """
    if len(net.sources) != 1:
        raise RoutingError("broadcast routing needs exactly one source")
    edges = [(e.head, e.tail, e.lower, e.upper) for e in net.edges]
    return _sandwich_region(BC, net.nodes, edges, net.sources[0], net.sinks)


# -- interference: exact path oracle -----------------------------------------


def elementary_paths(net: Graph, s: str, t: str, limit: int = MAX_PATHS) -> list[tuple[int, ...]]:
    """All simple s->t paths as tuples of edge indices, in DFS order."""
    out_edges: dict[str, list[int]] = {v: [] for v in net.nodes}
    for k, e in enumerate(net.edges):
        out_edges[e.tail].append(k)
    paths: list[tuple[int, ...]] = []
    stack = [(s, (), frozenset([s]))]
    while stack:
        v, path, seen = stack.pop()
        if v == t:
            paths.append(path)
            if len(paths) > limit:
                raise RoutingError(f"more than {limit} elementary paths")
            continue
        for k in reversed(out_edges[v]):
            w = net.edges[k].head
            if w not in seen:
                stack.append((w, path + (k,), seen | {w}))
    return paths


@dataclass(frozen=True)
class PathFlowVerdict:
    feasible: bool
    paths: tuple[tuple[int, tuple[str, ...], float], ...] = ()  # (commodity, nodes, flow)
    edge_load: tuple[float, ...] = ()


def interference_routing_feasible(
    net: Network, pairing, rates: Sequence[float], tol: float = DEFAULT_TOL
) -> PathFlowVerdict:
    """Exact test for nonnegative path flows meeting the rates and edge intervals."""
    pairs = _pairing(net, pairing)
    if len(rates) != len(pairs):
        raise RoutingError(f"expected {len(pairs)} rates")
    if any(r < 0 for r in rates):
        raise RoutingError("rates must be nonnegative")
    cols: list[tuple[int, tuple[int, ...]]] = []
    total = 0
    for i, (s, t) in enumerate(pairs):
        ps = elementary_paths(net, s, t, MAX_PATHS - total)
        total += len(ps)
        cols += [(i, p) for p in ps]
    x = _path_lp(net, pairs, cols, rates, 0)
    if x is None and tol > 0:
        x = _path_lp(net, pairs, cols, rates, tol)
    if x is None:
        return PathFlowVerdict(False)
    load = [0.0] * len(net.edges)
    witness = []
    for (i, p), v in zip(cols, x):
        v = float(v)
        for k in p:
            load[k] += v
        if v > 0:
            nodes = (net.edges[p[0]].tail,) + tuple(net.edges[k].head for k in p)
            witness.append((i, nodes, v))
    return PathFlowVerdict(True, tuple(witness), tuple(load))


def _path_lp(net, pairs, cols, rates, tol):
    t = Fraction(tol)
    A_eq = [[1 if i == c else 0 for c, _ in cols] for i in range(len(pairs))]
    b_eq = [Fraction(r) for r in rates]
    A_ub, b_ub = [], []
    for k, e in enumerate(net.edges):
        row = [1 if k in p else 0 for _, p in cols]
        A_ub.append(row)
        b_ub.append(Fraction(e.upper) + t)
        if e.lower > 0:
            A_ub.append([-v for v in row])
            b_ub.append(-Fraction(e.lower) + t)
    if not cols:
        ok = all(abs(r) <= tol for r in rates) and all(e.lower <= tol for e in net.edges)
        return [] if ok else None
    if tol:
        # equalities relaxed to a band of width 2*tol
        for row, b in zip(A_eq, b_eq):
            A_ub.append(row)
            b_ub.append(b + t)
            A_ub.append([-v for v in row])
            b_ub.append(-b + t)
        A_eq, b_eq = [], []
    return lp.feasible_point(A_ub, b_ub, A_eq, b_eq, nvars=len(cols))
