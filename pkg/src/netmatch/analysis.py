"""Transmissibility verdicts and rate regions.

The matching condition compares the conditional entropies H(X_S | X_rest)
against the network capacity function rho_N(S) for every nonempty source
subset S.  Equality counts as transmissible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .capacity import ALL_SINKS, capacity_setfunction
from .netmodel import DEFAULT_TOL, Network, NetworkError
from .setfn import (
    JointPMF,
    MAX_LP,
    RatePoint,
    SetFunction,
    entropy_setfunction,
    find_rate_point,
    han_feasible,
    members,
    subset_label,
    subset_order,
)


@dataclass(frozen=True)
class Constraint:
    """``value <= sum_S R`` (kind "lower") or ``sum_S R <= value`` (kind "upper")."""

    mask: int
    kind: str
    value: float

    def slack(self, point: Sequence[float]) -> float:
        s = sum(r for i, r in enumerate(point) if self.mask >> i & 1)
        return self.value - s if self.kind == "upper" else s - self.value


@dataclass(frozen=True)
class Region:
    ground: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        for c in self.constraints:
            if c.mask == 0 or c.kind not in ("lower", "upper") or not math.isfinite(c.value):
                raise ValueError(f"bad constraint {c}")

    def contains(self, point: Sequence[float], tol: float = DEFAULT_TOL) -> bool:
        if any(r < -tol for r in point):
            return False
        return all(c.slack(point) >= -tol for c in self.constraints)

    def describe(self) -> list[str]:
        out = []
        for c in self.constraints:
            lhs = " + ".join(f"R[{s}]" for s in members(self.ground, c.mask))
            op = "<=" if c.kind == "upper" else ">="
            out.append(f"{lhs} {op} {c.value:.12g}")
        return out


@dataclass(frozen=True)
class Margin:
    subset: int
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class Verdict:
    decision: bool
    ground: tuple[str, ...]
    margins: tuple[Margin, ...] = ()
    witness: Optional[RatePoint] = None
    violator: Optional[int] = None
    per_sink: dict = field(default_factory=dict)

    @property
    def violator_label(self) -> Optional[str]:
        return None if self.violator is None else subset_label(self.ground, self.violator)


def _worst(margins: Sequence[Margin]) -> Margin:
    # smallest slack; ties go to the later subset in (cardinality, mask) order
    return min(reversed(margins), key=lambda m: m.slack)


def _check_ground(net: Network, pmf: JointPMF):
    if tuple(net.sources) != tuple(pmf.sources):
        raise NetworkError(
            f"source sets differ: network {net.sources} vs distribution {pmf.sources}"
        )


def _compare(sigma: SetFunction, rho: SetFunction, tol: float) -> tuple[bool, tuple[Margin, ...]]:
    margins = tuple(
        Margin(m, sigma.values[m], rho.values[m]) for m in subset_order(sigma.p)[1:]
    )
    return all(m.slack >= -tol for m in margins), margins


def check_transmissible(net: Network, pmf: JointPMF, tol: float = DEFAULT_TOL) -> Verdict:
    """Matching condition H(X_S | X_rest) <= rho_N(S) for all nonempty S."""
    _check_ground(net, pmf)
    sigma = entropy_setfunction(pmf)
    rho = capacity_setfunction(net, ALL_SINKS)
    ok, margins = _compare(sigma, rho, tol)
    violator = None if ok else _worst(margins).subset
    return Verdict(ok, net.sources, margins, violator=violator)


def region_Ct(net: Network, t: str) -> Region:
    if t not in net.sinks:
        raise NetworkError(f"{t!r} is not a sink")
    return _upper_region(capacity_setfunction(net, t))


def independent_capacity_region(net: Network) -> Region:
    """Rates of independent sources deliverable to every sink."""
    return _upper_region(capacity_setfunction(net, ALL_SINKS))


def region_SW(pmf: JointPMF) -> Region:
    """Slepian-Wolf region: subset sums dominate the conditional entropies."""
    sigma = entropy_setfunction(pmf)
    return Region(
        sigma.ground,
        tuple(Constraint(m, "lower", sigma.values[m]) for m in subset_order(sigma.p)[1:]),
    )


def _upper_region(rho: SetFunction) -> Region:
    return Region(
        rho.ground,
        tuple(Constraint(m, "upper", rho.values[m]) for m in subset_order(rho.p)[1:]),
    )


def check_condition2(net: Network, pmf: JointPMF, tol: float = DEFAULT_TOL) -> Verdict:
    """Per-sink test: the Slepian-Wolf region meets every C_t.

    Each sink is decided by the pointwise comparison of Han's lemma; a witness
    rate point is then computed by linear feasibility.
    """
    _check_ground(net, pmf)
    sigma = entropy_setfunction(pmf)
    per_sink = {}
    decision = True
    violator = None
    all_margins: list[Margin] = []
    for t in net.sinks:
        rho = capacity_setfunction(net, t)
        han = han_feasible(sigma, rho, tol)
        witness = find_rate_point(sigma, [rho], tol) if han.feasible else None
        margins = tuple(Margin(m, s, r) for m, s, r, _ in han.margins)
        per_sink[t] = Verdict(han.feasible, net.sources, margins, witness, han.violator)
        all_margins.extend(margins)
        if not han.feasible:
            decision = False
            if violator is None:
                violator = _worst(margins).subset
    return Verdict(decision, net.sources, tuple(all_margins), violator=violator, per_sink=per_sink)


def check_separable(net: Network, pmf: JointPMF, tol: float = DEFAULT_TOL) -> Verdict:
    """Some single R with H(X_S | X_rest) <= sum_S R <= rho_N(S) for all S.

    Decided by linear feasibility; rho_N need not be a polymatroid, so the
    pointwise test is not used.  On failure ``violator`` names the subset with
    the smallest pointwise slack, which may be nonnegative.
    """
    _check_ground(net, pmf)
    if len(net.sources) > MAX_LP:
        raise NetworkError(f"separability test limited to {MAX_LP} sources")
    sigma = entropy_setfunction(pmf)
    rho = capacity_setfunction(net, ALL_SINKS)
    witness = find_rate_point(sigma, [rho], tol)
    _, margins = _compare(sigma, rho, tol)
    if witness is not None:
        return Verdict(True, net.sources, margins, witness)
    return Verdict(False, net.sources, margins, violator=_worst(margins).subset)


def region_vertices_2d(region: Region, tol: float = DEFAULT_TOL) -> list[tuple[float, float]]:
    """Vertices of a two-rate region (with R >= 0), counterclockwise."""
    if len(region.ground) != 2:
        raise ValueError("vertex enumeration needs exactly two rates")
    # half-planes a . x <= b
    planes = [((-1.0, 0.0), 0.0), ((0.0, -1.0), 0.0)]
    for c in region.constraints:
        a = (float(c.mask & 1), float(c.mask >> 1 & 1))
        if c.kind == "upper":
            planes.append((a, c.value))
        else:
            planes.append(((-a[0], -a[1]), -c.value))
    pts: list[tuple[float, float]] = []
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            (a1, b1), (a2, b2) = planes[i], planes[j]
            det = a1[0] * a2[1] - a1[1] * a2[0]
            if abs(det) < 1e-15:
                continue
            x = (b1 * a2[1] - b2 * a1[1]) / det
            y = (a1[0] * b2 - a2[0] * b1) / det
            x, y = x + 0.0, y + 0.0
            if all(a[0] * x + a[1] * y <= b + tol for a, b in planes):
                if not any(abs(x - u) <= tol and abs(y - v) <= tol for u, v in pts):
                    pts.append((x, y))
    if len(pts) <= 2:
        return sorted(pts)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    # start from the vertex nearest the origin for stable output
    k = min(range(len(pts)), key=lambda i: (round(pts[i][0] + pts[i][1], 12), pts[i]))
    return pts[k:] + pts[:k]
