"""Set functions over a source ground set.

Subsets are bitmasks over the ordered ground set: bit ``i`` stands for
``ground[i]``.  Entropies are in bits with ``0 log 0 = 0``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import lp
from .netmodel import DEFAULT_TOL, parse_real

MAX_TABLE = 20
MAX_LP = 12

Subset = Union[int, Iterable[str]]


class SetFunctionError(ValueError):
    pass


class PreconditionError(SetFunctionError):
    """An input set function fails the axioms a result depends on."""


def to_mask(ground: Sequence[str], S: Subset) -> int:
    if isinstance(S, (int, np.integer)):
        S = int(S)
        if not 0 <= S < 1 << len(ground):
            raise SetFunctionError(f"subset mask {S} out of range")
        return S
    pos = {g: i for i, g in enumerate(ground)}
    mask = 0
    for s in S:
        if s not in pos:
            raise SetFunctionError(f"{s!r} is not in the ground set {tuple(ground)}")
        mask |= 1 << pos[s]
    return mask


def members(ground: Sequence[str], mask: int) -> tuple[str, ...]:
    return tuple(g for i, g in enumerate(ground) if mask >> i & 1)


def subset_order(p: int) -> list[int]:
    """All masks sorted by (cardinality, mask)."""
    return sorted(range(1 << p), key=lambda m: (bin(m).count("1"), m))


@dataclass(frozen=True)
class SetFunction:
    ground: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(self.ground))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != 1 << len(self.ground):
            raise SetFunctionError("need one value per subset")
        if self.values[0] != 0:
            raise SetFunctionError("value of the empty set must be 0")
        if not all(math.isfinite(v) for v in self.values):
            raise SetFunctionError("set function values must be finite")

    @classmethod
    def from_dict(cls, ground: Sequence[str], table: dict) -> "SetFunction":
        vals = [0.0] * (1 << len(ground))
        for S, v in table.items():
            vals[to_mask(ground, S)] = v
        return cls(tuple(ground), tuple(vals))

    def __call__(self, S: Subset) -> float:
        return self.values[to_mask(self.ground, S)]

    @property
    def p(self) -> int:
        return len(self.ground)

    def table(self) -> list[tuple[tuple[str, ...], float]]:
        return [(members(self.ground, m), self.values[m]) for m in subset_order(self.p)]


@dataclass(frozen=True)
class RatePoint:
    ground: tuple[str, ...]
    rates: tuple[float, ...]

    def __post_init__(self):
        if any(r < 0 for r in self.rates):
            raise SetFunctionError("rates must be nonnegative")

    def subset_sum(self, mask: int) -> float:
        return sum(r for i, r in enumerate(self.rates) if mask >> i & 1)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.ground, self.rates))


# -- entropy -----------------------------------------------------------------


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p}")
    if p in (0, 1):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Joint distribution of one symbol per source (memoryless model)."""

    sources: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "sources", tuple(self.sources))
        if probs.ndim != len(self.sources):
            raise SetFunctionError("need one probability axis per source")
        if np.any(probs < 0):
            raise SetFunctionError("negative probability")
        if abs(probs.sum() - 1) > 1e-9:
            raise SetFunctionError(f"probabilities sum to {probs.sum()}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return self.probs.shape

    def __eq__(self, other):
        return (
            isinstance(other, JointPMF)
            and self.sources == other.sources
            and np.array_equal(self.probs, other.probs)
        )

    __hash__ = None


def _entropy(probs: np.ndarray) -> float:
    q = probs[probs > 0]
    return float(-(q * np.log2(q)).sum()) + 0.0


def joint_entropy(pmf: JointPMF, S: Subset) -> float:
    """H(X_S)."""
    mask = to_mask(pmf.sources, S)
    drop = tuple(i for i in range(len(pmf.sources)) if not mask >> i & 1)
    return _entropy(pmf.probs.sum(axis=drop)) if mask else 0.0


def conditional_entropy(pmf: JointPMF, S: Subset) -> float:
    """H(X_S | X_rest) = H(X_all) - H(X_rest), in bits."""
    mask = to_mask(pmf.sources, S)
    if mask == 0:
        return 0.0
    full = (1 << len(pmf.sources)) - 1
    return max(0.0, joint_entropy(pmf, full) - joint_entropy(pmf, full ^ mask))


def entropy_setfunction(pmf: JointPMF) -> SetFunction:
    p = len(pmf.sources)
    if p > MAX_TABLE:
        raise SetFunctionError(f"at most {MAX_TABLE} sources can be tabulated")
    full = (1 << p) - 1
    h_all = joint_entropy(pmf, full)
    vals = [0.0] * (1 << p)
    for m in range(1, 1 << p):
        vals[m] = max(0.0, h_all - joint_entropy(pmf, full ^ m))
    return SetFunction(pmf.sources, tuple(vals))


def bss_pmf(p: float, names=("s1", "s2")) -> JointPMF:
    """Binary symmetric source: uniform X1, X2 = X1 xor Bernoulli(p)."""
    return JointPMF(tuple(names), np.array([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]]))


def independent_uniform_bits(names=("s1", "s2")) -> JointPMF:
    k = len(names)
    return JointPMF(tuple(names), np.full((2,) * k, 0.5**k))


def parse_pmf(text: str) -> JointPMF:
    """Parse ``alphabet <source> <size>`` / ``prob <sym...> <value>`` lines."""
    names: list[str] = []
    sizes: list[int] = []
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        try:
            if words[0] == "alphabet" and len(words) == 3:
                if entries:
                    raise ValueError("alphabet lines must precede prob lines")
                names.append(words[1])
                sizes.append(int(words[2]))
                if sizes[-1] < 1:
                    raise ValueError("alphabet size must be positive")
            elif words[0] == "prob" and len(words) == len(names) + 2:
                sym = tuple(int(w) for w in words[1:-1])
                entries.append((sym, parse_real(words[-1])))
            else:
                raise ValueError(f"unexpected line {raw.strip()!r}")
        except ValueError as exc:
            raise SetFunctionError(f"line {lineno}: {exc}") from None
    if not names:
        raise SetFunctionError("no alphabet declared")
    probs = np.zeros(sizes)
    for sym, v in entries:
        if any(not 0 <= s < k for s, k in zip(sym, sizes)):
            raise SetFunctionError(f"symbol {sym} outside the alphabet")
        probs[sym] += v
    return JointPMF(tuple(names), probs)


def render_pmf(pmf: JointPMF) -> str:
    lines = [f"alphabet {s} {k}" for s, k in zip(pmf.sources, pmf.alphabet_sizes)]
    for sym in itertools.product(*(range(k) for k in pmf.alphabet_sizes)):
        v = pmf.probs[sym]
        if v:
            lines.append("prob " + " ".join(map(str, sym)) + f" {v:.12g}")
    return "\n".join(lines) + "\n"


# -- axioms ------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomVerdict:
    ok: bool
    axiom: Optional[str] = None  # "normalized" | "monotone" | "submodular" | "supermodular"
    S: Optional[int] = None
    T: Optional[int] = None
    margin: float = 0.0

    def __bool__(self):
        return self.ok


def _check_axioms(f: SetFunction, tol: float, sign: int) -> AxiomVerdict:
    # sign=+1: submodular, sign=-1: supermodular
    v = f.values
    if abs(v[0]) > tol:
        return AxiomVerdict(False, "normalized", 0, 0, abs(v[0]))
    n = len(v)
    for S in range(n):
        # suffices to compare S with S + one element
        for i in range(f.p):
            if not S >> i & 1:
                T = S | 1 << i
                if v[S] - v[T] > tol:
                    return AxiomVerdict(False, "monotone", S, T, v[S] - v[T])
    worst = AxiomVerdict(True)
    for S in range(n):
        for T in range(S + 1, n):
            lhs = v[S & T] + v[S | T]
            rhs = v[S] + v[T]
            gap = sign * (lhs - rhs)
            if gap > tol and gap > worst.margin:
                worst = AxiomVerdict(
                    False, "submodular" if sign > 0 else "supermodular", S, T, gap
                )
    return worst


def is_polymatroid(f: SetFunction, tol: float = DEFAULT_TOL) -> AxiomVerdict:
    """Normalized, monotone, submodular.  Reports the worst submodularity pair."""
    return _check_axioms(f, tol, +1)


def is_copolymatroid(f: SetFunction, tol: float = DEFAULT_TOL) -> AxiomVerdict:
    """Normalized, monotone, supermodular."""
    return _check_axioms(f, tol, -1)


@dataclass(frozen=True)
class HanVerdict:
    feasible: bool
    violator: Optional[int] = None
    margins: tuple[tuple[int, float, float, float], ...] = ()  # (S, sigma, rho, slack)


def han_feasible(sigma: SetFunction, rho: SetFunction, tol: float = DEFAULT_TOL) -> HanVerdict:
    """Pointwise test sigma(S) <= rho(S) for nonempty S.

    By Han's lemma this is equivalent to a common rate point existing, provided
    sigma is a co-polymatroid and rho a polymatroid; both are checked first.
    """
    if sigma.ground != rho.ground:
        raise SetFunctionError("set functions have different ground sets")
    if not (v := is_copolymatroid(sigma, tol)):
        raise PreconditionError(f"lower function is not a co-polymatroid ({v.axiom})")
    if not (v := is_polymatroid(rho, tol)):
        raise PreconditionError(f"upper function is not a polymatroid ({v.axiom})")
    margins = []
    violator = None
    for m in subset_order(sigma.p)[1:]:
        slack = rho.values[m] - sigma.values[m]
        margins.append((m, sigma.values[m], rho.values[m], slack))
        if slack < -tol and violator is None:
            violator = m
    return HanVerdict(violator is None, violator, tuple(margins))


# -- rate points -------------------------------------------------------------


def _rate_lp(p: int, lower: Sequence, upper: Sequence, relax: bool = False):
    """Cutting-plane exact LP for lower(S) <= sum_S R <= upper(S).

    Plain mode returns a feasible R or ``None``.  With ``relax`` a variable
    ``e >= 0`` widens every bound and is minimized; the result is ``(R, e)``,
    the point of smallest worst-case violation.
    """
    masks = range(1, 1 << p)
    nv = p + 1 if relax else p

    def row(m):
        r = [1 if m >> i & 1 else 0 for i in range(p)]
        return r + [0] if relax else r

    def violated(x, e):
        out = []
        for m in masks:
            s = sum(x[i] for i in range(p) if m >> i & 1)
            if s - upper[m] > e:
                out.append((s - upper[m], "ub", m))
            if lower[m] - s > e:
                out.append((lower[m] - s, "lb", m))
        out.sort(key=lambda t: (-t[0], t[2], t[1]))
        return out

    active: set[tuple[str, int]] = set()
    for i in range(p):
        active |= {("ub", 1 << i), ("lb", 1 << i)}
    active |= {("ub", (1 << p) - 1), ("lb", (1 << p) - 1)}
    while True:
        A, b = [], []
        for kind, m in sorted(active, key=lambda t: (t[1], t[0])):
            r = row(m)
            if kind == "ub":
                A.append(r[:p] + [-1] if relax else r)
                b.append(upper[m])
            else:
                A.append([-a for a in r[:p]] + [-1] if relax else [-a for a in r])
                b.append(-lower[m])
        if relax:
            res = lp.linprog_exact([0] * p + [1], A, b)
            x = res.x
        else:
            x = lp.feasible_point(A, b, nvars=nv)
        if x is None:
            return None
        x = [Fraction(v) for v in x]
        e = x[p] if relax else Fraction(0)
        bad = violated(x, e)
        if not bad:
            return (x[:p], e) if relax else x
        for _, kind, m in bad[: max(4, p)]:
            active.add((kind, m))


def find_rate_point(
    lower: SetFunction, upper: Sequence[SetFunction], tol: float = DEFAULT_TOL
) -> Optional[RatePoint]:
    """A nonnegative R with lower(S) <= sum_S R <= min_k upper_k(S), or ``None``.

    Solved as exact linear feasibility.  When the exact system is empty, the
    point minimizing the largest bound violation is computed instead and
    accepted if that violation is at most ``tol``.
    """
    uppers = list(upper)
    for u in uppers:
        if u.ground != lower.ground:
            raise SetFunctionError("set functions have different ground sets")
    p = lower.p
    if p > MAX_LP:
        raise SetFunctionError(f"rate search limited to {MAX_LP} sources")
    lo = [Fraction(v) for v in lower.values]
    if uppers:
        hi = [min(Fraction(u.values[m]) for u in uppers) for m in range(1 << p)]
    else:
        # no upper family: any R dominating the lower bounds will do
        hi = [Fraction(sum(lower.values) + 1)] * (1 << p)
    x = _rate_lp(p, lo, hi)
    if x is None and tol > 0:
        x, e = _rate_lp(p, lo, hi, relax=True)
        if e > Fraction(tol):
            x = None
    if x is None:
        return None
    return RatePoint(lower.ground, tuple(float(v) for v in x))


def parse_subset_label(ground: Sequence[str], label: str) -> int:
    """``{s1,s2}`` -> mask."""
    inner = re.sub(r"[{}\s]", "", label)
    return to_mask(ground, [w for w in inner.split(",") if w])


def subset_label(ground: Sequence[str], mask: int) -> str:
    return "{" + ",".join(members(ground, mask)) + "}"
