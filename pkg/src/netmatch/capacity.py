"""Network capacity functions and discrete memoryless channel capacity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .flows import max_flow
from .netmodel import DEFAULT_TOL, Network, NetworkError
from .setfn import MAX_LP, SetFunction, members, to_mask

ALL_SINKS = "all"


def rho_t(net: Network, S: Iterable[str] | int, t: str) -> float:
    """Min-cut value separating source subset ``S`` from sink ``t``."""
    mask = to_mask(net.sources, S)
    if mask == 0:
        raise NetworkError("rho_t needs a nonempty source subset")
    if t not in net.sinks:
        raise NetworkError(f"{t!r} is not a sink")
    return max_flow(net, members(net.sources, mask), t).value


def rho_N(net: Network, S: Iterable[str] | int) -> float:
    """Capacity function: the worst sink's ``rho_t``."""
    return min(rho_t(net, S, t) for t in net.sinks)


def capacity_setfunction(net: Network, t: str = ALL_SINKS) -> SetFunction:
    """Tabulate ``rho_t`` (or ``rho_N`` for ``t="all"``) over all source subsets."""
    p = len(net.sources)
    if p > MAX_LP:
        raise NetworkError(f"capacity tabulation limited to {MAX_LP} sources")
    sinks = net.sinks if t == ALL_SINKS else (t,)
    if t != ALL_SINKS and t not in net.sinks:
        raise NetworkError(f"{t!r} is not a sink")
    vals = [0.0] * (1 << p)
    for m in range(1, 1 << p):
        S = members(net.sources, m)
        vals[m] = min(max_flow(net, S, s).value for s in sinks)
    return SetFunction(net.sources, tuple(vals))


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Transition probabilities ``w[x, y]``: rows are inputs, columns outputs."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim != 2 or 0 in w.shape:
            raise ValueError("channel matrix must be a nonempty 2-D array")
        if np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1) > 1e-9):
            raise ValueError("channel matrix rows must be probability vectors")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def parse_channel(text: str) -> ChannelMatrix:
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0][0] != "channel" or len(lines[0]) != 3:
        raise ValueError("expected header 'channel <rows> <cols>'")
    r, c = int(lines[0][1]), int(lines[0][2])
    rows = [[float(v) for v in ln] for ln in lines[1:]]
    if len(rows) != r or any(len(row) != c for row in rows):
        raise ValueError(f"expected {r} rows of {c} probabilities")
    return ChannelMatrix(np.array(rows))


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    input_distribution: tuple[float, ...]
    iterations: int
    upper_bound: float


def _divergences(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    # D(w[x, :] || q) in bits, for every input x
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log2(w / q), 0.0)
    return terms.sum(axis=1)


def dmc_capacity(W: ChannelMatrix, tol: float = DEFAULT_TOL, max_iter: int = 100_000) -> CapacityResult:
    """Blahut-Arimoto from the uniform input, stopped when the bounds
    ``I(p) <= C <= max_x D(w_x || q)`` are within ``tol``."""
    w = W.w
    p = np.full(w.shape[0], 1.0 / w.shape[0])
    for it in range(1, max_iter + 1):
        q = p @ w
        d = _divergences(w, q)
        lower = float(p @ d)
        upper = float(d.max())
        if upper - lower < tol:
            break
        p = p * np.exp2(d)
        p /= p.sum()
    return CapacityResult(max(lower, 0.0), tuple(float(v) for v in p), it, upper)
