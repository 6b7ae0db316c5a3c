"""The butterfly XOR scheme and Körner-Marton syndrome coding with Monte Carlo.

Bit words are numpy ``uint8`` arrays.  Arithmetic is mod 2.

Randomness: numpy's PCG64 bit generator, seeded per trial with
``SeedSequence([seed, trial])``, so serial and parallel runs agree.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .setfn import binary_entropy

RNG_NAME = "numpy PCG64 via SeedSequence([seed, trial])"
MAX_N = 32
# coset enumeration is used when the coset has at most this many members
_COSET_LIMIT = 1 << 16


class DecodeFailure(Exception):
    def __init__(self, cause: str):
        self.cause = cause
        super().__init__(cause)


def butterfly_run(x1: int, x2: int) -> dict[str, tuple[int, int]]:
    """Both sinks' decoded pairs when m1 forwards x1 xor x2 over m1->m2."""
    if x1 not in (0, 1) or x2 not in (0, 1):
        raise ValueError("butterfly inputs are single bits")
    payload = {
        ("s1", "t1"): x1,
        ("s1", "m1"): x1,
        ("s2", "t2"): x2,
        ("s2", "m1"): x2,
    }
    payload[("m1", "m2")] = payload[("s1", "m1")] ^ payload[("s2", "m1")]
    payload[("m2", "t1")] = payload[("m1", "m2")]
    payload[("m2", "t2")] = payload[("m1", "m2")]
    a, c = payload[("s1", "t1")], payload[("m2", "t1")]
    b, d = payload[("s2", "t2")], payload[("m2", "t2")]
    return {"t1": (a, a ^ c), "t2": (b ^ d, b)}


def _bits(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.uint8)
    if a.ndim != 1 or np.any(a > 1):
        raise ValueError("expected a 1-D word of bits")
    return a


def _matrix(A) -> np.ndarray:
    a = np.asarray(A, dtype=np.uint8)
    if a.ndim != 2 or np.any(a > 1):
        raise ValueError("expected a 2-D binary matrix")
    if a.shape[0] > a.shape[1]:
        raise ValueError("matrix must have no more rows than columns")
    return a


def syndrome(A, z) -> np.ndarray:
    A, z = _matrix(A), _bits(z)
    if A.shape[1] != len(z):
        raise ValueError(f"matrix has {A.shape[1]} columns, word has length {len(z)}")
    return (A.astype(np.int64) @ z % 2).astype(np.uint8)


@dataclass(frozen=True)
class KMPayload:
    s1_t1: np.ndarray
    s2_t2: np.ndarray
    s1_m1: np.ndarray
    s2_m1: np.ndarray
    m1_m2: np.ndarray


def km_encode(x1, x2, A) -> KMPayload:
    """Edge payloads: raw words on the direct edges, syndromes into m1,
    and their xor A(x1 xor x2) on the shared edge."""
    x1, x2, A = _bits(x1), _bits(x2), _matrix(A)
    if len(x1) != len(x2):
        raise ValueError("source words differ in length")
    a1, a2 = syndrome(A, x1), syndrome(A, x2)
    return KMPayload(x1.copy(), x2.copy(), a1, a2, a1 ^ a2)


# -- minimum-weight coset decoding --------------------------------------------


def _word_key(z: np.ndarray) -> int:
    # z[0] is the most significant bit, so int order is lexicographic order
    return int("".join(map(str, z.tolist())) or "0", 2)


def _solve_gf2(A: np.ndarray, s: np.ndarray):
    """Particular solution and null-space basis of A z = s over GF(2), or None."""
    m, n = A.shape
    M = np.concatenate([A, s[:, None]], axis=1).astype(np.uint8)
    pivots = []
    r = 0
    for c in range(n):
        rows = np.nonzero(M[r:, c])[0]
        if len(rows) == 0:
            continue
        p = r + rows[0]
        M[[r, p]] = M[[p, r]]
        hit = np.nonzero(M[:, c])[0]
        hit = hit[hit != r]
        M[hit] ^= M[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if np.any(M[r:, n]):
        return None
    z0 = np.zeros(n, dtype=np.uint8)
    for i, c in enumerate(pivots):
        z0[c] = M[i, n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = M[i, f]
        basis.append(v)
    return z0, basis


def _pack(z: np.ndarray) -> int:
    return _word_key(z)


def min_weight_coset_member(A, s, max_weight: Optional[int] = None) -> np.ndarray:
    """Lowest-weight z with A z = s; ties go to the lexicographically smallest z.

    Raises :class:`DecodeFailure` with cause ``"no-solution"`` when ``s`` is
    not a syndrome of ``A``, or ``"budget"`` when every solution is heavier
    than ``max_weight``.
    """
    A, s = _matrix(A), _bits(s)
    m, n = A.shape
    if len(s) != m:
        raise ValueError(f"syndrome length {len(s)} != {m} rows")
    if max_weight is None:
        max_weight = n
    sol = _solve_gf2(A, s)
    if sol is None:
        raise DecodeFailure("no-solution")
    z0, basis = sol
    if len(basis) <= 16 and (1 << len(basis)) <= _COSET_LIMIT:
        words = np.array([_pack(z0)], dtype=np.int64)
        for b in basis:
            words = np.concatenate([words, words ^ _pack(b)])
        w = np.bitwise_count(words)
        best_w = int(w.min())
        if best_w > max_weight:
            raise DecodeFailure("budget")
        best = int(words[w == best_w].min())
        return np.array([(best >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)
    cols = np.array([_pack(A[:, j]) for j in range(n)], dtype=np.int64)
    target = _pack(s)
    for w in range(max_weight + 1):
        hits = []
        for combo in itertools.combinations(range(n), w):
            acc = 0
            for j in combo:
                acc ^= int(cols[j])
            if acc == target:
                hits.append(sum(1 << (n - 1 - j) for j in combo))
        if hits:
            best = min(hits)
            return np.array([(best >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)
    raise DecodeFailure("budget")


def km_decode(A, syndrome_word, side_info, which_sink: str, max_weight: Optional[int] = None):
    """Recover (x1, x2) at one sink from the shared syndrome and its direct word."""
    z = min_weight_coset_member(A, syndrome_word, max_weight)
    side = _bits(side_info)
    if len(side) != len(z):
        raise ValueError("side information length mismatch")
    if which_sink == "t1":
        return side.copy(), side ^ z
    if which_sink == "t2":
        return side ^ z, side.copy()
    raise ValueError(f"unknown sink {which_sink!r}")


def weight_budget(n: int, p: float) -> int:
    return min(n, math.ceil(2 * n * p + 6))


def rate_rule(n: int, p: float, offset: float) -> int:
    """Syndrome length ceil(n (h(p) + offset)), clipped to [1, n]."""
    return max(1, min(n, math.ceil(n * (binary_entropy(p) + offset) - 1e-12)))


@dataclass(frozen=True)
class KMExperiment:
    n: int
    p: float
    m: int
    trials: int
    seed: int
    errors: int
    failures_by_cause: dict = field(default_factory=dict)
    generator: str = RNG_NAME

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials


def km_trial(n: int, p: float, m: int, seed: int, trial: int) -> Optional[str]:
    """Run one trial; return the failure cause or ``None`` on success."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))
    x1 = rng.integers(0, 2, n, dtype=np.uint8)
    z = (rng.random(n) < p).astype(np.uint8)
    x2 = x1 ^ z
    A = rng.integers(0, 2, (m, n), dtype=np.uint8)
    pay = km_encode(x1, x2, A)
    budget = weight_budget(n, p)
    for sink, side in (("t1", pay.s1_t1), ("t2", pay.s2_t2)):
        try:
            y1, y2 = km_decode(A, pay.m1_m2, side, sink, budget)
        except DecodeFailure as exc:
            return exc.cause
        if not (np.array_equal(y1, x1) and np.array_equal(y2, x2)):
            return "wrong-coset-member"
    return None


def km_experiment(n: int, p: float, m: int, trials: int, seed: int) -> KMExperiment:
    """Empirical probability that some sink fails to recover (x1, x2)."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}]")
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 <= p <= 0.5:
        raise ValueError("crossover probability must be in [0, 1/2]")
    causes: dict[str, int] = {}
    for k in range(trials):
        cause = km_trial(n, p, m, seed, k)
        if cause is not None:
            causes[cause] = causes.get(cause, 0) + 1
    return KMExperiment(n, p, m, trials, seed, sum(causes.values()), dict(sorted(causes.items())))
