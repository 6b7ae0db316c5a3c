import itertools

import numpy as np
import pytest

from netmatch.codingdemo import (
    MAX_N,
    RNG_NAME,
    DecodeFailure,
    butterfly_run,
    km_decode,
    km_encode,
    km_experiment,
    km_trial,
    min_weight_coset_member,
    rate_rule,
    syndrome,
    weight_budget,
)

E12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.uint8)


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


def brute_coset(A, s):
    """Every z with A z = s, by exhaustive enumeration."""
    n = A.shape[1]
    out = []
    for z in itertools.product((0, 1), repeat=n):
        z = np.array(z, dtype=np.uint8)
        if np.array_equal(A.astype(int) @ z % 2, s):
            out.append(z)
    return out


def brute_ml(A, s, p):
    """argmax of the Bernoulli(p) likelihood; ties to the lexicographically smallest word."""
    coset = brute_coset(A, s)
    n = A.shape[1]
    if not coset:
        return None
    score = [(-(int(z.sum()) * np.log(p) + (n - int(z.sum())) * np.log(1 - p)), tuple(z)) for z in coset]
    return np.array(min(score)[1], dtype=np.uint8)


# -- butterfly ---------------------------------------------------------------


@pytest.mark.parametrize("x1,x2", list(itertools.product((0, 1), repeat=2)))
def test_butterfly_identity(x1, x2):
    out = butterfly_run(x1, x2)
    assert out == {"t1": (x1, x2), "t2": (x1, x2)}


def test_butterfly_rejects_non_bits():
    with pytest.raises(ValueError):
        butterfly_run(2, 0)


# -- encoding ----------------------------------------------------------------


def test_equal_words_give_zero_syndrome():
    rng = np.random.default_rng(0)
    A = rng.integers(0, 2, (3, 6), dtype=np.uint8)
    x = rng.integers(0, 2, 6, dtype=np.uint8)
    assert not km_encode(x, x, A).m1_m2.any()


def test_truncated_identity_syndrome():
    x1 = bits("1010")
    x2 = x1 ^ bits("0110")
    pay = km_encode(x1, x2, E12)
    assert pay.m1_m2.tolist() == [0, 1]
    assert np.array_equal(pay.s1_t1, x1) and np.array_equal(pay.s2_t2, x2)
    assert np.array_equal(pay.s1_m1, syndrome(E12, x1))


def test_linearity_under_common_shift():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n, m = 8, 4
        A = rng.integers(0, 2, (m, n), dtype=np.uint8)
        x1, x2, u = (rng.integers(0, 2, n, dtype=np.uint8) for _ in range(3))
        a = km_encode(x1, x2, A).m1_m2
        b = km_encode(x1 ^ u, x2 ^ u, A).m1_m2
        assert not (a ^ b).any()


def test_encode_dimension_errors():
    with pytest.raises(ValueError):
        km_encode(bits("101"), bits("1010"), E12)
    with pytest.raises(ValueError):
        km_encode(bits("101"), bits("101"), E12)
    with pytest.raises(ValueError):
        syndrome(np.ones((5, 4), dtype=np.uint8), bits("1010"))
    with pytest.raises(ValueError):
        syndrome(np.full((2, 4), 2, dtype=np.uint8), bits("1010"))


# -- decoding ----------------------------------------------------------------


def test_zero_syndrome_decodes_to_zero():
    x1 = bits("1101")
    assert min_weight_coset_member(E12, bits("00")).tolist() == [0, 0, 0, 0]
    y1, y2 = km_decode(E12, bits("00"), x1, "t1")
    assert np.array_equal(y1, x1) and np.array_equal(y2, x1)


def test_truncated_identity_decoding():
    assert min_weight_coset_member(E12, bits("01")).tolist() == [0, 1, 0, 0]


def test_tie_goes_to_lexicographically_smallest():
    # A = [1 1 1 1]: syndrome 1 has four weight-1 solutions; 0001 is smallest
    A = np.ones((1, 4), dtype=np.uint8)
    assert min_weight_coset_member(A, bits("1")).tolist() == [0, 0, 0, 1]


def test_tie_rule_exhaustive_small():
    rng = np.random.default_rng(2)
    for _ in range(150):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, n + 1))
        A = rng.integers(0, 2, (m, n), dtype=np.uint8)
        s = rng.integers(0, 2, m, dtype=np.uint8)
        coset = brute_coset(A, s)
        if not coset:
            with pytest.raises(DecodeFailure) as info:
                min_weight_coset_member(A, s)
            assert info.value.cause == "no-solution"
            continue
        best = min(coset, key=lambda z: (int(z.sum()), tuple(z)))
        assert min_weight_coset_member(A, s).tolist() == best.tolist()


def test_weight_search_path_matches_brute_force():
    # cosets with more than 2^16 members take the increasing-weight search
    rng = np.random.default_rng(3)
    n, m = 20, 3
    for _ in range(10):
        A = rng.integers(0, 2, (m, n), dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        z[rng.choice(n, 2, replace=False)] = 1
        s = syndrome(A, z)
        best = None
        for w in range(3):
            for combo in itertools.combinations(range(n), w):
                cand = np.zeros(n, dtype=np.uint8)
                cand[list(combo)] = 1
                if np.array_equal(syndrome(A, cand), s):
                    key = (w, tuple(cand))
                    best = key if best is None or key < best else best
            if best is not None:
                break
        assert min_weight_coset_member(A, s).tolist() == list(best[1])


def test_budget_exceeded():
    A = np.eye(4, dtype=np.uint8)
    with pytest.raises(DecodeFailure) as info:
        min_weight_coset_member(A, bits("1111"), max_weight=2)
    assert info.value.cause == "budget"


def test_decode_errors():
    with pytest.raises(ValueError):
        min_weight_coset_member(E12, bits("011"))
    with pytest.raises(ValueError):
        km_decode(E12, bits("01"), bits("10101"), "t1")
    with pytest.raises(ValueError):
        km_decode(E12, bits("01"), bits("1010"), "t3")


def test_decoder_matches_brute_force_ml():
    rng = np.random.default_rng(44)
    for _ in range(200):
        n = int(rng.integers(2, 11))
        m = int(rng.integers(1, n + 1))
        p = float(rng.uniform(0.01, 0.45))
        A = rng.integers(0, 2, (m, n), dtype=np.uint8)
        z = (rng.random(n) < p).astype(np.uint8)
        s = syndrome(A, z)
        x1 = rng.integers(0, 2, n, dtype=np.uint8)
        ml = brute_ml(A, s, p)
        y1, y2 = km_decode(A, s, x1, "t1")
        assert np.array_equal(y1 ^ y2, ml)
        w1, w2 = km_decode(A, s, x1 ^ z, "t2")
        assert np.array_equal(w1 ^ w2, ml)


# -- experiment --------------------------------------------------------------


def test_noiseless_source_never_fails():
    for n, m in [(4, 1), (8, 3), (16, 5)]:
        exp = km_experiment(n, 0.0, m, 1000, seed=1)
        assert exp.errors == 0 and exp.error_rate == 0


def test_full_rank_square_matrix_never_fails():
    # m = n with a full-rank A determines z exactly
    rng = np.random.default_rng(5)
    n = 10
    for _ in range(100):
        while True:
            A = rng.integers(0, 2, (n, n), dtype=np.uint8)
            if round(abs(np.linalg.det(A.astype(float)))) % 2 == 1:
                break
        z = (rng.random(n) < 0.3).astype(np.uint8)
        x1 = rng.integers(0, 2, n, dtype=np.uint8)
        y1, y2 = km_decode(A, syndrome(A, z), x1, "t1")
        assert np.array_equal(y2, x1 ^ z)


def test_experiment_is_deterministic_and_recorded():
    a = km_experiment(12, 0.1, 6, 200, seed=3)
    b = km_experiment(12, 0.1, 6, 200, seed=3)
    assert a == b
    assert a.generator == RNG_NAME
    assert sum(a.failures_by_cause.values()) == a.errors
    # trials are independent of ordering: recomputing one trial gives the same outcome
    causes = [km_trial(12, 0.1, 6, 3, k) for k in range(200)]
    assert sum(c is not None for c in causes) == a.errors


def test_experiment_guards():
    with pytest.raises(ValueError):
        km_experiment(MAX_N + 1, 0.1, 4, 10, 0)
    with pytest.raises(ValueError):
        km_experiment(8, 0.1, 9, 10, 0)
    with pytest.raises(ValueError):
        km_experiment(8, 0.1, 4, 0, 0)
    with pytest.raises(ValueError):
        km_experiment(8, 0.7, 4, 10, 0)


def test_rate_rule_and_budget():
    assert rate_rule(24, 0.05, 0.15) == 11
    assert rate_rule(8, 0.05, 0.15) == 4
    assert rate_rule(24, 0.05, -0.15) == 4
    assert weight_budget(24, 0.05) == 9
    assert weight_budget(4, 0.4) == 4


def test_above_rate_beats_below_rate():
    above = km_experiment(24, 0.05, rate_rule(24, 0.05, 0.15), 500, seed=7)
    below = km_experiment(24, 0.05, rate_rule(24, 0.05, -0.15), 500, seed=7)
    assert above.error_rate <= below.error_rate
