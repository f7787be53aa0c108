import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixret import (
    FULL_SPACE,
    InputError,
    ProcessModel,
    TargetSet,
    aperiodicity_gap,
    are_disjoint,
    return_floors,
    self_overlap_pi,
    shift_target,
    target_prob,
    thue_morse,
)
from mixret.cylinders import periodic


def brute_meets(a_words, b_words, k):
    """Does some sequence start with a word of A and carry a word of B at offset k?"""
    for a in a_words:
        for b in b_words:
            n, m = len(a), len(b)
            if all(a[k + i] == b[i] for i in range(max(0, min(n - k, m)))):
                return True
    return False


def brute_pi(words):
    n = len(words[0])
    return next(k for k in range(1, n + 1) if brute_meets(words, words, k))


def brute_pi_cross(v, w):
    lim = min(len(v[0]), len(w[0]))
    return next(k for k in range(1, lim + 1) if brute_meets(v, w, k) or brute_meets(w, v, k))


def test_target_set_invariants():
    t = TargetSet.parse(["ab", "ab", "ba"])
    assert t.words == (("a", "b"), ("b", "a")) and t.length == 2
    with pytest.raises(InputError):
        TargetSet.parse(["ab", "a"])
    with pytest.raises(InputError):
        TargetSet.parse([])
    assert TargetSet.parse("x1|y2", separator="|").words == (("x1", "y2"),)


@pytest.mark.parametrize("word,expected", [("abab", 2), ("aaa", 1), ("aab", 3)])
def test_self_overlap_examples(word, expected):
    assert self_overlap_pi(TargetSet.parse(word)) == expected
    assert brute_pi([tuple(word)]) == expected


def test_failure_function_identity_all_binary_words():
    for n in range(1, 13):
        for w in itertools.product("01", repeat=n):
            assert self_overlap_pi(TargetSet((w,))) == brute_pi([w])


@given(st.lists(st.text("abc", min_size=4, max_size=4), min_size=1, max_size=4))
def test_multiword_pi_matches_brute(words):
    t = TargetSet.parse(words)
    assert self_overlap_pi(t) == brute_pi(list(t.words))
    assert self_overlap_pi(t) <= t.length


def test_pi_nondecreasing_along_prefixes():
    seq = thue_morse(80)
    vals = [self_overlap_pi(TargetSet.prefix(seq, n)) for n in range(1, 81)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    rnd = tuple("0110111010001011101100011010")
    vals = [self_overlap_pi(TargetSet.prefix(rnd, n)) for n in range(1, len(rnd) + 1)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_thue_morse_pi_grows():
    tm = thue_morse(64)
    assert "".join(tm[:16]) == "0110100110010110"
    for n in (8, 16, 32, 64):
        assert self_overlap_pi(TargetSet.prefix(tm, n)) >= n / 4


def test_return_floor_examples():
    f = return_floors(TargetSet.parse("ab"), TargetSet.parse("ba"))
    assert f.pi_VW == 1
    assert return_floors(TargetSet.parse("aa"), TargetSet.parse("bb")).pi_VW == 2
    f = return_floors(TargetSet.parse("ab"), TargetSet.parse("ab"))
    assert f.pi_VW == 2
    assert f.kappa == min(f.pi_VW, f.pi_V, f.pi_W)


@given(
    st.lists(st.text("ab", min_size=3, max_size=3), min_size=1, max_size=3),
    st.lists(st.text("ab", min_size=1, max_size=5), min_size=1, max_size=1),
)
def test_return_floors_symmetric_and_brute(v, w):
    V, W = TargetSet.parse(v), TargetSet.parse(w)
    f = return_floors(V, W)
    g = return_floors(W, V)
    assert f.pi_VW == g.pi_VW == brute_pi_cross(list(V.words), list(W.words))
    assert f.pi_VW <= min(V.length, W.length)
    assert f.kappa == min(f.pi_VW, f.pi_V, f.pi_W)


def test_shift_target():
    abc = TargetSet.parse("abc")
    assert shift_target(abc, 1) == TargetSet.parse("bc")
    assert shift_target(abc, 0) == abc
    assert shift_target(TargetSet.parse(["ab", "cb"]), 1) == TargetSet.parse("b")
    assert shift_target(abc, 3) is FULL_SPACE
    with pytest.raises(InputError):
        shift_target(abc, 4)
    with pytest.raises(InputError):
        shift_target(abc, -1)


def test_shift_increases_probability_iid():
    model = ProcessModel.iid("abc", [0.2, 0.3, 0.5])
    U = TargetSet.parse(["abca", "ccab", "bbbb"])
    base = target_prob(model, U)
    for s in range(U.length + 1):
        assert target_prob(model, shift_target(U, s)) >= base - 1e-15
    assert target_prob(model, FULL_SPACE) == 1.0


def test_are_disjoint():
    assert not are_disjoint(TargetSet.parse("a"), TargetSet.parse("ab"))
    assert are_disjoint(TargetSet.parse("ab"), TargetSet.parse("ba"))
    assert are_disjoint(TargetSet.parse("aa"), TargetSet.parse(["ab", "ba"]))
    assert not are_disjoint(TargetSet.parse(["ab", "ba"]), TargetSet.parse("b"))


def test_aperiodicity_gap_arithmetic():
    # two words of length 10 with kappa 7: a-run and b-run patterns
    V = TargetSet.parse("aaaaaaabbb")
    W = TargetSet.parse("bbbbbbbaaa")
    kappa = return_floors(V, W).kappa
    g = aperiodicity_gap(V, W, math.log(2))
    assert g["kappa"] == kappa
    assert g["gap14"] == 10 + kappa - 10
    assert g["gap15"] == pytest.approx(10 - 3 * math.log(2) * math.log(10), abs=1e-12)
    assert 10 - 3 * math.log(2) * math.log(10) == pytest.approx(5.212, abs=1e-3)


def test_aperiodicity_gap_non_overlapping():
    V = TargetSet.parse("aaaab")
    W = TargetSet.parse("ccccd")
    assert return_floors(V, W).kappa == 5
    assert aperiodicity_gap(V, W, 1.0)["gap14"] == 5


def test_shifted_prefixes_keep_kappa_bounded():
    xi = thue_morse(200)
    eta = xi[3:]
    kappas = [return_floors(TargetSet.prefix(xi, n), TargetSet.prefix(eta, n)).kappa for n in (10, 20, 40, 80)]
    gaps = [aperiodicity_gap(TargetSet.prefix(xi, n), TargetSet.prefix(eta, n), math.log(2))["gap14"] for n in (10, 20, 40, 80)]
    assert max(kappas) <= 3
    assert gaps == [k for k in kappas]  # n equal, so gap14 = kappa


def test_periodic_generator():
    assert "".join(periodic("ab", 5)) == "ababa"
    assert self_overlap_pi(TargetSet.prefix(periodic("ab", 30), 30)) == 2
