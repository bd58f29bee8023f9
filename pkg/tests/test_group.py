import math

import pytest
from hypothesis import given, strategies as st

from framelab.group import (
    CosetStructure,
    FreeGroup,
    GroupError,
    ball,
    enumerate_subgroup_ball,
    format_word,
    inv,
    is_cyclically_reduced,
    mul,
    parse_word,
    phi,
    power,
    reduce_word,
    word_key,
)

from oracles import mul_naive, phi_naive, reduce_naive, words_upto

X, Y = 1, 2
x_, y_ = -1, -2

letters = st.sampled_from([1, -1, 2, -2])
raw_words = st.lists(letters, max_size=12)
words = raw_words.map(reduce_word)


def test_reduce_cancels():
    assert reduce_word([X, x_, Y]) == (Y,)
    assert reduce_word([X, Y, y_, x_]) == ()
    assert reduce_word([X, X, Y]) == (X, X, Y)


def test_reduce_rejects_bad_generator():
    with pytest.raises(GroupError):
        reduce_word([3], rank=2)
    with pytest.raises(GroupError):
        reduce_word([0])


def test_mul_examples():
    assert mul((X, Y, x_), (X, y_)) == (X,)
    assert mul((), (X, Y)) == (X, Y)
    assert mul((X,), (x_,)) == ()


def test_inv_examples():
    assert inv((X, Y)) == (y_, x_)
    assert inv(()) == ()
    assert inv((x_,)) == (X,)


@pytest.mark.parametrize("L,size", [(0, 1), (1, 5), (3, 53)])
def test_ball_sizes(L, size):
    assert len(ball(L)) == size


def test_ball_sizes_formula():
    for L in range(9):
        assert len(ball(L)) == 2 * 3**L - 1


def test_ball_matches_independent_enumeration():
    assert sorted(ball(4)) == sorted(words_upto(4))
    assert [word_key(w) for w in ball(4)] == sorted(word_key(w) for w in ball(4))


def test_ball_rank3():
    # 1 + 6 + 6*5
    assert len(ball(2, rank=3)) == 37


def test_phi_examples():
    c = CosetStructure(2, 3, (1, 0))
    assert phi(c, (X, Y, X)) == 2
    assert phi(c, (Y,)) == 0
    assert phi(c, (x_,)) == 2


def test_subgroup_ball():
    c = CosetStructure.standard(2)
    assert enumerate_subgroup_ball(c, 1) == [(), (Y,), (y_,)]
    L2 = enumerate_subgroup_ball(c, 2)
    assert (X, X) in L2 and (x_, x_) in L2
    for N in (2, 3, 5):
        assert enumerate_subgroup_ball(CosetStructure.standard(N), 0) == [()]


def test_defaults():
    c = CosetStructure.standard(3)
    assert c.h0 == (Y,)
    assert c.representatives == ((), (X,), (X, X))
    c2 = CosetStructure(2, 5, (2, 3))
    assert c2.phi(c2.h0) == 0 and c2.h0
    assert [c2.phi(a) for a in c2.representatives] == list(range(5))


def test_invalid_structures():
    with pytest.raises(GroupError, match="phi not surjective"):
        CosetStructure(2, 4, (2, 0))
    with pytest.raises(GroupError, match="index must be >= 2"):
        CosetStructure(2, 1, (1, 0))
    with pytest.raises(GroupError, match="rank"):
        CosetStructure(1, 2, (1,))
    with pytest.raises(GroupError):
        CosetStructure(2, 2, (1, 0), h0=(X,))


def test_format_parse_roundtrip():
    for w in ball(3):
        assert parse_word(format_word(w)) == w
    assert format_word(()) == "e"
    assert parse_word("xXy") == (Y,)
    with pytest.raises(GroupError):
        parse_word("x!")


def test_free_group_helpers():
    F = FreeGroup(3)
    assert F.gen(3) == (3,)
    assert F.parse("zZ") == ()
    assert len(F.ball(1)) == 7
    assert is_cyclically_reduced((X, Y)) and not is_cyclically_reduced((X, Y, x_))
    assert power((X, Y), -2) == (y_, x_, y_, x_)


@given(raw_words)
def test_reduce_agrees_with_naive(w):
    assert reduce_word(w) == reduce_naive(w)


@given(words, words, words)
def test_group_axioms(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b) == mul_naive(a, b)
    assert reduce_word(mul(a, b)) == mul(a, b)
    assert inv(mul(a, b)) == mul(inv(b), inv(a))
    assert mul(a, inv(a)) == ()


@given(words, words, st.sampled_from([2, 3, 4, 6]))
def test_phi_homomorphism_and_cosets(g, h, N):
    c = CosetStructure.standard(N)
    assert c.phi(g) == phi_naive(g, (1, 0), N)
    assert c.phi(mul(g, h)) == (c.phi(g) + c.phi(h)) % N
    if c.phi(h) == 0:
        assert c.phi(mul(g, h)) == c.phi(g)
    k = c.coset_index(g)
    # g lies in exactly one left-translate a_k^{-1} H
    hits = [j for j, a in enumerate(c.representatives) if c.phi(mul(a, g)) == 0]
    assert hits == [k]


def test_coset_partition_balanced():
    c = CosetStructure.standard(2)
    counts = [0, 0]
    for g in ball(7):
        counts[c.coset_index(g)] += 1
    assert sum(counts) == len(ball(7))
    assert math.isclose(counts[0], counts[1], rel_tol=0.1)
