import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from framelab.frame import (
    FrameWindow,
    MatrixCapError,
    analysis_coeffs,
    commutant_orbit_orthogonality,
    disjointness_residual,
    equivalence_residual,
    gram,
    orbit_inner_direct,
    parseval_residual,
    translate_gram,
    window_frame_sum,
)
from framelab.group import ball, reduce_word
from framelab.l2 import ConvKernel, L2Vector, inner, lambda_act

from oracles import words_upto, window_frame_sum_naive

E = L2Vector.delta()
W_ALL = FrameWindow.whole_group()
word = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=3).map(reduce_word)
amp = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
vector = st.dictionaries(word, amp, min_size=1, max_size=5).map(L2Vector).filter(lambda v: v.norm2() > 1e-6)


def rand_l2(rng, n, radius=2):
    ws = words_upto(radius)
    idx = rng.choice(len(ws), size=n, replace=False)
    return L2Vector({ws[i]: complex(rng.standard_normal(), rng.standard_normal()) for i in idx})


def test_window_inequality():
    with pytest.raises(ValueError, match="window inequality violated"):
        FrameWindow.from_ball(3, support_radius=2, interior_radius=2)
    W = FrameWindow.from_ball(4, support_radius=2, interior_radius=2)
    assert len(W.index_set) == 161 and not W.exact
    assert W_ALL.exact


def test_analysis_coeffs_examples():
    rng = np.random.default_rng(0)
    v = rand_l2(rng, 6)
    W = FrameWindow.from_ball(3)
    coeffs = analysis_coeffs(v, E, W)
    for g in W.index_set:
        assert abs(coeffs[g] - v[g]) < 1e-15
    assert all(z == 0 for z in analysis_coeffs(L2Vector.zero(), E, W).values())
    single = analysis_coeffs(L2Vector.delta((1,)), E, W)
    assert {g: z for g, z in single.items() if z != 0} == {(1,): 1}


def test_parseval_examples():
    rng = np.random.default_rng(1)
    tests = [rand_l2(rng, 5) for _ in range(5)]
    assert parseval_residual(E, W_ALL, tests) == pytest.approx(0, abs=1e-15)
    assert parseval_residual(E, FrameWindow.from_ball(2, support_radius=0, interior_radius=2), tests) < 1e-15
    bad = L2Vector({(): 1 / math.sqrt(2), (1,): 1 / math.sqrt(2)})
    assert parseval_residual(bad, W_ALL, [L2Vector({(): 1, (1,): 1})]) > 0.4
    with pytest.raises(ValueError, match="empty test set"):
        parseval_residual(E, W_ALL, [])


def test_frame_sums_scale_quadratically():
    rng = np.random.default_rng(2)
    eta, v = rand_l2(rng, 4), rand_l2(rng, 4)
    base = window_frame_sum(v, eta, v, eta, W_ALL)
    scaled = window_frame_sum(v, eta * (0.5 + 2j), v, eta * (0.5 + 2j), W_ALL)
    assert abs(scaled - abs(0.5 + 2j) ** 2 * base) < 1e-12 * abs(base)
    assert abs(base - window_frame_sum_naive(v, eta)) < 1e-12 * abs(base)


def test_window_sum_equals_exact_sum_inside_margin():
    rng = np.random.default_rng(3)
    eta, v = rand_l2(rng, 4, radius=1), rand_l2(rng, 4, radius=1)
    W = FrameWindow.from_ball(2, support_radius=1, interior_radius=1)
    assert abs(window_frame_sum(v, eta, v, eta, W) - window_frame_sum(v, eta, v, eta, W_ALL)) < 1e-13


def test_gram_examples():
    fam = [L2Vector.delta(g) for g in ball(1)]
    rep = gram(fam)
    assert np.array_equal(rep.matrix, np.eye(5)) and rep.eig_min == rep.eig_max == 1
    v = L2Vector({(): 1.0, (2,): 1j})
    rep = gram([v, v * (2 - 1j)])
    assert abs(rep.eig_min) < 1e-12
    with pytest.raises(MatrixCapError):
        gram(fam, cap=3)
    with pytest.raises(ValueError):
        gram([])


def test_gram_csv_cells():
    rep = gram([L2Vector.delta(), L2Vector({(): 1j, (1,): 1.0})])
    rows = rep.to_csv().strip().split("\n")
    assert len(rows) == 2 and len(rows[0].split(",")) == 4


@given(st.lists(vector, min_size=1, max_size=5))
def test_gram_psd(fam):
    rep = gram(fam)
    assert rep.eig_min >= -1e-10 * max(1, rep.eig_max)
    assert rep.eig_max <= sum(f.norm2() for f in fam) * (1 + 1e-12)


@given(vector, word)
def test_translate_gram_spectrum_invariant(eta, g0):
    words = ball(1)
    a = translate_gram(eta, words)
    b = gram([lambda_act(g0, lambda_act(w, eta)) for w in words])
    assert np.max(np.abs(a.matrix - b.matrix)) <= 1e-12 * (1 + a.eig_max)
    assert abs(a.eig_min - b.eig_min) < 1e-10 * (1 + a.eig_max)
    assert abs(a.eig_max - b.eig_max) < 1e-10 * (1 + a.eig_max)


def test_disjointness_examples():
    rng = np.random.default_rng(4)
    v1, v2 = rand_l2(rng, 4), rand_l2(rng, 4)
    assert disjointness_residual(E, L2Vector.zero(), v1, v2, W_ALL) == 0
    assert disjointness_residual(E, E, E, E, W_ALL) == pytest.approx(1)


@given(vector, vector, vector, vector)
def test_disjointness_swap_symmetry(eta, zeta, v1, v2):
    a = window_frame_sum(v1, eta, v2, zeta, W_ALL)
    b = window_frame_sum(v2, zeta, v1, eta, W_ALL)
    assert abs(a - b.conjugate()) <= 1e-10 * (1 + abs(a))
    assert disjointness_residual(eta, zeta, v1, v2, W_ALL) == pytest.approx(
        disjointness_residual(zeta, eta, v2, v1, W_ALL), rel=1e-9, abs=1e-12
    )


def test_equivalence_examples():
    rng = np.random.default_rng(5)
    eta = rand_l2(rng, 5)
    W = FrameWindow.from_ball(2)
    assert equivalence_residual(eta, eta, W) == 0
    assert equivalence_residual(eta, eta * np.exp(0.3j), W) < 1e-12
    assert equivalence_residual(eta, rand_l2(rng, 5), W) > 0.01
    with pytest.raises(ValueError):
        equivalence_residual(eta, eta, W_ALL)


def test_commutant_orbit_examples():
    rng = np.random.default_rng(6)
    eta, zeta = rand_l2(rng, 5), rand_l2(rng, 5)
    assert commutant_orbit_orthogonality(eta, L2Vector.zero(), [ConvKernel.identity()]) == 0
    assert commutant_orbit_orthogonality(E, E, [ConvKernel.identity()]) == 1
    ks = [ConvKernel({(1,): 1.0, (2, -1): 0.5j}), ConvKernel({(): 2.0, (-2,): 1.0})]
    worst = max(abs(orbit_inner_direct(eta, zeta, a, b)) for a in ks for b in ks)
    assert commutant_orbit_orthogonality(eta, zeta, ks) == pytest.approx(worst, rel=1e-12)
    assert abs(orbit_inner_direct(eta, zeta, ConvKernel.identity(), ConvKernel.identity()) - inner(eta, zeta)) < 1e-14
