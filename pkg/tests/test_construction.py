import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from framelab.construction import (
    SingularGramError,
    SpectralKernel,
    apply_spectral_projection,
    char_mult_any,
    character_orthogonality,
    combine_alpha_beta,
    coset_character,
    idempotency_residual,
    interior_tests,
    coset_cross_residual,
    line_structure,
    orthogonalize_translates,
    seed_vector,
    subgroup_onb_residual,
)
from framelab.group import CosetStructure, ball, power, reduce_word
from framelab.l2 import L2Vector, char_mult, lambda_act, rho_act
from framelab.lines import LineVector

from oracles import as_dict, spectral_coeff

word = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=5).map(reduce_word)


def test_character_examples():
    c2, c3 = CosetStructure.standard(2), CosetStructure.standard(3)
    assert all(coset_character(c3, 0, g) == 1 for g in ball(2))
    assert coset_character(c2, 1, (1,)) == -1
    assert abs(coset_character(c3, 1, (1,)) - cmath.exp(4j * math.pi / 3)) < 1e-15
    assert character_orthogonality(c2, 0, 1, ()) == 0
    assert character_orthogonality(c3, 2, 2, (1, 2)) == 3


@given(word, st.sampled_from([2, 3, 4, 6]), st.data())
def test_character_sum_vanishes(g, N, data):
    c = CosetStructure.standard(N)
    i = data.draw(st.integers(0, N - 1))
    j = data.draw(st.integers(0, N - 1))
    val = character_orthogonality(c, i, j, g)
    if i == j:
        assert abs(val - N) <= 1e-13
    else:
        assert abs(val) <= 1e-13


def test_kernel_coefficients_match_closed_form():
    for N in (2, 3, 4):
        k = SpectralKernel(N, 16)
        for n in range(-16, 17):
            assert abs(k.coefficient(n) - spectral_coeff(n, N)) < 1e-15
        assert k.coefficient(17) == 0
        # Parseval for the indicator of an arc of length 1/N
        full = SpectralKernel(N, 4000)
        assert abs(np.sum(np.abs(full.coefficients) ** 2) - 1 / N) < 1e-4


def test_kernel_rejects_bad_input():
    with pytest.raises(ValueError, match="index must be >= 2"):
        SpectralKernel(1, 4)
    with pytest.raises(ValueError):
        SpectralKernel(2, -1)
    with pytest.raises(ValueError):
        SpectralKernel(2, 4, "hann")


def test_projection_matches_direct_sum():
    c = CosetStructure.standard(3)
    k = SpectralKernel(3, 6)
    v = L2Vector({(): 1.0, (1, 2): 0.5j, (2, -1): -1.0})
    want: dict = {}
    for n in range(-6, 7):
        for g, z in rho_act(power(c.h0, n), v).items():
            want[g] = want.get(g, 0) + k.coefficient(n) * z
    got = as_dict(apply_spectral_projection(k, c, v))
    assert set(got) == {g for g, z in want.items() if z != 0}
    assert max(abs(got[g] - want[g]) for g in got) < 1e-15


@pytest.mark.parametrize("N", [2, 3, 4])
def test_trace_is_one_over_n(N):
    c = CosetStructure.standard(N)
    d = L2Vector.delta()
    for M in (0, 1, 7, 64):
        P = apply_spectral_projection(SpectralKernel(N, M), c, d)
        assert abs(P[()] - 1 / N) <= 1e-15


def test_projection_commutations():
    c = CosetStructure.standard(2)
    k = SpectralKernel(2, 8)
    v = L2Vector({(): 1.0, (1,): 2.0, (2, 1): 1j})
    P = lambda x: apply_spectral_projection(k, c, x)
    for g in ball(2):
        assert P(lambda_act(g, v)) == lambda_act(g, P(v))
    for j in range(2):
        assert P(char_mult(c, j, v)) == char_mult(c, j, P(v))
    assert (P(rho_act(c.h0, v)) - rho_act(c.h0, P(v))).max_abs() < 1e-16


def test_line_and_sparse_paths_agree():
    c = CosetStructure.standard(3)
    k = SpectralKernel(3, 10)
    v = L2Vector({(): 1.0, (1, 2): 0.5j, (-2, 1, 1): 2.0})
    a = apply_spectral_projection(k, c, v)
    b = apply_spectral_projection(k, c, LineVector.from_l2(v, line_structure(c))).to_l2()
    assert (a - b).max_abs() < 1e-15
    for j in range(3):
        assert (char_mult_any(c, j, LineVector.from_l2(v, line_structure(c))).to_l2() - char_mult(c, j, v)).max_abs() == 0


def test_idempotency_decreases():
    c = CosetStructure.standard(2)
    vals = [idempotency_residual(SpectralKernel(2, M), c) for M in (8, 16, 32, 64, 128)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # ||(P^2 - P) delta_e||^2 is the l2 norm of chi^2 - chi on the truncated series;
    # it is dominated by the Gibbs region and decays like M^-1/2
    assert vals[-1] < 0.05


def test_orthogonal_seed_is_fixed_point():
    c = CosetStructure.standard(2)
    k = SpectralKernel(2, 8)
    seed = LineVector.delta((), line_structure(c)) * (1 / math.sqrt(2))
    o = orthogonalize_translates(c, k, 3, seed=seed)
    assert (o.eta - seed).norm() < 1e-10
    assert o.eig_min == pytest.approx(0.5) and o.eig_max == pytest.approx(0.5)


def test_singular_gram_reported():
    c = CosetStructure.standard(2)
    k = SpectralKernel(2, 8)
    with pytest.raises(SingularGramError) as err:
        orthogonalize_translates(c, k, 3, seed=LineVector(line_structure(c)))
    assert err.value.eig_min == 0


def test_seed_kinds():
    c = CosetStructure.standard(2)
    k = SpectralKernel(2, 4)
    ident = seed_vector(c, k, "identity").to_l2()
    assert ident == apply_spectral_projection(k, c, L2Vector.delta())
    cos = seed_vector(c, k, "cosets").to_l2()
    both = apply_spectral_projection(k, c, L2Vector({(): 1.0, (1,): 1.0}))
    assert (cos - both).max_abs() < 1e-15
    with pytest.raises(ValueError):
        seed_vector(c, k, "nope")


def test_orthogonalization_norm(pipe2):
    c, k, o, T = pipe2
    assert abs(o.eta.norm2() - 0.5) < 1e-12
    assert 0 < o.eig_min <= o.eig_max
    # the exact-diagonal Gram at e comes from G^{-1/2} G G^{-1/2} = I
    assert subgroup_onb_residual(o.eta, c, 0) < 1e-12


def test_coset_cross_identity():
    for N in (2, 3, 4):
        c = CosetStructure.standard(N)
        words = ball(3)[:50]
        for i in range(N):
            for j in range(N):
                if i != j:
                    # quarter-turn roots are exact, so the sum cancels exactly at N = 2, 4
                    assert coset_cross_residual(c, i, j, words) <= (0 if N in (2, 4) else 1e-15)
        # diagonal: sum_k lambda(a_k) u_i u_i^* lambda(a_k)^* = N Id
        for g in words[:10]:
            acc = L2Vector.zero()
            for a in c.representatives:
                acc = acc + lambda_act(a, lambda_act(tuple(-x for x in reversed(a)), L2Vector.delta(g)))
            assert acc == L2Vector.delta(g) * N


def test_tuple_members(pipe2):
    c, k, o, T = pipe2
    assert len(T.members) == 2
    assert T.certificates["coset_cross"] == 0
    assert T.certificates["trace_estimate"] == pytest.approx(0.5, abs=1e-15)
    Peta = apply_spectral_projection(k, c, o.eta)
    for i, m in enumerate(T.members):
        want = apply_spectral_projection(k, c, char_mult_any(c, i, Peta))
        assert (m - want).norm() < 1e-14
    js = T.to_json()
    assert set(js) >= {"provenance", "members", "disjointness", "coset_cross", "trace_estimate"}
    assert js["provenance"]["M"] == 64


def test_interior_tests_are_unit_and_seeded():
    c = CosetStructure.standard(2)
    k = SpectralKernel(2, 8)
    a = interior_tests(c, k, 1, 3, np.random.default_rng(5))
    b = interior_tests(c, k, 1, 3, np.random.default_rng(5))
    for x, y in zip(a, b):
        assert x.norm() == pytest.approx(1)
        assert (x - y).norm() == 0


def test_combine_alpha_beta():
    e1 = L2Vector({(): 1.0})
    e2 = L2Vector({(1,): 1.0})
    assert combine_alpha_beta(e1, e2, 1, 0) == e1
    assert combine_alpha_beta(e1, e2, 0, 1) == e2
    with pytest.raises(ValueError, match="normalization"):
        combine_alpha_beta(e1, e2, 1, 1)
