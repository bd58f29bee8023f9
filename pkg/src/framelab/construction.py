"""Coset characters, truncated spectral projections of rho(h0), and the disjoint tuple pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .frame import (
    DEFAULT_MATRIX_CAP,
    FrameWindow,
    GramReport,
    MatrixCapError,
    report_from_matrix,
)
from .group import CosetStructure, Word, ball, format_word, inv, mul
from .l2 import L2Vector, char_mult, character, lambda_act, root_of_unity
from .lines import Lines, LineVector, combine, family_gram, frame_sum_matrix

TAPERS = ("sharp", "cesaro")


class SingularGramError(ArithmeticError):
    def __init__(self, eig_min: float, floor: float):
        super().__init__(f"translate Gram numerically singular: eig_min={eig_min:.3e} below floor {floor:.1e}")
        self.eig_min = eig_min
        self.floor = floor


@dataclass(frozen=True)
class SpectralKernel:
    """Fourier coefficients of the indicator of the arc [0, 1/N) truncated at |n| <= M."""

    modulus: int
    M: int
    taper: str = "sharp"

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("index must be >= 2")
        if self.M < 0:
            raise ValueError("truncation M must be >= 0")
        if self.taper not in TAPERS:
            raise ValueError(f"unknown taper {self.taper!r}")

    def coefficient(self, n: int) -> complex:
        N = self.modulus
        if n == 0:
            return complex(1.0 / N)
        if n < 0:
            return self.coefficient(-n).conjugate()
        if abs(n) > self.M:
            return 0j
        c = (1 - root_of_unity(-n, N)) / (2j * math.pi * n)
        if self.taper == "cesaro":
            c *= 1 - n / (self.M + 1)
        return c

    @property
    def coefficients(self) -> np.ndarray:
        """Array indexed by n + M for n in [-M, M]."""
        return np.array([self.coefficient(n) for n in range(-self.M, self.M + 1)], dtype=complex)

    def tail_norm2(self) -> float:
        """Squared l2 mass of the untruncated sharp coefficients beyond M."""
        N = self.modulus
        total = 1.0 / N - sum(abs(self.coefficient(n)) ** 2 for n in range(-self.M, self.M + 1))
        return max(total, 0.0) if self.taper == "sharp" else float("nan")

    def to_json(self) -> dict:
        return {"N": self.modulus, "M": self.M, "taper": self.taper, "E": "[0,1/N)"}


def coset_character(c: CosetStructure, j: int, g: Word) -> complex:
    if not 0 <= j < c.modulus:
        raise ValueError(f"character index {j} outside 0..{c.modulus - 1}")
    return character(c, j, g)


def character_orthogonality(c: CosetStructure, i: int, j: int, g: Word) -> complex:
    """sum_k phi_i(a_k^-1 g) conj(phi_j(a_k^-1 g))."""
    total = 0j
    for a in c.representatives:
        x = mul(inv(a), g)
        total += coset_character(c, i, x) * coset_character(c, j, x).conjugate()
    return total


def line_structure(c: CosetStructure) -> Lines:
    return Lines(c.h0)


def _line_char(c: CosetStructure, j: int, v: LineVector) -> LineVector:
    if not 0 <= j < c.modulus:
        raise ValueError(f"character index {j} outside 0..{c.modulus - 1}")
    if v.lines.p != c.h0:
        raise ValueError("line vector is not organised along h0")
    # phi(h0) = 0, so every character is constant along a line
    return v.line_phase(lambda rep: character(c, j, rep))


def char_mult_any(c: CosetStructure, j: int, v):
    if isinstance(v, LineVector):
        return _line_char(c, j, v)
    return char_mult(c, j, v)


def apply_spectral_projection(k: SpectralKernel, c: CosetStructure, v):
    """P_M v = sum_{|n|<=M} c(n) rho(h0)^n v.  Works on L2Vector or LineVector."""
    if k.modulus != c.modulus:
        raise ValueError("kernel and coset structure disagree on N")
    if isinstance(v, LineVector):
        if v.lines.p != c.h0:
            raise ValueError("line vector is not organised along h0")
        return v.multiplier(k.coefficients)
    lv = LineVector.from_l2(v, line_structure(c))
    return lv.multiplier(k.coefficients).to_l2()


def idempotency_residual(k: SpectralKernel, c: CosetStructure) -> float:
    """|(P_M^2 - P_M) delta_e|."""
    d = LineVector.delta((), line_structure(c))
    p1 = apply_spectral_projection(k, c, d)
    p2 = apply_spectral_projection(k, c, p1)
    return (p2 - p1).norm()


def seed_vector(c: CosetStructure, k: SpectralKernel, kind: str = "cosets") -> LineVector:
    """P_M delta_e, or sum_k P_M delta_{a_k} whose H-translates reach every coset."""
    lines = line_structure(c)
    if kind == "identity":
        base = LineVector.delta((), lines)
    elif kind == "cosets":
        base = combine([LineVector.delta(a, lines) for a in c.representatives], [1.0] * c.modulus)
    else:
        raise ValueError(f"unknown seed {kind!r}")
    return apply_spectral_projection(k, c, base)


@dataclass
class Orthogonalization:
    eta: LineVector
    words: tuple
    gram: GramReport
    eig_min: float
    eig_max: float

    def l2(self) -> L2Vector:
        return self.eta.to_l2()


def orthogonalize_translates(
    c: CosetStructure,
    k: SpectralKernel,
    L_H: int,
    floor: float = 1e-8,
    seed: str | LineVector = "cosets",
    cap: int = DEFAULT_MATRIX_CAP,
) -> Orthogonalization:
    """Symmetric orthogonalization of {lambda(h) f : h in H cap Ball(L_H)}.

    eta = N^{-1/2} sum_h (G^{-1/2})_{h,e} lambda(h) f.
    """
    words = tuple(c.subgroup_ball(L_H))
    if not words:
        raise ValueError("empty subgroup window")
    f = seed if isinstance(seed, LineVector) else seed_vector(c, k, seed)
    translates = [f.lam(h) for h in words]
    if len(words) > cap:
        raise MatrixCapError(f"Gram dimension {len(words)} exceeds matrix cap {cap}")
    G = family_gram(translates)
    rep = report_from_matrix(G, FrameWindow(tuple(words), 0, 0, None), cap)
    w, V = np.linalg.eigh(0.5 * (G + G.conj().T))
    if w[0] < floor:
        raise SingularGramError(float(w[0]), floor)
    # column of G^{-1/2} at the identity (words[0] is e)
    col = V @ ((V[0, :].conj()) / np.sqrt(w))
    coeffs = col / math.sqrt(c.modulus)
    eta = combine(translates, coeffs)
    return Orthogonalization(eta, words, rep, float(w[0]), float(w[-1]))


def subgroup_onb_residual(eta, c: CosetStructure, radius: int) -> float:
    """max |Gram(sqrt(N) lambda(h) eta) - I| over h in H cap Ball(radius)."""
    lines = eta.lines if isinstance(eta, LineVector) else line_structure(c)
    e = eta if isinstance(eta, LineVector) else LineVector.from_l2(eta, lines)
    words = c.subgroup_ball(radius)
    G = family_gram([e.lam(h) for h in words]) * c.modulus
    return float(np.max(np.abs(G - np.eye(len(words)))))


def interior_tests(c: CosetStructure, k: SpectralKernel, radius: int, count: int, rng: np.random.Generator) -> list[LineVector]:
    """Unit vectors P_M v with v complex Gaussian on Ball(radius)."""
    words = ball(radius, c.rank)
    lines = line_structure(c)
    out = []
    for _ in range(count):
        amps = rng.standard_normal(len(words)) + 1j * rng.standard_normal(len(words))
        v = apply_spectral_projection(k, c, LineVector.from_l2(L2Vector(dict(zip(words, amps))), lines))
        out.append(v * (1.0 / v.norm()))
    return out


def coset_cross_residual(c: CosetStructure, i: int, j: int, words: Sequence[Word]) -> float:
    """max_g |sum_k lambda(a_k) u_i u_j^* lambda(a_k)^* delta_g|, uncompressed operators."""
    N = c.modulus
    worst = 0.0
    for g in words:
        acc = L2Vector.zero()
        for a in c.representatives:
            v = lambda_act(inv(a), L2Vector.delta(g))
            v = char_mult(c, (N - j) % N, v)  # u_j^* multiplies by conj(phi_j)
            v = char_mult(c, i, v)
            acc = acc + lambda_act(a, v)
        worst = max(worst, acc.max_abs())
    return worst


@dataclass
class DisjointTuple:
    eta: LineVector
    members: list
    certificates: dict
    provenance: dict
    disjointness: dict = field(default_factory=dict)
    tests: list = field(default_factory=list, repr=False)
    partners: list = field(default_factory=list, repr=False)
    structure: CosetStructure | None = field(default=None, repr=False)
    kernel: SpectralKernel | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "provenance": self.provenance,
            "members": [dict(sorted(cert.items())) for cert in self.certificates["members"]],
            "disjointness": {f"{i},{j}": v for (i, j), v in sorted(self.disjointness.items())},
            "coset_cross": self.certificates.get("coset_cross"),
            "trace_estimate": self.certificates.get("trace_estimate"),
        }


def build_disjoint_tuple(
    c: CosetStructure,
    k: SpectralKernel,
    eta,
    *,
    interior: int = 2,
    n_tests: int = 20,
    seed: int = 0,
    coset_cross_words: int = 50,
    provenance: dict | None = None,
) -> DisjointTuple:
    """eta_i = P u_i P eta for i = 0..N-1, with Parseval, ONB and disjointness certificates."""
    if isinstance(eta, Orthogonalization):
        eta = eta.eta
    lines = line_structure(c)
    if not isinstance(eta, LineVector):
        eta = LineVector.from_l2(eta, lines)
    N = c.modulus
    Peta = apply_spectral_projection(k, c, eta)
    members = [apply_spectral_projection(k, c, _line_char(c, i, Peta)) for i in range(N)]
    rng = np.random.default_rng(seed)
    tests = interior_tests(c, k, interior, n_tests, rng)
    partners = interior_tests(c, k, interior, n_tests, rng)
    parseval = np.zeros(N)
    disj_m = np.zeros((N, N))
    for v, w in zip(tests, partners):
        S = frame_sum_matrix(v, members)
        parseval = np.maximum(parseval, np.abs(S.diagonal().real - v.norm2()) / v.norm2())
        disj_m = np.maximum(disj_m, np.abs(S) / v.norm2())
        X = frame_sum_matrix(v, members, w)
        disj_m = np.maximum(disj_m, np.abs(X) / (v.norm() * w.norm()))
    certs = []
    for i, m in enumerate(members):
        certs.append(
            {
                "index": i,
                "norm2": m.norm2(),
                "parseval": float(parseval[i]),
                "subgroup_onb": subgroup_onb_residual(m, c, interior),
            }
        )
    disj = {(i, j): float(max(disj_m[i, j], disj_m[j, i])) for i in range(N) for j in range(i + 1, N)}
    ball_words = ball(4, c.rank)[:coset_cross_words]
    lem = max((coset_cross_residual(c, i, j, ball_words) for i in range(N) for j in range(N) if i != j), default=0.0)
    trace = apply_spectral_projection(k, c, LineVector.delta((), lines)).inner(LineVector.delta((), lines))
    prov = {
        "rank": c.rank,
        "N": N,
        "weights": list(c.weights),
        "h0": format_word(c.h0),
        "E": "[0,1/N)",
        "M": k.M,
        "taper": k.taper,
        "interior": interior,
        "tests": n_tests,
        "seed": seed,
    }
    prov.update(provenance or {})
    return DisjointTuple(
        eta,
        members,
        {"members": certs, "coset_cross": lem, "trace_estimate": trace.real},
        prov,
        disj,
        tests,
        partners,
        c,
        k,
    )


def combine_alpha_beta(eta1, eta2, alpha: complex, beta: complex):
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("normalization violated: |alpha|^2 + |beta|^2 != 1")
    if isinstance(eta1, LineVector):
        return combine([eta1, eta2], [alpha, beta])
    return eta1 * alpha + eta2 * beta
