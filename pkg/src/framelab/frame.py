"""Frame transforms, Parseval and disjointness residuals, Gram reports."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .group import Word, ball, inv, mul
from .l2 import ConvKernel, L2Vector, kernel_apply, inner
from .lines import Lines, LineVector, as_lines, family_gram, frame_coefficients, frame_sum

DEFAULT_MATRIX_CAP = 4096
DEFAULT_LINES = Lines((2,))


class MatrixCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class FrameWindow:
    """Index set for frame sums plus the radii that make truncation harmless.

    ``index_set=None`` means the sum runs over the whole group.  That is
    computed exactly (only finitely many coefficients are nonzero for
    finitely supported vectors), so there is no boundary to stay away from.
    """

    index_set: tuple[Word, ...] | None = None
    support_radius: int = 0
    interior_radius: int = 0
    index_radius: int | None = None

    def __post_init__(self):
        if self.index_radius is not None and self.interior_radius + self.support_radius > self.index_radius:
            raise ValueError(
                "window inequality violated: interior + support = "
                f"{self.interior_radius + self.support_radius} > index radius {self.index_radius}"
            )

    @classmethod
    def whole_group(cls, interior_radius: int = 0, support_radius: int = 0) -> "FrameWindow":
        return cls(None, support_radius, interior_radius, None)

    @classmethod
    def from_ball(cls, radius: int, rank: int = 2, support_radius: int = 0, interior_radius: int = 0) -> "FrameWindow":
        return cls(tuple(ball(radius, rank)), support_radius, interior_radius, radius)

    @property
    def exact(self) -> bool:
        return self.index_set is None

    def to_json(self) -> dict:
        return {
            "index": "group" if self.exact else len(self.index_set),
            "index_radius": self.index_radius,
            "support_radius": self.support_radius,
            "interior_radius": self.interior_radius,
        }


@dataclass
class GramReport:
    matrix: np.ndarray
    eig_min: float
    eig_max: float
    window: FrameWindow | None = None
    residuals: dict = field(default_factory=dict)
    eigenvalues: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {
            "eig_min": self.eig_min,
            "eig_max": self.eig_max,
            "size": self.size,
            "residuals": dict(sorted(self.residuals.items())),
            "window": self.window.to_json() if self.window is not None else None,
        }

    def to_csv(self, precision: int = 12) -> str:
        buf = io.StringIO()
        fmt = f"{{:.{precision}e}}"
        for row in self.matrix:
            buf.write(",".join(f"{fmt.format(z.real)},{fmt.format(z.imag)}" for z in row))
            buf.write("\n")
        return buf.getvalue()


def _lines_for(*vecs) -> Lines:
    for v in vecs:
        if isinstance(v, LineVector):
            return v.lines
    return DEFAULT_LINES


def _as(v, lines: Lines) -> LineVector:
    return as_lines(v, lines)


def analysis_coeffs(v, eta, W: FrameWindow) -> dict[Word, complex]:
    """g -> <v, lambda(g) eta>.  Over the whole group only nonzero entries are kept."""
    lines = _lines_for(v, eta)
    coeffs = frame_coefficients(_as(v, lines), _as(eta, lines))
    if W.exact:
        return coeffs
    return {g: coeffs.get(g, 0j) for g in W.index_set}


def window_frame_sum(v, eta, w, zeta, W: FrameWindow) -> complex:
    """sum_{g in W} <v, lambda(g) eta> conj(<w, lambda(g) zeta>)."""
    lines = _lines_for(v, eta, w, zeta)
    v, eta, w, zeta = (_as(x, lines) for x in (v, eta, w, zeta))
    if W.exact:
        return frame_sum(v, eta, w, zeta)
    a = frame_coefficients(v, eta)
    b = frame_coefficients(w, zeta)
    return sum((a.get(g, 0j) * b.get(g, 0j).conjugate() for g in W.index_set), 0j)


def frame_energy(v, eta, W: FrameWindow) -> float:
    return window_frame_sum(v, eta, v, eta, W).real


def parseval_residual(eta, W: FrameWindow, tests: Iterable) -> float:
    """max over tests of |sum_g |<v, lambda(g) eta>|^2 - |v|^2| / |v|^2."""
    tests = list(tests)
    if not tests:
        raise ValueError("empty test set")
    lines = _lines_for(eta, *tests)
    eta = _as(eta, lines)
    worst = 0.0
    for v in tests:
        v = _as(v, lines)
        n2 = v.norm2()
        if n2 == 0:
            raise ValueError("zero test vector")
        worst = max(worst, abs(frame_energy(v, eta, W) - n2) / n2)
    return worst


def disjointness_residual(eta, zeta, v1, v2, W: FrameWindow) -> float:
    """|sum_g <v1, lambda(g) eta> conj(<v2, lambda(g) zeta>)| / (|v1| |v2|)."""
    lines = _lines_for(eta, zeta, v1, v2)
    v1, v2 = _as(v1, lines), _as(v2, lines)
    scale = v1.norm() * v2.norm()
    if scale == 0:
        return 0.0
    return abs(window_frame_sum(v1, eta, v2, zeta, W)) / scale


def spectrum(matrix: np.ndarray) -> np.ndarray:
    if matrix.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))


def report_from_matrix(G: np.ndarray, window: FrameWindow | None = None, cap: int = DEFAULT_MATRIX_CAP) -> GramReport:
    n = G.shape[0]
    if n > cap:
        raise MatrixCapError(f"Gram dimension {n} exceeds matrix cap {cap}")
    herm = float(np.max(np.abs(G - G.conj().T))) if n else 0.0
    ev = spectrum(G)
    lo = float(ev[0]) if n else 0.0
    hi = float(ev[-1]) if n else 0.0
    return GramReport(G, lo, hi, window, {"hermitian": herm}, ev)


def gram(family: Sequence, window: FrameWindow | None = None, cap: int = DEFAULT_MATRIX_CAP) -> GramReport:
    """matrix[i][j] = <f_j, f_i>, with its extreme eigenvalues."""
    family = list(family)
    if not family:
        raise ValueError("empty family")
    if len(family) > cap:
        raise MatrixCapError(f"Gram dimension {len(family)} exceeds matrix cap {cap}")
    lines = _lines_for(*family)
    return report_from_matrix(family_gram([_as(f, lines) for f in family]), window, cap)


def translate_gram(eta, words: Sequence[Word], window: FrameWindow | None = None, cap: int = DEFAULT_MATRIX_CAP) -> GramReport:
    """Gram of {lambda(w) eta : w in words}."""
    if len(words) > cap:
        raise MatrixCapError(f"Gram dimension {len(words)} exceeds matrix cap {cap}")
    lines = _lines_for(eta)
    e = _as(eta, lines)
    return gram([e.lam(w) for w in words], window, cap)


def equivalence_residual(eta, zeta, W: FrameWindow, cap: int = DEFAULT_MATRIX_CAP) -> float:
    """max-entry difference between the translate Grams of eta and zeta over W."""
    if W.exact:
        raise ValueError("equivalence_residual needs an explicit index set")
    a = translate_gram(eta, W.index_set, cap=cap).matrix
    b = translate_gram(zeta, W.index_set, cap=cap).matrix
    return float(np.max(np.abs(a - b)))


def right_correlation(eta: L2Vector, zeta: L2Vector, x: Word) -> complex:
    """<rho(x) eta, zeta> = sum_g eta(g x) conj(zeta(g))."""
    small, big = (zeta, eta)
    total = 0j
    for g, z in small.items():
        a = big[mul(g, x)]
        if a:
            total += a * z.conjugate()
    return total


def commutant_orbit_orthogonality(eta, zeta, kernels: Sequence[ConvKernel]) -> float:
    """max over kernel pairs of |<R_a eta, R_b zeta>|.

    Uses <R_a eta, R_b zeta> = sum_{s,t} a(s) conj(b(t)) <rho(t^-1 s) eta, zeta>,
    so each distinct t^-1 s costs one pass over zeta.
    """
    eta = eta.to_l2() if isinstance(eta, LineVector) else eta
    zeta = zeta.to_l2() if isinstance(zeta, LineVector) else zeta
    if len(zeta) == 0 or len(eta) == 0:
        return 0.0
    cache: dict[Word, complex] = {}

    def corr(x):
        if x not in cache:
            cache[x] = right_correlation(eta, zeta, x)
        return cache[x]

    worst = 0.0
    for a in kernels:
        for b in kernels:
            val = 0j
            for s, ca in a.items():
                for t, cb in b.items():
                    val += ca * cb.conjugate() * corr(mul(inv(t), s))
            worst = max(worst, abs(val))
    return worst


def orbit_inner_direct(eta: L2Vector, zeta: L2Vector, a: ConvKernel, b: ConvKernel) -> complex:
    """<R_a eta, R_b zeta> by applying the kernels; slow reference path."""
    return inner(kernel_apply(a, eta), kernel_apply(b, zeta))
