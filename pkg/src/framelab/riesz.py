"""Riesz bounds of subgroup translate families and the coset decomposition of a group frame."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .construction import DisjointTuple, combine_alpha_beta, line_structure
from .frame import DEFAULT_MATRIX_CAP, FrameWindow, MatrixCapError, parseval_residual, report_from_matrix
from .group import CosetStructure, Word, mul
from .lines import LineVector, as_lines, family_gram

SCHEMA = "framelab-report/1"


@dataclass
class RieszCertificate:
    lower: float
    upper: float
    window: FrameWindow
    family: dict = field(default_factory=dict)
    spectrum: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        # round-off can push a zero Gram slightly negative
        if self.lower < 0 and self.lower > -1e-12:
            self.lower = 0.0
        if self.upper < self.lower:
            self.upper = self.lower

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "window": self.window.to_json(), "family": self.family}


def _family_certificate(eta: LineVector, words: Sequence[Word], family: dict, cap: int) -> RieszCertificate:
    if not words:
        raise ValueError("empty window")
    if len(words) > cap:
        raise MatrixCapError(f"Gram dimension {len(words)} exceeds matrix cap {cap}")
    G = family_gram([eta.lam(g) for g in words])
    rep = report_from_matrix(G, cap=cap)
    W = FrameWindow(tuple(words), 0, 0, max(len(w) for w in words))
    return RieszCertificate(rep.eig_min, rep.eig_max, W, family, rep.eigenvalues)


def riesz_bounds(eta, c: CosetStructure, L_H: int, cap: int = DEFAULT_MATRIX_CAP) -> RieszCertificate:
    """Extreme Gram eigenvalues of {lambda(h) eta : h in H cap Ball(L_H)}."""
    e = as_lines(eta, line_structure(c))
    words = c.subgroup_ball(L_H)
    return _family_certificate(e, words, {"coset": 0, "L_H": L_H}, cap)


def coset_window(c: CosetStructure, L_H: int) -> FrameWindow:
    """Union over k of a_k (H cap Ball(L_H)); each coset piece is a translate of the k = 0 piece."""
    base = c.subgroup_ball(L_H)
    words = tuple(mul(a, h) for a in c.representatives for h in base)
    return FrameWindow(words, 0, 0, max(len(w) for w in words))


def decompose_into_cosets(eta, c: CosetStructure, W: FrameWindow) -> list[tuple[Word, ...]]:
    """Split the index set of W by the value of phi; entry k holds the words in a_k H."""
    if W.exact:
        raise ValueError("decomposition needs an explicit index set")
    parts: list[list[Word]] = [[] for _ in range(c.modulus)]
    for g in W.index_set:
        parts[c.phi(g)].append(g)
    return [tuple(p) for p in parts]


def coset_certificates(eta, c: CosetStructure, W: FrameWindow, cap: int = DEFAULT_MATRIX_CAP, workers: int = 1) -> list[RieszCertificate]:
    e = as_lines(eta, line_structure(c))
    parts = decompose_into_cosets(e, c, W)

    def one(k):
        return _family_certificate(e, parts[k], {"coset": k, "size": len(parts[k])}, cap)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(c.modulus)))
    return [one(k) for k in range(c.modulus)]


def spectra_spread(certs: Sequence[RieszCertificate]) -> float:
    """Largest eigenvalue-wise gap between any coset spectrum and the k = 0 one."""
    ref = certs[0].spectrum
    worst = 0.0
    for cert in certs[1:]:
        if cert.spectrum is None or len(cert.spectrum) != len(ref):
            return math.inf
        worst = max(worst, float(np.max(np.abs(cert.spectrum - ref))))
    return worst


@dataclass(frozen=True)
class FeichtingerParams:
    windows: tuple[int, ...] = (4, 5)
    threshold: float = 0.02
    stability: float = 0.02
    combos: tuple[tuple[complex, complex], ...] = ()
    cap: int = DEFAULT_MATRIX_CAP
    workers: int = 1

    def to_json(self) -> dict:
        return {
            "windows": list(self.windows),
            "threshold": self.threshold,
            "stability": self.stability,
            "combos": [[_cjson(a), _cjson(b)] for a, b in self.combos],
        }


def _cjson(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def certify_vector(eta, c: CosetStructure, params: FeichtingerParams, tests=None, label: str = "") -> dict:
    """Per-window coset certificates, nested-window stability and the union-of-Riesz verdict."""
    if not params.windows:
        raise ValueError("empty window list")
    per_window = []
    lowers, uppers = [], []
    for L_H in params.windows:
        W = coset_window(c, L_H)
        certs = coset_certificates(eta, c, W, params.cap, params.workers)
        lo = min(x.lower for x in certs)
        hi = max(x.upper for x in certs)
        lowers.append(lo)
        uppers.append(hi)
        per_window.append(
            {
                "L_H": L_H,
                "cosets": [x.to_json() for x in certs],
                "lower": lo,
                "upper": hi,
                "coset_spread": spectra_spread(certs),
            }
        )
    drift = max(max(lowers) - min(lowers), max(uppers) - min(uppers))
    out = {
        "label": label,
        "windows": per_window,
        "lower": min(lowers),
        "upper": max(uppers),
        "nested_drift": drift,
        "stable": drift <= params.stability,
        "verdict": all(lo >= params.threshold for lo in lowers),
    }
    if tests:
        W = FrameWindow.whole_group()
        out["parseval"] = parseval_residual(eta, W, tests)
    return out


def feichtinger_report(tup: DisjointTuple, params: FeichtingerParams | None = None) -> dict:
    """Certify every tuple member and each requested alpha/beta mix as a union of N Riesz sequences."""
    params = params or FeichtingerParams()
    c = tup.structure
    if c is None:
        raise ValueError("tuple carries no coset structure")
    entries = []
    for i, m in enumerate(tup.members):
        entries.append(certify_vector(m, c, params, tup.tests, label=f"member {i}"))
    if params.combos:
        if len(tup.members) < 2:
            raise ValueError("alpha/beta mixes need two members")
        for a, b in params.combos:
            mix = combine_alpha_beta(tup.members[0], tup.members[1], a, b)
            entry = certify_vector(mix, c, params, tup.tests, label="mix")
            entry["alpha"] = _cjson(a)
            entry["beta"] = _cjson(b)
            entry["predicted"] = [(abs(a) - abs(b)) ** 2 / c.modulus, (abs(a) + abs(b)) ** 2 / c.modulus]
            entries.append(entry)
    return {
        "schema": SCHEMA,
        "provenance": dict(tup.provenance),
        "params": params.to_json(),
        "claim": "frame = union of N Riesz sequences at window scale",
        "entries": entries,
        "verdict": all(e["verdict"] for e in entries if e["label"].startswith("member")),
    }
