"""Line-structured storage for vectors with long support along an infinite cyclic subgroup.

Every ``g`` in the group factors uniquely as ``g = c * p**m`` with ``c`` the
canonical representative of the coset ``g<p>``.  A ``LineVector`` keeps, per
representative, a dense array of amplitudes indexed by ``m``.  Left
translations only relabel lines, right powers of ``p`` only shift offsets,
and Fourier multipliers in ``rho(p)`` become 1-D correlations.
"""
from __future__ import annotations

import math
import weakref
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import sparse

from .group import Word, inv, is_cyclically_reduced, mul, power, word_key
from .l2 import L2Vector


class Lines:
    """Canonical coset decomposition g = c * p**m for a fixed element p."""

    def __init__(self, p: Word):
        p = tuple(p)
        if not p:
            raise ValueError("line element must be nontrivial")
        if not is_cyclically_reduced(p):
            raise ValueError("line element must be cyclically reduced")
        self.p = p
        self.p_inv = inv(p)
        self._single = len(p) == 1
        self._canon = lru_cache(maxsize=1 << 18)(self._canon_uncached)

    def __eq__(self, other):
        return isinstance(other, Lines) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    def canon(self, g: Word) -> tuple[Word, int]:
        return self._canon(g)

    def _canon_uncached(self, g: Word) -> tuple[Word, int]:
        p, q = self.p, self.p_inv
        if self._single:
            a = p[0]
            k = len(g)
            s = 0
            while k and abs(g[k - 1]) == abs(a):
                s += 1 if g[k - 1] == a else -1
                k -= 1
            return g[:k], s
        lp = len(p)
        s = 0
        while len(g) >= lp and g[-lp:] == p:
            g = g[:-lp]
            s += 1
        while len(g) >= lp and g[-lp:] == q:
            g = g[:-lp]
            s -= 1
        # g no longer ends in p or p^-1, so it cancels fewer than |p| letters
        # against any p^j and |g p^j| > |g| once |j| >= 2
        best = None
        for j in (-1, 0, 1):
            cand = mul(g, power(p, j))
            key = word_key(cand)
            if best is None or key < best[0]:
                best = (key, cand, j)
        _, c, j = best
        return c, s - j

    def point(self, c: Word, m: int) -> Word:
        return mul(c, power(self.p, m))


def _accumulate(out: dict, c: Word, o: int, a: np.ndarray) -> None:
    cur = out.get(c)
    if cur is None:
        out[c] = (o, a.copy())
        return
    o2, b = cur
    lo = min(o, o2)
    hi = max(o + len(a), o2 + len(b))
    if lo == o2 and hi == o2 + len(b):
        b[o - lo : o - lo + len(a)] += a
        return
    r = np.zeros(hi - lo, dtype=complex)
    r[o2 - lo : o2 - lo + len(b)] += b
    r[o - lo : o - lo + len(a)] += a
    out[c] = (lo, r)


class LineVector:
    """Vector stored as {representative: (offset, amplitudes)} relative to ``Lines``."""

    __slots__ = ("lines", "data", "__weakref__")

    def __init__(self, lines: Lines, data: Mapping[Word, tuple[int, np.ndarray]] | None = None):
        self.lines = lines
        self.data: dict[Word, tuple[int, np.ndarray]] = dict(data or {})

    # conversions
    @classmethod
    def from_l2(cls, v: L2Vector, lines: Lines) -> "LineVector":
        pts: dict[Word, dict[int, complex]] = {}
        for g, a in v.items():
            c, m = lines.canon(g)
            pts.setdefault(c, {})[m] = a
        data = {}
        for c, d in pts.items():
            lo, hi = min(d), max(d)
            arr = np.zeros(hi - lo + 1, dtype=complex)
            for m, a in d.items():
                arr[m - lo] = a
            data[c] = (lo, arr)
        return cls(lines, data)

    @classmethod
    def delta(cls, g: Word, lines: Lines) -> "LineVector":
        c, m = lines.canon(g)
        return cls(lines, {c: (m, np.ones(1, dtype=complex))})

    def to_l2(self) -> L2Vector:
        out = {}
        for c, (o, a) in self.data.items():
            for i, z in enumerate(a):
                if z != 0:
                    out[self.lines.point(c, o + i)] = complex(z)
        return L2Vector(out)

    # algebra
    def copy(self) -> "LineVector":
        return LineVector(self.lines, {c: (o, a.copy()) for c, (o, a) in self.data.items()})

    def __add__(self, other: "LineVector") -> "LineVector":
        return combine([self, other], [1.0, 1.0])

    def __sub__(self, other: "LineVector") -> "LineVector":
        return combine([self, other], [1.0, -1.0])

    def __mul__(self, z: complex) -> "LineVector":
        return LineVector(self.lines, {c: (o, a * z) for c, (o, a) in self.data.items()})

    __rmul__ = __mul__

    def lam(self, g: Word) -> "LineVector":
        # left translation permutes cosets of <p>, so arrays are shared, not merged
        out = {}
        canon = self.lines.canon
        for c, (o, a) in self.data.items():
            c2, s = canon(mul(g, c))
            out[c2] = (o + s, a)
        return LineVector(self.lines, out)

    def rho_power(self, n: int) -> "LineVector":
        """rho(p)**n."""
        return LineVector(self.lines, {c: (o - n, a) for c, (o, a) in self.data.items()})

    def multiplier(self, coeffs: np.ndarray) -> "LineVector":
        """sum_n coeffs[n+M] rho(p)**n, coeffs indexed from -M to M."""
        m = (len(coeffs) - 1) // 2
        rev = np.asarray(coeffs)[::-1]
        return LineVector(self.lines, {c: (o - m, np.convolve(a, rev)) for c, (o, a) in self.data.items()})

    def line_phase(self, f) -> "LineVector":
        """Multiply each line by f(representative); valid when f is constant on lines."""
        return LineVector(self.lines, {c: (o, a * f(c)) for c, (o, a) in self.data.items()})

    def inner(self, other: "LineVector") -> complex:
        small, big, flip = (self, other, False) if len(self.data) <= len(other.data) else (other, self, True)
        total = 0j
        for c, (o, a) in small.data.items():
            hit = big.data.get(c)
            if hit is None:
                continue
            o2, b = hit
            lo = max(o, o2)
            hi = min(o + len(a), o2 + len(b))
            if hi > lo:
                total += np.vdot(b[lo - o2 : hi - o2], a[lo - o : hi - o])
        return total.conjugate() if flip else total

    def norm2(self) -> float:
        return float(sum(np.vdot(a, a).real for _, a in self.data.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def nnz(self) -> int:
        return int(sum(np.count_nonzero(a) for _, a in self.data.values()))

    def __len__(self) -> int:
        return len(self.data)


def combine(vectors: Sequence[LineVector], coeffs: Iterable[complex]) -> LineVector:
    if not vectors:
        raise ValueError("nothing to combine")
    out: dict = {}
    for v, z in zip(vectors, coeffs):
        if z == 0:
            continue
        for c, (o, a) in v.data.items():
            _accumulate(out, c, o, a * z)
    return LineVector(vectors[0].lines, out)


def as_lines(v, lines: Lines) -> LineVector:
    if isinstance(v, LineVector):
        if v.lines != lines:
            return LineVector.from_l2(v.to_l2(), lines)
        return v
    return LineVector.from_l2(v, lines)


def translate_gram(eta: LineVector, words: Sequence[Word]) -> np.ndarray:
    """G[i, j] = <lambda(w_j) eta, lambda(w_i) eta>."""
    return family_gram([eta.lam(w) for w in words])


def family_gram(family: Sequence[LineVector]) -> np.ndarray:
    """G[i, j] = <f_j, f_i>.

    Every (line, position) pair becomes one column of a sparse matrix A whose
    rows are the family members, so G = conj(A) A^T in a single product.
    """
    n = len(family)
    extent: dict[Word, list[int]] = {}
    for f in family:
        for c, (o, a) in f.data.items():
            e = extent.get(c)
            if e is None:
                extent[c] = [o, o + len(a)]
            else:
                e[0] = min(e[0], o)
                e[1] = max(e[1], o + len(a))
    base: dict[Word, int] = {}
    width = 0
    for c, (lo, hi) in extent.items():
        base[c] = width - lo
        width += hi - lo
    starts, sizes, vals = [], [], []
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, f in enumerate(family):
        count = 0
        for c, (o, a) in f.data.items():
            starts.append(base[c] + o)
            sizes.append(len(a))
            vals.append(a)
            count += len(a)
        indptr[i + 1] = indptr[i] + count
    if not vals:
        return np.zeros((n, n), dtype=complex)
    sizes_arr = np.asarray(sizes, dtype=np.int64)
    seg_begin = np.cumsum(sizes_arr) - sizes_arr
    cols = np.repeat(np.asarray(starts, dtype=np.int64) - seg_begin, sizes_arr) + np.arange(int(sizes_arr.sum()))
    A = sparse.csr_matrix((np.concatenate(vals), cols, indptr), shape=(n, width))
    return np.asarray((A.conj() @ A.T).todense())


def _pair_coefficients(v: LineVector, eta: LineVector):
    """Yield (c, d, kmin, coeffs) with <v, lambda(c p^k d^-1) eta> = coeffs[k - kmin]."""
    for c, (oc, a) in v.data.items():
        for d, (od, b) in eta.data.items():
            corr = np.correlate(a, b, mode="full")
            yield c, d, oc - od - (len(b) - 1), corr


def frame_coefficients(v: LineVector, eta: LineVector) -> dict[Word, complex]:
    """All nonzero analysis coefficients g -> <v, lambda(g) eta> over the whole group."""
    p = v.lines.p
    out: dict[Word, complex] = {}
    for c, d, kmin, corr in _pair_coefficients(v, eta):
        dinv = inv(d)
        for i in np.flatnonzero(corr):
            g = mul(mul(c, power(p, kmin + int(i))), dinv)
            out[g] = out.get(g, 0j) + complex(corr[i])
    return out


_SPECTRA: "weakref.WeakKeyDictionary[LineVector, dict]" = weakref.WeakKeyDictionary()


def _eta_spectrum(eta: LineVector, nfft: int):
    per = _SPECTRA.get(eta)
    if per is None:
        per = _SPECTRA[eta] = {}
    hit = per.get(nfft)
    if hit is None:
        keys = list(eta.data)
        width = max((len(b) for _, b in eta.data.values()), default=1)
        mat = np.zeros((len(keys), width), dtype=complex)
        for i, d in enumerate(keys):
            b = eta.data[d][1]
            mat[i, : len(b)] = b
        offsets = np.array([eta.data[d][0] for d in keys], dtype=np.int64)
        hit = per[nfft] = (keys, width, offsets, np.conj(sfft.fft(mat, nfft, axis=1)))
    return hit


class _Corr:
    """Line correlations k -> <x, lambda(c p^k d^-1) eta>, all d at once through one FFT per c."""

    def __init__(self, x: LineVector, eta: LineVector):
        self.x, self.eta = x, eta
        width = max((len(b) for _, b in eta.data.values()), default=1)
        xlen = max((len(a) for _, a in x.data.values()), default=1)
        self.nfft = sfft.next_fast_len(xlen + width - 1)
        self.keys, self.width, self.offsets, self.spec = _eta_spectrum(eta, self.nfft)
        self.row = {d: i for i, d in enumerate(self.keys)}
        self._lines: dict = {}

    def line(self, c: Word):
        """(kmins, matrix) where matrix[r, i] is the coefficient at k = kmins[r] + i."""
        hit = self._lines.get(c)
        if hit is None:
            oc, a = self.x.data[c]
            r = sfft.ifft(sfft.fft(a, self.nfft)[None, :] * self.spec, axis=1)
            w = self.width
            mat = np.concatenate([r[:, self.nfft - (w - 1) :], r[:, : len(a)]], axis=1)
            hit = (oc - self.offsets - (w - 1), mat)
            self._lines[c] = hit
        return hit


def _same_line_sum(A: _Corr, B: _Corr, c: Word) -> complex:
    ka, ma = A.line(c)
    if A is B:
        return complex(np.vdot(ma, ma))
    kb, mb = B.line(c)
    if A.eta is B.eta or A.keys == B.keys:
        # identical row layout: align the two matrices by their kmin difference
        shift = kb - ka
        if np.all(shift == shift[0]):
            s0 = int(shift[0])
            n1, n2 = ma.shape[1], mb.shape[1]
            lo, hi = max(0, s0), min(n1, n2 + s0)
            if hi <= lo:
                return 0j
            return complex(np.vdot(mb[:, lo - s0 : hi - s0], ma[:, lo:hi]))
    total = 0j
    for d, r in A.row.items():
        s = B.row.get(d)
        if s is None:
            continue
        k1, cf1, k2, cf2 = ka[r], ma[r], kb[s], mb[s]
        lo, hi = max(k1, k2), min(k1 + len(cf1), k2 + len(cf2))
        if hi > lo:
            total += np.vdot(cf2[lo - k2 : hi - k2], cf1[lo - k1 : hi - k1])
    return total


def is_proper_power(p: Word) -> bool:
    n = len(p)
    return any(n % m == 0 and p == p[:m] * (n // m) for m in range(1, n // 2 + 1))


def _strip_powers(u: Word, p: Word) -> tuple[int, Word, int]:
    """u = p**q * core * p**t with literal copies of p or p^-1 stripped from both ends."""
    lp, pi = len(p), inv(p)
    q = 0
    while len(u) >= lp and u[:lp] == p:
        u, q = u[lp:], q + 1
    if q == 0:
        while len(u) >= lp and u[:lp] == pi:
            u, q = u[lp:], q - 1
    t = 0
    while len(u) >= lp and u[-lp:] == p:
        u, t = u[:-lp], t + 1
    if t == 0:
        while len(u) >= lp and u[-lp:] == pi:
            u, t = u[:-lp], t - 1
    return q, u, t


class _Layout:
    __slots__ = ("keys", "row")

    def __init__(self, keys, row):
        self.keys, self.row = keys, row


class _Collisions:
    """For a fixed pair (eta, zeta): lines d of eta and d2 of zeta with canon(d p^j core) = (d2, s).

    Stored per core as index arrays (rows of eta, j, rows of zeta, s).
    """

    @classmethod
    def for_pair(cls, A: _Corr, B: _Corr) -> "_Collisions":
        per = _SPECTRA.setdefault(A.eta, {})
        hit = per.get(("collisions", id(B.eta)))
        if hit is not None and hit[0]() is B.eta:
            return hit[1]
        col = cls(A, B)
        per[("collisions", id(B.eta))] = (weakref.ref(B.eta), col)
        return col

    def __init__(self, A: _Corr, B: _Corr):
        # only the line layouts of eta and zeta are kept, so the table is reusable across test vectors
        self.A = _Layout(A.keys, A.row)
        self.B = _Layout(B.keys, B.row)
        self.lines = A.x.lines
        self.p = self.lines.p
        self.R = max((len(d) for d in B.keys), default=0)
        self._by_core: dict = {}
        self._by_last: dict = {}
        if len(self.p) == 1:
            for d in A.keys:
                if d:
                    self._by_last.setdefault(d[-1], []).append(d)

    def get(self, core: Word):
        hit = self._by_core.get(core)
        if hit is None:
            hit = self._by_core[core] = self._build(core)
        return hit

    def _build(self, core: Word):
        rows, js, rows2, shifts = [], [], [], []
        Arow, Brow = self.A.row, self.B.row
        p, lines = self.p, self.lines
        if len(p) == 1:
            a = p[0]
            n = len(core)
            # j != 0 (and j = 0 without cancellation): d2 = d p^j core literally
            for d2 in self.B.keys:
                if len(d2) < n or d2[len(d2) - n :] != core:
                    continue
                rest = d2[: len(d2) - n]
                j = 0
                while rest and abs(rest[-1]) == a:
                    j += 1 if rest[-1] == a else -1
                    rest = rest[:-1]
                r = Arow.get(rest)
                if r is not None and (j != 0 or not rest or rest[-1] != -core[0]):
                    rows.append(r)
                    js.append(j)
                    rows2.append(Brow[d2])
                    shifts.append(0)
            # j = 0 with cancellation between d and core
            for d in self._by_last.get(-core[0], ()):
                d2, s = lines.canon(mul(d, core))
                r2 = Brow.get(d2)
                if r2 is not None:
                    rows.append(Arow[d])
                    js.append(0)
                    rows2.append(r2)
                    shifts.append(s)
        else:
            lp = len(p)
            for d, r in Arow.items():
                span = (self.R + len(d) + len(core)) // lp + 3
                for j in range(-span, span + 1):
                    d2, s = lines.canon(mul(mul(d, power(p, j)), core))
                    r2 = Brow.get(d2)
                    if r2 is not None:
                        rows.append(r)
                        js.append(j)
                        rows2.append(r2)
                        shifts.append(s)
        as_int = lambda x: np.asarray(x, dtype=np.int64)
        return as_int(rows), as_int(js), as_int(rows2), as_int(shifts)


def _cross_sum(A: _Corr, B: _Corr, col: _Collisions, c: Word, c2: Word) -> complex:
    # d p^-k c^-1 c2 = d p^j core p^t with j = q - k
    q, core, t = _strip_powers(mul(inv(c), c2), col.p)
    rows, js, rows2, shifts = col.get(core)
    if len(rows) == 0:
        return 0j
    ka, ma = A.line(c)
    kb, mb = B.line(c2)
    i = q - js - ka[rows]
    i2 = -(shifts + t) - kb[rows2]
    ok = (i >= 0) & (i < ma.shape[1]) & (i2 >= 0) & (i2 < mb.shape[1])
    if not ok.any():
        return 0j
    return complex(np.sum(ma[rows[ok], i[ok]] * np.conj(mb[rows2[ok], i2[ok]])))


def _frame_sum_corr(A: _Corr, B: _Corr) -> complex:
    v, w = A.x, B.x
    total = 0j
    for c in v.data:
        if c in w.data:
            total += _same_line_sum(A, B, c)
    col = None
    for c in v.data:
        for c2 in w.data:
            if c2 == c:
                continue
            if col is None:
                col = _Collisions.for_pair(A, B)
            total += _cross_sum(A, B, col, c, c2)
    return total


def frame_sum(v: LineVector, eta: LineVector, w: LineVector | None = None, zeta: LineVector | None = None) -> complex:
    """sum over all g of <v, lambda(g) eta> * conj(<w, lambda(g) zeta>), exactly.

    Coefficients are indexed by g = c p^k d^-1 (c a line of v, d a line of eta).
    On a common line c of v and w, distinct eta-lines give distinct g.  Across
    lines c != c' the same g reappears as c' p^k' d'^-1 exactly when
    canon(d p^-k c^-1 c') = (d', -k'), and d' has to be one of the short
    representatives carried by zeta, which confines k to a small window.
    """
    if w is None:
        w = v
    if zeta is None:
        zeta = eta
    if is_proper_power(v.lines.p):
        a = frame_coefficients(v, eta)
        b = a if (w is v and zeta is eta) else frame_coefficients(w, zeta)
        return sum((x * b[g].conjugate() for g, x in a.items() if g in b), 0j)
    A = _Corr(v, eta)
    B = A if (w is v and zeta is eta) else _Corr(w, zeta)
    return _frame_sum_corr(A, B)


def frame_sum_matrix(v: LineVector, etas: Sequence[LineVector], w: LineVector | None = None) -> np.ndarray:
    """S[i, j] = sum_g <v, lambda(g) eta_i> conj(<w, lambda(g) eta_j>), sharing correlations."""
    w = v if w is None else w
    if is_proper_power(v.lines.p):
        return np.array([[frame_sum(v, a, w, b) for b in etas] for a in etas])
    As = [_Corr(v, e) for e in etas]
    Bs = As if w is v else [_Corr(w, e) for e in etas]
    n = len(etas)
    S = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if w is v and j < i:
                S[i, j] = S[j, i].conjugate()
            else:
                S[i, j] = _frame_sum_corr(As[i], Bs[j])
    return S
