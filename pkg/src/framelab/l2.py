"""Finitely supported vectors on a free group and the regular representations.

``L2Vector`` and ``ConvKernel`` share the same sparse-map storage; a kernel
``a`` acts by right convolution ``R_a = sum_s a(s) rho(s)``, which commutes
with every left translation.
"""
from __future__ import annotations

import cmath
import math
from typing import Iterable, Iterator, Mapping

from .group import CosetStructure, Word, format_word, inv, mul, parse_word, word_key


def root_of_unity(m: int, n: int) -> complex:
    """exp(2*pi*i*m/n), exact at multiples of a quarter turn."""
    m %= n
    if (4 * m) % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * m) // n]
    if 2 * m > n:
        # keep root(-m) == conj(root(m)) bit for bit
        return root_of_unity(n - m, n).conjugate()
    return cmath.exp(2j * math.pi * m / n)


class _Sparse:
    """Immutable finite map Word -> complex with exact-zero pruning."""

    __slots__ = ("_d",)

    def __init__(self, data: Mapping[Word, complex] | Iterable[tuple[Word, complex]] = ()):
        items = data.items() if isinstance(data, Mapping) else data
        d: dict[Word, complex] = {}
        for k, v in items:
            v = complex(v)
            if v != 0:
                d[tuple(k)] = v
        self._d = d

    @classmethod
    def _raw(cls, d: dict[Word, complex]):
        obj = cls.__new__(cls)
        obj._d = {k: v for k, v in d.items() if v != 0}
        return obj

    @property
    def support(self) -> dict[Word, complex]:
        return dict(self._d)

    def items(self):
        return self._d.items()

    def __getitem__(self, g: Word) -> complex:
        return self._d.get(g, 0j)

    def __contains__(self, g) -> bool:
        return g in self._d

    def __len__(self) -> int:
        return len(self._d)

    def __iter__(self) -> Iterator[Word]:
        return iter(self._d)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._d == other._d

    def __add__(self, other):
        d = dict(self._d)
        for k, v in other._d.items():
            d[k] = d.get(k, 0j) + v
        return type(self)._raw(d)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, z: complex):
        return type(self)._raw({k: v * z for k, v in self._d.items()})

    __rmul__ = __mul__

    def __truediv__(self, z: complex):
        return self * (1 / z)

    def norm2(self) -> float:
        return math.fsum(abs(v) ** 2 for v in self._d.values())

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def max_abs(self) -> float:
        return max((abs(v) for v in self._d.values()), default=0.0)

    def radius(self) -> int:
        return max((len(k) for k in self._d), default=0)

    def to_json(self) -> list[dict]:
        return [
            {"word": format_word(k), "re": v.real, "im": v.imag}
            for k, v in sorted(self._d.items(), key=lambda kv: word_key(kv[0]))
        ]

    @classmethod
    def from_json(cls, items: list[dict], rank: int | None = None):
        return cls((parse_word(it["word"], rank), complex(it["re"], it.get("im", 0.0))) for it in items)

    def __repr__(self) -> str:
        shown = ", ".join(f"{format_word(k)}: {v:.4g}" for k, v in list(self._d.items())[:6])
        more = ", ..." if len(self._d) > 6 else ""
        return f"{type(self).__name__}({{{shown}{more}}})"


class L2Vector(_Sparse):
    __slots__ = ()

    @classmethod
    def delta(cls, g: Word = ()) -> "L2Vector":
        return cls({tuple(g): 1.0})

    @classmethod
    def zero(cls) -> "L2Vector":
        return cls()


class ConvKernel(_Sparse):
    __slots__ = ()

    @classmethod
    def delta(cls, s: Word = (), coeff: complex = 1.0) -> "ConvKernel":
        return cls({tuple(s): coeff})

    @classmethod
    def identity(cls) -> "ConvKernel":
        return cls({(): 1.0})

    @classmethod
    def zero(cls) -> "ConvKernel":
        return cls()


def inner(v: _Sparse, w: _Sparse) -> complex:
    """<v, w>, linear in the first argument."""
    if len(v) > len(w):
        return inner(w, v).conjugate()
    total = 0j
    wd = w._d
    for k, a in v._d.items():
        b = wd.get(k)
        if b is not None:
            total += a * b.conjugate()
    return total


def lambda_act(g: Word, v: L2Vector) -> L2Vector:
    """lambda(g) delta_h = delta_{gh}."""
    return L2Vector._raw({mul(g, h): a for h, a in v._d.items()})


def rho_act(g: Word, v: L2Vector) -> L2Vector:
    """rho(g) delta_h = delta_{h g^-1}."""
    gi = inv(g)
    return L2Vector._raw({mul(h, gi): a for h, a in v._d.items()})


def character(c: CosetStructure, j: int, g: Word) -> complex:
    """phi_j(g) = exp(2 pi i k j / N) for g in a_k^{-1} H."""
    return root_of_unity(c.coset_index(g) * j, c.modulus)


def char_mult(c: CosetStructure, j: int, v: L2Vector) -> L2Vector:
    if not 0 <= j < c.modulus:
        raise ValueError(f"character index {j} outside 0..{c.modulus - 1}")
    return L2Vector._raw({g: a * character(c, j, g) for g, a in v._d.items()})


def kernel_apply(a: ConvKernel, v: L2Vector) -> L2Vector:
    out: dict[Word, complex] = {}
    for s, coeff in a._d.items():
        si = inv(s)
        for h, x in v._d.items():
            k = mul(h, si)
            out[k] = out.get(k, 0j) + coeff * x
    return L2Vector._raw(out)


def kernel_star(a: ConvKernel, b: ConvKernel) -> ConvKernel:
    """(a*b)(s) = sum_{tu=s} a(t) b(u), so that R_a R_b = R_{a*b}."""
    out: dict[Word, complex] = {}
    for t, x in a._d.items():
        for u, y in b._d.items():
            k = mul(t, u)
            out[k] = out.get(k, 0j) + x * y
    return ConvKernel._raw(out)


def kernel_adjoint(a: ConvKernel) -> ConvKernel:
    return ConvKernel._raw({inv(s): x.conjugate() for s, x in a._d.items()})


def kernel_power_h0(h0: Word, coeffs: Mapping[int, complex]) -> ConvKernel:
    """sum_n coeffs[n] delta_{h0^n}."""
    from .group import power

    return ConvKernel({power(h0, n): z for n, z in coeffs.items()})
