"""Rows of convolution kernels that mix a disjoint tuple into new Parseval vectors.

A row ``(u_1, ..., u_N)`` acts on a tuple ``(xi_1, ..., xi_N)`` by
``eta = sum_i R_{u_i} xi_i``.  Identities between operators are checked on
kernels, using ``R_a R_b = R_{a*b}`` and ``R_a^* = R_{a^*}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .group import Word, format_word, parse_word
from .l2 import ConvKernel, L2Vector, kernel_adjoint, kernel_apply, kernel_star
from .lines import Lines, LineVector, combine


class RowError(ValueError):
    pass


@dataclass(frozen=True)
class KernelRow:
    entries: tuple[ConvKernel, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @classmethod
    def scalars(cls, *coeffs: complex) -> "KernelRow":
        return cls(tuple(ConvKernel.delta((), z) if z != 0 else ConvKernel.zero() for z in coeffs))

    @classmethod
    def shifts(cls, coeffs: Sequence[complex], words: Sequence[Word]) -> "KernelRow":
        if len(coeffs) != len(words):
            raise RowError("one shift per coefficient")
        return cls(tuple(ConvKernel.delta(w, z) if z != 0 else ConvKernel.zero() for z, w in zip(coeffs, words)))

    def scaled(self, z: complex) -> "KernelRow":
        return KernelRow(tuple(u * z for u in self.entries))

    def to_json(self) -> list:
        return [u.to_json() for u in self.entries]

    @classmethod
    def from_json(cls, data: list, rank: int | None = None) -> "KernelRow":
        return cls(tuple(ConvKernel.from_json(u, rank) for u in data))


def _coeff_norm(a: ConvKernel) -> float:
    return a.max_abs()


def _check_pair(u: KernelRow, v: KernelRow) -> None:
    if len(u) != len(v):
        raise RowError(f"row length mismatch: {len(u)} vs {len(v)}")


def row_product(u: KernelRow, v: KernelRow) -> ConvKernel:
    """sum_i v_i * u_i^*."""
    _check_pair(u, v)
    total = ConvKernel.zero()
    for a, b in zip(u, v):
        total = total + kernel_star(b, kernel_adjoint(a))
    return total


def verify_row(row: KernelRow) -> float:
    """Max coefficient of sum_i u_i * u_i^* - delta_e."""
    if len(row) == 0:
        raise RowError("empty row")
    return _coeff_norm(row_product(row, row) - ConvKernel.identity())


def rows_disjoint(u: KernelRow, v: KernelRow) -> float:
    """Max coefficient of sum_i v_i * u_i^*; zero means the synthesized vectors are strongly disjoint."""
    return _coeff_norm(row_product(u, v))


def row_gram(u: KernelRow) -> list[list[ConvKernel]]:
    """Entries u_i^* * u_j."""
    adj = [kernel_adjoint(a) for a in u]
    return [[kernel_star(adj[i], u.entries[j]) for j in range(len(u))] for i in range(len(u))]


def rows_equivalent(u: KernelRow, v: KernelRow) -> float:
    """max_{i,j} of the coefficient norm of u_i^* u_j - v_i^* v_j."""
    _check_pair(u, v)
    gu, gv = row_gram(u), row_gram(v)
    n = len(u)
    return max((_coeff_norm(gu[i][j] - gv[i][j]) for i in range(n) for j in range(n)), default=0.0)


def _power_exponent(lines: Lines, s: Word) -> int | None:
    c, m = lines.canon(s)
    return m if c == () else None


def apply_row_entry(a: ConvKernel, xi):
    """R_a xi for an L2Vector or a LineVector.

    Kernels living on the line subgroup only shift offsets; anything else
    goes through the sparse path.
    """
    if not isinstance(xi, LineVector):
        return kernel_apply(a, xi)
    if len(a) == 0:
        return LineVector(xi.lines)
    parts, coeffs = [], []
    for s, z in a.items():
        n = _power_exponent(xi.lines, s)
        if n is None:
            return LineVector.from_l2(kernel_apply(a, xi.to_l2()), xi.lines)
        parts.append(xi.rho_power(n))
        coeffs.append(z)
    return combine(parts, coeffs)


def synthesize(row: KernelRow, xs: Sequence):
    """eta = sum_i R_{u_i} xi_i."""
    xs = list(xs)
    if len(xs) != len(row):
        raise RowError(f"row has {len(row)} entries but {len(xs)} vectors were given")
    terms = [apply_row_entry(a, x) for a, x in zip(row, xs)]
    if all(isinstance(t, LineVector) for t in terms):
        return combine(terms, [1.0] * len(terms))
    total = L2Vector.zero()
    for t in terms:
        total = total + (t.to_l2() if isinstance(t, LineVector) else t)
    return total


def fit_row(eta, xs: Sequence, support: Sequence[Word]) -> tuple[KernelRow, float]:
    """Least-squares row with kernels on ``support`` such that sum_i R_{u_i} xi_i ~ eta.

    Returns the row and the relative residual of the fit.
    """
    xs = [x.to_l2() if isinstance(x, LineVector) else x for x in xs]
    target = eta.to_l2() if isinstance(eta, LineVector) else eta
    support = list(support)
    columns = [kernel_apply(ConvKernel.delta(s), x) for x in xs for s in support]
    keys = set(target)
    for col in columns:
        keys.update(col)
    order = {g: i for i, g in enumerate(sorted(keys))}
    A = np.zeros((len(order), len(columns)), dtype=complex)
    for j, col in enumerate(columns):
        for g, z in col.items():
            A[order[g], j] = z
    b = np.zeros(len(order), dtype=complex)
    for g, z in target.items():
        b[order[g]] = z
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.linalg.norm(A @ sol - b) / max(np.linalg.norm(b), 1e-300))
    m = len(support)
    entries = tuple(
        ConvKernel({s: sol[i * m + t] for t, s in enumerate(support) if abs(sol[i * m + t]) > 1e-13}) for i in range(len(xs))
    )
    return KernelRow(entries), resid


def describe(row: KernelRow) -> list[dict]:
    return [{format_word(s): [z.real, z.imag] for s, z in sorted(u.items(), key=lambda kv: (len(kv[0]), kv[0]))} for u in row]


def parse_shift_row(spec: Sequence[tuple[str, complex]], rank: int) -> KernelRow:
    return KernelRow.shifts([z for _, z in spec], [parse_word(w, rank) for w, _ in spec])
