"""Free-group arithmetic and coset structure for a finite-index normal subgroup.

Words are tuples of nonzero ints: ``+i`` is generator ``i`` (1-based) and
``-i`` its inverse.  The empty tuple is the identity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce as _fold
from typing import Iterable, Sequence

Word = tuple[int, ...]

IDENTITY: Word = ()

# 'e' is reserved for the identity
ALPHABET = "xyzwabcdfghijklmnopqrstuv"


class GroupError(ValueError):
    pass


def reduce_word(letters: Iterable[int], rank: int | None = None) -> Word:
    out: list[int] = []
    for a in letters:
        if a == 0 or (rank is not None and abs(a) > rank):
            raise GroupError(f"generator index {a} out of range 1..{rank}")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def mul(a: Word, b: Word) -> Word:
    """Product of two reduced words; cancellation only happens at the seam."""
    i = 0
    la, lb = len(a), len(b)
    while i < la and i < lb and a[la - 1 - i] == -b[i]:
        i += 1
    if i == 0:
        return a + b
    return a[: la - i] + b[i:]


def mul_many(*words: Word) -> Word:
    return _fold(mul, words, IDENTITY)


def inv(a: Word) -> Word:
    return tuple(-x for x in reversed(a))


def power(a: Word, n: int) -> Word:
    base = a if n >= 0 else inv(a)
    out = IDENTITY
    for _ in range(abs(n)):
        out = mul(out, base)
    return out


def letter_key(a: int) -> tuple[int, int]:
    return (abs(a), 0 if a > 0 else 1)


def word_key(w: Word) -> tuple:
    """Sort key: length first, then letters by generator index then sign."""
    return (len(w), tuple(letter_key(a) for a in w))


def ball(radius: int, rank: int = 2) -> list[Word]:
    if radius < 0:
        raise GroupError("radius must be >= 0")
    letters = sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)
    out = [IDENTITY]
    frontier = [IDENTITY]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        out.extend(nxt)
        frontier = nxt
    # frontier expansion already yields (length, lex) order
    return out


def exponent_sums(w: Word, rank: int) -> list[int]:
    sums = [0] * rank
    for a in w:
        sums[abs(a) - 1] += 1 if a > 0 else -1
    return sums


def format_word(w: Word) -> str:
    if not w:
        return "e"
    chars = []
    for a in w:
        ch = ALPHABET[abs(a) - 1]
        chars.append(ch if a > 0 else ch.upper())
    return "".join(chars)


def parse_word(s: str, rank: int | None = None) -> Word:
    s = s.strip()
    if s in ("", "e"):
        return IDENTITY
    letters = []
    for ch in s:
        idx = ALPHABET.find(ch.lower())
        if idx < 0:
            raise GroupError(f"unknown generator symbol {ch!r}")
        letters.append(idx + 1 if ch.islower() else -(idx + 1))
    return reduce_word(letters, rank)


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) <= 1 or w[0] != -w[-1]


@dataclass(frozen=True)
class FreeGroup:
    rank: int = 2

    def __post_init__(self):
        if self.rank < 2:
            raise GroupError("rank must be >= 2 (rank 1 is abelian, not ICC)")
        if self.rank > len(ALPHABET):
            raise GroupError(f"rank must be <= {len(ALPHABET)}")

    def gen(self, i: int) -> Word:
        if not 1 <= abs(i) <= self.rank:
            raise GroupError(f"generator index {i} out of range 1..{self.rank}")
        return (i,)

    def reduce(self, letters: Iterable[int]) -> Word:
        return reduce_word(letters, self.rank)

    mul = staticmethod(mul)
    inv = staticmethod(inv)

    def ball(self, radius: int) -> list[Word]:
        return ball(radius, self.rank)

    def parse(self, s: str) -> Word:
        return parse_word(s, self.rank)

    format = staticmethod(format_word)


def _find_unit_word(weights: Sequence[int], modulus: int) -> Word:
    """Shortest-exponent word whose weighted exponent sum is 1 mod N."""
    r = len(weights)
    bound = modulus
    best = None
    for total in range(1, r * bound + 1):
        # positive exponents first, so the standard structure gets a_k = x^k
        order = sorted(range(-bound, bound + 1), key=lambda e: (abs(e), e < 0))
        for exps in itertools.product(order, repeat=r):
            if sum(abs(e) for e in exps) != total:
                continue
            if sum(e * w for e, w in zip(exps, weights)) % modulus == 1 % modulus:
                best = exps
                break
        if best is not None:
            break
    if best is None:  # pragma: no cover - excluded by the surjectivity check
        raise GroupError("phi is not surjective")
    letters: list[int] = []
    for i, e in enumerate(best):
        letters.extend([(i + 1) * (1 if e > 0 else -1)] * abs(e))
    return tuple(letters)


@dataclass(frozen=True)
class CosetStructure:
    """Surjection phi: F_r -> Z_N given by weights, with kernel H.

    ``representatives[k]`` satisfies phi(a_k) = k, and ``h0`` is a nontrivial
    element of H (infinite order, as every nontrivial free-group element is).
    """

    rank: int
    modulus: int
    weights: tuple[int, ...]
    representatives: tuple[Word, ...] = field(default=())
    h0: Word = field(default=())

    def __post_init__(self):
        if self.rank < 2:
            raise GroupError("rank must be >= 2 (rank 1 is abelian, not ICC)")
        if self.modulus < 2:
            raise GroupError("index must be >= 2")
        if len(self.weights) != self.rank:
            raise GroupError("weights must have one entry per generator")
        w = tuple(int(x) % self.modulus for x in self.weights)
        object.__setattr__(self, "weights", w)
        if math.gcd(*w, self.modulus) != 1:
            raise GroupError("phi not surjective: gcd(weights, N) != 1")
        if not self.representatives:
            unit = _find_unit_word(w, self.modulus)
            reps = tuple(power(unit, k) for k in range(self.modulus))
            object.__setattr__(self, "representatives", reps)
        reps = tuple(reduce_word(a, self.rank) for a in self.representatives)
        object.__setattr__(self, "representatives", reps)
        if len(reps) != self.modulus or reps[0] != IDENTITY:
            raise GroupError("need N representatives with a_0 = e")
        for k, a in enumerate(reps):
            if self.phi(a) != k:
                raise GroupError(f"representative a_{k} has phi = {self.phi(a)}")
        if not self.h0:
            object.__setattr__(self, "h0", self._default_h0())
        h0 = reduce_word(self.h0, self.rank)
        object.__setattr__(self, "h0", h0)
        if not h0:
            raise GroupError("h0 must be nontrivial")
        if self.phi(h0) != 0:
            raise GroupError("h0 must lie in the kernel of phi")

    def _default_h0(self) -> Word:
        for i, wi in enumerate(self.weights):
            if wi == 0:
                return (i + 1,)
        w1, w2 = self.weights[0], self.weights[1]
        return reduce_word([1] * w2 + [-2] * w1)

    @classmethod
    def standard(cls, modulus: int, rank: int = 2) -> "CosetStructure":
        return cls(rank, modulus, (1,) + (0,) * (rank - 1))

    def phi(self, g: Word) -> int:
        return sum(w * e for w, e in zip(self.weights, exponent_sums(g, self.rank))) % self.modulus

    def coset_index(self, g: Word) -> int:
        """k with g in a_k^{-1} H."""
        return (-self.phi(g)) % self.modulus

    def in_subgroup(self, g: Word) -> bool:
        return self.phi(g) == 0

    def subgroup_ball(self, radius: int) -> list[Word]:
        return [g for g in ball(radius, self.rank) if self.phi(g) == 0]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "N": self.modulus,
            "weights": list(self.weights),
            "representatives": [format_word(a) for a in self.representatives],
            "h0": format_word(self.h0),
        }


def enumerate_subgroup_ball(c: CosetStructure, radius: int) -> list[Word]:
    return c.subgroup_ball(radius)


def phi(c: CosetStructure, g: Word) -> int:
    return c.phi(g)
