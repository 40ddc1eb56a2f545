"""Word arithmetic in the *-monoid generated by Cuntz generators.

A monomial s_J s_K* is stored as the raw pair (J, K). Products of such pairs
stay in this normal form under the prefix rule coming from s_i* s_j = delta_ij I,
so the completeness relation sum_i s_i s_i* = I is never applied as a rewrite.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from ..exceptions import IndexOutOfRangeError, UsageError

DEFAULT_PRUNE_THRESHOLD = 1e-14

_TOKEN = re.compile(r"^s(\d+)(\*?)$")


@dataclass(frozen=True)
class MultiIndex:
    """A finite word over generator indices; the empty word stands for s_I = I."""
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(letter) for letter in self.letters)
        if any(letter < 1 for letter in letters):
            raise IndexOutOfRangeError(f"Generator indices are 1-based, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def power(cls, letter: int, exponent: int) -> "MultiIndex":
        return cls((letter,) * exponent)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return MultiIndex(self.letters[item])
        return self.letters[item]

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(self.letters + other.letters)

    def is_prefix_of(self, other: "MultiIndex") -> bool:
        return other.letters[:len(self.letters)] == self.letters

    def validate(self, n: Optional[int]) -> None:
        """Check every letter lies in [1, n]; n=None means O_infinity."""
        if n is not None and any(letter > n for letter in self.letters):
            raise IndexOutOfRangeError(f"Word {self.letters} has letters outside 1..{n}")

    def __repr__(self) -> str:
        return f"MultiIndex{self.letters}"


EMPTY = MultiIndex()


@dataclass(frozen=True)
class Monomial:
    """The normal form s_J s_K* over O_n (n=None for O_infinity)."""
    left: MultiIndex
    right: MultiIndex
    n: Optional[int]

    def __post_init__(self):
        if not isinstance(self.left, MultiIndex):
            object.__setattr__(self, "left", MultiIndex(self.left))
        if not isinstance(self.right, MultiIndex):
            object.__setattr__(self, "right", MultiIndex(self.right))
        if self.n is not None and self.n < 2:
            raise UsageError(f"Cuntz algebras need n >= 2, got {self.n}")
        self.left.validate(self.n)
        self.right.validate(self.n)

    @classmethod
    def unit(cls, n: Optional[int]) -> "Monomial":
        return cls(EMPTY, EMPTY, n)

    @classmethod
    def generator(cls, i: int, n: Optional[int]) -> "Monomial":
        return cls(MultiIndex((i,)), EMPTY, n)

    @classmethod
    def word(cls, letters: Sequence[int], n: Optional[int]) -> "Monomial":
        """The isometry s_J."""
        return cls(MultiIndex(tuple(letters)), EMPTY, n)

    @property
    def is_unit(self) -> bool:
        return not self.left.letters and not self.right.letters

    @property
    def degree(self) -> int:
        return len(self.left) + len(self.right)

    def adjoint(self) -> "Monomial":
        return Monomial(self.right, self.left, self.n)

    def __mul__(self, other: "Monomial") -> Optional["Monomial"]:
        return multiply_monomials(self, other)

    def __str__(self) -> str:
        return format_monomial(self)


def _check_same_algebra(a_n: Optional[int], b_n: Optional[int]) -> None:
    if a_n != b_n:
        raise UsageError(f"Operands live in different algebras: O_{a_n} and O_{b_n}")


def multiply_monomials(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """Normal form of (s_Ja s_Ka*)(s_Jb s_Kb*), or None when the product is zero."""
    _check_same_algebra(a.n, b.n)
    ka, jb = a.right, b.left
    if ka.is_prefix_of(jb):
        return Monomial(a.left + jb[len(ka):], b.right, a.n)
    if jb.is_prefix_of(ka):
        return Monomial(a.left, b.right + ka[len(jb):], a.n)
    return None


class NcPolynomial:
    """Finite complex combination of monomials over a fixed O_n.

    Values are immutable after construction. Coefficients whose magnitude is
    at most `prune` are dropped.
    """

    __slots__ = ("_n", "_terms", "_prune")

    def __init__(
        self,
        n: Optional[int],
        terms: Optional[Mapping[Monomial, complex]] = None,
        prune: float = DEFAULT_PRUNE_THRESHOLD,
    ):
        collected: Dict[Monomial, complex] = {}
        for monomial, coeff in (terms or {}).items():
            _check_same_algebra(monomial.n, n)
            collected[monomial] = collected.get(monomial, 0j) + complex(coeff)
        self._n = n
        self._prune = prune
        self._terms = MappingProxyType(
            {mono: c for mono, c in collected.items() if abs(c) > prune}
        )

    # Constructors

    @classmethod
    def zero(cls, n: Optional[int], prune: float = DEFAULT_PRUNE_THRESHOLD) -> "NcPolynomial":
        return cls(n, {}, prune)

    @classmethod
    def unit(cls, n: Optional[int], coeff: complex = 1.0, prune: float = DEFAULT_PRUNE_THRESHOLD) -> "NcPolynomial":
        return cls(n, {Monomial.unit(n): coeff}, prune)

    @classmethod
    def from_monomial(cls, monomial: Monomial, coeff: complex = 1.0, prune: float = DEFAULT_PRUNE_THRESHOLD) -> "NcPolynomial":
        return cls(monomial.n, {monomial: coeff}, prune)

    @classmethod
    def linear_combination(
        cls,
        coeffs: Iterable[complex],
        monomials: Iterable[Monomial],
        n: Optional[int],
        prune: float = DEFAULT_PRUNE_THRESHOLD,
    ) -> "NcPolynomial":
        """sum_j coeffs[j] * monomials[j]; this builds t(z) for an image family."""
        terms: Dict[Monomial, complex] = {}
        for coeff, monomial in zip(coeffs, monomials):
            terms[monomial] = terms.get(monomial, 0j) + complex(coeff)
        return cls(n, terms, prune)

    # Accessors

    @property
    def n(self) -> Optional[int]:
        return self._n

    @property
    def prune(self) -> float:
        return self._prune

    @property
    def terms(self) -> Mapping[Monomial, complex]:
        return self._terms

    def coefficient(self, monomial: Monomial) -> complex:
        return self._terms.get(monomial, 0j)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    # Arithmetic

    def __add__(self, other: "NcPolynomial") -> "NcPolynomial":
        _check_same_algebra(self._n, other.n)
        terms = dict(self._terms)
        for monomial, coeff in other.items():
            terms[monomial] = terms.get(monomial, 0j) + coeff
        return NcPolynomial(self._n, terms, self._prune)

    def __neg__(self) -> "NcPolynomial":
        return NcPolynomial(self._n, {m: -c for m, c in self._terms.items()}, self._prune)

    def __sub__(self, other: "NcPolynomial") -> "NcPolynomial":
        return self + (-other)

    def scale(self, scalar: complex) -> "NcPolynomial":
        return NcPolynomial(self._n, {m: c * scalar for m, c in self._terms.items()}, self._prune)

    def __mul__(self, other: Union["NcPolynomial", complex, float, int]) -> "NcPolynomial":
        if isinstance(other, NcPolynomial):
            return poly_mul(self, other)
        return self.scale(complex(other))

    def __rmul__(self, scalar: Union[complex, float, int]) -> "NcPolynomial":
        return self.scale(complex(scalar))

    def adjoint(self) -> "NcPolynomial":
        return NcPolynomial(
            self._n,
            {m.adjoint(): c.conjugate() for m, c in self._terms.items()},
            self._prune,
        )

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self) -> str:
        return f"NcPolynomial(n={self._n}, {format_polynomial(self)})"


def poly_mul(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    """Bilinear extension of multiply_monomials; vanishing products are dropped."""
    _check_same_algebra(p.n, q.n)
    terms: Dict[Monomial, complex] = {}
    for a, ca in p.items():
        for b, cb in q.items():
            product = multiply_monomials(a, b)
            if product is not None:
                terms[product] = terms.get(product, 0j) + ca * cb
    return NcPolynomial(p.n, terms, max(p.prune, q.prune))


def adjoint(x: Union[Monomial, NcPolynomial]) -> Union[Monomial, NcPolynomial]:
    return x.adjoint()


def polynomials_equal(p: NcPolynomial, q: NcPolynomial, tol: float) -> bool:
    """True iff every coefficient of p - q has magnitude at most tol."""
    if tol <= 0:
        raise UsageError(f"Tolerance must be positive, got {tol}")
    _check_same_algebra(p.n, q.n)
    keys = set(p.terms) | set(q.terms)
    return all(abs(p.coefficient(m) - q.coefficient(m)) <= tol for m in keys)


# Text syntax: whitespace separated `sN`, `sN*` and `I` tokens

def parse_monomial(text: str, n: Optional[int]) -> Optional[Monomial]:
    """Parse `s1 s2 s1*`-style text; returns None when the product vanishes."""
    tokens = text.split()
    if not tokens:
        raise UsageError("Empty word; use `I` for the unit")
    result: Optional[Monomial] = Monomial.unit(n)
    for token in tokens:
        if token == "I":
            continue
        match = _TOKEN.match(token)
        if match is None:
            raise UsageError(f"Cannot parse token {token!r}; expected sN, sN* or I")
        factor = Monomial.generator(int(match.group(1)), n)
        if match.group(2):
            factor = factor.adjoint()
        result = multiply_monomials(result, factor)
        if result is None:
            return None
    return result


def format_monomial(monomial: Monomial) -> str:
    if monomial.is_unit:
        return "I"
    tokens = [f"s{letter}" for letter in monomial.left]
    tokens += [f"s{letter}*" for letter in reversed(monomial.right.letters)]
    return " ".join(tokens)


def _format_coefficient(coeff: complex) -> str:
    if abs(coeff.imag) <= DEFAULT_PRUNE_THRESHOLD:
        return f"{coeff.real:.12g}"
    return f"({coeff.real:.12g}{coeff.imag:+.12g}j)"


def format_polynomial(p: NcPolynomial) -> str:
    if p.is_zero():
        return "0"
    ordered = sorted(p.items(), key=lambda item: (item[0].degree, item[0].left.letters, item[0].right.letters))
    return " + ".join(f"{_format_coefficient(c)}*[{format_monomial(m)}]" for m, c in ordered)


def words_of_length(n: int, length: int) -> Iterator[MultiIndex]:
    """All words over 1..n of the given length, in lexicographic order."""
    for letters in itertools.product(range(1, n + 1), repeat=length):
        yield MultiIndex(letters)


def enumerate_monomials(n: int, max_len: int) -> Iterator[Monomial]:
    """Every s_J s_K* over O_n with |J| + |K| <= max_len, by total degree."""
    for total in range(max_len + 1):
        for left_len in range(total + 1):
            for left in words_of_length(n, left_len):
                for right in words_of_length(n, total - left_len):
                    yield Monomial(left, right, n)
