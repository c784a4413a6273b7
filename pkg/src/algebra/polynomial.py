"""Normal-ordered polynomials in the six canonical generators.

A ``CanonicalPolynomial`` maps monomials (exponent 6-tuples in canonical
generator order) to ``ExactScalar`` coefficients. Products are brought back
to normal order by repeatedly swapping adjacent out-of-order factors and
adding the central commutator, so every identity is checked with exact
arithmetic.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from ..utils.errors import DomainError, NotLinear
from .generators import NUM_GENERATORS, STANDARD_TABLE, CommutationTable, Generator
from .scalars import ONE, ZERO, ExactScalar

Monomial = tuple[int, ...]
IDENTITY_MONOMIAL: Monomial = (0,) * NUM_GENERATORS


def monomial_degree(monomial: Monomial) -> int:
    return sum(monomial)


def _word(monomial: Monomial) -> tuple[int, ...]:
    """Expand exponents into the ordered list of generator indices."""
    word: list[int] = []
    for index, power in enumerate(monomial):
        word.extend([index] * power)
    return tuple(word)


def _monomial(word: tuple[int, ...]) -> Monomial:
    exponents = [0] * NUM_GENERATORS
    for index in word:
        exponents[index] += 1
    return tuple(exponents)


@lru_cache(maxsize=65536)
def _normal_order(word: tuple[int, ...], table: CommutationTable) -> tuple[tuple[Monomial, ExactScalar], ...]:
    """Normal-ordered expansion of a word of generator indices."""
    for i in range(len(word) - 1):
        left, right = word[i], word[i + 1]
        if left > right:
            # q_l q_r = q_r q_l + [q_l, q_r]
            result: dict[Monomial, ExactScalar] = dict(
                _normal_order(word[:i] + (right, left) + word[i + 2:], table)
            )
            bracket = table.commutator(left, right)
            if not bracket.is_zero:
                for monomial, coeff in _normal_order(word[:i] + word[i + 2:], table):
                    result[monomial] = result.get(monomial, ZERO) + bracket * coeff
            return tuple((m, c) for m, c in result.items() if not c.is_zero)
    return ((_monomial(word), ONE),)


@dataclass(frozen=True)
class CanonicalPolynomial:
    """Exact normal-ordered polynomial; ``terms`` is sorted and free of zeros."""

    terms: tuple[tuple[Monomial, ExactScalar], ...] = ()

    @classmethod
    def from_terms(cls, terms: Mapping[Monomial, object]) -> "CanonicalPolynomial":
        cleaned = []
        for monomial, coeff in terms.items():
            scalar = ExactScalar.coerce(coeff)
            if len(monomial) != NUM_GENERATORS or any(e < 0 for e in monomial):
                raise ValueError(f"Invalid monomial {monomial!r}")
            if not scalar.is_zero:
                cleaned.append((tuple(monomial), scalar))
        return cls(tuple(sorted(cleaned, key=lambda item: item[0])))

    @classmethod
    def constant(cls, value) -> "CanonicalPolynomial":
        return cls.from_terms({IDENTITY_MONOMIAL: value})

    @classmethod
    def generator(cls, gen: Generator | str) -> "CanonicalPolynomial":
        if isinstance(gen, str):
            gen = Generator.from_label(gen)
        exponents = [0] * NUM_GENERATORS
        exponents[gen] = 1
        return cls.from_terms({tuple(exponents): ONE})

    # --- queries ---

    def as_dict(self) -> dict[Monomial, ExactScalar]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((monomial_degree(m) for m, _ in self.terms), default=-1)

    def coefficient(self, monomial: Monomial) -> ExactScalar:
        return self.as_dict().get(tuple(monomial), ZERO)

    # --- arithmetic ---

    def __add__(self, other) -> "CanonicalPolynomial":
        other = _as_polynomial(other)
        if other is None:
            return NotImplemented
        merged = self.as_dict()
        for monomial, coeff in other.terms:
            merged[monomial] = merged.get(monomial, ZERO) + coeff
        return CanonicalPolynomial.from_terms(merged)

    __radd__ = __add__

    def __neg__(self) -> "CanonicalPolynomial":
        return CanonicalPolynomial(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other) -> "CanonicalPolynomial":
        other = _as_polynomial(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "CanonicalPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "CanonicalPolynomial":
        if isinstance(other, CanonicalPolynomial):
            return multiply(self, other)
        try:
            scalar = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(scalar)

    def __rmul__(self, other) -> "CanonicalPolynomial":
        try:
            scalar = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(scalar)

    def __truediv__(self, other) -> "CanonicalPolynomial":
        return CanonicalPolynomial.from_terms({m: c / other for m, c in self.terms})

    def scale(self, scalar) -> "CanonicalPolynomial":
        scalar = ExactScalar.coerce(scalar)
        return CanonicalPolynomial.from_terms({m: scalar * c for m, c in self.terms})

    def __pow__(self, exponent: int) -> "CanonicalPolynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise DomainError("Only non-negative integer powers are supported")
        result = CanonicalPolynomial.constant(1)
        for _ in range(exponent):
            result = multiply(result, self)
        return result

    def __str__(self) -> str:
        from .expressions import format_polynomial

        return format_polynomial(self)


def _as_polynomial(value) -> CanonicalPolynomial | None:
    if isinstance(value, CanonicalPolynomial):
        return value
    try:
        return CanonicalPolynomial.constant(ExactScalar.coerce(value))
    except TypeError:
        return None


def multiply(
    P: CanonicalPolynomial,
    Q: CanonicalPolynomial,
    table: CommutationTable = STANDARD_TABLE,
) -> CanonicalPolynomial:
    """Normal-ordered product P*Q."""
    result: dict[Monomial, ExactScalar] = {}
    for m1, c1 in P.terms:
        for m2, c2 in Q.terms:
            coeff = c1 * c2
            for monomial, c in _normal_order(_word(m1) + _word(m2), table):
                result[monomial] = result.get(monomial, ZERO) + coeff * c
    return CanonicalPolynomial.from_terms(result)


def commutator(
    P: CanonicalPolynomial,
    Q: CanonicalPolynomial,
    table: CommutationTable = STANDARD_TABLE,
) -> CanonicalPolynomial:
    """[P, Q] = PQ - QP, normal-ordered."""
    return multiply(P, Q, table) - multiply(Q, P, table)


# ===== Linear forms =====


@dataclass(frozen=True)
class LinearForm:
    """sum_j c_j q_j + c_0 with exact coefficients."""

    coefficients: tuple[ExactScalar, ...]
    constant: ExactScalar = ZERO

    def numeric(self, hbar: float) -> tuple[np.ndarray, float]:
        """Real coefficient vector and constant at a concrete hbar.

        Raises DomainError for a non-Hermitian form (complex coefficients).
        """
        values = [c.evaluate(hbar) for c in self.coefficients]
        constant = self.constant.evaluate(hbar)
        if any(abs(v.imag) > 0 for v in values) or abs(constant.imag) > 0:
            raise DomainError("Linear form has complex coefficients and is not Hermitian")
        return np.array([v.real for v in values]), constant.real

    def to_polynomial(self) -> CanonicalPolynomial:
        total = CanonicalPolynomial.constant(self.constant)
        for gen, coeff in zip(Generator, self.coefficients):
            total = total + CanonicalPolynomial.generator(gen).scale(coeff)
        return total


def linear_part(P: CanonicalPolynomial) -> LinearForm:
    """Extract the coefficients of a degree <= 1 polynomial."""
    coefficients = [ZERO] * NUM_GENERATORS
    constant = ZERO
    for monomial, coeff in P.terms:
        degree = monomial_degree(monomial)
        if degree == 0:
            constant = coeff
        elif degree == 1:
            coefficients[monomial.index(1)] = coeff
        else:
            raise NotLinear(f"Polynomial '{P}' has a term of degree {degree}")
    return LinearForm(tuple(coefficients), constant)


def represent(
    P: CanonicalPolynomial,
    matrices: Mapping[Generator, np.ndarray],
    hbar: float,
) -> np.ndarray:
    """Evaluate P on concrete matrices, multiplying factors in canonical order."""
    dim = next(iter(matrices.values())).shape[0]
    identity = np.eye(dim, dtype=complex)
    total = np.zeros((dim, dim), dtype=complex)
    for monomial, coeff in P.terms:
        term = identity
        for index in _word(monomial):
            term = term @ matrices[Generator(index)]
        total = total + coeff.evaluate(hbar) * term
    return total
