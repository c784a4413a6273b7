"""Heisenberg-picture conjugation and the error/disturbance operators.

For U = exp(K) with K anti-Hermitian, the final operator U^dagger O U equals
exp(-ad_K)(O) = O - [K, O] + [K, [K, O]]/2! - ... . For generators that are
bilinear in the canonical variables the series terminates, so each
generator is conjugated exactly and the result is substituted back into O
(conjugation is an algebra homomorphism).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from ..utils.errors import NonTerminatingSeries
from .generators import STANDARD_TABLE, CommutationTable, Generator
from .polynomial import CanonicalPolynomial, _word, commutator, multiply
from .scalars import ExactScalar

logger = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 16

ERROR_DISTURBANCE_NAMES = ("eXi", "ePi", "eXf", "ePf", "dX", "dP")


def _gen(gen: Generator) -> CanonicalPolynomial:
    return CanonicalPolynomial.generator(gen)


def _coupling_fraction(g) -> Fraction:
    if isinstance(g, Fraction):
        return g
    if isinstance(g, float):
        return Fraction(repr(g))
    return Fraction(g)


def ak_generator(g=1) -> CanonicalPolynomial:
    """K = -(i g / hbar)(piP p + piX x), so that U = exp(K)."""
    coeff = ExactScalar.of(0, -_coupling_fraction(g), power=-1)
    bilinear = multiply(_gen(Generator.PI_P), _gen(Generator.P)) + multiply(
        _gen(Generator.PI_X), _gen(Generator.X)
    )
    return bilinear.scale(coeff)


def ak_factorization(
    g=1, table: CommutationTable = STANDARD_TABLE
) -> tuple[CanonicalPolynomial, CanonicalPolynomial, CanonicalPolynomial]:
    """Generators (K_A, K_B, K_C) with exp(K_AK) = exp(K_A) exp(K_B) exp(K_C).

    K_A = -(ig/hbar) piP p and K_B = -(ig/hbar) piX x do not commute; their
    commutator is central in the algebra they generate, so the split closes
    with K_C = -[K_A, K_B]/2.
    """
    coeff = ExactScalar.of(0, -_coupling_fraction(g), power=-1)
    k_a = multiply(_gen(Generator.PI_P), _gen(Generator.P), table).scale(coeff)
    k_b = multiply(_gen(Generator.PI_X), _gen(Generator.X), table).scale(coeff)
    k_c = commutator(k_a, k_b, table).scale(ExactScalar.of(Fraction(-1, 2)))
    return k_a, k_b, k_c


def conjugate_generator(
    K: CanonicalPolynomial,
    gen: Generator,
    max_steps: int = DEFAULT_MAX_STEPS,
    table: CommutationTable = STANDARD_TABLE,
) -> CanonicalPolynomial:
    """exp(-ad_K)(q) for one generator, summing the terminating series."""
    total = _gen(gen)
    term = total
    for step in range(1, max_steps + 1):
        term = commutator(K, term, table).scale(ExactScalar.of(Fraction(-1, step)))
        if term.is_zero:
            logger.debug("Series for %s terminated after %d steps", gen.label, step)
            return total
        total = total + term
    raise NonTerminatingSeries(
        f"Commutator series for {gen.label} did not vanish within {max_steps} steps"
    )


def adjoint_conjugate(
    K: CanonicalPolynomial,
    P: CanonicalPolynomial,
    max_steps: int = DEFAULT_MAX_STEPS,
    table: CommutationTable = STANDARD_TABLE,
) -> CanonicalPolynomial:
    """exp(-ad_K)(P), i.e. U^dagger P U for U = exp(K)."""
    images: dict[int, CanonicalPolynomial] = {}
    result = CanonicalPolynomial()
    for monomial, coeff in P.terms:
        term = CanonicalPolynomial.constant(coeff)
        for index in _word(monomial):
            if index not in images:
                images[index] = conjugate_generator(K, Generator(index), max_steps, table)
            term = multiply(term, images[index], table)
        result = result + term
    return result


def heisenberg_finals(
    K: CanonicalPolynomial,
    max_steps: int = DEFAULT_MAX_STEPS,
    table: CommutationTable = STANDARD_TABLE,
) -> dict[Generator, CanonicalPolynomial]:
    """U^dagger q U for all six generators, in canonical order."""
    return {gen: conjugate_generator(K, gen, max_steps, table) for gen in Generator}


@dataclass(frozen=True)
class ErrorDisturbanceOperators:
    """Retrodictive errors, predictive errors and disturbances."""

    e_xi: CanonicalPolynomial
    e_pi: CanonicalPolynomial
    e_xf: CanonicalPolynomial
    e_pf: CanonicalPolynomial
    d_x: CanonicalPolynomial
    d_p: CanonicalPolynomial

    def as_dict(self) -> dict[str, CanonicalPolynomial]:
        return dict(
            zip(
                ERROR_DISTURBANCE_NAMES,
                (self.e_xi, self.e_pi, self.e_xf, self.e_pf, self.d_x, self.d_p),
            )
        )


def derive_error_disturbance(
    K: CanonicalPolynomial,
    max_steps: int = DEFAULT_MAX_STEPS,
    table: CommutationTable = STANDARD_TABLE,
) -> ErrorDisturbanceOperators:
    finals = heisenberg_finals(K, max_steps, table)
    x, p = _gen(Generator.X), _gen(Generator.P)
    mu_xf, mu_pf = finals[Generator.MU_X], finals[Generator.MU_P]
    x_f, p_f = finals[Generator.X], finals[Generator.P]
    return ErrorDisturbanceOperators(
        e_xi=mu_xf - x,
        e_pi=mu_pf - p,
        e_xf=mu_xf - x_f,
        e_pf=mu_pf - p_f,
        d_x=x_f - x,
        d_p=p_f - p,
    )


def commutator_table(
    operators: dict[str, CanonicalPolynomial],
    table: CommutationTable = STANDARD_TABLE,
) -> list[tuple[str, str, CanonicalPolynomial]]:
    """[A, B] for every unordered pair, in insertion order."""
    names = list(operators)
    rows = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            rows.append((a, b, commutator(operators[a], operators[b], table)))
    return rows


def is_unbiased(op: CanonicalPolynomial) -> bool:
    """True when the expectation vanishes for every system state and zero-mean apparatus.

    That holds when the operator is degree <= 1 with no x, p or constant
    component; higher-degree operators are never reported unbiased.
    """
    if op.degree > 1:
        return False
    for monomial, _ in op.terms:
        if sum(monomial) == 0:
            return False
        if monomial[Generator.X] or monomial[Generator.P]:
            return False
    return True
