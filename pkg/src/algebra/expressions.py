"""Plain-text operator expressions.

Format (round-trippable through ``parse_polynomial``)::

    muX + x + (1/2) piP
    x^2 + 2 x*p + p^2 - i*hbar
    -i*hbar

Terms are joined by `` + `` / `` - ``. A scalar coefficient is separated from
its monomial by a space, monomial factors appear in canonical order joined by
``*`` with powers written ``^k``, ``i`` is the imaginary unit and ``hbar`` the
formal symbol. Terms are listed by descending degree, pointer positions
before system variables before pointer momenta, constants last.
"""

from fractions import Fraction
from tokenize import TokenError

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

from ..utils.errors import ExpressionError
from .generators import DISPLAY_ORDER, LABELS, Generator
from .polynomial import CanonicalPolynomial, Monomial, monomial_degree
from .scalars import ExactScalar

_TRANSFORMATIONS = standard_transformations + (implicit_multiplication, convert_xor)
_HBAR = sympy.Symbol("hbar", positive=True)
_SYMBOLS = {label: sympy.Symbol(label, commutative=False) for label in LABELS.values()}


# ===== Formatting =====


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return f"{sign}({abs(value.numerator)}/{value.denominator})"


def _format_part(power: int, re: Fraction, im: Fraction) -> str:
    if im == 0:
        number = _format_rational(re)
    elif re == 0:
        if im == 1:
            number = "i"
        elif im == -1:
            number = "-i"
        else:
            number = f"{_format_rational(im)}*i"
    else:
        sign = "-" if im < 0 else "+"
        number = f"({_format_rational(re)} {sign} {_format_rational(abs(im))}*i)"

    if power == 0:
        return number
    hbar = "hbar" if power == 1 else f"hbar^{power}" if power > 0 else f"hbar^({power})"
    if number == "1":
        return hbar
    if number == "-1":
        return "-" + hbar
    return f"{number}*{hbar}"


def _join(pieces: list[str]) -> str:
    if not pieces:
        return "0"
    text = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            text += " - " + piece[1:]
        else:
            text += " + " + piece
    return text


def format_scalar(scalar: ExactScalar) -> str:
    # Highest power of hbar first
    return _join([_format_part(*part) for part in reversed(scalar.parts)])


def format_monomial(monomial: Monomial) -> str:
    factors = []
    for gen in Generator:
        power = monomial[gen]
        if power == 1:
            factors.append(gen.label)
        elif power > 1:
            factors.append(f"{gen.label}^{power}")
    return "*".join(factors)


def _display_key(monomial: Monomial) -> tuple:
    return (-monomial_degree(monomial), tuple(-monomial[gen] for gen in DISPLAY_ORDER))


def format_polynomial(P: CanonicalPolynomial) -> str:
    pieces = []
    for monomial, coeff in sorted(P.terms, key=lambda item: _display_key(item[0])):
        word = format_monomial(monomial)
        scalar = format_scalar(coeff)
        if not word:
            pieces.append(scalar)
        elif scalar == "1":
            pieces.append(word)
        elif scalar == "-1":
            pieces.append("-" + word)
        elif len(coeff.parts) == 1:
            pieces.append(f"{scalar} {word}")
        else:
            pieces.append(f"({scalar}) {word}")
    return _join(pieces)


# ===== Parsing =====


def _scalar_from_number(expr) -> ExactScalar:
    re, im = expr.as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise ExpressionError(f"Coefficient '{expr}' is not a Gaussian rational")
    return ExactScalar.of(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _convert(expr) -> CanonicalPolynomial:
    if expr.is_Add:
        total = CanonicalPolynomial()
        for arg in expr.args:
            total = total + _convert(arg)
        return total
    if expr.is_Mul:
        # sympy keeps noncommutative factors in written order
        product = CanonicalPolynomial.constant(1)
        for arg in expr.args:
            product = product * _convert(arg)
        return product
    if expr.is_Pow:
        base, exponent = expr.args
        if not exponent.is_Integer:
            raise ExpressionError(f"Non-integer power in '{expr}'")
        if base == _HBAR:
            return CanonicalPolynomial.constant(ExactScalar.of(1, power=int(exponent)))
        if exponent < 0:
            raise ExpressionError(f"Negative power of an operator in '{expr}'")
        return _convert(base) ** int(exponent)
    if expr == _HBAR:
        return CanonicalPolynomial.constant(ExactScalar.of(1, power=1))
    if expr.is_Symbol:
        if expr.name in _SYMBOLS:
            return CanonicalPolynomial.generator(expr.name)
        raise ExpressionError(f"Unknown symbol '{expr.name}'")
    if expr.is_number:
        return CanonicalPolynomial.constant(_scalar_from_number(expr))
    raise ExpressionError(f"Unsupported expression '{expr}'")


def parse_polynomial(text: str) -> CanonicalPolynomial:
    """Parse the plain-text format back into a normal-ordered polynomial."""
    local_dict = dict(_SYMBOLS)
    local_dict["hbar"] = _HBAR
    local_dict["i"] = sympy.I
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=_TRANSFORMATIONS, evaluate=True)
    except (SyntaxError, TokenError, TypeError, ValueError, sympy.SympifyError) as exc:
        raise ExpressionError(f"Cannot parse '{text}': {exc}") from exc
    return _convert(sympy.sympify(expr))
