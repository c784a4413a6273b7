"""Exact scalars: Laurent polynomials in a formal hbar with Gaussian-rational coefficients.

A scalar is stored as a sorted tuple of ``(power, real, imag)`` parts with
``Fraction`` coefficients and no zero parts, so equal values always have
equal representations (``ZERO`` is the empty tuple).
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

Part = tuple[int, Fraction, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        # Decimal reading, so 0.1 becomes 1/10 rather than its binary expansion
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"Cannot convert {value!r} to an exact rational")


def _canonical(parts: dict[int, tuple[Fraction, Fraction]]) -> tuple[Part, ...]:
    return tuple(
        (power, re, im)
        for power, (re, im) in sorted(parts.items())
        if re != 0 or im != 0
    )


@dataclass(frozen=True)
class ExactScalar:
    """Exact value sum_k (a_k + i b_k) hbar^k."""

    parts: tuple[Part, ...] = ()

    @classmethod
    def of(cls, re=0, im=0, power: int = 0) -> "ExactScalar":
        return cls(_canonical({power: (_as_fraction(re), _as_fraction(im))}))

    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, complex):
            return cls.of(value.real, value.imag)
        return cls.of(value)

    # --- queries ---

    @property
    def is_zero(self) -> bool:
        return not self.parts

    def as_dict(self) -> dict[int, tuple[Fraction, Fraction]]:
        return {power: (re, im) for power, re, im in self.parts}

    def evaluate(self, hbar: float) -> complex:
        """Numeric value at a concrete hbar."""
        total = 0j
        for power, re, im in self.parts:
            total += complex(float(re), float(im)) * hbar**power
        return total

    # --- arithmetic ---

    def __add__(self, other) -> "ExactScalar":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        merged = self.as_dict()
        for power, re, im in other.parts:
            a, b = merged.get(power, (Fraction(0), Fraction(0)))
            merged[power] = (a + re, b + im)
        return ExactScalar(_canonical(merged))

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(tuple((p, -re, -im) for p, re, im in self.parts))

    def __sub__(self, other) -> "ExactScalar":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ExactScalar":
        return (-self) + other

    def __mul__(self, other) -> "ExactScalar":
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        product: dict[int, tuple[Fraction, Fraction]] = {}
        for p1, a1, b1 in self.parts:
            for p2, a2, b2 in other.parts:
                re = a1 * a2 - b1 * b2
                im = a1 * b2 + b1 * a2
                a, b = product.get(p1 + p2, (Fraction(0), Fraction(0)))
                product[p1 + p2] = (a + re, b + im)
        return ExactScalar(_canonical(product))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactScalar":
        """Division by a nonzero rational (the only division the algebra needs)."""
        divisor = _as_fraction(other)
        if divisor == 0:
            raise ZeroDivisionError("ExactScalar division by zero")
        return ExactScalar(tuple((p, re / divisor, im / divisor) for p, re, im in self.parts))

    def __bool__(self) -> bool:
        return not self.is_zero

    def __str__(self) -> str:
        from .expressions import format_scalar

        return format_scalar(self)


def _coerce_or_none(value) -> ExactScalar | None:
    try:
        return ExactScalar.coerce(value)
    except TypeError:
        return None


ZERO = ExactScalar()
ONE = ExactScalar.of(1)
I = ExactScalar.of(0, 1)
HBAR = ExactScalar.of(1, power=1)
I_HBAR = ExactScalar.of(0, 1, power=1)
