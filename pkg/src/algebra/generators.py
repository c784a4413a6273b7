"""The six canonical generators and their commutation table.

Canonical order is (x, p, muX, piX, muP, piP): each conjugate pair sits in
adjacent slots and normal ordering sorts factors by this index.
"""

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

from .scalars import ExactScalar


class Generator(IntEnum):
    X = 0
    P = 1
    MU_X = 2
    PI_X = 3
    MU_P = 4
    PI_P = 5

    @property
    def label(self) -> str:
        return LABELS[self]

    @property
    def is_momentum(self) -> bool:
        return self.value % 2 == 1

    @property
    def mode(self) -> int:
        """Degree of freedom: 0 system, 1 meter X, 2 meter P."""
        return self.value // 2

    @classmethod
    def from_label(cls, label: str) -> "Generator":
        try:
            return _BY_LABEL[label]
        except KeyError:
            raise KeyError(f"Unknown generator '{label}'") from None


LABELS = {
    Generator.X: "x",
    Generator.P: "p",
    Generator.MU_X: "muX",
    Generator.PI_X: "piX",
    Generator.MU_P: "muP",
    Generator.PI_P: "piP",
}
_BY_LABEL = {label: gen for gen, label in LABELS.items()}

# Printing order for terms: pointer positions, system, pointer momenta
DISPLAY_ORDER = (
    Generator.MU_X,
    Generator.MU_P,
    Generator.X,
    Generator.P,
    Generator.PI_X,
    Generator.PI_P,
)

NUM_GENERATORS = len(Generator)


def standard_omega() -> tuple[tuple[Fraction, ...], ...]:
    """Omega with [q_j, q_k] = i hbar Omega_jk: three 2x2 blocks [[0, 1], [-1, 0]]."""
    rows = [[Fraction(0)] * NUM_GENERATORS for _ in range(NUM_GENERATORS)]
    for mode in range(3):
        q, p = 2 * mode, 2 * mode + 1
        rows[q][p] = Fraction(1)
        rows[p][q] = Fraction(-1)
    return tuple(tuple(row) for row in rows)


@dataclass(frozen=True)
class CommutationTable:
    """Central commutators [q_j, q_k] = i hbar omega[j][k].

    Hashable so that normal-ordering results can be cached per table.
    """

    omega: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.omega)
        for j in range(n):
            for k in range(n):
                if self.omega[j][k] != -self.omega[k][j]:
                    raise ValueError(
                        f"Commutation table is not antisymmetric at ({j}, {k})"
                    )

    def commutator(self, j: int, k: int) -> ExactScalar:
        return ExactScalar.of(0, self.omega[j][k], power=1)

    def perturbed(self, j: int, k: int, value) -> "CommutationTable":
        """Copy with omega[j][k] = value (and omega[k][j] = -value)."""
        rows = [list(row) for row in self.omega]
        rows[j][k] = Fraction(value)
        rows[k][j] = -Fraction(value)
        return CommutationTable(tuple(tuple(row) for row in rows))


STANDARD_TABLE = CommutationTable(standard_omega())
