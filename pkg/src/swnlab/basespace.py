"""Finite atomic base space: grid atoms, test functions, and the L2 pairing.

Everything downstream (Fock spaces, operator identities, moment checks)
works over a finite set of atoms carrying a common cell mass, so every
pairing is a finite weighted sum and the checked identities hold exactly
rather than approximately.  The nominal dimension of the replaced
continuum enters only as a label.
"""

from __future__ import annotations

from dataclasses import dataclass


class SpaceMismatchError(ValueError):
    """Two grid objects do not live on the same GridSpace."""


@dataclass(frozen=True)
class GridSpace:
    """Finite measure space: ``size`` atoms, each of mass ``cell_mass``."""

    dim: int
    atoms: tuple
    cell_mass: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not self.atoms:
            raise ValueError("a GridSpace needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom identifiers must be unique")
        if not self.cell_mass > 0:
            raise ValueError(f"cell_mass must be positive, got {self.cell_mass}")

    @property
    def size(self) -> int:
        return len(self.atoms)

    @classmethod
    def regular(cls, n_atoms: int, cell_mass: float, dim: int = 1) -> "GridSpace":
        return cls(dim=dim, atoms=tuple(range(n_atoms)), cell_mass=cell_mass)


@dataclass(frozen=True)
class GridFunction:
    """Real test function given by one value per atom."""

    space: GridSpace
    values: tuple

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.space.size:
            raise ValueError(f"expected {self.space.size} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, space: GridSpace, value: float = 1.0) -> "GridFunction":
        return cls(space, (float(value),) * space.size)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


def _require_same_space(f: GridFunction, g: GridFunction) -> None:
    if f.space != g.space:
        raise SpaceMismatchError("grid functions live on different spaces")


def inner(f: GridFunction, g: GridFunction) -> float:
    """L2 pairing: cell mass times the sum of pointwise products."""
    _require_same_space(f, g)
    return f.space.cell_mass * sum(a * b for a, b in zip(f.values, g.values))


def pointwise_product(f: GridFunction, g: GridFunction) -> GridFunction:
    """Atom-wise product of two test functions on the same grid."""
    _require_same_space(f, g)
    return GridFunction(f.space, tuple(a * b for a, b in zip(f.values, g.values)))


def power_integral(f: GridFunction, j: int) -> float:
    """Cell mass times the sum of j-th powers of the values."""
    if j < 0:
        raise ValueError("power must be nonnegative")
    return f.space.cell_mass * sum(v**j for v in f.values)
