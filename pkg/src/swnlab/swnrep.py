"""Squared-noise operators on the truncated Fock space over grid x ladder.

One-particle space: grid atoms tensored with a finite ladder of modes
1..M.  The three generators act through second quantization:

    raise_op(phi)   = 2*create(phi (x) mode 1) + 2*dgamma(phi (x) ladder-up)
    number_op(phi)  = 2*dgamma(phi (x) ladder-diag)
    lower_op(phi)   = 2*annihilate(phi (x) mode 1) + 2*dgamma(phi (x) ladder-down)
    field_op        = raise + lower + beta*number

with ladder-up/diag/down the tridiagonal ladder action sqrt(m*(m+1)),
m, sqrt((m-1)*m) on the mode index.  The commutation table and the
adjointness relations hold exactly on vectors supported at particle level
at most N-2 and ladder index at most M-2 (the safe window away from both
truncation ceilings).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .basespace import GridFunction, GridSpace, SpaceMismatchError, pointwise_product
from .fockcore import (
    FockSpace,
    FockVector,
    OneParticleOperator,
    annihilate,
    create,
    dgamma,
    fock_inner,
    norm,
    occupation,
    vacuum,
)

BDAG = "Bdag"
NUM = "N"
B = "B"
X = "X"


@dataclass(frozen=True)
class SwnSpace:
    """Truncated Fock space over (grid atoms) x (ladder modes 1..M)."""

    grid: GridSpace
    ladder_levels: int
    max_level: int

    def __post_init__(self) -> None:
        if self.ladder_levels < 1:
            raise ValueError("need at least one ladder mode")
        if self.max_level < 0:
            raise ValueError("max_level must be >= 0")

    @property
    def fock(self) -> FockSpace:
        return FockSpace(
            dim=self.grid.size * self.ladder_levels,
            max_level=self.max_level,
            weight=self.grid.cell_mass,
        )

    def index(self, atom_pos: int, mode: int) -> int:
        """Flat one-particle index of (atom position, ladder mode 1..M)."""
        if not 0 <= atom_pos < self.grid.size:
            raise ValueError("atom position out of range")
        if not 1 <= mode <= self.ladder_levels:
            raise ValueError("ladder mode out of range")
        return atom_pos * self.ladder_levels + (mode - 1)

    def mode_of(self, flat_index: int) -> int:
        return flat_index % self.ladder_levels + 1

    def vacuum(self) -> FockVector:
        return vacuum(self.fock)


def ground_mode_vector(space: SwnSpace, phi: GridFunction) -> Dict[int, float]:
    """One-particle vector phi placed in ladder mode 1."""
    if phi.space != space.grid:
        raise SpaceMismatchError("test function lives on a different grid")
    return {
        space.index(a, 1): phi[a] for a in range(space.grid.size) if phi[a] != 0.0
    }


def ladder_operator(space: SwnSpace, phi: GridFunction, step: int) -> OneParticleOperator:
    """Multiplication by phi tensored with the ladder shift (step in {-1, 0, +1}).

    The up shift at the top mode is truncated to zero.
    """
    if phi.space != space.grid:
        raise SpaceMismatchError("test function lives on a different grid")
    if step not in (-1, 0, 1):
        raise ValueError("step must be -1, 0, or +1")
    m_levels = space.ladder_levels
    cols: Dict[int, List[Tuple[int, float]]] = {}
    for a in range(space.grid.size):
        if phi[a] == 0.0:
            continue
        for m in range(1, m_levels + 1):
            col = space.index(a, m)
            if step == 0:
                cols[col] = [(col, phi[a] * m)]
            elif step == 1:
                if m + 1 <= m_levels:
                    cols[col] = [(space.index(a, m + 1), phi[a] * math.sqrt(m * (m + 1)))]
            else:
                if m >= 2:
                    cols[col] = [(space.index(a, m - 1), phi[a] * math.sqrt((m - 1) * m))]
    return OneParticleOperator(space.fock.dim, cols)


@dataclass(frozen=True)
class SwnOperator:
    """One of the four generators, assembled from second-quantization parts."""

    kind: str
    space: SwnSpace
    phi: GridFunction
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (BDAG, NUM, B, X):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.phi.space != self.space.grid:
            raise SpaceMismatchError("test function lives on a different grid")

    def apply(self, vec: FockVector) -> FockVector:
        if vec.space != self.space.fock:
            raise ValueError("vector lives on a different truncated space")
        if self.kind == BDAG:
            out = 2.0 * create(ground_mode_vector(self.space, self.phi), vec)
            return out + 2.0 * dgamma(ladder_operator(self.space, self.phi, +1), vec)
        if self.kind == NUM:
            return 2.0 * dgamma(ladder_operator(self.space, self.phi, 0), vec)
        if self.kind == B:
            out = 2.0 * annihilate(ground_mode_vector(self.space, self.phi), vec)
            return out + 2.0 * dgamma(ladder_operator(self.space, self.phi, -1), vec)
        out = raise_op(self.space, self.phi).apply(vec) + lower_op(self.space, self.phi).apply(vec)
        if self.beta != 0.0:
            out = out + self.beta * number_op(self.space, self.phi).apply(vec)
        return out


def raise_op(space: SwnSpace, phi: GridFunction) -> SwnOperator:
    return SwnOperator(BDAG, space, phi)


def number_op(space: SwnSpace, phi: GridFunction) -> SwnOperator:
    return SwnOperator(NUM, space, phi)


def lower_op(space: SwnSpace, phi: GridFunction) -> SwnOperator:
    return SwnOperator(B, space, phi)


def field_op(space: SwnSpace, phi: GridFunction, beta: float) -> SwnOperator:
    return SwnOperator(X, space, phi, beta=beta)


# ---------------------------------------------------------------------------
# Commutator harness


@dataclass(frozen=True)
class RhsTerm:
    """One term of a commutator right-hand side: scalar times operator or identity."""

    scalar: float
    operator: Optional[SwnOperator] = None

    def apply(self, vec: FockVector) -> FockVector:
        if self.operator is None:
            return self.scalar * vec
        return self.scalar * self.operator.apply(vec)


def _check_window(space: SwnSpace, vec: FockVector) -> None:
    max_lv = space.max_level - 2
    max_mode = space.ladder_levels - 2
    for occ in vec.entries:
        level = sum(c for _, c in occ)
        if level > max_lv:
            raise ValueError(
                f"test vector reaches level {level}; the safe window ends at {max_lv}"
            )
        for idx, _ in occ:
            if space.mode_of(idx) > max_mode:
                raise ValueError(
                    f"test vector reaches ladder mode {space.mode_of(idx)}; "
                    f"the safe window ends at {max_mode}"
                )


def commutator_residual(
    lhs_pair: Tuple[SwnOperator, SwnOperator],
    rhs: Sequence[RhsTerm],
    test_vectors: Iterable[FockVector],
) -> float:
    """Max over test vectors of ||([P,Q] - rhs) v|| / ||v||."""
    p, q = lhs_pair
    space = p.space
    worst = 0.0
    for vec in test_vectors:
        _check_window(space, vec)
        img = p.apply(q.apply(vec)) - q.apply(p.apply(vec))
        for term in rhs:
            img = img - term.apply(vec)
        denom = norm(vec)
        if denom == 0.0:
            continue
        worst = max(worst, norm(img) / denom)
    return worst


def commutation_table(
    space: SwnSpace, phi: GridFunction, psi: GridFunction
) -> List[Tuple[str, Tuple[SwnOperator, SwnOperator], List[RhsTerm]]]:
    """The six relations of the squared-noise algebra at coupling c = 2."""
    prod = pointwise_product(phi, psi)
    from .basespace import inner as grid_inner

    pairing = grid_inner(phi, psi)
    return [
        (
            "[B(phi),Bdag(psi)] = 4<phi,psi> + 4N(phi*psi)",
            (lower_op(space, phi), raise_op(space, psi)),
            [RhsTerm(4.0 * pairing), RhsTerm(4.0, number_op(space, prod))],
        ),
        (
            "[N(phi),Bdag(psi)] = 2Bdag(phi*psi)",
            (number_op(space, phi), raise_op(space, psi)),
            [RhsTerm(2.0, raise_op(space, prod))],
        ),
        (
            "[N(phi),B(psi)] = -2B(phi*psi)",
            (number_op(space, phi), lower_op(space, psi)),
            [RhsTerm(-2.0, lower_op(space, prod))],
        ),
        (
            "[N(phi),N(psi)] = 0",
            (number_op(space, phi), number_op(space, psi)),
            [],
        ),
        (
            "[B(phi),B(psi)] = 0",
            (lower_op(space, phi), lower_op(space, psi)),
            [],
        ),
        (
            "[Bdag(phi),Bdag(psi)] = 0",
            (raise_op(space, phi), raise_op(space, psi)),
            [],
        ),
    ]


def random_test_vector(
    space: SwnSpace,
    seed: int,
    n_entries: int = 6,
) -> FockVector:
    """Sparse vector with uniform [-1, 1] entries inside the safe window."""
    rng = random.Random(seed)
    max_level = max(space.max_level - 2, 0)
    max_mode = max(space.ladder_levels - 2, 1)
    entries: Dict = {}
    for _ in range(n_entries):
        level = rng.randint(0, max_level)
        idxs = [
            space.index(rng.randrange(space.grid.size), rng.randint(1, max_mode))
            for _ in range(level)
        ]
        occ = occupation(idxs)
        entries[occ] = entries.get(occ, 0.0) + rng.uniform(-1.0, 1.0)
    entries = {o: c for o, c in entries.items() if c != 0.0}
    if not entries:
        entries = {(): 1.0}
    return FockVector(space.fock, entries)


def random_grid_function(space: GridSpace, seed: int) -> GridFunction:
    rng = random.Random(seed)
    return GridFunction(space, tuple(rng.uniform(-1.0, 1.0) for _ in range(space.size)))


def vacuum_moment(space: SwnSpace, beta: float, phi: GridFunction, k: int) -> float:
    """Vacuum expectation of the k-th power of the symmetric field operator.

    Requires particle and ladder ceilings at least k + 1 so the value is
    free of truncation effects.
    """
    if k < 0:
        raise ValueError("moment order must be >= 0")
    need = k + 1
    if space.max_level < need or space.ladder_levels < need:
        raise ValueError(
            f"moment of order {k} needs max_level >= {need} and "
            f"ladder_levels >= {need}; got ({space.max_level}, {space.ladder_levels})"
        )
    op = field_op(space, phi, beta)
    vec = space.vacuum()
    for _ in range(k):
        vec = op.apply(vec)
    return vec.entries.get((), 0.0)
