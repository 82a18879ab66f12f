"""Truncated symmetric Fock space with sparse occupation-basis vectors.

Storage convention: a vector maps occupation multisets to the coefficient
of the *monomial* basis element (the symmetrized product of one-particle
basis vectors with the given multiplicities).  In this basis

* creation by a basis vector is a pure index shift,
* annihilation picks up the occupation count and the one-particle weight,
* the n!-weighted inner product reduces to the per-occupation weight
  ``prod_i count_i! * weight**level``.

Operators never materialize as dense matrices; they act as index-to-index
rules on the sparse entries, so the set reachable from the vacuum under a
handful of applications stays tiny even when the ambient dimension is
astronomically large.

Truncation contract: ``create`` silently drops components that would
exceed the configured maximum level.  Algebraic identities are therefore
exact only on vectors supported strictly below the ceiling; callers state
the level window they rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Occupation = Tuple[Tuple[int, int], ...]


def occupation(indices: Iterable[int]) -> Occupation:
    """Build a sorted occupation multiset from one-particle indices."""
    counts: Dict[int, int] = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    return tuple(sorted(counts.items()))


def occ_level(occ: Occupation) -> int:
    return sum(c for _, c in occ)


def occ_add(occ: Occupation, index: int) -> Occupation:
    out = []
    placed = False
    for i, c in occ:
        if i == index:
            out.append((i, c + 1))
            placed = True
        else:
            out.append((i, c))
    if not placed:
        out.append((index, 1))
        out.sort()
    return tuple(out)


def occ_remove(occ: Occupation, index: int) -> Occupation:
    out = []
    for i, c in occ:
        if i == index:
            if c > 1:
                out.append((i, c - 1))
        else:
            out.append((i, c))
    return tuple(out)


def occ_weight(occ: Occupation, weight: float) -> float:
    """Inner-product weight of a monomial basis element."""
    w = 1.0
    for _, c in occ:
        w *= math.factorial(c)
    return w * weight ** occ_level(occ)


@dataclass(frozen=True)
class FockSpace:
    """Descriptor: one-particle dimension, level ceiling, one-particle metric."""

    dim: int
    max_level: int
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("one-particle dimension must be >= 1")
        if self.max_level < 0:
            raise ValueError("max_level must be >= 0")
        if not self.weight > 0:
            raise ValueError("one-particle weight must be positive")


@dataclass
class FockVector:
    """Sparse element of the truncated space; treat as immutable."""

    space: FockSpace
    entries: Dict[Occupation, float] = field(default_factory=dict)

    def __add__(self, other: "FockVector") -> "FockVector":
        _require_same(self, other)
        out = dict(self.entries)
        for occ, c in other.entries.items():
            v = out.get(occ, 0.0) + c
            if v != 0.0:
                out[occ] = v
            elif occ in out:
                del out[occ]
        return FockVector(self.space, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "FockVector":
        if scalar == 0.0:
            return FockVector(self.space, {})
        return FockVector(self.space, {o: c * scalar for o, c in self.entries.items()})

    __rmul__ = __mul__

    def max_occupied_level(self) -> int:
        return max((occ_level(o) for o in self.entries), default=0)


def _require_same(f: FockVector, g: FockVector) -> None:
    if f.space != g.space:
        raise ValueError("Fock vectors live on different spaces")


OneParticleVector = Union[Mapping[int, float], Sequence[float]]


def _as_sparse_vector(g: OneParticleVector, dim: int) -> Tuple[Tuple[int, float], ...]:
    if isinstance(g, Mapping):
        items = sorted(g.items())
    else:
        items = list(enumerate(g))
    out = []
    for i, v in items:
        if not 0 <= i < dim:
            raise ValueError(f"one-particle index {i} outside dimension {dim}")
        v = float(v)
        if v != 0.0:
            out.append((i, v))
    return tuple(out)


class OneParticleOperator:
    """Sparse one-particle operator stored column-wise.

    Column c holds the pairs (row, value) of the image of basis vector c.
    """

    def __init__(self, dim: int, cols: Mapping[int, Sequence[Tuple[int, float]]]):
        self.dim = dim
        clean: Dict[int, Tuple[Tuple[int, float], ...]] = {}
        for c, pairs in cols.items():
            if not 0 <= c < dim:
                raise ValueError(f"column {c} outside dimension {dim}")
            kept = tuple((r, float(v)) for r, v in pairs if float(v) != 0.0)
            for r, _ in kept:
                if not 0 <= r < dim:
                    raise ValueError(f"row {r} outside dimension {dim}")
            if kept:
                clean[c] = kept
        self.cols = clean

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[float]]) -> "OneParticleOperator":
        dim = len(matrix)
        for row in matrix:
            if len(row) != dim:
                raise ValueError("one-particle operator must be square")
        cols = {
            c: [(r, matrix[r][c]) for r in range(dim) if matrix[r][c] != 0.0]
            for c in range(dim)
        }
        return cls(dim, cols)

    @classmethod
    def identity(cls, dim: int) -> "OneParticleOperator":
        return cls(dim, {i: [(i, 1.0)] for i in range(dim)})

    def column(self, c: int) -> Tuple[Tuple[int, float], ...]:
        return self.cols.get(c, ())


def vacuum(space: FockSpace) -> FockVector:
    return FockVector(space, {(): 1.0})


def basis_state(space: FockSpace, occ: Occupation, coeff: float = 1.0) -> FockVector:
    if occ_level(occ) > space.max_level:
        raise ValueError("occupation exceeds the level ceiling")
    for i, c in occ:
        if not 0 <= i < space.dim or c <= 0:
            raise ValueError(f"bad occupation entry ({i}, {c})")
    return FockVector(space, {occ: float(coeff)})


def create(g: OneParticleVector, vec: FockVector) -> FockVector:
    """Symmetric tensor multiplication by g; overflow above the ceiling is dropped."""
    gv = _as_sparse_vector(g, vec.space.dim)
    out: Dict[Occupation, float] = {}
    ceiling = vec.space.max_level
    for occ, c in vec.entries.items():
        if occ_level(occ) + 1 > ceiling:
            continue
        for i, gi in gv:
            key = occ_add(occ, i)
            v = out.get(key, 0.0) + c * gi
            if v != 0.0:
                out[key] = v
            elif key in out:
                del out[key]
    return FockVector(vec.space, out)


def annihilate(g: OneParticleVector, vec: FockVector) -> FockVector:
    """Adjoint of ``create`` with respect to the weighted inner product."""
    gv = dict(_as_sparse_vector(g, vec.space.dim))
    w = vec.space.weight
    out: Dict[Occupation, float] = {}
    for occ, c in vec.entries.items():
        for i, count in occ:
            gi = gv.get(i)
            if gi is None:
                continue
            key = occ_remove(occ, i)
            v = out.get(key, 0.0) + c * count * w * gi
            if v != 0.0:
                out[key] = v
            elif key in out:
                del out[key]
    return FockVector(vec.space, out)


def dgamma(h: OneParticleOperator, vec: FockVector) -> FockVector:
    """Differential second quantization: h summed over tensor slots."""
    if h.dim != vec.space.dim:
        raise ValueError("operator dimension does not match the one-particle space")
    out: Dict[Occupation, float] = {}
    for occ, c in vec.entries.items():
        for i, count in occ:
            for row, val in h.column(i):
                key = occ_add(occ_remove(occ, i), row)
                v = out.get(key, 0.0) + c * count * val
                if v != 0.0:
                    out[key] = v
                elif key in out:
                    del out[key]
    return FockVector(vec.space, out)


def fock_inner(f: FockVector, g: FockVector) -> float:
    """Level-orthogonal inner product with the n!-weighted norms."""
    _require_same(f, g)
    small, large = (f, g) if len(f.entries) <= len(g.entries) else (g, f)
    w = f.space.weight
    total = 0.0
    for occ, c in small.entries.items():
        d = large.entries.get(occ)
        if d is not None:
            total += c * d * occ_weight(occ, w)
    return total


def norm(f: FockVector) -> float:
    return math.sqrt(fock_inner(f, f))
