"""Discrete extended Fock space: diagonal patterns and the ladder-field operators.

A level-n element is a symmetric real function on n-tuples of grid atoms,
stored multiset-indexed so symmetrization is exact and tuple sums never
double-count.  The level-n inner product sums over integer partitions of n
in multiplicity form: each partition contributes the number of
permutations with that cycle type times the cell-mass power of its length
times the tuple sum of both kernels evaluated with arguments repeated
along the partition blocks.

Discrete semantics: continuum integrals become cell-mass weighted sums
over all atom tuples (diagonal tuples included); the contraction that eats
a repeated argument is pointwise and carries no mass factor.  With these
conventions the creation/annihilation pair is exactly adjoint and the
doubled operators satisfy the squared-noise commutation table, which the
test suites enforce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

from .basespace import GridFunction, GridSpace, SpaceMismatchError

MultisetKey = Tuple[int, ...]           # sorted atom positions, length = level
DiagonalPattern = Tuple[int, ...]       # multiplicities: pattern[i-1] parts of size i


def partitions(n: int) -> List[DiagonalPattern]:
    """All integer partitions of n in multiplicity form, deterministic order.

    ``alpha[i-1]`` counts the parts of size i; trailing zeros are trimmed.
    """
    if n < 1:
        raise ValueError("partitions are enumerated for n >= 1")
    out: List[DiagonalPattern] = []

    def descend(remaining: int, largest: int, parts: List[int]) -> None:
        if remaining == 0:
            alpha = [0] * max(parts)
            for p in parts:
                alpha[p - 1] += 1
            out.append(tuple(alpha))
            return
        for p in range(min(largest, remaining), 0, -1):
            parts.append(p)
            descend(remaining - p, p, parts)
            parts.pop()

    descend(n, n, [])
    return out


def pattern_order(alpha: DiagonalPattern) -> int:
    """n = sum of i * alpha_i: the level the pattern belongs to."""
    return sum((i + 1) * a for i, a in enumerate(alpha))


def pattern_size(alpha: DiagonalPattern) -> int:
    """Number of blocks |alpha| = sum of the multiplicities."""
    return sum(alpha)


def cycle_count(alpha: DiagonalPattern) -> int:
    """Number of permutations of n objects whose cycle type is alpha."""
    n = pattern_order(alpha)
    denom = 1
    for i, a in enumerate(alpha):
        denom *= math.factorial(a) * (i + 1) ** a
    num = math.factorial(n)
    if num % denom:
        raise ValueError(f"inconsistent pattern {alpha}")
    return num // denom


@dataclass(frozen=True)
class SymmetricKernel:
    """Level-n symmetric function on atom tuples, multiset-indexed."""

    space: GridSpace
    level: int
    values: Dict[MultisetKey, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("level must be >= 0")
        for key in self.values:
            if len(key) != self.level:
                raise ValueError(f"key {key} does not match level {self.level}")
            if tuple(sorted(key)) != key:
                raise ValueError(f"multiset key {key} is not sorted")

    def value(self, key: MultisetKey) -> float:
        return self.values.get(key, 0.0)

    @classmethod
    def constant(cls, space: GridSpace, level: int, value: float = 1.0) -> "SymmetricKernel":
        from itertools import combinations_with_replacement

        if level == 0:
            return cls(space, 0, {(): float(value)})
        keys = combinations_with_replacement(range(space.size), level)
        return cls(space, level, {k: float(value) for k in keys})


def _multiplicities(key: MultisetKey) -> List[Tuple[int, int]]:
    out: List[Tuple[int, int]] = []
    for a in key:
        if out and out[-1][0] == a:
            out[-1] = (a, out[-1][1] + 1)
        else:
            out.append((a, 1))
    return out


def _insert(key: MultisetKey, atom: int) -> MultisetKey:
    return tuple(sorted(key + (atom,)))


def _remove_one(key: MultisetKey, atom: int) -> MultisetKey:
    out = list(key)
    out.remove(atom)
    return tuple(out)


def diag_embed(alpha: DiagonalPattern, kern: SymmetricKernel) -> Callable[[Tuple[int, ...]], float]:
    """Evaluate the kernel with arguments repeated along the pattern blocks.

    The returned callable takes a tuple of ``pattern_size(alpha)`` atoms:
    the first alpha_1 arguments enter once, the next alpha_2 twice, and so
    on, matching the kernel's level.
    """
    if pattern_order(alpha) != kern.level:
        raise ValueError(
            f"pattern of order {pattern_order(alpha)} does not match level {kern.level}"
        )
    reps: List[int] = []
    for i, a in enumerate(alpha):
        reps.extend([i + 1] * a)

    def evaluate(args: Tuple[int, ...]) -> float:
        if len(args) != len(reps):
            raise ValueError(f"expected {len(reps)} arguments, got {len(args)}")
        expanded: List[int] = []
        for x, r in zip(args, reps):
            expanded.extend([x] * r)
        return kern.value(tuple(sorted(expanded)))

    return evaluate


def ext_inner(f: SymmetricKernel, g: SymmetricKernel) -> float:
    """Level-n extended inner product (without the n! direct-sum weight)."""
    if f.space != g.space:
        raise SpaceMismatchError("kernels live on different grids")
    if f.level != g.level:
        raise ValueError("kernels must share one level")
    if f.level == 0:
        return f.value(()) * g.value(())
    from itertools import product

    v = f.space.cell_mass
    atoms = range(f.space.size)
    total = 0.0
    for alpha in partitions(f.level):
        df = diag_embed(alpha, f)
        dg = diag_embed(alpha, g)
        size = pattern_size(alpha)
        tuple_sum = 0.0
        for args in product(atoms, repeat=size):
            fv = df(args)
            if fv != 0.0:
                tuple_sum += fv * dg(args)
        total += cycle_count(alpha) * v**size * tuple_sum
    return total


@dataclass
class ExtFockVector:
    """Finite ladder of symmetric kernels up to a level ceiling; treat as immutable."""

    space: GridSpace
    max_level: int
    levels: Dict[int, SymmetricKernel] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for n, kern in self.levels.items():
            if n > self.max_level or kern.level != n:
                raise ValueError("component level inconsistent with the ceiling")

    def component(self, n: int) -> SymmetricKernel:
        return self.levels.get(n, SymmetricKernel(self.space, n, {}))

    def __add__(self, other: "ExtFockVector") -> "ExtFockVector":
        _require_compatible(self, other)
        out: Dict[int, SymmetricKernel] = {}
        for n in sorted(set(self.levels) | set(other.levels)):
            a = self.component(n).values
            b = other.component(n).values
            vals = dict(a)
            for key, c in b.items():
                s = vals.get(key, 0.0) + c
                if s != 0.0:
                    vals[key] = s
                elif key in vals:
                    del vals[key]
            if vals:
                out[n] = SymmetricKernel(self.space, n, vals)
        return ExtFockVector(self.space, self.max_level, out)

    def __sub__(self, other: "ExtFockVector") -> "ExtFockVector":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "ExtFockVector":
        if scalar == 0.0:
            return ExtFockVector(self.space, self.max_level, {})
        out = {
            n: SymmetricKernel(self.space, n, {k: c * scalar for k, c in kern.values.items()})
            for n, kern in self.levels.items()
        }
        return ExtFockVector(self.space, self.max_level, out)

    __rmul__ = __mul__


def _require_compatible(f: ExtFockVector, g: ExtFockVector) -> None:
    if f.space != g.space or f.max_level != g.max_level:
        raise ValueError("extended vectors live on different spaces")


def ext_vacuum(space: GridSpace, max_level: int) -> ExtFockVector:
    return ExtFockVector(space, max_level, {0: SymmetricKernel(space, 0, {(): 1.0})})


def ext_fock_inner(f: ExtFockVector, g: ExtFockVector) -> float:
    """Full inner product: n!-weighted sum of the level pairings."""
    _require_compatible(f, g)
    total = 0.0
    for n in sorted(set(f.levels) & set(g.levels)):
        total += math.factorial(n) * ext_inner(f.levels[n], g.levels[n])
    return total


def ext_norm(f: ExtFockVector) -> float:
    return math.sqrt(ext_fock_inner(f, f))


def _require_grid(phi: GridFunction, target: ExtFockVector) -> None:
    if phi.space != target.space:
        raise SpaceMismatchError("test function lives on a different grid")


def _apply_plus(phi: GridFunction, kern: SymmetricKernel) -> SymmetricKernel:
    """Symmetric tensor multiplication by phi: level n -> n + 1."""
    n1 = kern.level + 1
    targets = sorted(
        {_insert(key, a) for key in kern.values for a in range(kern.space.size)}
    )
    vals: Dict[MultisetKey, float] = {}
    for key in targets:
        acc = 0.0
        for a, r in _multiplicities(key):
            sub = kern.values.get(_remove_one(key, a))
            if sub:
                acc += r * phi[a] * sub
        v = acc / n1
        if v != 0.0:
            vals[key] = v
    return SymmetricKernel(kern.space, n1, vals)


def _apply_zero(phi: GridFunction, kern: SymmetricKernel) -> SymmetricKernel:
    """Multiplication by the sum of phi over the arguments; level preserved."""
    vals: Dict[MultisetKey, float] = {}
    for key, c in kern.values.items():
        factor = sum(phi[a] for a in key)
        v = c * factor
        if v != 0.0:
            vals[key] = v
    return SymmetricKernel(kern.space, kern.level, vals)


def _minus_targets(kern: SymmetricKernel) -> List[MultisetKey]:
    return sorted({_remove_one(key, a) for key in kern.values for a in set(key)})


def _apply_minus1(phi: GridFunction, kern: SymmetricKernel) -> SymmetricKernel:
    """Mass-weighted contraction of one argument against phi: level n -> n - 1."""
    n = kern.level
    v = kern.space.cell_mass
    vals: Dict[MultisetKey, float] = {}
    for key in _minus_targets(kern):
        acc = 0.0
        for a in range(kern.space.size):
            fv = kern.values.get(_insert(key, a))
            if fv:
                acc += phi[a] * fv
        val = n * v * acc
        if val != 0.0:
            vals[key] = val
    return SymmetricKernel(kern.space, n - 1, vals)


def _apply_minus2(phi: GridFunction, kern: SymmetricKernel) -> SymmetricKernel:
    """Pointwise diagonal contraction (no mass factor): level n -> n - 1.

    On a representative tuple this is n * sum_j phi(x_j) * f(x_j, x_j, rest),
    the exact symmetrization of the doubled-first-argument trace.
    """
    n = kern.level
    vals: Dict[MultisetKey, float] = {}
    for key in _minus_targets(kern):
        acc = 0.0
        for a, r in _multiplicities(key):
            fv = kern.values.get(_insert(key, a))
            if fv:
                acc += r * phi[a] * fv
        val = n * acc
        if val != 0.0:
            vals[key] = val
    return SymmetricKernel(kern.space, n - 1, vals)


_KINDS = ("plus", "zero", "minus1", "minus2", "minus", "beta")


def apply_a(
    kind: str,
    phi: GridFunction,
    vec: ExtFockVector,
    beta: float = 0.0,
) -> ExtFockVector:
    """Apply one of the ladder-field operators to an extended vector.

    ``plus`` raises the level by one (overflow above the ceiling dropped),
    ``zero`` preserves it, ``minus1``/``minus2`` lower it by one, ``minus``
    is their sum, and ``beta`` is plus + beta*zero + minus.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    _require_grid(phi, vec)
    if kind == "minus":
        return apply_a("minus1", phi, vec) + apply_a("minus2", phi, vec)
    if kind == "beta":
        out = apply_a("plus", phi, vec) + apply_a("minus", phi, vec)
        if beta != 0.0:
            out = out + beta * apply_a("zero", phi, vec)
        return out
    out_levels: Dict[int, SymmetricKernel] = {}

    def put(kern: SymmetricKernel) -> None:
        if kern.values:
            prev = out_levels.get(kern.level)
            if prev is None:
                out_levels[kern.level] = kern
            else:
                merged = dict(prev.values)
                for key, c in kern.values.items():
                    s = merged.get(key, 0.0) + c
                    if s != 0.0:
                        merged[key] = s
                    elif key in merged:
                        del merged[key]
                out_levels[kern.level] = SymmetricKernel(vec.space, kern.level, merged)

    for n in sorted(vec.levels):
        kern = vec.levels[n]
        if kind == "plus":
            if n + 1 <= vec.max_level:
                put(_apply_plus(phi, kern))
        elif kind == "zero":
            put(_apply_zero(phi, kern))
        elif kind == "minus1":
            if n >= 1:
                put(_apply_minus1(phi, kern))
        elif kind == "minus2":
            if n >= 2:
                put(_apply_minus2(phi, kern))
    return ExtFockVector(vec.space, vec.max_level, out_levels)


def ext_vacuum_moment(
    beta: float,
    phi: GridFunction,
    k: int,
    max_level: int | None = None,
) -> float:
    """Vacuum expectation of the k-th power of the symmetric ladder field."""
    if k < 0:
        raise ValueError("moment order must be >= 0")
    if max_level is None:
        max_level = k
    if max_level < k:
        raise ValueError(f"moment order {k} needs max_level >= {k}, got {max_level}")
    vec = ext_vacuum(phi.space, max_level)
    for _ in range(k):
        vec = apply_a("beta", phi, vec, beta=beta)
    return vec.component(0).value(())


def single_atom_jacobi(beta: float, cell_mass: float, size: int):
    """Tridiagonal matrix of the ladder field over a one-atom grid.

    Coefficients are derived numerically from the operators acting on the
    constant level kernels, normalized by the extended level norms; closed
    form: diagonal beta*n, off-diagonal sqrt((n+1)*(cell_mass+n)).
    """
    from .jacobimeixner import JacobiMatrix

    if size < 1:
        raise ValueError("size must be >= 1")
    space = GridSpace(dim=1, atoms=(0,), cell_mass=cell_mass)
    phi = GridFunction.constant(space, 1.0)
    ones = [SymmetricKernel.constant(space, n) for n in range(size + 1)]
    norms_sq = [math.factorial(n) * ext_inner(ones[n], ones[n]) for n in range(size + 1)]
    diag = [0.0]
    for n in range(1, size):
        num = math.factorial(n) * ext_inner(ones[n], _apply_zero(phi, ones[n]))
        diag.append(beta * num / norms_sq[n])
    off = []
    for n in range(size - 1):
        up = _apply_plus(phi, ones[n])
        num = math.factorial(n + 1) * ext_inner(ones[n + 1], up)
        off.append(num / math.sqrt(norms_sq[n + 1] * norms_sq[n]))
    return JacobiMatrix(tuple(diag), tuple(off))
