import math

import pytest

from swnlab import fockcore as fc
from swnlab import swnrep
from swnlab.basespace import GridFunction, GridSpace, inner


def _space(atoms=2, mass=0.5, ladder=5, levels=5):
    return swnrep.SwnSpace(GridSpace.regular(atoms, mass), ladder, levels)


def test_lower_and_number_kill_vacuum():
    space = _space()
    phi = GridFunction(space.grid, (1.0, -2.0))
    vac = space.vacuum()
    assert swnrep.lower_op(space, phi).apply(vac).entries == {}
    assert swnrep.number_op(space, phi).apply(vac).entries == {}


def test_raise_on_vacuum_places_ground_mode():
    space = _space()
    phi = GridFunction(space.grid, (1.0, -2.0))
    out = swnrep.raise_op(space, phi).apply(space.vacuum())
    expected = {
        fc.occupation([space.index(0, 1)]): pytest.approx(2.0),
        fc.occupation([space.index(1, 1)]): pytest.approx(-4.0),
    }
    assert out.entries == expected
    # norm^2 = 4 <phi, phi>
    assert fc.fock_inner(out, out) == pytest.approx(4.0 * inner(phi, phi))


def test_commutator_on_vacuum():
    space = _space()
    phi = GridFunction(space.grid, (0.7, 0.2))
    psi = GridFunction(space.grid, (-1.0, 0.5))
    vac = space.vacuum()
    lower, upper = swnrep.lower_op(space, phi), swnrep.raise_op(space, psi)
    out = lower.apply(upper.apply(vac)) - upper.apply(lower.apply(vac))
    assert out.entries == {(): pytest.approx(4.0 * inner(phi, psi))}


def test_all_six_relations_on_random_vectors():
    for atoms, mass in ((1, 1.0), (2, 0.5), (3, 0.8)):
        space = swnrep.SwnSpace(GridSpace.regular(atoms, mass), 4, 4)
        phi = swnrep.random_grid_function(space.grid, 5)
        psi = swnrep.random_grid_function(space.grid, 6)
        vectors = [swnrep.random_test_vector(space, seed) for seed in (21, 22, 23)]
        for name, pair, rhs in swnrep.commutation_table(space, phi, psi):
            res = swnrep.commutator_residual(pair, rhs, vectors)
            assert res <= 1e-10, name


def test_window_guard_rejects_tall_vectors():
    space = _space(ladder=4, levels=4)
    phi = GridFunction.constant(space.grid)
    table = swnrep.commutation_table(space, phi, phi)
    tall = fc.basis_state(space.fock, fc.occupation([space.index(0, 1)] * 3))
    with pytest.raises(ValueError):
        swnrep.commutator_residual(table[0][1], table[0][2], [tall])
    high_mode = fc.basis_state(space.fock, fc.occupation([space.index(0, 4)]))
    with pytest.raises(ValueError):
        swnrep.commutator_residual(table[0][1], table[0][2], [high_mode])


def test_adjointness_and_symmetry():
    space = _space(atoms=3, mass=0.4)
    phi = swnrep.random_grid_function(space.grid, 9)
    for seed in range(5):
        f = swnrep.random_test_vector(space, seed)
        g = swnrep.random_test_vector(space, seed + 40)
        lhs = fc.fock_inner(swnrep.raise_op(space, phi).apply(f), g)
        rhs = fc.fock_inner(f, swnrep.lower_op(space, phi).apply(g))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        lhs = fc.fock_inner(swnrep.number_op(space, phi).apply(f), g)
        rhs = fc.fock_inner(f, swnrep.number_op(space, phi).apply(g))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_vacuum_moments_small_orders():
    grid = GridSpace.regular(2, 0.5)
    phi = GridFunction(grid, (1.0, 2.0))
    space = swnrep.SwnSpace(grid, 4, 4)
    for beta in (0.0, 1.0, 2.0):
        assert swnrep.vacuum_moment(space, beta, phi, 0) == 1.0
        assert swnrep.vacuum_moment(space, beta, phi, 1) == 0.0
        got = swnrep.vacuum_moment(space, beta, phi, 2)
        assert got == pytest.approx(4.0 * inner(phi, phi), rel=1e-12)


def test_vacuum_moment_known_values_single_atom():
    grid = GridSpace.regular(1, 1.0)
    phi = GridFunction.constant(grid)
    space = swnrep.SwnSpace(grid, 6, 6)
    for beta in (0.0, 1.0, 3.0):
        assert swnrep.vacuum_moment(space, beta, phi, 3) == pytest.approx(8.0 * beta)
        assert swnrep.vacuum_moment(space, beta, phi, 4) == pytest.approx(
            16.0 * (beta**2 + 5.0)
        )


def test_vacuum_moment_requires_truncation():
    space = _space(ladder=3, levels=3)
    phi = GridFunction.constant(space.grid)
    with pytest.raises(ValueError) as err:
        swnrep.vacuum_moment(space, 1.0, phi, 3)
    assert "4" in str(err.value)  # required sizes reported


def test_vacuum_moment_truncation_free():
    grid = GridSpace.regular(2, 0.5)
    phi = GridFunction(grid, (0.8, -0.6))
    beta, k = 1.5, 4
    small = swnrep.SwnSpace(grid, k + 1, k + 1)
    large = swnrep.SwnSpace(grid, k + 3, k + 3)
    a = swnrep.vacuum_moment(small, beta, phi, k)
    b = swnrep.vacuum_moment(large, beta, phi, k)
    assert a == b  # bit-identical once both ceilings clear k + 1


def test_space_mismatch_rejected():
    space = _space()
    other = _space(atoms=3)
    phi = GridFunction.constant(other.grid)
    with pytest.raises(Exception):
        swnrep.raise_op(space, phi)
    op = swnrep.raise_op(space, GridFunction.constant(space.grid))
    with pytest.raises(ValueError):
        op.apply(other.vacuum())
