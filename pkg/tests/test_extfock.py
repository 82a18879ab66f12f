import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swnlab import extfock as ef
from swnlab.basespace import GridFunction, GridSpace


def _rising(x, n):
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


# ---------------------------------------------------------------------------
# Partitions and cycle counts


def test_partitions_small():
    assert ef.partitions(1) == [(1,)]
    assert sorted(ef.partitions(3)) == [(0, 0, 1), (1, 1), (3,)]
    assert len(ef.partitions(6)) == 11  # partition count p(6)
    with pytest.raises(ValueError):
        ef.partitions(0)


def test_partition_orders_consistent():
    for n in range(1, 9):
        for alpha in ef.partitions(n):
            assert ef.pattern_order(alpha) == n
            assert ef.pattern_size(alpha) <= n


def test_cycle_counts():
    assert ef.cycle_count((3,)) == 1          # identity cycle type of S3
    assert ef.cycle_count((1, 1)) == 3        # transpositions in S3
    assert ef.cycle_count((0, 0, 1)) == 2     # 3-cycles in S3
    assert ef.cycle_count((5,)) == 1


@settings(max_examples=8, deadline=None, derandomize=True)
@given(st.integers(min_value=1, max_value=8))
def test_cycle_counts_sum_to_factorial(n):
    assert sum(ef.cycle_count(a) for a in ef.partitions(n)) == math.factorial(n)


# ---------------------------------------------------------------------------
# Diagonal embeddings and the extended inner product


def _kernel(space, level, mapping):
    return ef.SymmetricKernel(space, level, {k: float(v) for k, v in mapping.items()})


def test_diag_embed_identity_pattern():
    space = GridSpace.regular(2, 1.0)
    f = _kernel(space, 2, {(0, 0): 1.0, (0, 1): 2.0, (1, 1): 3.0})
    d = ef.diag_embed((2,), f)
    assert d((0, 1)) == 2.0
    assert d((1, 0)) == 2.0


def test_diag_embed_pair_pattern():
    space = GridSpace.regular(2, 1.0)
    f = _kernel(space, 2, {(0, 0): 1.0, (0, 1): 2.0, (1, 1): 3.0})
    d = ef.diag_embed((0, 1), f)
    assert d((0,)) == 1.0
    assert d((1,)) == 3.0


def test_diag_embed_single_plus_pair():
    space = GridSpace.regular(2, 1.0)
    f = _kernel(space, 3, {(0, 1, 1): 4.0})
    d = ef.diag_embed((1, 1), f)
    # one single + one doubled argument: f(x1, x2, x2)
    assert d((0, 1)) == 4.0
    assert d((1, 0)) == 0.0  # f(1, 0, 0) is not stored


def test_diag_embed_level_mismatch():
    space = GridSpace.regular(2, 1.0)
    f = _kernel(space, 2, {(0, 1): 1.0})
    with pytest.raises(ValueError):
        ef.diag_embed((1,), f)


def test_ext_inner_level_one_is_l2():
    space = GridSpace.regular(3, 0.5)
    f = _kernel(space, 1, {(0,): 1.0, (1,): 2.0, (2,): -1.0})
    g = _kernel(space, 1, {(0,): 3.0, (1,): 1.0, (2,): 2.0})
    assert ef.ext_inner(f, g) == pytest.approx(0.5 * (3.0 + 2.0 - 2.0))


def test_ext_inner_single_atom_level_two():
    space = GridSpace.regular(1, 1.0)
    f = ef.SymmetricKernel.constant(space, 2)
    # square pattern contributes 1, diagonal pattern contributes 1
    assert ef.ext_inner(f, f) == pytest.approx(2.0)


def test_ext_inner_dominates_tensor_part():
    space = GridSpace.regular(2, 0.7)
    f = _kernel(space, 2, {(0, 0): 1.0, (0, 1): -2.0, (1, 1): 0.5})
    plain = 0.0
    v = space.cell_mass
    for x in range(2):
        for y in range(2):
            val = f.value(tuple(sorted((x, y))))
            plain += v * v * val * val
    assert ef.ext_inner(f, f) >= plain


def test_level_norms_rising_factorial():
    # squared norm of the constant level-n kernel on one atom: (v)_n * n!
    for v in (0.5, 1.0, 2.0):
        space = GridSpace.regular(1, v)
        for n in range(7):
            kern = ef.SymmetricKernel.constant(space, n)
            got = math.factorial(n) * ef.ext_inner(kern, kern)
            assert got == pytest.approx(_rising(v, n) * math.factorial(n), rel=1e-12)


# ---------------------------------------------------------------------------
# Ladder-field operators


def test_minus_kills_vacuum_and_level_one_diagonal():
    space = GridSpace.regular(2, 1.0)
    phi = GridFunction(space, (1.0, 2.0))
    vac = ef.ext_vacuum(space, 4)
    assert ef.apply_a("minus", phi, vac).levels == {}
    one = ef.ExtFockVector(space, 4, {1: _kernel(space, 1, {(0,): 1.0, (1,): 1.0})})
    assert ef.apply_a("minus2", phi, one).levels == {}  # n(n-1) factor at n = 1


def test_field_on_vacuum_is_phi():
    space = GridSpace.regular(2, 0.5)
    phi = GridFunction(space, (0.3, -1.2))
    out = ef.apply_a("beta", phi, ef.ext_vacuum(space, 3), beta=7.0)
    assert out.component(1).values == {
        (0,): pytest.approx(0.3),
        (1,): pytest.approx(-1.2),
    }
    assert out.component(0).value(()) == 0.0


def test_second_moment_is_weighted_square_sum():
    space = GridSpace.regular(3, 0.5)
    phi = GridFunction(space, (1.0, 2.0, -0.5))
    for beta in (0.0, 1.0, 3.0):
        got = ef.ext_vacuum_moment(beta, phi, 2)
        assert got == pytest.approx(0.5 * (1.0 + 4.0 + 0.25), rel=1e-12)


def test_third_moment_single_atom():
    space = GridSpace.regular(1, 1.0)
    phi = GridFunction.constant(space)
    for beta in (0.0, 1.0, 2.5):
        assert ef.ext_vacuum_moment(beta, phi, 3) == pytest.approx(beta, abs=1e-12)


def test_fourth_moment_single_atom():
    space = GridSpace.regular(1, 1.0)
    phi = GridFunction.constant(space)
    for beta in (0.0, 1.0, 3.0):
        assert ef.ext_vacuum_moment(beta, phi, 4) == pytest.approx(
            beta**2 + 5.0, rel=1e-12
        )


def test_vacuum_moment_truncation_guard():
    space = GridSpace.regular(1, 1.0)
    phi = GridFunction.constant(space)
    with pytest.raises(ValueError):
        ef.ext_vacuum_moment(1.0, phi, 4, max_level=3)


def test_plus_drops_overflow():
    space = GridSpace.regular(2, 1.0)
    phi = GridFunction.constant(space)
    vec = ef.ExtFockVector(space, 1, {1: ef.SymmetricKernel.constant(space, 1)})
    assert ef.apply_a("plus", phi, vec).levels == {}


def test_grid_mismatch_rejected():
    phi = GridFunction.constant(GridSpace.regular(2, 1.0))
    vec = ef.ext_vacuum(GridSpace.regular(3, 1.0), 2)
    with pytest.raises(Exception):
        ef.apply_a("plus", phi, vec)


# ---------------------------------------------------------------------------
# Adjointness and symmetry in the weighted extended inner product


def _random_ext(space, max_support, seed):
    from swnlab.crosscheck import extfock_random_vector

    return extfock_random_vector(space, max_support, seed)


@pytest.mark.parametrize("atoms,mass", [(1, 1.0), (2, 0.5), (3, 0.8)])
def test_plus_minus_adjoint(atoms, mass):
    space = GridSpace.regular(atoms, mass)
    phi = GridFunction(space, tuple(0.5 + 0.3 * i for i in range(atoms)))
    for seed in range(4):
        f = _random_ext(space, 2, seed)
        g = _random_ext(space, 2, seed + 100)
        lhs = ef.ext_fock_inner(ef.apply_a("plus", phi, f), g)
        rhs = ef.ext_fock_inner(f, ef.apply_a("minus", phi, g))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_zero_symmetric():
    space = GridSpace.regular(2, 0.5)
    phi = GridFunction(space, (1.5, -0.7))
    f = _random_ext(space, 2, 7)
    g = _random_ext(space, 2, 8)
    lhs = ef.ext_fock_inner(ef.apply_a("zero", phi, f), g)
    rhs = ef.ext_fock_inner(f, ef.apply_a("zero", phi, g))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# Single-atom reduction


@pytest.mark.parametrize("mass", [0.5, 1.0, 2.0])
def test_single_atom_jacobi_closed_form(mass):
    beta = 1.7
    matrix = ef.single_atom_jacobi(beta, mass, 6)
    for n, d in enumerate(matrix.diag):
        assert d == pytest.approx(beta * n, abs=1e-12)
    for n, b in enumerate(matrix.off):
        assert b == pytest.approx(math.sqrt((n + 1) * (mass + n)), rel=1e-12)


def test_single_atom_matrix_reproduces_operator_moments():
    from swnlab.jacobimeixner import vacuum_moments

    beta, mass = 2.0, 0.5
    space = GridSpace.regular(1, mass)
    phi = GridFunction.constant(space)
    matrix = ef.single_atom_jacobi(beta, mass, 8)
    moments = vacuum_moments(matrix, 6)
    for k in range(7):
        assert ef.ext_vacuum_moment(beta, phi, k) == pytest.approx(
            moments[k], rel=1e-10, abs=1e-12
        )
