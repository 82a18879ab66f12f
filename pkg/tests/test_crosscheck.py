import math

import pytest

from swnlab import crosscheck
from swnlab.basespace import GridFunction, GridSpace
from swnlab.crosscheck import CheckReport


# ---------------------------------------------------------------------------
# Report semantics


def test_compare_report_relative_error():
    r = crosscheck.check("x", {}, 100.0, 100.0 + 1e-7, tol=1e-8)
    assert r.abs_err == pytest.approx(1e-7)
    assert r.rel_err == pytest.approx(1e-9, rel=1e-3)
    assert r.passed


def test_compare_report_absolute_fallback_near_zero():
    r = crosscheck.check("x", {}, 1e-14, -1e-14, tol=1e-10)
    assert r.rel_err == pytest.approx(2e-14)
    assert r.passed
    r = crosscheck.check("x", {}, 0.5e-13, 2e-13, tol=1e-13)
    assert not r.passed


def test_residual_report():
    r = crosscheck.residual_check("x", {}, 3e-11, tol=1e-10)
    assert r.passed and r.rel_err == pytest.approx(3e-11)
    assert not crosscheck.residual_check("x", {}, 3e-9, tol=1e-10).passed
    assert r.to_json_dict()["residual"] == pytest.approx(3e-11)


def test_symbolic_report():
    ok = crosscheck.symbolic_check("id", {}, "a", "a")
    bad = crosscheck.symbolic_check("id", {}, "a", "b")
    assert ok.passed and not bad.passed


def test_json_dict_fields():
    d = crosscheck.check("nm", {"beta": 1.0}, 1.0, 2.0, tol=0.1).to_json_dict()
    assert d["schema_version"] == crosscheck.SCHEMA_VERSION
    for key in ("name", "params", "lhs", "rhs", "abs_err", "rel_err", "tolerance", "pass"):
        assert key in d


# ---------------------------------------------------------------------------
# Moment identity


def test_theorem1_known_values_single_atom():
    space = GridSpace.regular(1, 1.0)
    phi = GridFunction.constant(space)
    for beta in (0.0, 1.0, 3.0):
        reports = crosscheck.theorem1_moment_check(beta, phi, k_max=4)
        assert all(r.passed for r in reports)
        by_k = {(r.params["k"], r.name.split(": ")[1]): r for r in reports}
        r = by_k[(4, "field vs cumulants")]
        assert r.lhs == pytest.approx(16.0 * (beta**2 + 5.0), rel=1e-12)
        assert by_k[(1, "field vs cumulants")].lhs == 0.0
        assert by_k[(2, "field vs cumulants")].lhs == pytest.approx(4.0)


def test_theorem1_random_grid():
    space = GridSpace.regular(3, 0.5)
    phi = GridFunction(space, (0.9, -0.4, 1.1))
    for beta in (0.0, 2.0, 5.0):
        reports = crosscheck.theorem1_moment_check(beta, phi, k_max=6)
        assert all(r.passed for r in reports), [
            (r.name, r.rel_err) for r in reports if not r.passed
        ]


def test_moment_suite_shapes_and_determinism():
    a = crosscheck.moment_suite((1.0,), ((2, 0.5),), k_max=3)
    b = crosscheck.moment_suite((1.0,), ((2, 0.5),), k_max=3)
    assert [r.to_json_dict() for r in a] == [r.to_json_dict() for r in b]
    assert len(a) == 2 * 4


# ---------------------------------------------------------------------------
# Proof-chain and marginals


def test_proofchain_gamma_regime():
    reports = crosscheck.proofchain_check(2.0, n_max=4, j_max=5)
    assert all(r.passed for r in reports), [r.name for r in reports if not r.passed]
    spectral = [r for r in reports if r.name.startswith("spectral moment")]
    assert [r.lhs for r in spectral] == pytest.approx(
        [1.0, 2.0, 6.0, 24.0, 120.0, 720.0]
    )


def test_proofchain_pascal_single_atom():
    reports = crosscheck.proofchain_check(3.0, n_max=3, j_max=4, atom_masses=(1.0,), atom_orders=4)
    atom = [r for r in reports if r.name.startswith("one-atom")]
    assert len(atom) == 5
    assert all(r.passed for r in atom)


def test_marginal_checks_all_regimes():
    for beta in (0.0, 2.0, 3.0):
        assert all(r.passed for r in crosscheck.marginal_checks(beta))


# ---------------------------------------------------------------------------
# Numeric relation suites


def test_commutator_suite_passes_and_is_deterministic():
    grids = ((1, 1.0), (2, 0.5))
    seeds = (11, 12, 13)
    a = crosscheck.commutator_suite(grids, seeds)
    b = crosscheck.commutator_suite(grids, seeds)
    assert all(r.passed for r in a)
    assert [r.to_json_dict() for r in a] == [r.to_json_dict() for r in b]
    assert len(a) == 2 * 6 * 2  # grids x relations x representations
    names = {r.name for r in a}
    assert any(n.startswith("fock rep") for n in names)
    assert any(n.startswith("extended rep") for n in names)


def test_adjointness_suite_passes():
    reports = crosscheck.adjointness_suite(((2, 0.5),), (7, 8, 9))
    assert all(r.passed for r in reports)
    assert len(reports) == 4


def test_wick_suite_all_pass():
    reports = crosscheck.wick_suite()
    assert all(r.passed for r in reports)
    smeared = [r for r in reports if "smeared" in r.name]
    assert len(smeared) == 6
