import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swnlab import wick
from swnlab.wick import CPoly, WickParseError, parse, verify_identity


# ---------------------------------------------------------------------------
# Coefficient ring


def test_cpoly_arithmetic():
    two_c = CPoly.c_power(1).scale(2)
    assert str(two_c) == "2*c"
    assert str(two_c * two_c) == "4*c^2"
    assert str(two_c - two_c) == "0"
    assert (two_c - two_c).is_zero()
    assert str(CPoly.scalar(Fraction(-1, 2))) == "-1/2"
    assert two_c.substitute(Fraction(3)).terms == {0: Fraction(6)}


# ---------------------------------------------------------------------------
# Parsing


def test_parse_echo_word():
    terms = parse("b(x) bd(y)").terms
    assert len(terms) == 1
    _, deltas, word = terms[0]
    assert deltas == ()
    assert word == (("b", False, "x"), ("b", True, "y"))


def test_parse_coefficient_and_delta():
    canon = parse("2 c delta(x,y) N(y)").canonical()
    assert len(canon) == 1
    (key, coeff), = canon.items()
    deltas, word = key
    assert deltas == (("x", "y"),)
    assert word == (("b", True, "x"), ("b", False, "x"))  # label collapsed to x
    assert str(coeff) == "2*c"


def test_power_expansion():
    assert parse("b(x)^2") == parse("b(x) b(x)")
    assert parse("(b(x) + bd(y))^0") == parse("1")


def test_rational_coefficients():
    assert parse("1/2 b(x) + 1/2 b(x)") == parse("b(x)")


def test_parse_errors_carry_position():
    with pytest.raises(WickParseError) as err:
        parse("b(x")
    assert err.value.position == 3
    assert ")" in err.value.expected

    with pytest.raises(WickParseError) as err:
        parse("q(x)")
    assert err.value.position == 0

    with pytest.raises(WickParseError) as err:
        parse("b(x) + @")
    assert err.value.position == 7

    with pytest.raises(WickParseError) as err:
        parse("b(x) b(y))")
    assert err.value.position == 9


# ---------------------------------------------------------------------------
# Normal ordering


def test_single_ccr_swap():
    got = wick.normal_order(parse("b(x) bd(y)"))
    assert got == parse("bd(y) b(x) + delta(x,y)")


def test_families_commute_without_delta():
    assert wick.normal_order(parse("p(x) bd(y)")) == parse("bd(y) p(x)")


def test_delta_square_renormalizes():
    got = wick.normal_order(parse("delta(x,y) delta(x,y)"))
    assert got == parse("c delta(x,y)")


def test_self_delta_collapses_to_c():
    # delta(0) and the renormalization constant are the same object
    assert wick.normal_order(parse("delta(x,x)")) == parse("c")
    assert wick.normal_order(parse("b(x) bd(x)")) == parse("bd(x) b(x) + c")


def test_delta_chain_canonicalization():
    a = parse("delta(x,y) delta(y,z) N(z)")
    b = parse("delta(x,z) delta(x,y) N(x)")
    assert a == b


def test_normal_order_idempotent():
    expr = wick.normal_order(parse("B(x) Bd(y) N(z)"))
    again = wick.normal_order(expr)
    assert expr.canonical() == again.canonical()


def test_already_normal_word_unchanged():
    expr = parse("bd(x) bd(y) b(z)")
    assert wick.normal_order(expr).canonical() == expr.canonical()


# ---------------------------------------------------------------------------
# Commutators of the squared letters


def test_squared_letter_commutator():
    got = wick.commutator(parse("B(x)"), parse("Bd(y)"))
    assert got == parse("2 c delta(x,y) + 4 delta(x,y) bd(y) b(y)")


def test_number_commutators():
    assert wick.commutator(parse("N(x)"), parse("N(y)")) == parse("0")
    assert wick.commutator(parse("N(x)"), parse("Bd(y)")) == parse("2 delta(x,y) Bd(y)")
    assert wick.commutator(parse("N(x)"), parse("B(y)")) == parse("-2 delta(x,y) B(y)")


def test_creators_commute():
    assert wick.commutator(parse("Bd(x)"), parse("Bd(y)")) == parse("0")
    assert wick.commutator(parse("B(x)"), parse("B(y)")) == parse("0")


def test_jacobi_identity_all_triples():
    gens = ("B(x)", "Bd(y)", "N(z)")
    for a, b, c in itertools.product(gens, repeat=3):
        lhs = f"[[{a},{b}],{c}] + [[{b},{c}],{a}] + [[{c},{a}],{b}]"
        assert verify_identity(lhs, "0").ok, (a, b, c)


# ---------------------------------------------------------------------------
# verify_identity and the ladder substitution


def test_verify_reports_diff_on_failure():
    res = verify_identity("[B(x), Bd(y)]", "2 c delta(x,y)")
    assert not res.ok
    assert "bd(x)" in res.diff


def test_ladder_substitution_reproduces_table_with_c_two():
    # B -> 2(p + pd p^2), N -> 2 pd p, Bd -> 2 pd; only the plain CCR is used
    pairs = [
        ("[2 p(x) + 2 pd(x) p(x)^2, 2 pd(y)]", "4 delta(x,y) + 8 delta(x,y) pd(y) p(y)"),
        ("[2 pd(x) p(x), 2 pd(y)]", "4 delta(x,y) pd(y)"),
        (
            "[2 pd(x) p(x), 2 p(y) + 2 pd(y) p(y)^2]",
            "-4 delta(x,y) p(y) - 4 delta(x,y) pd(y) p(y)^2",
        ),
        ("[2 pd(x) p(x), 2 pd(y) p(y)]", "0"),
        ("[2 p(x) + 2 pd(x) p(x)^2, 2 p(y) + 2 pd(y) p(y)^2]", "0"),
        ("[2 pd(x), 2 pd(y)]", "0"),
    ]
    for lhs, rhs in pairs:
        res = verify_identity(lhs, rhs)
        assert res.ok, (lhs, res.diff)
        # the coincident-delta rule never fires: coefficients are c-free
        for coeff in parse(lhs).canonical().values():
            assert coeff.degree() == 0


def test_substitution_with_pinned_c():
    res = verify_identity(
        "[B(x), Bd(y)]", "4 delta(x,y) + 4 delta(x,y) N(y)", c_value=Fraction(2)
    )
    assert res.ok
    assert not verify_identity(
        "[B(x), Bd(y)]", "4 delta(x,y) + 4 delta(x,y) N(y)", c_value=Fraction(3)
    ).ok


# ---------------------------------------------------------------------------
# Smeared readings


def test_smeared_readings():
    assert wick.smeared_reading(parse("[B(x), Bd(y)]")) == "2*c*<phi,psi> + 4*N(phi*psi)"
    assert wick.smeared_reading(parse("[N(x), Bd(y)]")) == "2*Bd(phi*psi)"
    assert wick.smeared_reading(parse("[N(x), B(y)]")) == "-2*B(phi*psi)"
    assert wick.smeared_reading(parse("[N(x), N(y)]")) == "0"
    assert wick.smeared_reading(parse("bd(x) b(x)")) is None  # no free delta


# ---------------------------------------------------------------------------
# Corpus and algebraic properties


def test_builtin_corpus_all_pass():
    corpus = wick.load_corpus()
    assert len(corpus) >= 13
    for ident in corpus:
        assert verify_identity(ident.lhs, ident.rhs).ok, ident.label


_WORD_ATOMS = ("b(x)", "bd(x)", "b(y)", "bd(y)", "p(x)", "pd(y)")


@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    st.lists(st.sampled_from(_WORD_ATOMS), min_size=0, max_size=4),
    st.lists(st.sampled_from(_WORD_ATOMS), min_size=0, max_size=3),
)
def test_normal_order_is_multiplicative(left, right):
    e1 = parse(" ".join(left)) if left else parse("1")
    e2 = parse(" ".join(right)) if right else parse("1")
    direct = wick.normal_order(e1 * e2)
    staged = wick.normal_order(wick.normal_order(e1) * wick.normal_order(e2))
    assert direct.canonical() == staged.canonical()


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.lists(st.sampled_from(_WORD_ATOMS), min_size=0, max_size=5))
def test_normal_order_idempotent_property(atoms):
    expr = parse(" ".join(atoms)) if atoms else parse("1")
    once = wick.normal_order(expr)
    assert once.canonical() == wick.normal_order(once).canonical()


def test_normal_order_linear():
    e1, e2 = parse("B(x) Bd(y)"), parse("3 N(x) b(y)")
    lhs = wick.normal_order(e1 + e2)
    assert lhs.canonical() == (wick.normal_order(e1) + wick.normal_order(e2)).canonical()
