"""Symbolic normal-ordering engine for labelled ladder operators.

Words are products of creation/annihilation letters from two independent
families, each carrying a symbolic spatial label: ``b``/``bd`` for the
squared-noise letters and ``p``/``pd`` for the plain ladder pair.  Letters
of the same family obey the canonical commutation rule

    annihilator(x) * creator(y) = creator(y) * annihilator(x) + delta(x, y)

while letters of different families commute.  Coincident delta factors are
renormalized: within one identification class of labels, every delta beyond
a spanning tree contributes one factor of the symbolic constant ``c`` (in
particular delta(x, y)^2 -> c * delta(x, y), and a self-delta delta(x, x)
collapses to ``c``).

Canonical form of a term: the labels tied together by deltas are replaced
by the lexicographically least representative, the surviving deltas are the
sorted representative pairs, and the word is normal-ordered with each block
sorted.  Equality of expressions is equality of canonical forms, with
coefficients kept as exact polynomials in ``c`` over the rationals.

Grammar accepted by :func:`parse` (documented in the README):

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor (['*'] factor)*
    factor  := atom ['^' INT]
    atom    := RATIONAL | 'c' | NAME '(' label [',' label] ')'
             | '(' expr ')' | '[' expr ',' expr ']'

Names: ``b bd p pd`` (single letters), ``B Bd N`` (squared-letter macros
``b(x)b(x)``, ``bd(x)bd(x)``, ``bd(x)b(x)``), and ``delta(x,y)``.  Square
brackets build commutators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

# ---------------------------------------------------------------------------
# Coefficients: exact polynomials in the renormalization constant c


class CPoly:
    """Polynomial in c with Fraction coefficients, keyed by power."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, Fraction]] = None):
        self.terms: Dict[int, Fraction] = {}
        if terms:
            for k, v in terms.items():
                v = Fraction(v)
                if v != 0:
                    self.terms[k] = v

    @classmethod
    def scalar(cls, value) -> "CPoly":
        return cls({0: Fraction(value)})

    @classmethod
    def c_power(cls, power: int = 1) -> "CPoly":
        return cls({power: Fraction(1)})

    def __add__(self, other: "CPoly") -> "CPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return CPoly(out)

    def __neg__(self) -> "CPoly":
        return CPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + (-other)

    def __mul__(self, other: "CPoly") -> "CPoly":
        out: Dict[int, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = k1 + k2
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return CPoly(out)

    def scale(self, value) -> "CPoly":
        f = Fraction(value)
        return CPoly({k: v * f for k, v in self.terms.items()})

    def substitute(self, c_value) -> "CPoly":
        c = Fraction(c_value)
        acc = Fraction(0)
        for k, v in self.terms.items():
            acc += v * c**k
        return CPoly({0: acc})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max(self.terms, default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, CPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            v = self.terms[k]
            if k == 0:
                parts.append(str(v))
            else:
                head = "c" if k == 1 else f"c^{k}"
                if v == 1:
                    parts.append(head)
                elif v == -1:
                    parts.append(f"-{head}")
                else:
                    parts.append(f"{v}*{head}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


ONE = CPoly.scalar(1)


# ---------------------------------------------------------------------------
# Letters, terms, expressions

# letter = (family, is_creator, label); creators sort before annihilators
Letter = Tuple[str, bool, str]
Word = Tuple[Letter, ...]
DeltaPair = Tuple[str, str]
TermKey = Tuple[Tuple[DeltaPair, ...], Word]

_FAMILIES = ("b", "p")


def _letter(family: str, creator: bool, label: str) -> Letter:
    return (family, creator, label)


def letter_str(letter: Letter) -> str:
    family, creator, label = letter
    return f"{family}{'d' if creator else ''}({label})"


class WickExpression:
    """Finite sum of (coefficient, delta multiset, operator word) terms.

    Raw expressions keep terms exactly as built; :meth:`canonical` (or the
    module-level :func:`normal_order`) rewrites them into the canonical
    normal-ordered form where equality is decidable.
    """

    def __init__(self, terms: Optional[Sequence[Tuple[CPoly, Tuple[DeltaPair, ...], Word]]] = None):
        self.terms: List[Tuple[CPoly, Tuple[DeltaPair, ...], Word]] = (
            list(terms) if terms else []
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "WickExpression":
        return cls()

    @classmethod
    def from_scalar(cls, coeff: CPoly) -> "WickExpression":
        if coeff.is_zero():
            return cls()
        return cls([(coeff, (), ())])

    @classmethod
    def from_letter(cls, family: str, creator: bool, label: str) -> "WickExpression":
        return cls([(ONE, (), (_letter(family, creator, label),))])

    @classmethod
    def from_delta(cls, x: str, y: str) -> "WickExpression":
        return cls([(ONE, (tuple(sorted((x, y))),), ())])

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "WickExpression") -> "WickExpression":
        return WickExpression(self.terms + other.terms)

    def __neg__(self) -> "WickExpression":
        return WickExpression([(-c, d, w) for c, d, w in self.terms])

    def __sub__(self, other: "WickExpression") -> "WickExpression":
        return self + (-other)

    def __mul__(self, other: "WickExpression") -> "WickExpression":
        out = []
        for c1, d1, w1 in self.terms:
            for c2, d2, w2 in other.terms:
                out.append((c1 * c2, tuple(sorted(d1 + d2)), w1 + w2))
        return WickExpression(out)

    def scale(self, coeff: CPoly) -> "WickExpression":
        return WickExpression([(coeff * c, d, w) for c, d, w in self.terms])

    def power(self, n: int) -> "WickExpression":
        if n < 0:
            raise ValueError("negative operator powers are not defined")
        acc = WickExpression.from_scalar(ONE)
        for _ in range(n):
            acc = acc * self
        return acc

    # -- canonicalization ---------------------------------------------------

    def canonical(self, c_value=None) -> Dict[TermKey, CPoly]:
        """Normal-order and canonicalize; returns the term-key -> coefficient map."""
        acc: Dict[TermKey, CPoly] = {}
        for coeff, deltas, word in self.terms:
            for extra, ordered in _normal_order_word(word):
                key, factor = _canonical_term(deltas + extra, ordered)
                total = coeff * factor
                if c_value is not None:
                    total = total.substitute(c_value)
                if key in acc:
                    acc[key] = acc[key] + total
                else:
                    acc[key] = total
        return {k: v for k, v in acc.items() if not v.is_zero()}

    def __eq__(self, other) -> bool:
        return isinstance(other, WickExpression) and self.canonical() == other.canonical()

    def __hash__(self):
        raise TypeError("WickExpression is unhashable")

    def __str__(self) -> str:
        return render_canonical(self.canonical())


def _normal_order_word(word: Word) -> List[Tuple[Tuple[DeltaPair, ...], Word]]:
    """Rewrite a word into normal order, collecting contraction deltas.

    Repeatedly swaps the first annihilator-creator adjacency; same-family
    swaps also branch into the contracted word with a delta on the labels.
    """
    out: List[Tuple[Tuple[DeltaPair, ...], Word]] = []
    stack: List[Tuple[Tuple[DeltaPair, ...], Word]] = [((), word)]
    while stack:
        deltas, w = stack.pop()
        pos = -1
        for i in range(len(w) - 1):
            if (not w[i][1]) and w[i + 1][1]:
                pos = i
                break
        if pos < 0:
            out.append((deltas, w))
            continue
        ann, cre = w[pos], w[pos + 1]
        stack.append((deltas, w[:pos] + (cre, ann) + w[pos + 2 :]))
        if ann[0] == cre[0]:
            pair = tuple(sorted((ann[2], cre[2])))
            stack.append((deltas + (pair,), w[:pos] + w[pos + 2 :]))
    return out


def _canonical_term(
    deltas: Tuple[DeltaPair, ...], word: Word
) -> Tuple[TermKey, CPoly]:
    """Canonicalize one normal-ordered term; returns (key, c-power factor).

    Labels joined by deltas collapse to their least representative; each
    delta beyond a spanning tree of its identification class contributes a
    factor c (the renormalization of coincident deltas).
    """
    if not deltas:
        creators = tuple(sorted(l for l in word if l[1]))
        annihilators = tuple(sorted(l for l in word if not l[1]))
        return (((), creators + annihilators), ONE)

    parent: Dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: str, y: str) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            # keep the lexicographically least label as the class root
            lo, hi = sorted((rx, ry))
            parent[hi] = lo

    for u, v in deltas:
        union(u, v)

    members: Dict[str, List[str]] = {}
    for label in parent:
        members.setdefault(find(label), []).append(label)
    delta_count: Dict[str, int] = {}
    for u, v in deltas:
        delta_count[find(u)] = delta_count.get(find(u), 0) + 1

    extra = 0
    new_deltas: List[DeltaPair] = []
    for root, labels in members.items():
        labels.sort()
        extra += delta_count.get(root, 0) - (len(labels) - 1)
        for other in labels[1:]:
            new_deltas.append((labels[0], other))

    subst = {label: find(label) for label in parent}
    renamed = tuple(
        (fam, creator, subst.get(lbl, lbl)) for fam, creator, lbl in word
    )
    creators = tuple(sorted(l for l in renamed if l[1]))
    annihilators = tuple(sorted(l for l in renamed if not l[1]))
    key = (tuple(sorted(new_deltas)), creators + annihilators)
    factor = CPoly.c_power(extra) if extra else ONE
    return key, factor


def render_canonical(canonical: Dict[TermKey, CPoly]) -> str:
    """Deterministic human-readable form of a canonical map."""
    if not canonical:
        return "0"
    parts = []
    for key in sorted(canonical, key=lambda k: (len(k[1]), k[1], k[0])):
        deltas, word = key
        coeff = canonical[key]
        factors = [f"delta({u},{v})" for u, v in deltas]
        factors.extend(letter_str(l) for l in word)
        coeff_str = str(coeff)
        if ("+" in coeff_str or coeff_str.lstrip("-").count("-")) and factors:
            coeff_str = f"({coeff_str})"
        if not factors:
            parts.append(coeff_str)
        elif coeff == ONE:
            parts.append("*".join(factors))
        else:
            parts.append(coeff_str + "*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


def normal_order(expr: WickExpression, c_value=None) -> WickExpression:
    """Canonical normal-ordered expression equal to the input."""
    out = []
    for key, coeff in sorted(
        expr.canonical(c_value).items(), key=lambda kv: (len(kv[0][1]), kv[0][1], kv[0][0])
    ):
        deltas, word = key
        out.append((coeff, deltas, word))
    return WickExpression(out)


def commutator(e1: WickExpression, e2: WickExpression) -> WickExpression:
    """Normal-ordered form of e1*e2 - e2*e1."""
    return normal_order(e1 * e2 - e2 * e1)


# ---------------------------------------------------------------------------
# Parser


class WickParseError(ValueError):
    """Syntax error with position and expected-token information."""

    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[()\[\],*^/+-]))"
)

_MACROS = {
    "B": ("b", False, 2),
    "Bd": ("b", True, 2),
    "N": None,  # handled separately: bd(x) b(x)
}
_SINGLE_LETTERS = {
    "b": ("b", False),
    "bd": ("b", True),
    "p": ("p", False),
    "pd": ("p", True),
}


@dataclass
class _Token:
    kind: str  # 'number' | 'name' | punctuation | 'end'
    text: str
    pos: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise WickParseError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.group("number"):
            tokens.append(_Token("number", m.group("number"), m.start("number")))
        elif m.group("name"):
            tokens.append(_Token("name", m.group("name"), m.start("name")))
        else:
            tokens.append(_Token(m.group("punct"), m.group("punct"), m.start("punct")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise WickParseError(
                f"found {tok.text!r}" if tok.kind != "end" else "input ended",
                tok.pos,
                expected=repr(kind),
            )
        return self.advance()

    # expr := ['-'] term (('+'|'-') term)*
    def parse_expression(self) -> WickExpression:
        sign = 1
        if self.peek().kind == "-":
            self.advance()
            sign = -1
        acc = self.parse_term()
        if sign < 0:
            acc = -acc
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            term = self.parse_term()
            acc = acc + term if op == "+" else acc - term
        return acc

    # term := factor (['*'] factor)*
    def parse_term(self) -> WickExpression:
        acc = self.parse_factor()
        while True:
            tok = self.peek()
            if tok.kind == "*":
                self.advance()
                acc = acc * self.parse_factor()
            elif tok.kind in ("number", "name", "(", "["):
                acc = acc * self.parse_factor()
            else:
                return acc

    # factor := atom ['^' INT]
    def parse_factor(self) -> WickExpression:
        atom = self.parse_atom()
        if self.peek().kind == "^":
            self.advance()
            tok = self.expect("number")
            atom = atom.power(int(tok.text))
        return atom

    def parse_atom(self) -> WickExpression:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            value = Fraction(int(tok.text))
            if self.peek().kind == "/":
                self.advance()
                den = self.expect("number")
                value /= int(den.text)
            return WickExpression.from_scalar(CPoly.scalar(value))
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expression()
            self.expect(")")
            return inner
        if tok.kind == "[":
            self.advance()
            left = self.parse_expression()
            self.expect(",")
            right = self.parse_expression()
            self.expect("]")
            return left * right - right * left
        if tok.kind == "name":
            self.advance()
            name = tok.text
            if name == "c":
                return WickExpression.from_scalar(CPoly.c_power(1))
            if name == "delta":
                self.expect("(")
                x = self.expect("name").text
                self.expect(",")
                y = self.expect("name").text
                self.expect(")")
                return WickExpression.from_delta(x, y)
            if name in _SINGLE_LETTERS:
                fam, creator = _SINGLE_LETTERS[name]
                label = self._parse_label()
                return WickExpression.from_letter(fam, creator, label)
            if name in _MACROS:
                label = self._parse_label()
                if name == "N":
                    word = (_letter("b", True, label), _letter("b", False, label))
                else:
                    fam, creator, count = _MACROS[name]
                    word = tuple(_letter(fam, creator, label) for _ in range(count))
                return WickExpression([(ONE, (), word)])
            raise WickParseError(
                f"unknown operator name {name!r}",
                tok.pos,
                expected="one of b, bd, p, pd, B, Bd, N, delta, c",
            )
        raise WickParseError(
            f"found {tok.text!r}" if tok.kind != "end" else "input ended",
            tok.pos,
            expected="a number, name, '(', or '['",
        )

    def _parse_label(self) -> str:
        self.expect("(")
        label = self.expect("name").text
        self.expect(")")
        return label


def parse(text: str) -> WickExpression:
    """Parse the documented grammar into an unnormalized expression."""
    parser = _Parser(text)
    expr = parser.parse_expression()
    tok = parser.peek()
    if tok.kind != "end":
        raise WickParseError(f"trailing input {tok.text!r}", tok.pos, expected="end of input")
    return expr


# ---------------------------------------------------------------------------
# Identity verification, smeared readings, and the builtin corpus


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    lhs_canonical: str
    rhs_canonical: str
    diff: str

    def __bool__(self) -> bool:
        return self.ok


def verify_identity(lhs_text: str, rhs_text: str, c_value=None) -> VerifyResult:
    """Check canonical-form equality of two parsed expressions.

    ``c_value`` optionally pins the renormalization constant to a rational;
    by default it stays symbolic.
    """
    lhs = parse(lhs_text)
    rhs = parse(rhs_text)
    lc = lhs.canonical(c_value)
    rc = rhs.canonical(c_value)
    diff = (lhs - rhs).canonical(c_value)
    return VerifyResult(
        ok=not diff,
        lhs_canonical=render_canonical(lc),
        rhs_canonical=render_canonical(rc),
        diff=render_canonical(diff),
    )


_SMEAR_WORDS = {
    (): "<phi,psi>",
    (("b", True), ("b", True)): "Bd(phi*psi)",
    (("b", True), ("b", False)): "N(phi*psi)",
    (("b", False), ("b", False)): "B(phi*psi)",
}


def smeared_reading(expr: WickExpression, x: str = "x", y: str = "y") -> Optional[str]:
    """Smeared form of a pointwise identity in the two labels x and y.

    Applies when every canonical term carries exactly the delta joining x
    and y and a squared-letter word at the representative label: the delta
    becomes the L2 pairing of the smearing functions and the word is read
    at their pointwise product.  Returns None when the pattern does not
    apply.
    """
    canon = expr.canonical()
    if not canon:
        return "0"
    rep, other = sorted((x, y))
    parts = []
    for key in sorted(canon, key=lambda k: (len(k[1]), k[1], k[0])):
        deltas, word = key
        if deltas != ((rep, other),):
            return None
        shape = tuple((fam, creator) for fam, creator, lbl in word)
        if any(lbl != rep for _, _, lbl in word):
            return None
        name = _SMEAR_WORDS.get(shape)
        if name is None:
            return None
        coeff = str(canon[key])
        if "+" in coeff or coeff.lstrip("-").count("-"):
            coeff = f"({coeff})"
        parts.append(name if coeff == "1" else f"{coeff}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class CorpusIdentity:
    label: str
    lhs: str
    rhs: str


def load_corpus(path: Optional[str] = None) -> List[CorpusIdentity]:
    """Read an identity corpus: one ``lhs == rhs`` per line, '#' comments."""
    if path is None:
        from importlib.resources import files

        text = files("swnlab").joinpath("data/identities.txt").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    out: List[CorpusIdentity] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "==" not in line:
            raise WickParseError("corpus line lacks '=='", 0, expected="lhs == rhs")
        lhs, rhs = (side.strip() for side in line.split("==", 1))
        out.append(CorpusIdentity(label=f"line {lineno}: {lhs} == {rhs}", lhs=lhs, rhs=rhs))
    return out
