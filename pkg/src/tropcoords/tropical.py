"""Tropical arithmetic: expressions over min/max/+, and rational normal form.

Expressions are finite trees built from real constants, variables, n-ary
sums (ordinary +, the tropical product), n-ary max and min, and negation.
Any such function equals a difference p - q of two max-plus polynomials;
`to_rational_normal_form` computes that pair by the tropical analogue of
putting fractions over a common denominator:

    -(p - q)            = q - p
    (p1-q1) + (p2-q2)   = (p1*p2) - (q1*q2)
    max(p1-q1, p2-q2)   = max(p1*q2, p2*q1) - (q1*q2)
    min(...)            = -max(-( ... ))

where * of two max-plus forms is the set of all pairwise term sums.

Surface syntax uses ordinary arithmetic notation:

    expr    := term (('+' | '-') term)*
    term    := '-' term | product
    product := INT '*' atom | atom
    atom    := NUMBER | IDENT | ('min'|'max') '(' expr (',' expr)* ')'
             | '(' expr ')'

An integer multiplier `k*e` is the tropical k-th power, i.e. the k-fold
sum of `e`; the parser builds it as a sum of k identical children and the
printer folds such sums back to `k*e`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union


class TropicalError(Exception):
    pass


class TropicalSyntaxError(TropicalError):
    """Raised on malformed expression text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UndefinedVariableError(TropicalError, KeyError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} has no assigned value")
        self.name = name


class NegativeExponentError(TropicalError, ValueError):
    pass


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Sum:
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Max:
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Min:
    children: tuple[Expr, ...]


@dataclass(frozen=True)
class Neg:
    child: Expr


Expr = Union[Const, Var, Sum, Max, Min, Neg]


def trop_eval(expr: Expr, point: Mapping[str, float]) -> float:
    """Evaluate an expression at a point; every variable must be assigned."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return point[expr.name]
        except KeyError:
            raise UndefinedVariableError(expr.name) from None
    if isinstance(expr, Sum):
        return sum(trop_eval(c, point) for c in expr.children)
    if isinstance(expr, Max):
        return max(trop_eval(c, point) for c in expr.children)
    if isinstance(expr, Min):
        return min(trop_eval(c, point) for c in expr.children)
    if isinstance(expr, Neg):
        return -trop_eval(expr.child, point)
    raise TypeError(f"not a tropical expression: {expr!r}")


def variables(expr: Expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, (Sum, Max, Min)):
        out: set[str] = set()
        for c in expr.children:
            out |= variables(c)
        return out
    if isinstance(expr, Neg):
        return variables(expr.child)
    return set()


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<number>\d+\.\d*|\.\d+|\d+)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*(),])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            # skip leading whitespace before reporting
            stripped = len(text) - len(text[pos:].lstrip())
            if stripped >= len(text):
                break
            raise TropicalSyntaxError(f"unknown token {text[stripped]!r}", stripped)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise TropicalSyntaxError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self) -> Expr:
        expr = self.expr()
        kind, value, pos = self.peek()
        if kind != "eof":
            raise TropicalSyntaxError(f"unexpected trailing {value!r}", pos)
        return expr

    def expr(self) -> Expr:
        parts = [self.term()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                parts.append(Neg(rhs) if value == "-" else rhs)
            else:
                break
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def term(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.term())
        return self.product()

    def product(self) -> Expr:
        kind, value, pos = self.peek()
        if kind == "number":
            nxt_kind, nxt_value, _ = self.tokens[self.i + 1]
            if nxt_kind == "op" and nxt_value == "*":
                if "." in value:
                    raise TropicalSyntaxError("multiplier must be an integer", pos)
                self.advance()
                self.advance()
                k = int(value)
                atom = self.atom()
                if k == 0:
                    return Const(0.0)
                if k == 1:
                    return atom
                return Sum((atom,) * k)
        return self.atom()

    def atom(self) -> Expr:
        kind, value, pos = self.advance()
        if kind == "number":
            return Const(float(value))
        if kind == "ident":
            if value in ("min", "max"):
                self.expect_op("(")
                children = [self.expr()]
                while True:
                    k, v, p = self.peek()
                    if k == "op" and v == ",":
                        self.advance()
                        children.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                node = Min if value == "min" else Max
                return node(tuple(children)) if len(children) > 1 else children[0]
            return Var(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise TropicalSyntaxError(
            "expected a number, variable, min/max, or parenthesized expression", pos
        )


def parse_tropical(text: str) -> Expr:
    return _Parser(text).parse()


def to_text(expr: Expr) -> str:
    """Print an expression in the surface grammar; round-trips through parse."""
    return _print(expr, top=True)


def _print(expr: Expr, top: bool = False) -> str:
    if isinstance(expr, Const):
        return f"{expr.value:.12g}"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        inner = _print(expr.child)
        return f"-{inner}"
    if isinstance(expr, (Max, Min)):
        name = "max" if isinstance(expr, Max) else "min"
        return f"{name}({', '.join(_print(c, top=True) for c in expr.children)})"
    if isinstance(expr, Sum):
        cs = expr.children
        if len(cs) >= 2 and all(c == cs[0] for c in cs):
            inner = _print(cs[0])
            # the multiplier grammar takes an atom; negations need parens
            if isinstance(cs[0], Neg) or (isinstance(cs[0], Const) and cs[0].value < 0):
                inner = f"({inner})"
            return f"{len(cs)}*{inner}"
        parts = [_print(cs[0], top=True)]
        for c in cs[1:]:
            if isinstance(c, Neg):
                parts.append(f"- {_print(c.child)}")
            else:
                parts.append(f"+ {_print(c)}")
        text = " ".join(parts)
        return text if top else f"({text})"
    raise TypeError(f"not a tropical expression: {expr!r}")


# ---------------------------------------------------------------------------
# max-plus forms and rational normal form


@dataclass(frozen=True)
class AffineTerm:
    """constant + sum of multiplier * variable; the tropical monomial c . x^e."""

    exponents: tuple[tuple[str, int], ...]  # sorted by variable, zero entries dropped
    constant: float = 0.0

    @staticmethod
    def make(exponents: Mapping[str, int], constant: float = 0.0) -> "AffineTerm":
        items = tuple(sorted((v, e) for v, e in exponents.items() if e != 0))
        return AffineTerm(items, constant)

    def evaluate(self, point: Mapping[str, float]) -> float:
        total = self.constant
        for name, exp in self.exponents:
            try:
                total += exp * point[name]
            except KeyError:
                raise UndefinedVariableError(name) from None
        return total

    def total_degree(self) -> int:
        for _, exp in self.exponents:
            if exp < 0:
                raise NegativeExponentError(f"negative exponent in term {self}")
        return sum(exp for _, exp in self.exponents)


@dataclass(frozen=True)
class MaxPlusForm:
    """max over a nonempty set of affine terms."""

    terms: tuple[AffineTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise TropicalError("a max-plus form needs at least one term")

    def evaluate(self, point: Mapping[str, float]) -> float:
        return max(t.evaluate(point) for t in self.terms)

    def to_expr(self) -> Expr:
        alts = []
        for t in self.terms:
            parts: list[Expr] = []
            if t.constant != 0.0 or not t.exponents:
                parts.append(Const(t.constant))
            for name, exp in t.exponents:
                parts.extend([Var(name)] * exp)
            alts.append(parts[0] if len(parts) == 1 else Sum(tuple(parts)))
        return alts[0] if len(alts) == 1 else Max(tuple(alts))


@dataclass(frozen=True)
class RationalNormalForm:
    numerator: MaxPlusForm
    denominator: MaxPlusForm

    def evaluate(self, point: Mapping[str, float]) -> float:
        return self.numerator.evaluate(point) - self.denominator.evaluate(point)


def degree(form: MaxPlusForm) -> int:
    """Total degree: max over terms of the sum of exponents."""
    return max(t.total_degree() for t in form.terms)


def _pruned(terms) -> MaxPlusForm:
    # terms with identical exponent vectors are dominated by the largest constant
    best: dict[tuple, float] = {}
    for t in terms:
        prev = best.get(t.exponents)
        if prev is None or t.constant > prev:
            best[t.exponents] = t.constant
    merged = tuple(
        AffineTerm(exps, const) for exps, const in sorted(best.items(), key=lambda kv: kv[0])
    )
    return MaxPlusForm(merged)


def _term_product(a: AffineTerm, b: AffineTerm) -> AffineTerm:
    exps = dict(a.exponents)
    for name, exp in b.exponents:
        exps[name] = exps.get(name, 0) + exp
    return AffineTerm.make(exps, a.constant + b.constant)


def form_product(a: MaxPlusForm, b: MaxPlusForm) -> MaxPlusForm:
    """Tropical product: all pairwise term sums (pointwise ordinary +)."""
    return _pruned(_term_product(s, t) for s in a.terms for t in b.terms)


def form_max(a: MaxPlusForm, b: MaxPlusForm) -> MaxPlusForm:
    return _pruned(a.terms + b.terms)


_ZERO = MaxPlusForm((AffineTerm.make({}, 0.0),))


def to_rational_normal_form(expr: Expr) -> RationalNormalForm:
    """Rewrite any expression as p - q with p, q max-plus forms.

    The rewrite uses only + on constants, so p(x) - q(x) reproduces the
    tree evaluation exactly whenever the inputs are exactly representable.
    """
    if isinstance(expr, Const):
        return RationalNormalForm(MaxPlusForm((AffineTerm.make({}, expr.value),)), _ZERO)
    if isinstance(expr, Var):
        return RationalNormalForm(MaxPlusForm((AffineTerm.make({expr.name: 1}),)), _ZERO)
    if isinstance(expr, Neg):
        inner = to_rational_normal_form(expr.child)
        return RationalNormalForm(inner.denominator, inner.numerator)
    if isinstance(expr, Sum):
        num, den = _ZERO, _ZERO
        for child in expr.children:
            rnf = to_rational_normal_form(child)
            num = form_product(num, rnf.numerator)
            den = form_product(den, rnf.denominator)
        return RationalNormalForm(num, den)
    if isinstance(expr, Max):
        acc = to_rational_normal_form(expr.children[0])
        for child in expr.children[1:]:
            rnf = to_rational_normal_form(child)
            num = form_max(
                form_product(acc.numerator, rnf.denominator),
                form_product(rnf.numerator, acc.denominator),
            )
            den = form_product(acc.denominator, rnf.denominator)
            acc = RationalNormalForm(num, den)
        return acc
    if isinstance(expr, Min):
        negated = Max(tuple(Neg(c) for c in expr.children))
        inner = to_rational_normal_form(negated)
        return RationalNormalForm(inner.denominator, inner.numerator)
    raise TypeError(f"not a tropical expression: {expr!r}")
