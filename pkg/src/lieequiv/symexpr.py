"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients over an ordered tuple of variable
names.  Printing uses graded lexicographic order (highest total degree first)
and round-trips through :func:`parse_polynomial`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Poly",
    "PolyError",
    "ParseError",
    "parse_polynomial",
    "partial_derivative",
    "evaluate",
]


class PolyError(ValueError):
    """Variable-list mismatch, unknown variable or bad point dimension."""


class ParseError(PolyError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Poly:
    __slots__ = ("vars", "_terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise PolyError(f"bad exponent tuple {exps} for vars {self.vars}")
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True))
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Poly":
        return cls(vars)

    @classmethod
    def const(cls, vars: Sequence[str], c) -> "Poly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "Poly":
        vars = tuple(vars)
        if name not in vars:
            raise PolyError(f"unknown variable {name!r}")
        i = vars.index(name)
        return cls(vars, {tuple(int(j == i) for j in range(len(vars))): 1})

    # basic protocol -------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self._index(name)
        return max((e[i] for e in self._terms), default=-1)

    def depends_on(self, name: str) -> bool:
        i = self._index(name)
        return any(e[i] for e in self._terms)

    def variables_used(self) -> set[str]:
        return {v for i, v in enumerate(self.vars) if any(e[i] for e in self._terms)}

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.vars), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def _index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise PolyError(f"unknown variable {name!r}; vars are {self.vars}") from None

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.vars == other.vars and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == Poly.const(self.vars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise PolyError(f"variable lists differ: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Rational)):
            return Poly.const(self.vars, other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a non-negative integer")
        result = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self.vars, {e: c * v for e, v in self._terms.items()})

    def diff(self, name: str) -> "Poly":
        return partial_derivative(self, name)

    def __call__(self, *point):
        return evaluate(self, point)

    # printing -------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for k, (e, c) in enumerate(self._terms.items()):
            mono = "*".join(
                v if p == 1 else f"{v}^{p}" for v, p in zip(self.vars, e) if p
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if k == 0:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(("+ " if c > 0 else "- ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, vars={self.vars})"


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+|/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    # allow the unicode minus sign
    text_n = text.replace("−", "-")
    while pos < len(text_n):
        if text_n[pos:].strip() == "":
            break
        m = _TOKEN.match(text_n, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text_n)))
    return toks


class _Parser:
    def __init__(self, text: str, vars: tuple[str, ...]):
        self.text = text
        self.vars = vars
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.signed_term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.signed_term()
            p = p + q if op == "+" else p - q
        return p

    def signed_term(self) -> Poly:
        sign = 1
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            if self.take()[1] == "-":
                sign = -sign
        t = self.term()
        return t if sign > 0 else -t

    def term(self) -> Poly:
        p = self.power()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.power()
        return p

    def power(self) -> Poly:
        p = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or not tok[1].isdigit():
                self.error("exponent must be a natural number", tok)
            p = p ** int(tok[1])
        return p

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            try:
                return Poly.const(self.vars, Fraction(val))
            except ZeroDivisionError:
                raise ParseError("zero denominator", self.text, pos) from None
        if kind == "name":
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r}", self.text, pos)
            return Poly.var(self.vars, val)
        if kind == "op" and val == "(":
            p = self.expr()
            if self.take()[1] != ")":
                self.error("expected ')'", self.toks[self.i - 1])
            return p
        if kind == "end":
            self.error("unexpected end of expression", tok)
        self.error(f"unexpected token {val!r}", tok)


def parse_polynomial(text: str, vars: Sequence[str]) -> Poly:
    """Parse ``text`` into a canonical :class:`Poly` over ``vars``.

    Grammar: sums and differences of products of rational literals,
    variable names, parenthesised expressions and natural powers
    (``factor ^ nat``).  A leading unary sign on each term is accepted.
    """
    return _Parser(text, tuple(vars)).parse()


def partial_derivative(p: Poly, var: str) -> Poly:
    i = p._index(var)
    out = {}
    for e, c in p.items():
        if e[i]:
            e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
            out[e2] = c * e[i]
    return Poly(p.vars, out)


def evaluate(p: Poly, at: Iterable):
    """Evaluate ``p`` at a point.

    Rational coordinates (int or Fraction) give an exact Fraction; if any
    coordinate is a float the result is a float.  Evaluation is Horner-style
    in the last variable, nested over the others.
    """
    at = tuple(at)
    if len(at) != len(p.vars):
        raise PolyError(f"point has {len(at)} coordinates, expected {len(p.vars)}")
    exact = all(isinstance(a, (int, Rational)) for a in at)
    pt = tuple(Fraction(a) for a in at) if exact else tuple(float(a) for a in at)
    zero = Fraction(0) if exact else 0.0
    if not p._terms:
        return zero
    return _horner(list(p.items()), pt, 0, exact)


def _horner(items, pt, k, exact):
    # items: list of (exps, coef); recurse on variable k
    if k == len(pt):
        return sum((c if exact else float(c)) for _, c in items)
    groups: dict[int, list] = {}
    for e, c in items:
        groups.setdefault(e[k], []).append((e, c))
    top = max(groups)
    acc = Fraction(0) if exact else 0.0
    x = pt[k]
    for deg in range(top, -1, -1):
        acc = acc * x
        if deg in groups:
            acc = acc + _horner(groups[deg], pt, k + 1, exact)
    return acc
