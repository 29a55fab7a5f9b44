"""Exact sparse multivariate polynomials over the rationals.

Polynomials are immutable and canonical: no zero coefficients are stored and
terms are kept strictly sorted by the ring's term order, so mathematically
equal polynomials compare bitwise equal.  All coefficients are
``fractions.Fraction``; floats never enter this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

KIND_SPACE = "space"
KIND_HOMOTOPY = "homotopy"
KIND_PARAMETER = "parameter"

_KINDS = (KIND_SPACE, KIND_HOMOTOPY, KIND_PARAMETER)

GREVLEX = "grevlex"
LEX = "lex"


class RingContextError(ValueError):
    """Operands live in different ring contexts."""


class PolyParseError(ValueError):
    """Syntax error in a polynomial string; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = KIND_SPACE

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", self.name):
            raise ValueError("invalid variable name: %r" % (self.name,))
        if self.kind not in _KINDS:
            raise ValueError("unknown variable kind: %r" % (self.kind,))


class Ring:
    """A polynomial ring context: ordered variable list plus term order.

    The variable list fixes precedence for the term order (earlier = greater).
    """

    __slots__ = ("variables", "order", "_index", "_hash")

    def __init__(self, variables, order=GREVLEX):
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names: %r" % (names,))
        if order not in (GREVLEX, LEX):
            raise ValueError("unknown term order: %r" % (order,))
        self.variables = variables
        self.order = order
        self._index = {v.name: i for i, v in enumerate(variables)}
        self._hash = hash((tuple((v.name, v.kind) for v in variables), order))

    @classmethod
    def space(cls, names, order=GREVLEX):
        """Ring with the given space variables in precedence order."""
        return cls([Variable(n, KIND_SPACE) for n in names], order)

    @property
    def nvars(self):
        return len(self.variables)

    @property
    def space_variables(self):
        return tuple(v for v in self.variables if v.kind == KIND_SPACE)

    def signature(self):
        return (tuple((v.name, v.kind) for v in self.variables), self.order)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.signature() == other.signature()

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Ring(%s; %s)" % (", ".join(v.name for v in self.variables), self.order)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError("unknown variable %r in %r" % (name, self)) from None

    def monomial_key(self, exps):
        """Sort key; larger key = larger monomial under the ring's order."""
        if self.order == LEX:
            return tuple(exps)
        return (sum(exps), tuple(-e for e in reversed(exps)))

    # --- element constructors -------------------------------------------------

    @property
    def zero(self):
        return Poly(self, ())

    @property
    def one(self):
        return self.const(1)

    def const(self, c):
        c = Fraction(c)
        if c == 0:
            return self.zero
        return Poly(self, (((0,) * self.nvars, c),))

    def var(self, name):
        i = self.index(name)
        exps = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Poly(self, ((exps, Fraction(1)),))

    def monomial(self, exps, c=1):
        c = Fraction(c)
        if c == 0:
            return self.zero
        return Poly(self, ((tuple(exps), c),))

    def from_dict(self, d):
        terms = [(e, c) for e, c in d.items() if c != 0]
        terms.sort(key=lambda t: self.monomial_key(t[0]), reverse=True)
        return Poly(self, tuple(terms))

    def extend(self, new_variables):
        """Ring with extra variables appended (lower precedence)."""
        new_variables = tuple(new_variables)
        for v in new_variables:
            if v.name in self._index:
                raise ValueError("variable name collision: %r" % (v.name,))
        return Ring(self.variables + new_variables, self.order)

    def parse(self, text):
        return _parse(self, text)


class Poly:
    """Canonical sparse polynomial; construct via :class:`Ring` helpers."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # --- basic queries --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant: %s" % (self,))
        return self.terms[0][1]

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e, _ in self.terms)

    def degree_in(self, name):
        if not self.terms:
            return -1
        i = self.ring.index(name)
        return max(e[i] for e, _ in self.terms)

    def leading_monomial(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][0]

    def leading_coefficient(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][1]

    def leading_term(self):
        e, c = self.terms[0]
        return Poly(self.ring, ((e, c),))

    def variables_used(self):
        used = set()
        for e, _ in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ring.variables[i].name)
        return used

    # --- equality -------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.terms))

    def _check(self, other):
        if not isinstance(other, Poly):
            raise TypeError("expected Poly, got %r" % (type(other).__name__,))
        if self.ring != other.ring:
            raise RingContextError(
                "ring mismatch: %r vs %r" % (self.ring, other.ring)
            )

    # --- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        self._check(other)
        d = dict(self.terms)
        for e, c in other.terms:
            v = d.get(e)
            if v is None:
                d[e] = c
            else:
                v = v + c
                if v:
                    d[e] = v
                else:
                    del d[e]
        return self.ring.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                v = d.get(e)
                if v is None:
                    d[e] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v:
                        d[e] = v
                    else:
                        del d[e]
        return self.ring.from_dict(d)

    __rmul__ = __mul__

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return self.ring.zero
        return Poly(self.ring, tuple((e, k * c) for e, k in self.terms))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # --- calculus -------------------------------------------------------------

    def diff(self, name):
        """Formal partial derivative with respect to the named variable."""
        i = self.ring.index(name)
        d = {}
        for e, c in self.terms:
            k = e[i]
            if k == 0:
                continue
            e2 = e[:i] + (k - 1,) + e[i + 1:]
            d[e2] = d.get(e2, Fraction(0)) + c * k
        return self.ring.from_dict(d)

    def integrate(self, name):
        """Formal antiderivative with zero constant of integration."""
        i = self.ring.index(name)
        d = {}
        for e, c in self.terms:
            k = e[i]
            e2 = e[:i] + (k + 1,) + e[i + 1:]
            d[e2] = c / (k + 1)
        return self.ring.from_dict(d)

    # --- substitution and ring movement ---------------------------------------

    def eval(self, values):
        """Evaluate at a full rational point; ``values`` maps names to numbers."""
        total = Fraction(0)
        ring = self.ring
        for e, c in self.terms:
            acc = c
            for i, k in enumerate(e):
                if k:
                    acc *= Fraction(values[ring.variables[i].name]) ** k
            total += acc
        return total

    def subs(self, values):
        """Substitute rationals for some variables; result stays in this ring."""
        ring = self.ring
        d = {}
        for e, c in self.terms:
            acc = c
            e2 = list(e)
            for i, k in enumerate(e):
                name = ring.variables[i].name
                if k and name in values:
                    acc *= Fraction(values[name]) ** k
                    e2[i] = 0
            if acc == 0:
                continue
            key = tuple(e2)
            d[key] = d.get(key, Fraction(0)) + acc
        return ring.from_dict(d)

    def map_to(self, target):
        """View this polynomial in another ring containing all its variables."""
        if target == self.ring:
            return self
        positions = []
        for i, v in enumerate(self.ring.variables):
            try:
                positions.append(target.index(v.name))
            except KeyError:
                # only allowed if the variable never occurs
                positions.append(None)
        d = {}
        for e, c in self.terms:
            e2 = [0] * target.nvars
            for i, k in enumerate(e):
                if k == 0:
                    continue
                j = positions[i]
                if j is None:
                    raise RingContextError(
                        "variable %r missing in target ring"
                        % (self.ring.variables[i].name,)
                    )
                e2[j] = k
            key = tuple(e2)
            d[key] = d.get(key, Fraction(0)) + c
        return target.from_dict(d)

    # --- printing -------------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return "Poly(%s)" % (format_poly(self),)


def adjoin_variables(p, variables):
    """Same polynomial in the ring extended by the given variables."""
    return p.map_to(p.ring.extend(variables))


def format_poly(p):
    """Canonical text form; ``parse(format(p)) == p``."""
    if not p.terms:
        return "0"
    ring = p.ring
    pieces = []
    for idx, (e, c) in enumerate(p.terms):
        mono = []
        for i, k in enumerate(e):
            if k == 1:
                mono.append(ring.variables[i].name)
            elif k > 1:
                mono.append("%s^%d" % (ring.variables[i].name, k))
        mono_s = "*".join(mono)
        a = abs(c)
        if not mono_s:
            body = _frac_str(a)
        elif a == 1:
            body = mono_s
        else:
            body = "%s*%s" % (_frac_str(a), mono_s)
        if idx == 0:
            pieces.append(body if c > 0 else "-" + body)
        else:
            pieces.append((" + " if c > 0 else " - ") + body)
    return "".join(pieces)


def _frac_str(c):
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[+\-*/^]))"
)


def _tokenize(text):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = n - len(stripped)
            raise PolyParseError("unexpected character %r" % (text[bad],), bad)
        if m.group("num") is not None:
            tokens.append(("num", int(m.group("num")), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


def _parse(ring, text):
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i]

    def advance():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def parse_factor():
        kind, val, pos = peek()
        if kind == "name":
            advance()
            try:
                p = ring.var(val)
            except KeyError:
                raise PolyParseError("unknown variable %r" % (val,), pos) from None
            if peek()[0] == "op" and peek()[1] == "^":
                advance()
                k, v, kp = peek()
                if k != "num":
                    raise PolyParseError("expected exponent", kp)
                advance()
                p = p ** v
            return p
        if kind == "num":
            advance()
            c = Fraction(val)
            if peek()[0] == "op" and peek()[1] == "/":
                advance()
                k, v, kp = peek()
                if k != "num":
                    raise PolyParseError("expected denominator", kp)
                if v == 0:
                    raise PolyParseError("zero denominator", kp)
                advance()
                c /= v
            return ring.const(c)
        raise PolyParseError("expected number or variable", pos)

    def parse_term():
        p = parse_factor()
        while peek()[0] == "op" and peek()[1] == "*":
            advance()
            p = p * parse_factor()
        return p

    def parse_expr():
        sign = 1
        if peek()[0] == "op" and peek()[1] in "+-":
            if peek()[1] == "-":
                sign = -1
            advance()
        p = parse_term().scale(sign)
        while peek()[0] == "op" and peek()[1] in "+-":
            op = advance()[1]
            q = parse_term()
            p = p + q if op == "+" else p - q
        return p

    result = parse_expr()
    kind, val, pos = peek()
    if kind != "end":
        raise PolyParseError("trailing input %r" % (val,), pos)
    return result
