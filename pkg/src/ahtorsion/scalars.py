"""Exact coefficient ring: rationals extended by one square root, with formal parameters.

A Scalar is a polynomial in declared parameters whose coefficients live in
Q(sqrt(d)) for a single square-free d >= 0 (d = 0 means plain rationals).
All arithmetic is exact; equality is decidable by canonical form.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

Monomial = tuple  # tuple of (name, exponent) pairs, sorted by name, exponent > 0
RatLike = Union[int, Fraction]


class ScalarError(ValueError):
    pass


class ExtensionMismatch(ScalarError):
    pass


def is_square_free(d: int) -> bool:
    if d < 0:
        return False
    if d in (0, 1):
        return d == 0  # d = 1 would be a disguised rational; reject
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _join_d(da: int, db: int) -> int:
    if da == 0:
        return db
    if db == 0:
        return da
    if da != db:
        raise ExtensionMismatch(f"extension mismatch: sqrt({da}) vs sqrt({db})")
    return da


def _mul_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    exps: dict = {}
    for name, e in m1:
        exps[name] = exps.get(name, 0) + e
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in exps.items() if e != 0))


class Scalar:
    """Element of Q(sqrt(d))[parameters], stored canonically.

    ``terms`` maps a monomial to a pair (p, q) of Fractions meaning
    p + q*sqrt(d).  No (0, 0) pair is stored, and a scalar whose terms are
    all rational carries d = 0.
    """

    __slots__ = ("d", "terms")

    def __init__(self, terms: Optional[Mapping[Monomial, tuple]] = None, d: int = 0):
        if not is_square_free(d) and d != 0:
            raise ScalarError(f"extension {d} is not square-free")
        canon: dict = {}
        if terms:
            for mono, (p, q) in terms.items():
                p = Fraction(p)
                q = Fraction(q)
                if d == 0 and q != 0:
                    raise ScalarError("sqrt coefficient present without an extension")
                if p != 0 or q != 0:
                    canon[tuple(mono)] = (p, q)
        if all(q == 0 for (_, q) in canon.values()):
            d = 0
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def rational(cls, value: RatLike) -> "Scalar":
        v = Fraction(value)
        if v == 0:
            return cls()
        return cls({(): (v, Fraction(0))})

    @classmethod
    def root(cls, d: int, coeff: RatLike = 1) -> "Scalar":
        c = Fraction(coeff)
        if c == 0:
            return cls()
        return cls({(): (Fraction(0), c)}, d=d)

    @classmethod
    def parameter(cls, name: str) -> "Scalar":
        return cls({((name, 1),): (Fraction(1), Fraction(0))})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def is_rational(self) -> bool:
        return self.is_constant() and self.d == 0

    def parameters(self) -> set:
        names = set()
        for mono in self.terms:
            for n, _ in mono:
                names.add(n)
        return names

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError(f"not a plain rational: {self}")
        if not self.terms:
            return Fraction(0)
        return self.terms[()][0]

    def constant_pair(self) -> tuple:
        """The (p, q) pair of a parameter-free scalar."""
        if not self.is_constant():
            raise ScalarError(f"not parameter-free: {self}")
        return self.terms.get((), (Fraction(0), Fraction(0)))

    # -- ring operations -----------------------------------------------

    @staticmethod
    def _coerce(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return Scalar.rational(value)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other) -> "Scalar":
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = _join_d(self.d, other.d)
        out: dict = {m: pq for m, pq in self.terms.items()}
        for m, (p, q) in other.terms.items():
            p0, q0 = out.get(m, (Fraction(0), Fraction(0)))
            out[m] = (p0 + p, q0 + q)
        return Scalar(out, d=d)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar({m: (-p, -q) for m, (p, q) in self.terms.items()}, d=self.d)

    def __sub__(self, other) -> "Scalar":
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return Scalar._coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = _join_d(self.d, other.d)
        out: dict = {}
        for m1, (p1, q1) in self.terms.items():
            for m2, (p2, q2) in other.terms.items():
                m = _mul_monomials(m1, m2)
                p = p1 * p2 + d * q1 * q2
                q = p1 * q2 + q1 * p2
                p0, q0 = out.get(m, (Fraction(0), Fraction(0)))
                out[m] = (p0 + p, q0 + q)
        return Scalar(out, d=d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.divide_by_constant(other)

    def divide_by_constant(self, c) -> "Scalar":
        c = Scalar._coerce(c)
        if not c.is_constant():
            raise ScalarError("non-constant divisor")
        if c.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        p, q = c.constant_pair()
        d = _join_d(self.d, c.d)
        if q == 0:
            inv = Scalar({(): (1 / p, Fraction(0))})
        else:
            norm = p * p - d * q * q
            if norm == 0:
                raise ZeroDivisionError("division by zero scalar")
            inv = Scalar({(): (p / norm, -q / norm)}, d=d)
        return self * inv

    def __eq__(self, other) -> bool:
        other = Scalar._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.terms != other.terms:
            return False
        return self.d == other.d or self.is_zero()

    def __hash__(self) -> int:
        return hash((self.d, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- evaluation ------------------------------------------------------

    def evaluate(self, bindings: Mapping[str, RatLike]) -> "Scalar":
        missing = self.parameters() - set(bindings)
        if missing:
            raise ScalarError(f"unbound parameters: {sorted(missing)}")
        out = Scalar()
        for mono, (p, q) in self.terms.items():
            factor = Fraction(1)
            for name, e in mono:
                factor *= Fraction(bindings[name]) ** e
            out = out + Scalar({(): (p * factor, q * factor)}, d=self.d)
        return out

    def substitute_sqrt(self) -> float:
        """Float value of a parameter-free scalar (debugging aid only)."""
        p, q = self.constant_pair()
        return float(p) + float(q) * math.sqrt(self.d)

    # -- presentation ------------------------------------------------------

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = Scalar()
ONE = Scalar.rational(1)


def fraction_sqrt(f: Fraction) -> Optional[Fraction]:
    if f < 0:
        return None
    n, m = f.numerator, f.denominator
    rn, rm = math.isqrt(n), math.isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def scalar_sqrt(s: Scalar, ambient_d: int = 0) -> Optional[Scalar]:
    """Square root of a nonnegative parameter-free scalar inside Q(sqrt(d)), or None.

    Solves (x + y*sqrt(d))^2 = p + q*sqrt(d) exactly.  ``ambient_d`` lets a
    plain rational use the extension of the surrounding ring (for instance
    sqrt(3/4) = sqrt(3)/2 when the ring is Q(sqrt(3))).
    """
    if not s.is_constant():
        return None
    if s.is_zero():
        return ZERO
    p, q = s.constant_pair()
    d = s.d if s.d else ambient_d
    if q == 0:
        r = fraction_sqrt(p)
        if r is not None:
            return Scalar.rational(r)
        if d:
            r = fraction_sqrt(p / d)
            if r is not None:
                return Scalar.root(d, r)
        return None
    # x^2 + d y^2 = p, 2xy = q; x^2 is a root of t^2 - p t + d q^2 / 4 = 0
    disc = fraction_sqrt(p * p - d * q * q)
    if disc is None:
        return None
    for t in ((p + disc) / 2, (p - disc) / 2):
        x = fraction_sqrt(t)
        if x is not None and x != 0:
            y = q / (2 * x)
            cand = Scalar({(): (x, y)}, d=d)
            if cand * cand == s and (x > 0 or (x == 0 and y > 0)):
                return cand
            cand = -cand
            if cand * cand == s:
                px, qx = cand.constant_pair()
                if px > 0 or (px == 0 and qx > 0):
                    return cand
    return None


# -- literal grammar ----------------------------------------------------------
#
# scalar  := term (('+' | '-') term)*
# term    := ['-'] factor ('*' factor)*
# factor  := int | int '/' int | '(' coeff ')' | 'r' | name ['^' int]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ScalarError(f"bad scalar literal near {text[pos:]!r}")
            break
        pos = m.end()
        if m.group("num"):
            toks.append(("num", int(m.group("num"))))
        elif m.group("name"):
            toks.append(("name", m.group("name")))
        else:
            toks.append(("op", m.group("op")))
    return toks


def parse_scalar(text: str, d: int = 0, parameters: Iterable[str] = ()) -> Scalar:
    """Parse the literal grammar, e.g. "-1/2 + 1/2*r", "-q", "3/4*q^2".

    ``r`` denotes sqrt(d); parameter names must be declared in ``parameters``.
    """
    params = set(parameters)
    toks = _tokenize(text)
    if not toks:
        raise ScalarError("empty scalar literal")
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None)

    def parse_coeff() -> Fraction:
        nonlocal i
        kind, val = peek()
        if kind == "op" and val == "(":
            i += 1
            c = parse_signed_coeff()
            kind, val = peek()
            if kind != "op" or val != ")":
                raise ScalarError("unbalanced parenthesis in scalar literal")
            i += 1
            return c
        if kind != "num":
            raise ScalarError(f"expected number in scalar literal {text!r}")
        i += 1
        num = val
        kind, val = peek()
        if kind == "op" and val == "/":
            i += 1
            kind, val = peek()
            if kind != "num":
                raise ScalarError(f"expected denominator in {text!r}")
            i += 1
            return Fraction(num, val)
        return Fraction(num)

    def parse_signed_coeff() -> Fraction:
        nonlocal i
        sign = 1
        kind, val = peek()
        if kind == "op" and val in "+-":
            i += 1
            sign = -1 if val == "-" else 1
        return sign * parse_coeff()

    def parse_term() -> Scalar:
        nonlocal i
        coeff: Optional[Fraction] = None
        has_root = False
        exps: dict = {}
        while True:
            kind, val = peek()
            if kind == "num" or (kind == "op" and val == "("):
                c = parse_coeff()
                coeff = c if coeff is None else coeff * c
            elif kind == "name":
                i += 1
                e = 1
                kind2, val2 = peek()
                if kind2 == "op" and val2 == "^":
                    i += 1
                    kind2, val2 = peek()
                    if kind2 != "num":
                        raise ScalarError(f"expected exponent in {text!r}")
                    i += 1
                    e = val2
                if val == "r":
                    if e != 1:
                        raise ScalarError("powers of r are not part of the grammar")
                    if has_root:
                        raise ScalarError("repeated r factor in one term")
                    has_root = True
                else:
                    if val not in params:
                        raise ScalarError(f"undeclared parameter {val!r}")
                    exps[val] = exps.get(val, 0) + e
            else:
                raise ScalarError(f"unexpected token in scalar literal {text!r}")
            kind, val = peek()
            if kind == "op" and val == "*":
                i += 1
                continue
            break
        c = Fraction(1) if coeff is None else coeff
        mono = tuple(sorted(exps.items()))
        if has_root:
            if d == 0:
                raise ScalarError("r used but no sqrt extension declared")
            return Scalar({mono: (Fraction(0), c)}, d=d)
        return Scalar({mono: (c, Fraction(0))})

    result = Scalar()
    sign = 1
    kind, val = peek()
    if kind == "op" and val in "+-":
        i += 1
        sign = -1 if val == "-" else 1
    while True:
        t = parse_term()
        result = result + (t if sign == 1 else -t)
        kind, val = peek()
        if kind is None:
            break
        if kind == "op" and val in "+-":
            i += 1
            sign = -1 if val == "-" else 1
        else:
            raise ScalarError(f"trailing junk in scalar literal {text!r}")
    return result


def _format_term(coeff: Fraction, root: bool, mono: Monomial) -> str:
    parts = []
    if abs(coeff) != 1 or (not root and not mono):
        parts.append(str(abs(coeff)))
    if root:
        parts.append("r")
    for name, e in mono:
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_scalar(s: Scalar) -> str:
    """Render in the literal grammar; parse_scalar inverts this exactly."""
    if s.is_zero():
        return "0"
    pieces = []
    for mono in sorted(s.terms, key=lambda m: (len(m), m)):
        p, q = s.terms[mono]
        if p != 0:
            pieces.append((p < 0, _format_term(p, False, mono)))
        if q != 0:
            pieces.append((q < 0, _format_term(q, True, mono)))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, text in pieces[1:]:
        out += (" - " if neg else " + ") + text
    return out


# -- univariate root listing ---------------------------------------------------


def _rational_roots_of(coeffs: dict) -> set:
    """Rational roots of sum(coeffs[e] * x^e) with Fraction coefficients."""
    coeffs = {e: c for e, c in coeffs.items() if c != 0}
    if not coeffs:
        return None  # identically zero: every value is a root
    roots = set()
    low = min(coeffs)
    if low > 0:
        roots.add(Fraction(0))
        coeffs = {e - low: c for e, c in coeffs.items()}
    if max(coeffs) == 0:
        return roots
    lcm = 1
    for c in coeffs.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = {e: int(c * lcm) for e, c in coeffs.items()}
    deg = max(ints)
    a0 = abs(ints.get(0, 0))
    an = abs(ints[deg])
    if a0 == 0:  # pragma: no cover - stripped above
        return roots

    def divisors(m: int):
        out = []
        k = 1
        while k * k <= m:
            if m % k == 0:
                out.append(k)
                out.append(m // k)
            k += 1
        return out

    for pnum in divisors(a0):
        for pden in divisors(an):
            for cand in (Fraction(pnum, pden), Fraction(-pnum, pden)):
                if sum(c * cand**e for e, c in ints.items()) == 0:
                    roots.add(cand)
    return roots


def rational_roots(s: Scalar) -> Optional[set]:
    """Rational values of the single parameter at which ``s`` vanishes.

    Returns None when ``s`` is identically zero.  Requires at most one
    parameter name in ``s``.
    """
    names = s.parameters()
    if len(names) > 1:
        raise ScalarError("root listing is univariate only")
    if s.is_zero():
        return None
    if not names:
        return set()
    (name,) = names
    p_poly: dict = {}
    q_poly: dict = {}
    for mono, (p, q) in s.terms.items():
        e = mono[0][1] if mono else 0
        p_poly[e] = p_poly.get(e, Fraction(0)) + p
        q_poly[e] = q_poly.get(e, Fraction(0)) + q
    rp = _rational_roots_of(p_poly)
    rq = _rational_roots_of(q_poly)
    if rp is None:
        return rq
    if rq is None:
        return rp
    return rp & rq
