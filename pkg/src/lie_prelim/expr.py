"""Exact symbolic expression kernel.

Expressions are immutable trees over arbitrary-precision rationals, free
constants, coordinate symbols, jet variables, unknown-function applications
with inert partial derivatives, sums, products, powers, exp and ln.  Every
constructor normalizes, so two structurally equal trees are the same
mathematical object on the working chart (x > 0, u > 0 where powers/logs
demand it).  Floats never enter a tree; they only appear in the numeric
evaluation oracle.

Normal form: recursively flattened sum of products.  Each product carries a
single rational coefficient in front and a tuple of base^exponent factors
with pairwise distinct bases, ordered by a fixed total order on node kinds
and names.  Sums carry pairwise distinct monomials in the same order.
Integer powers of sums are expanded; exp/ln stay atomic apart from
ln(exp(e)) -> e, exp(0) -> 1 and ln(1) -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[int, Fraction]

JET_ORDER_LIMIT = 3

# Jet variables admitted by the truncated jet space (mixed indices are kept
# t-before-x; u itself is an ordinary coordinate symbol).
JET_NAMES = ("u_t", "u_x", "u_tt", "u_tx", "u_xx", "u_txx", "u_xxx")


class ExprError(Exception):
    """Base class for expression-kernel errors."""


class DomainError(ExprError):
    """Evaluation or normalization left the admissible chart."""


class SubstitutionError(ExprError):
    """Invalid substitution request."""


class NonPolynomialError(ExprError):
    """Collection requested with respect to a variable occurring non-polynomially."""


@dataclass(frozen=True)
class FunctionSignature:
    """Declared unknown function: a name plus its ordered argument symbols."""

    name: str
    args: tuple[str, ...]

    def __post_init__(self):
        if not self.args:
            raise ExprError(f"function {self.name!r} needs at least one argument")


Env = Mapping[str, FunctionSignature]


def make_env(*sigs: FunctionSignature) -> dict[str, FunctionSignature]:
    return {s.name: s for s in sigs}


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    # -- arithmetic sugar ---------------------------------------------------
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(Rat(-1), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(Rat(-1), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, power(_coerce(other), Rat(-1)))

    def __rtruediv__(self, other):
        return mul(_coerce(other), power(self, Rat(-1)))

    def __pow__(self, other):
        return power(self, _coerce(other))

    def __neg__(self):
        return mul(Rat(-1), self)

    def __str__(self):
        from .printing import to_text

        return to_text(self)

    def __repr__(self):
        from .printing import to_text

        return f"<expr {to_text(self)}>"

    @property
    def is_zero(self) -> bool:
        return isinstance(self, Rat) and self.value == 0

    @property
    def is_one(self) -> bool:
        return isinstance(self, Rat) and self.value == 1


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Rat(v)
    raise TypeError(f"cannot coerce {v!r} into an expression")


@dataclass(frozen=True)
class Rat(Expr):
    value: Fraction

    def __init__(self, value: Rational, den: int | None = None):
        q = Fraction(value, den) if den is not None else Fraction(value)
        object.__setattr__(self, "value", q)


@dataclass(frozen=True)
class Sym(Expr):
    """Coordinate symbol or free constant."""

    name: str


@dataclass(frozen=True)
class Jet(Expr):
    """Positive-order jet variable u_t, u_x, ..."""

    name: str

    def __post_init__(self):
        if self.name not in JET_NAMES:
            raise ExprError(f"unknown jet variable {self.name!r}")

    @property
    def indices(self) -> str:
        return self.name[2:]

    @property
    def order(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Func(Expr):
    """Unknown-function application with an inert derivative multiset.

    ``params`` are the declared argument names; ``dvars`` is the multiset of
    differentiation arguments (each a declared name, kept sorted in signature
    order so that mixed partials coincide); ``args`` are the actual argument
    expressions.  The identity application has ``args == (Sym(p) ...)``.
    """

    name: str
    dvars: tuple[str, ...]
    args: tuple[Expr, ...]
    params: tuple[str, ...]

    def __post_init__(self):
        if len(self.args) != len(self.params):
            raise ExprError(
                f"{self.name}: got {len(self.args)} arguments, expected {len(self.params)}")
        for d in self.dvars:
            if d not in self.params:
                raise ExprError(f"{self.name}: derivative argument {d!r} not in signature")

    @property
    def is_identity_application(self) -> bool:
        return all(isinstance(a, Sym) and a.name == p for a, p in zip(self.args, self.params))


@dataclass(frozen=True)
class ExpF(Expr):
    arg: Expr


@dataclass(frozen=True)
class LnF(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: Expr


@dataclass(frozen=True)
class Mul(Expr):
    coeff: Fraction
    parts: tuple[Expr, ...]  # atoms or Pow nodes, distinct bases, sorted


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]  # >= 2 non-Add non-zero terms, distinct monomials, sorted


ZERO = Rat(0)
ONE = Rat(1)
T, X, U = Sym("t"), Sym("x"), Sym("u")


def func(sig: FunctionSignature, dvars: Sequence[str] = (), args: Sequence[Expr] | None = None) -> Func:
    """Build a (derivative of a) declared function; identity application by default."""
    if args is None:
        args = tuple(Sym(p) for p in sig.args)
    order = {p: i for i, p in enumerate(sig.args)}
    dv = tuple(sorted(dvars, key=lambda d: order[d]))
    return Func(sig.name, dv, tuple(args), sig.args)


def jet(name: str) -> Expr:
    """Jet variable by (possibly non-canonical) index string; 'u' is a Sym."""
    if name == "u":
        return U
    if not name.startswith("u_"):
        raise ExprError(f"not a jet variable: {name!r}")
    idx = "".join(sorted(name[2:]))  # 't' < 'x'
    if len(idx) > JET_ORDER_LIMIT or any(c not in "tx" for c in idx):
        raise ExprError(f"jet variable {name!r} outside the truncated jet space")
    return Jet("u_" + idx)


# ---------------------------------------------------------------------------
# Total order on normalized expressions
# ---------------------------------------------------------------------------

_KIND = {Rat: 0, Sym: 1, Jet: 2, Func: 3, ExpF: 4, LnF: 5, Pow: 6, Mul: 7, Add: 8}

_key_cache: dict[Expr, tuple] = {}


def sort_key(e: Expr) -> tuple:
    k = _key_cache.get(e)
    if k is None:
        k = _sort_key(e)
        _key_cache[e] = k
    return k


def _sort_key(e: Expr) -> tuple:
    if isinstance(e, Rat):
        return (0, e.value.numerator, e.value.denominator)
    if isinstance(e, Sym):
        return (1, e.name)
    if isinstance(e, Jet):
        return (2, e.order, e.indices.count("t"), e.name)
    if isinstance(e, Func):
        return (3, e.name, e.dvars, tuple(sort_key(a) for a in e.args))
    if isinstance(e, ExpF):
        return (4, sort_key(e.arg))
    if isinstance(e, LnF):
        return (5, sort_key(e.arg))
    if isinstance(e, Pow):
        return (6, sort_key(e.base), sort_key(e.exp))
    if isinstance(e, Mul):
        return (7, tuple(sort_key(p) for p in e.parts), e.coeff.numerator, e.coeff.denominator)
    if isinstance(e, Add):
        return (8, tuple(sort_key(t) for t in e.terms))
    raise TypeError(type(e))


def _base_exp(part: Expr) -> tuple[Expr, Expr]:
    if isinstance(part, Pow):
        return part.base, part.exp
    return part, ONE


def monomial_parts(term: Expr) -> tuple[Expr, ...]:
    """Non-coefficient factor tuple identifying like terms."""
    if isinstance(term, Rat):
        return ()
    if isinstance(term, Mul):
        return term.parts
    return (term,)


def term_coeff(term: Expr) -> Fraction:
    if isinstance(term, Rat):
        return term.value
    if isinstance(term, Mul):
        return term.coeff
    return Fraction(1)


def _monomial_key(parts: tuple[Expr, ...]) -> tuple:
    return tuple(sort_key(p) for p in parts)


# ---------------------------------------------------------------------------
# Smart constructors
# ---------------------------------------------------------------------------

def _make_term(coeff: Fraction, parts: tuple[Expr, ...]) -> Expr:
    if coeff == 0:
        return ZERO
    if not parts:
        return Rat(coeff)
    if coeff == 1 and len(parts) == 1:
        return parts[0]
    return Mul(coeff, parts)


def add(*operands) -> Expr:
    acc: dict[tuple, tuple[Fraction, tuple[Expr, ...]]] = {}
    stack = [_coerce(o) for o in operands]
    for e in stack:
        terms = e.terms if isinstance(e, Add) else (e,)
        for t in terms:
            c, parts = term_coeff(t), monomial_parts(t)
            k = _monomial_key(parts)
            if k in acc:
                acc[k] = (acc[k][0] + c, parts)
            else:
                acc[k] = (c, parts)
    out = [_make_term(c, parts) for c, parts in acc.values() if c != 0]
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda t: _monomial_key(monomial_parts(t)))
    return Add(tuple(out))


def mul(*operands) -> Expr:
    coeff = Fraction(1)
    parts: list[Expr] = []
    sums: list[Add] = []
    for o in operands:
        e = _coerce(o)
        if isinstance(e, Rat):
            coeff *= e.value
        elif isinstance(e, Mul):
            coeff *= e.coeff
            parts.extend(e.parts)
        elif isinstance(e, Add):
            sums.append(e)
        else:
            parts.append(e)
    if coeff == 0:
        return ZERO
    if sums:
        # distribute the product over every sum (expanded normal form)
        result_terms: list[Expr] = [_make_term(coeff, ())] if not parts else [
            mul(_make_term(coeff, ()), *parts)]
        for s in sums:
            result_terms = [mul(t, st) for t in result_terms for st in s.terms]
        return add(*result_terms)
    # group factors by base and combine exponents
    groups: dict[tuple, tuple[Expr, list[Expr]]] = {}
    for p in parts:
        b, e = _base_exp(p)
        k = sort_key(b)
        if k in groups:
            groups[k][1].append(e)
        else:
            groups[k] = (b, [e])
    new_parts: list[Expr] = []
    redo: list[Expr] = []
    for b, exps in groups.values():
        total = add(*exps) if len(exps) > 1 else exps[0]
        pw = power(b, total)
        if isinstance(pw, Rat):
            coeff *= pw.value
            if coeff == 0:
                return ZERO
        elif isinstance(pw, (Mul, Add)):
            redo.append(pw)
        else:
            new_parts.append(pw)
    if redo:
        return mul(_make_term(coeff, ()), *new_parts, *redo)
    new_parts.sort(key=lambda p: sort_key(_base_exp(p)[0]))
    reduced = _pivot_reduce(coeff, tuple(new_parts))
    if reduced is not None:
        return reduced
    return _make_term(coeff, tuple(new_parts))


def _pivot_reduce(coeff: Fraction, parts: tuple[Expr, ...]) -> Expr | None:
    """Reduce an explicit power of a symbol against a sum-base factor whose
    exponent has a negative rational part: with S = c*s + rest (s-free rest),
    s*S^e -> (S^(e+1) - rest*S^e)/c.  Keeps rational functions over linear
    sums canonical (e.g. u/(2-u) and -1 + 2/(2-u) coincide)."""
    for p in parts:
        b, e = _base_exp(p)
        if not isinstance(b, Add):
            continue
        r = e.value if isinstance(e, Rat) else _rational_const_part(e)
        if not r < 0:
            continue
        pivot = None
        for t in b.terms:
            mp = monomial_parts(t)
            if len(mp) == 1 and isinstance(mp[0], (Sym, Jet)):
                s = mp[0]
                c = term_coeff(t)
                rest = add(b, mul(Rat(-c), s))
                if not contains_symbol(rest, s.name):
                    # first valid candidate is THE pivot of this sum: a fixed
                    # choice prevents rewriting cycles between two symbols
                    pivot = (s, c, rest)
                    break
        if pivot is None:
            continue
        s, c, rest = pivot
        for q in parts:
            if q is p:
                continue
            qb, qe = _base_exp(q)
            if qb == s and isinstance(qe, Rat) and qe.value.denominator == 1 \
                    and qe.value >= 1:
                others = [x for x in parts if x is not p and x is not q]
                k = qe.value.numerator
                s_rem = power(s, Rat(k - 1))
                term1 = mul(Rat(coeff / c), s_rem, power(b, add(e, ONE)), *others)
                term2 = mul(Rat(-coeff / c), s_rem, rest, p, *others)
                return add(term1, term2)
    return None


def _rational_const_part(e: Expr) -> Fraction:
    """Rational constant summand of a normalized exponent expression."""
    if isinstance(e, Rat):
        return e.value
    if isinstance(e, Add):
        for t in e.terms:
            if isinstance(t, Rat):
                return t.value
    return Fraction(0)


def _int_pow_sum(b: Add, n: int) -> Expr:
    out: Expr = ONE
    for _ in range(n):
        out = mul(out, b)
    return out


def _as_sym_polynomial(b: Expr) -> tuple[Expr, list[Fraction]] | None:
    """(symbol, coefficients c0..cn) when b is a univariate polynomial with
    rational coefficients over a single symbol or jet variable."""
    terms = b.terms if isinstance(b, Add) else (b,)
    sym = None
    coeffs: dict[int, Fraction] = {}
    for t in terms:
        c = term_coeff(t)
        parts = monomial_parts(t)
        if not parts:
            coeffs[0] = coeffs.get(0, Fraction(0)) + c
            continue
        if len(parts) != 1:
            return None
        base, ex = _base_exp(parts[0])
        if not isinstance(base, (Sym, Jet)):
            return None
        if sym is None:
            sym = base
        elif sym != base:
            return None
        if not (isinstance(ex, Rat) and ex.value.denominator == 1 and ex.value > 0):
            return None
        coeffs[int(ex.value)] = coeffs.get(int(ex.value), Fraction(0)) + c
    if sym is None:
        return None
    deg = max(coeffs)
    return sym, [coeffs.get(i, Fraction(0)) for i in range(deg + 1)]


def _frac_root(q: Fraction, m: int) -> Fraction | None:
    """Exact m-th root of a positive rational, or None."""
    if q <= 0:
        return None

    def iroot(n: int) -> int | None:
        r = round(n ** (1.0 / m))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** m == n:
                return cand
        return None

    pn, pd = iroot(q.numerator), iroot(q.denominator)
    if pn is None or pd is None:
        return None
    return Fraction(pn, pd)


def _atomic_sum_power(b: Add, e: Expr) -> Expr:
    """Atomic power of a sum, with perfect-power bases factored so that for
    example (100 - 20u + u^2)^(-1) and (10 - u)^(-2) coincide."""
    for m in (2, 3):
        root = _perfect_root(b, m)
        if root is not None:
            return power(root, mul(e, Rat(m)))
    return Pow(b, e)


def _perfect_root(b: Add, m: int) -> Expr | None:
    """An exact m-th root of a univariate polynomial sum, on the branch that
    is positive near the origin of the chart (positive constant term, or
    positive leading coefficient when the constant vanishes)."""
    poly = _as_sym_polynomial(b)
    if poly is None:
        return None
    sym, coeffs = poly
    deg = len(coeffs) - 1
    if deg % m != 0 or deg == 0:
        return None
    rdeg = deg // m
    lead = _frac_root(abs(coeffs[-1]), m)
    if lead is None or (coeffs[-1] < 0 and m % 2 == 0):
        return None
    if coeffs[-1] < 0:
        lead = -lead
    root = [Fraction(0)] * (rdeg + 1)
    root[rdeg] = lead
    # match coefficients downward: coeff of s^(deg-j) in root^m is linear in
    # root[rdeg-j] with factor m*lead^(m-1)
    for j in range(1, rdeg + 1):
        partial = [Fraction(0)] * (deg + 1)
        _accumulate_power(root, m, partial)
        target = coeffs[deg - j] - partial[deg - j]
        root[rdeg - j] = target / (m * lead ** (m - 1))
    candidate = add(*[mul(Rat(c), power(sym, Rat(i))) for i, c in enumerate(root)])
    check = candidate
    for _ in range(m - 1):
        check = mul(check, candidate)
    if not add(check, mul(Rat(-1), b)).is_zero:
        return None
    const = root[0]
    if const < 0 or (const == 0 and root[-1] < 0):
        if m % 2 == 1:
            return None
        candidate = mul(Rat(-1), candidate)
    return candidate


def _accumulate_power(root: list[Fraction], m: int, out: list[Fraction]) -> None:
    cur = {0: Fraction(1)}
    for _ in range(m):
        nxt: dict[int, Fraction] = {}
        for i, ci in cur.items():
            for j, cj in enumerate(root):
                if cj:
                    nxt[i + j] = nxt.get(i + j, Fraction(0)) + ci * cj
        cur = nxt
    for i, c in cur.items():
        if i < len(out):
            out[i] += c


def _factorize(n: int, bound: int = 100000) -> list[tuple[int, int]]:
    """Trial-division factorization; a large leftover cofactor is kept whole."""
    out = []
    d = 2
    while d * d <= n and d <= bound:
        if n % d == 0:
            m = 0
            while n % d == 0:
                n //= d
                m += 1
            out.append((d, m))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _rat_pow(bq: Fraction, e: Fraction) -> Expr:
    """Canonical form of a rational raised to a non-integer rational power:
    integer parts and perfect roots fold into the coefficient, the remainder
    becomes prime-base atoms with exponents in (-1, 1)."""
    n = math.floor(e)
    frac = e - n
    coeff = bq ** n
    parts: list[Expr] = []
    if bq < 0:
        parts.append(Pow(Rat(-1), Rat(frac)))
    for base, sign in ((abs(bq.numerator), 1), (bq.denominator, -1)):
        if base == 1:
            continue
        for prime, mult in _factorize(base):
            ee = frac * mult * sign
            k = math.floor(ee)
            ff = ee - k
            coeff *= Fraction(prime) ** k
            if ff:
                parts.append(Pow(Rat(prime), Rat(ff)))
    return _make_term(coeff, tuple(sorted(parts, key=lambda p: sort_key(p.base))))


def power(base, exponent) -> Expr:
    b, e = _coerce(base), _coerce(exponent)
    if e.is_zero:
        return ONE
    if e.is_one:
        return b
    if isinstance(b, Rat):
        if b.value == 0:
            if isinstance(e, Rat) and e.value > 0:
                return ZERO
            raise DomainError("zero raised to a non-positive power")
        if b.value == 1:
            return ONE
        if isinstance(e, Rat):
            if e.value.denominator == 1:
                return Rat(b.value ** e.value.numerator)
            return _rat_pow(b.value, e.value)
        return Pow(b, e)
    if isinstance(b, Mul):
        return mul(power(Rat(b.coeff), e),
                   *[power(pb, mul(pe, e)) for pb, pe in map(_base_exp, b.parts)])
    if isinstance(b, Pow):
        return power(b.base, mul(b.exp, e))
    if isinstance(b, ExpF):
        return exp(mul(e, b.arg))
    if isinstance(b, Add):
        content = _content_of(b)
        if content != 1:
            prim = add(*[mul(Rat(1 / content), t) for t in b.terms])
            return mul(power(Rat(content), e), power(prim, e))
        r = _rational_const_part(e)
        n = math.floor(r)
        if isinstance(e, Rat) and e.value.denominator == 1:
            if e.value > 0:
                return _int_pow_sum(b, e.value.numerator)
            return _atomic_sum_power(b, e)
        if n >= 1:
            return mul(_int_pow_sum(b, n), power(b, add(e, Rat(-n))))
        d = (r - n).denominator
        if d > 1:
            root = _perfect_root(b, d)
            if root is not None:
                return power(root, mul(e, Rat(d)))
        return _atomic_sum_power(b, e)
    return Pow(b, e)


def _content_of(e: Expr) -> Fraction:
    """Signed rational content of a normalized expression (first term made
    positive), used to canonicalize exp arguments and sum bases."""
    from math import gcd

    if isinstance(e, Rat):
        return e.value if e.value != 0 else Fraction(1)
    terms = e.terms if isinstance(e, Add) else (e,)
    coeffs = [term_coeff(t) for t in terms]
    num, den = 0, 1
    for c in coeffs:
        num = gcd(num, abs(c.numerator))
        den = den * c.denominator // gcd(den, c.denominator)
    content = Fraction(num, den)
    return -content if coeffs[0] < 0 else content


def exp(arg) -> Expr:
    """exp with canonicalization: ln terms with rational coefficients are
    pulled out as powers (positive chart), and the remaining argument is
    reduced to rational content 1 with the content moved to a power:
    exp(q*ln(y) + c*A + rest) -> y^q * ExpF(A')^c with A' content-free."""
    a = _coerce(arg)
    if a.is_zero:
        return ONE
    terms = a.terms if isinstance(a, Add) else (a,)
    pulled: list[Expr] = []
    kept: list[Expr] = []
    for t in terms:
        c, parts = term_coeff(t), monomial_parts(t)
        if len(parts) == 1 and isinstance(parts[0], LnF):
            pulled.append(power(parts[0].arg, Rat(c)))
        else:
            kept.append(t)
    if pulled:
        rest = add(*kept)
        return mul(*pulled) if rest.is_zero else mul(exp(rest), *pulled)
    content = _content_of(a)
    if content != 1:
        prim = mul(Rat(1 / content), a)
        inner = exp(prim)
        if isinstance(inner, ExpF):
            return Pow(inner, Rat(content))
        return power(inner, Rat(content))
    return ExpF(a)


def ln(arg) -> Expr:
    a = _coerce(arg)
    if a.is_one:
        return ZERO
    if isinstance(a, ExpF):
        return a.arg
    if isinstance(a, Pow) and isinstance(a.base, ExpF):
        return mul(a.exp, a.base.arg)
    return LnF(a)


def normalize(e: Expr) -> Expr:
    """Rebuild through the smart constructors (idempotent on normal forms)."""
    if isinstance(e, (Rat, Sym, Jet)):
        return e
    if isinstance(e, Func):
        return Func(e.name, e.dvars, tuple(normalize(a) for a in e.args), e.params)
    if isinstance(e, ExpF):
        return exp(normalize(e.arg))
    if isinstance(e, LnF):
        return ln(normalize(e.arg))
    if isinstance(e, Pow):
        return power(normalize(e.base), normalize(e.exp))
    if isinstance(e, Mul):
        return mul(Rat(e.coeff), *[normalize(p) for p in e.parts])
    if isinstance(e, Add):
        return add(*[normalize(t) for t in e.terms])
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------

def contains_symbol(e: Expr, name: str) -> bool:
    if isinstance(e, (Sym, Jet)):
        return e.name == name
    if isinstance(e, Rat):
        return False
    if isinstance(e, Func):
        return any(contains_symbol(a, name) for a in e.args)
    if isinstance(e, (ExpF, LnF)):
        return contains_symbol(e.arg, name)
    if isinstance(e, Pow):
        return contains_symbol(e.base, name) or contains_symbol(e.exp, name)
    if isinstance(e, Mul):
        return any(contains_symbol(p, name) for p in e.parts)
    if isinstance(e, Add):
        return any(contains_symbol(t, name) for t in e.terms)
    raise TypeError(type(e))


def contains_function(e: Expr, name: str) -> bool:
    if isinstance(e, Func):
        return e.name == name or any(contains_function(a, name) for a in e.args)
    if isinstance(e, (Rat, Sym, Jet)):
        return False
    if isinstance(e, (ExpF, LnF)):
        return contains_function(e.arg, name)
    if isinstance(e, Pow):
        return contains_function(e.base, name) or contains_function(e.exp, name)
    if isinstance(e, Mul):
        return any(contains_function(p, name) for p in e.parts)
    if isinstance(e, Add):
        return any(contains_function(t, name) for t in e.terms)
    raise TypeError(type(e))


def free_symbols(e: Expr) -> set[str]:
    out: set[str] = set()

    def walk(n: Expr):
        if isinstance(n, (Sym, Jet)):
            out.add(n.name)
        elif isinstance(n, Func):
            for a in n.args:
                walk(a)
        elif isinstance(n, (ExpF, LnF)):
            walk(n.arg)
        elif isinstance(n, Pow):
            walk(n.base)
            walk(n.exp)
        elif isinstance(n, Mul):
            for p in n.parts:
                walk(p)
        elif isinstance(n, Add):
            for t in n.terms:
                walk(t)

    walk(e)
    return out


def function_names(e: Expr) -> set[str]:
    out: set[str] = set()

    def walk(n: Expr):
        if isinstance(n, Func):
            out.add(n.name)
            for a in n.args:
                walk(a)
        elif isinstance(n, (ExpF, LnF)):
            walk(n.arg)
        elif isinstance(n, Pow):
            walk(n.base)
            walk(n.exp)
        elif isinstance(n, Mul):
            for p in n.parts:
                walk(p)
        elif isinstance(n, Add):
            for t in n.terms:
                walk(t)

    walk(e)
    return out


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def diff(e: Expr, v: Expr) -> Expr:
    """Partial derivative with respect to a symbol or jet variable."""
    if not isinstance(v, (Sym, Jet)):
        raise ExprError(f"cannot differentiate with respect to {v!r}")
    return _diff(e, v)


def _diff(e: Expr, v) -> Expr:
    if isinstance(e, Rat):
        return ZERO
    if isinstance(e, (Sym, Jet)):
        return ONE if e == v else ZERO
    if isinstance(e, Func):
        terms = []
        order = {p: i for i, p in enumerate(e.params)}
        for i, p in enumerate(e.params):
            da = _diff(e.args[i], v)
            if da.is_zero:
                continue
            dv = tuple(sorted(e.dvars + (p,), key=lambda d: order[d]))
            terms.append(mul(Func(e.name, dv, e.args, e.params), da))
        return add(*terms) if terms else ZERO
    if isinstance(e, ExpF):
        return mul(e, _diff(e.arg, v))
    if isinstance(e, LnF):
        return mul(_diff(e.arg, v), power(e.arg, Rat(-1)))
    if isinstance(e, Pow):
        t1 = mul(e.exp, power(e.base, add(e.exp, Rat(-1))), _diff(e.base, v))
        de = _diff(e.exp, v)
        if de.is_zero:
            return t1
        return add(t1, mul(power(e.base, e.exp), ln(e.base), de))
    if isinstance(e, Mul):
        terms = []
        for i, p in enumerate(e.parts):
            dp = _diff(p, v)
            if dp.is_zero:
                continue
            rest = e.parts[:i] + e.parts[i + 1:]
            terms.append(mul(Rat(e.coeff), dp, *rest))
        return add(*terms) if terms else ZERO
    if isinstance(e, Add):
        return add(*[_diff(t, v) for t in e.terms])
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def substitute(e: Expr, bindings: Mapping[Expr, Expr]) -> Expr:
    """Simultaneous substitution followed by normalization.

    Keys may be symbols, jet variables, or identity applications of declared
    functions; binding a function rewrites its inert derivatives through the
    chain rule of the bound closed form.
    """
    sym_map: dict[str, Expr] = {}
    jet_map: dict[str, Expr] = {}
    fun_map: dict[str, tuple[Func, Expr]] = {}
    for k, val in bindings.items():
        val = _coerce(val)
        if isinstance(k, Sym):
            sym_map[k.name] = val
        elif isinstance(k, Jet):
            jet_map[k.name] = val
        elif isinstance(k, Func):
            if k.dvars:
                raise SubstitutionError("bind the function itself, not a derivative")
            if contains_function(val, k.name):
                raise SubstitutionError(f"binding of {k.name!r} mentions itself")
            fun_map[k.name] = (k, val)
        else:
            raise SubstitutionError(f"unsupported binding key {k!r}")
    if sym_map:
        _check_surviving_derivative_args(e, sym_map, fun_map)
    return _subst(e, sym_map, jet_map, fun_map)


def _check_surviving_derivative_args(e: Expr, sym_map, fun_map):
    def walk(n: Expr):
        if isinstance(n, Func):
            if n.name not in fun_map:
                for d in n.dvars:
                    if d in sym_map:
                        raise SubstitutionError(
                            f"coordinate {d!r} is bound but appears as a differentiation "
                            f"argument of surviving derivative of {n.name!r}")
            for a in n.args:
                walk(a)
        elif isinstance(n, (ExpF, LnF)):
            walk(n.arg)
        elif isinstance(n, Pow):
            walk(n.base)
            walk(n.exp)
        elif isinstance(n, Mul):
            for p in n.parts:
                walk(p)
        elif isinstance(n, Add):
            for t in n.terms:
                walk(t)

    walk(e)


def _subst(e: Expr, sym_map, jet_map, fun_map) -> Expr:
    if isinstance(e, Rat):
        return e
    if isinstance(e, Sym):
        return sym_map.get(e.name, e)
    if isinstance(e, Jet):
        return jet_map.get(e.name, e)
    if isinstance(e, Func):
        new_args = tuple(_subst(a, sym_map, jet_map, fun_map) for a in e.args)
        if e.name in fun_map:
            _, closed = fun_map[e.name]
            d = closed
            for dv in e.dvars:
                d = _diff(d, Sym(dv))
            return _subst(d, {p: a for p, a in zip(e.params, new_args)}, {}, {})
        return Func(e.name, e.dvars, new_args, e.params)
    if isinstance(e, ExpF):
        return exp(_subst(e.arg, sym_map, jet_map, fun_map))
    if isinstance(e, LnF):
        return ln(_subst(e.arg, sym_map, jet_map, fun_map))
    if isinstance(e, Pow):
        return power(_subst(e.base, sym_map, jet_map, fun_map),
                     _subst(e.exp, sym_map, jet_map, fun_map))
    if isinstance(e, Mul):
        return mul(Rat(e.coeff), *[_subst(p, sym_map, jet_map, fun_map) for p in e.parts])
    if isinstance(e, Add):
        return add(*[_subst(t, sym_map, jet_map, fun_map) for t in e.terms])
    raise TypeError(type(e))


# ---------------------------------------------------------------------------
# Collection by monomials
# ---------------------------------------------------------------------------

def collect(e: Expr, variables: Sequence[Expr]) -> list[tuple[Expr, Expr]]:
    """Split into (monomial, coefficient) pairs over the given atoms.

    Raises NonPolynomialError unless e is polynomial in each variable and the
    coefficients are free of them.  The result reconstructs e exactly.
    """
    var_keys = {sort_key(v): v for v in variables}
    var_names = {v.name for v in variables if isinstance(v, (Sym, Jet))}
    groups: dict[tuple, tuple[tuple[Expr, ...], list[Expr]]] = {}
    terms = e.terms if isinstance(e, Add) else (e,)
    if e.is_zero:
        return []
    for t in terms:
        c, parts = term_coeff(t), monomial_parts(t)
        vparts: list[Expr] = []
        rest: list[Expr] = []
        for p in parts:
            b, ex = _base_exp(p)
            if sort_key(b) in var_keys:
                if not (isinstance(ex, Rat) and ex.value.denominator == 1 and ex.value > 0):
                    raise NonPolynomialError(f"non-polynomial power of {b} in {t}")
                vparts.append(p)
            else:
                for name in var_names:
                    if contains_symbol(p, name):
                        raise NonPolynomialError(f"{name} occurs inside {p}")
                rest.append(p)
        k = _monomial_key(tuple(vparts))
        coeff_term = _make_term(c, tuple(rest))
        if k in groups:
            groups[k][1].append(coeff_term)
        else:
            groups[k] = (tuple(vparts), [coeff_term])
    out = []
    for vparts, coeffs in groups.values():
        mon = _make_term(Fraction(1), vparts)
        out.append((mon, add(*coeffs)))
    out.sort(key=lambda mc: monomial_sort_key(mc[0]))
    return out


def monomial_sort_key(mon: Expr) -> tuple:
    """Graded-descending deterministic order used for determining systems."""
    parts = monomial_parts(mon)
    deg = Fraction(0)
    ranks = []
    for p in parts:
        b, ex = _base_exp(p)
        n = ex.value if isinstance(ex, Rat) else Fraction(1)
        deg += n
        ranks.append(sort_key(b))
    ranks.sort(reverse=True)
    return (-deg, tuple(_Desc(r) for r in ranks))


class _Desc:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return other.k < self.k

    def __eq__(self, other):
        return self.k == other.k


# ---------------------------------------------------------------------------
# Numeric evaluation oracle
# ---------------------------------------------------------------------------

def eval_numeric(e: Expr, assignment: Mapping[str, float | Fraction | int],
                 fn_table: Mapping[str, Expr] | None = None) -> float:
    """Floating-point value of e; every symbol and function must be assigned.

    fn_table maps function names to closed-form expressions in the declared
    argument symbols.  Raises DomainError for ln/power leaving the chart and
    ZeroDivisionError for division by zero.
    """
    fn_table = fn_table or {}
    return _eval(e, {k: float(v) for k, v in assignment.items()}, fn_table)


def _eval(e: Expr, env: dict[str, float], fns: Mapping[str, Expr]) -> float:
    if isinstance(e, Rat):
        return float(e.value)
    if isinstance(e, (Sym, Jet)):
        try:
            return env[e.name]
        except KeyError:
            raise ExprError(f"unassigned symbol {e.name!r}") from None
    if isinstance(e, Func):
        if e.name not in fns:
            raise ExprError(f"unassigned function {e.name!r}")
        closed = fns[e.name]
        for dv in e.dvars:
            closed = _diff(closed, Sym(dv))
        local = dict(env)
        for p, a in zip(e.params, e.args):
            local[p] = _eval(a, env, fns)
        return _eval(closed, local, fns)
    if isinstance(e, ExpF):
        return math.exp(_eval(e.arg, env, fns))
    if isinstance(e, LnF):
        v = _eval(e.arg, env, fns)
        if v <= 0:
            raise DomainError(f"ln of non-positive value {v}")
        return math.log(v)
    if isinstance(e, Pow):
        b = _eval(e.base, env, fns)
        if isinstance(e.exp, Rat) and e.exp.value.denominator == 1:
            n = e.exp.value.numerator
            if b == 0 and n < 0:
                raise ZeroDivisionError("zero base with negative exponent")
            return b ** n
        x = _eval(e.exp, env, fns)
        if b <= 0:
            raise DomainError(f"power of non-positive base {b}")
        return math.exp(x * math.log(b))
    if isinstance(e, Mul):
        v = float(e.coeff)
        for p in e.parts:
            v *= _eval(p, env, fns)
        return v
    if isinstance(e, Add):
        return sum(_eval(t, env, fns) for t in e.terms)
    raise TypeError(type(e))


def as_fraction(e: Expr) -> Fraction:
    if not isinstance(e, Rat):
        raise ExprError(f"not a rational constant: {e}")
    return e.value


def is_rational(e: Expr) -> bool:
    return isinstance(e, Rat)
