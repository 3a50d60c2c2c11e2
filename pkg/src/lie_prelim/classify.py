"""Equivalence-algebra model, adjoint actions and subalgebra normalization.

Elements of the equivalence algebra are stored in the generator basis
a0*d_t + a1*D^x + a2*D^t + a3*d_x + G(h) with

    D^t = t d_t - f d_f - g d_g,   D^x = x d_x + 2 f d_f + 2 g d_g,
    G(h) = h d_u - (h_u f + h_uu g) d_f.

Classification works in the quotient by the lifted kernel <d_t>: the a0
component is carried but ignored (push-forwards of translations and scalings
in t are never applied).  Push-forward steps use the generic change of
coordinates from the fields module; the closed-form tables serve as test
oracles, not as the implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .expr import (Add, Expr, ExprError, Pow, Rat, Sym, add, diff, exp,
                   contains_symbol, ln, mul, power, monomial_parts,
                   sort_key, substitute, term_coeff, ZERO, ONE, _base_exp,
                   ExpF, free_symbols, is_rational, as_fraction)
from .fields import (PointTransformation, VectorField, commutator,
                     pushforward, u_transformation, vector_field,
                     x_scaling, x_translation)

U = Sym("u")


class ClassifyError(ExprError):
    pass


class NotInAlgebraError(ClassifyError):
    """A vector field is not an element of the equivalence algebra."""


class NotASubalgebraError(ClassifyError):
    """The input span is not closed under the commutator."""


class DegenerateSpanError(ClassifyError):
    pass


class FlowCatalogError(ClassifyError):
    """The G(h) parameter lies outside the closed-form flow catalog."""


# ---------------------------------------------------------------------------
# Exact linear algebra over Q
# ---------------------------------------------------------------------------

def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: list[list[Fraction]]) -> int:
    return len(rref(rows)[1])


def solve_exact(a_rows: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """One solution of A x = b, or None if inconsistent."""
    n = len(a_rows[0]) if a_rows else 0
    aug = [list(r) + [bv] for r, bv in zip(a_rows, b)]
    m, pivots = rref(aug)
    for row in m:
        if all(v == 0 for v in row[:-1]) and row[-1] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = m[r][-1]
    return x


# ---------------------------------------------------------------------------
# Function-space vectors (exact): expressions as vectors over term monomials
# ---------------------------------------------------------------------------

def h_vector(h: Expr) -> dict[tuple, Fraction]:
    if h.is_zero:
        return {}
    out: dict[tuple, Fraction] = {}
    terms = h.terms if isinstance(h, Add) else (h,)
    for t in terms:
        c = term_coeff(t)
        out[tuple(sort_key(p) for p in monomial_parts(t))] = c
    return out


def h_matrix(hs: Sequence[Expr]) -> tuple[list[tuple], list[list[Fraction]]]:
    vecs = [h_vector(h) for h in hs]
    keys = sorted({k for v in vecs for k in v})
    return keys, [[v.get(k, Fraction(0)) for k in keys] for v in vecs]


def in_function_span(target: Expr, basis: Sequence[Expr]) -> list[Fraction] | None:
    """Coefficients expressing target as a rational combination of basis
    functions, or None.  All coefficients must be rational."""
    keys, rows = h_matrix(list(basis) + [target])
    a_cols = [[rows[i][j] for i in range(len(basis))] for j in range(len(keys))]
    b = [rows[-1][j] for j in range(len(keys))]
    if not keys:
        return [Fraction(0)] * len(basis)
    return solve_exact(a_cols, b)


def functions_independent(hs: Sequence[Expr]) -> bool:
    nonzero = [h for h in hs if not h.is_zero]
    if len(nonzero) < len(hs):
        return False
    _, rows = h_matrix(hs)
    return rank(rows) == len(hs)


def wronskian(hs: Sequence[Expr]) -> Expr:
    """Wronskian determinant of functions of u (expansion by minors)."""
    n = len(hs)
    grid = []
    for h in hs:
        row = [h]
        for _ in range(n - 1):
            row.append(diff(row[-1], U))
        grid.append(row)

    def det(rows: list[list[Expr]]) -> Expr:
        if len(rows) == 1:
            return rows[0][0]
        terms = []
        for j in range(len(rows)):
            minor = [r[1:] for i, r in enumerate(rows) if i != j]
            sign = Rat(1) if j % 2 == 0 else Rat(-1)
            terms.append(mul(sign, rows[j][0], det(minor)))
        return add(*terms)

    return det(grid)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

def _c(v) -> Expr:
    return v if isinstance(v, Expr) else Rat(v)


@dataclass(frozen=True)
class EquivAlgebraElement:
    a0: Expr  # d_t
    a1: Expr  # D^x
    a2: Expr  # D^t
    a3: Expr  # d_x
    h: Expr   # G(h), h = h(u)

    @staticmethod
    def make(a0=0, a1=0, a2=0, a3=0, h=0) -> "EquivAlgebraElement":
        return EquivAlgebraElement(_c(a0), _c(a1), _c(a2), _c(a3), _c(h))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in (self.a0, self.a1, self.a2, self.a3, self.h))

    @property
    def is_zero_ess(self) -> bool:
        return all(c.is_zero for c in (self.a1, self.a2, self.a3, self.h))

    def scale(self, c) -> "EquivAlgebraElement":
        c = _c(c)
        return EquivAlgebraElement(mul(c, self.a0), mul(c, self.a1), mul(c, self.a2),
                                   mul(c, self.a3), mul(c, self.h))

    def plus(self, other: "EquivAlgebraElement") -> "EquivAlgebraElement":
        return EquivAlgebraElement(add(self.a0, other.a0), add(self.a1, other.a1),
                                   add(self.a2, other.a2), add(self.a3, other.a3),
                                   add(self.h, other.h))

    def drop_kernel(self) -> "EquivAlgebraElement":
        return EquivAlgebraElement(ZERO, self.a1, self.a2, self.a3, self.h)

    def rational_coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (as_fraction(self.a0), as_fraction(self.a1),
                as_fraction(self.a2), as_fraction(self.a3))

    def realize(self) -> VectorField:
        """Vector field on (t, x, u, f, g) with formal symbols f, g."""
        f, g = Sym("f"), Sym("g")
        hu = diff(self.h, U)
        huu = diff(hu, U)
        scale_fg = add(mul(Rat(2), self.a1), mul(Rat(-1), self.a2))
        return vector_field(
            t=add(self.a0, mul(self.a2, Sym("t"))),
            x=add(self.a3, mul(self.a1, Sym("x"))),
            u=self.h,
            f=add(mul(scale_fg, f), mul(Rat(-1), add(mul(hu, f), mul(huu, g)))),
            g=mul(scale_fg, g),
        )

    def __str__(self):
        from .printing import to_text
        bits = []
        for c, name in ((self.a0, "d_t"), (self.a1, "D^x"), (self.a2, "D^t"), (self.a3, "d_x")):
            if not c.is_zero:
                bits.append(f"({to_text(c)})*{name}")
        if not self.h.is_zero:
            bits.append(f"G({to_text(self.h)})")
        return " + ".join(bits) if bits else "0"


def element(a0=0, a1=0, a2=0, a3=0, h=0) -> EquivAlgebraElement:
    return EquivAlgebraElement.make(a0, a1, a2, a3, h)


DT_ELEMENT = element(a2=1)


def bracket(v: EquivAlgebraElement, w: EquivAlgebraElement) -> EquivAlgebraElement:
    """Structure-constant commutator: only [d_x, D^x] = d_x, [d_t, D^t] = d_t
    and [G(h1), G(h2)] = G(h1 h2_u - h2 h1_u) are nonzero."""
    a0 = add(mul(v.a0, w.a2), mul(Rat(-1), mul(w.a0, v.a2)))
    a3 = add(mul(v.a3, w.a1), mul(Rat(-1), mul(w.a3, v.a1)))
    h = add(mul(v.h, diff(w.h, U)), mul(Rat(-1), w.h, diff(v.h, U)))
    return EquivAlgebraElement(a0, ZERO, ZERO, a3, h)


def from_vector_field(vf: VectorField) -> EquivAlgebraElement:
    """Decompose a vector field on (t,x,u,f,g) into the generator basis,
    validating membership in the equivalence algebra."""
    t, x = Sym("t"), Sym("x")
    tau, xi, h = vf.get("t"), vf.get("x"), vf.get("u")
    a2 = diff(tau, t)
    a1 = diff(xi, x)
    a0 = add(tau, mul(Rat(-1), a2, t))
    a3 = add(xi, mul(Rat(-1), a1, x))
    for name, c in (("a0", a0), ("a1", a1), ("a2", a2), ("a3", a3)):
        for s in ("t", "x", "u", "f", "g"):
            if contains_symbol(c, s):
                raise NotInAlgebraError(f"coefficient {name} = {c} is not constant")
    for s in ("t", "x", "f", "g"):
        if contains_symbol(h, s):
            raise NotInAlgebraError(f"u-coefficient depends on {s}")
    cand = EquivAlgebraElement(a0, a1, a2, a3, h)
    expected = cand.realize()
    for coord in ("f", "g"):
        residual = add(vf.get(coord), mul(Rat(-1), expected.get(coord)))
        if not residual.is_zero:
            raise NotInAlgebraError(
                f"{coord}-component off the equivalence algebra by {residual}")
    return cand


# ---------------------------------------------------------------------------
# Flow catalog for G(h)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowFamily:
    kind: str  # 'zero' | 'const' | 'affine' | 'exp' | 'power'
    c: Fraction = Fraction(0)      # overall constant
    b: Fraction = Fraction(0)      # affine slope
    d: Fraction = Fraction(0)      # affine intercept
    gamma: Fraction = Fraction(0)  # exp rate
    beta: Fraction = Fraction(0)   # exp shift: h = c*e^(gamma*u+beta)
    k: Fraction = Fraction(0)      # power exponent: h = c*(u+p)^k
    p: Fraction = Fraction(0)      # power shift


def match_flow_family(h: Expr) -> FlowFamily | None:
    if h.is_zero:
        return FlowFamily("zero")
    if is_rational(h):
        return FlowFamily("const", c=as_fraction(h))
    vec = h_vector(h)
    if any(not isinstance(c, Fraction) for c in vec.values()):
        return None
    # affine: b*u + d
    affine = in_function_span(h, [U, ONE])
    if affine is not None:
        b, d = affine
        if b != 0:
            return FlowFamily("affine", b=b, d=d)
        return FlowFamily("const", c=d)
    terms = h.terms if isinstance(h, Add) else (h,)
    if len(terms) == 1:
        t = terms[0]
        c = term_coeff(t)
        parts = monomial_parts(t)
        if len(parts) == 1:
            base, ex = _base_exp(parts[0])
            if isinstance(base, ExpF) and isinstance(ex, Rat):
                arg = base.arg  # content-free
                lin = in_function_span(arg, [U, ONE])
                if lin is not None and lin[0] != 0:
                    q = ex.value
                    return FlowFamily("exp", c=c, gamma=lin[0] * q, beta=lin[1] * q)
            if base == U and isinstance(ex, Rat) and ex.value not in (0, 1):
                return FlowFamily("power", c=c, k=ex.value, p=Fraction(0))
            if isinstance(base, Add) and isinstance(ex, Rat) and ex.value not in (0, 1):
                shift = in_function_span(base, [U, ONE])
                if shift is not None and shift[0] == 1:
                    return FlowFamily("power", c=c, k=ex.value, p=shift[1])
    # expanded positive integer power c*(u+p)^n
    poly = _as_u_polynomial(h)
    if poly is not None and len(poly) >= 3:
        n = len(poly) - 1
        c = poly[-1]
        if c != 0 and n >= 2:
            p = poly[-2] / (c * n)
            expanded = power(add(U, Rat(p)), Rat(n))
            if add(h, mul(Rat(-c), expanded)).is_zero:
                return FlowFamily("power", c=c, k=Fraction(n), p=p)
    return None


def _as_u_polynomial(h: Expr) -> list[Fraction] | None:
    """Coefficients [c0, c1, ...] when h is a polynomial in u."""
    terms = h.terms if isinstance(h, Add) else (h,)
    coeffs: dict[int, Fraction] = {}
    for t in terms:
        c = term_coeff(t)
        parts = monomial_parts(t)
        if not parts:
            coeffs[0] = coeffs.get(0, Fraction(0)) + c
        elif len(parts) == 1:
            base, ex = _base_exp(parts[0])
            if base == U and isinstance(ex, Rat) and ex.value.denominator == 1 and ex.value > 0:
                coeffs[int(ex.value)] = coeffs.get(int(ex.value), Fraction(0)) + c
            else:
                return None
        else:
            return None
    n = max(coeffs) if coeffs else 0
    return [coeffs.get(i, Fraction(0)) for i in range(n + 1)]


def flow_expr(fam: FlowFamily, eps: Expr) -> Expr:
    """H(u, eps) with H_eps = h(H), H(u, 0) = u."""
    if fam.kind == "zero":
        return U
    if fam.kind == "const":
        return add(U, mul(Rat(fam.c), eps))
    if fam.kind == "affine":
        shift = Rat(fam.d / fam.b)
        return add(mul(add(U, shift), exp(mul(Rat(fam.b), eps))), mul(Rat(-1), shift))
    if fam.kind == "exp":
        g, b, c = Rat(fam.gamma), Rat(fam.beta), Rat(fam.c)
        inner = add(exp(mul(Rat(-fam.gamma), U)),
                    mul(Rat(-fam.gamma * fam.c), exp(b), eps))
        return mul(Rat(-1, 1), power(Rat(fam.gamma), Rat(-1)), ln(inner))
    if fam.kind == "power":
        one_k = Rat(1 - fam.k)
        base = add(power(add(U, Rat(fam.p)), one_k), mul(Rat(fam.c * (1 - fam.k)), eps))
        return add(power(base, power(one_k, Rat(-1))), Rat(-fam.p))
    raise FlowCatalogError(fam.kind)


def normalizing_map(fam: FlowFamily, sigma: int) -> PointTransformation:
    """G(U) push-forward sending G(h) to G(1/sigma): the inverse function
    Ut = U^{-1} solves Ut_u = sigma*h(Ut)."""
    s = Fraction(sigma)
    if fam.kind == "const":
        q = s * fam.c
        ut = mul(Rat(q), U)
        u_expr = mul(power(Rat(q), Rat(-1)), U)
        return u_transformation(u_expr, ut)
    if fam.kind == "affine":
        shift = Rat(fam.d / fam.b)
        sb = s * fam.b
        ut = add(exp(mul(Rat(sb), U)), mul(Rat(-1), shift))
        u_expr = mul(power(Rat(sb), Rat(-1)), ln(add(U, shift)))
        return u_transformation(u_expr, ut)
    if fam.kind == "exp":
        # solve exp(-gamma*Ut) = q exp(beta) u + K; K = 1 keeps the branch on
        # the chart u > 0 when q < 0 (local transformation, cf. pseudo-group)
        q = -fam.gamma * s * fam.c
        K = Fraction(0) if q > 0 else Fraction(1)
        inner = add(mul(Rat(q), exp(Rat(fam.beta)), U), Rat(K))
        ut = mul(Rat(-1), power(Rat(fam.gamma), Rat(-1)), ln(inner))
        u_expr = mul(power(Rat(q), Rat(-1)),
                     add(exp(add(mul(Rat(-fam.gamma), U), Rat(-fam.beta))),
                         mul(Rat(-K), exp(Rat(-fam.beta)))))
        return u_transformation(u_expr, ut)
    if fam.kind == "power":
        # solve (Ut + p)^(1-k) = q u + K; K = 1 keeps the branch on the chart
        # u > 0 when q < 0 (local transformation)
        one_k = Fraction(1) - fam.k
        q = one_k * s * fam.c
        K = Fraction(0) if q > 0 else Fraction(1)
        inner = add(mul(Rat(q), U), Rat(K))
        ut = add(power(inner, power(Rat(one_k), Rat(-1))), Rat(-fam.p))
        u_expr = mul(power(Rat(q), Rat(-1)),
                     add(power(add(U, Rat(fam.p)), Rat(one_k)), Rat(-K)))
        return u_transformation(u_expr, ut)
    raise FlowCatalogError(f"no normalizing map for family {fam.kind!r}")


def numeric_flow(h: Expr, u0: float, eps: float, step: float = 1e-3,
                 fn_table=None) -> float:
    """Fixed-step RK4 integration of H' = h(H) from H(0) = u0 to eps."""
    from .expr import eval_numeric

    def rhs(val: float) -> float:
        return eval_numeric(h, {"u": val}, fn_table or {})

    n = max(1, int(round(abs(eps) / step)))
    dt = eps / n
    y = u0
    for _ in range(n):
        k1 = rhs(y)
        k2 = rhs(y + dt * k1 / 2)
        k3 = rhs(y + dt * k2 / 2)
        k4 = rhs(y + dt * k3)
        y += dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return y


# ---------------------------------------------------------------------------
# Adjoint actions
# ---------------------------------------------------------------------------

def adjoint_series(v: EquivAlgebraElement, w: EquivAlgebraElement, eps: Expr,
                   order: int) -> tuple[EquivAlgebraElement, bool]:
    """Partial sum of Ad(e^(eps v)) w following the Lie series; also reports
    whether the series terminated within the requested order."""
    from math import factorial

    total = w
    cur = w
    for n in range(1, order + 1):
        cur = bracket(v, cur).scale(-1)
        total = total.plus(cur.scale(mul(power(eps, Rat(n)), Rat(Fraction(1, factorial(n))))))
    terminated = bracket(v, cur).is_zero
    return total, terminated


def adjoint_closed(v: EquivAlgebraElement, w: EquivAlgebraElement,
                   eps: Expr) -> EquivAlgebraElement:
    """Closed form of Ad(e^(eps v)) w for v a multiple of a single generator."""
    nonzero = [name for name, c in
               (("a0", v.a0), ("a1", v.a1), ("a2", v.a2), ("a3", v.a3), ("h", v.h))
               if not c.is_zero]
    if len(nonzero) != 1:
        raise ClassifyError("closed-form adjoint requires a single generator kind")
    kind = nonzero[0]
    if kind == "a3":  # translations d_x: D^x-part of w picks up -eps*c*d_x
        shift = mul(Rat(-1), eps, v.a3, w.a1)
        return EquivAlgebraElement(w.a0, w.a1, w.a2, add(w.a3, shift), w.h)
    if kind == "a0":
        shift = mul(Rat(-1), eps, v.a0, w.a2)
        return EquivAlgebraElement(add(w.a0, shift), w.a1, w.a2, w.a3, w.h)
    if kind == "a1":  # scalings D^x: d_x-part scales by e^(eps c)
        factor = exp(mul(eps, v.a1))
        return EquivAlgebraElement(w.a0, w.a1, w.a2, mul(factor, w.a3), w.h)
    if kind == "a2":
        factor = exp(mul(eps, v.a2))
        return EquivAlgebraElement(mul(factor, w.a0), w.a1, w.a2, w.a3, w.h)
    fam = match_flow_family(v.h)
    if fam is None:
        raise FlowCatalogError(f"h = {v.h} outside the flow catalog")
    h_flow = flow_expr(fam, mul(Rat(-1), eps))
    hu = diff(h_flow, U)
    new_h = mul(substitute(w.h, {U: h_flow}), power(hu, Rat(-1)))
    return EquivAlgebraElement(w.a0, w.a1, w.a2, w.a3, new_h)


# ---------------------------------------------------------------------------
# Witnesses and canonical subalgebras
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessStep:
    kind: str  # 'project-kernel' | 'basis' | 'pushforward'
    note: str
    matrix: tuple[tuple[Fraction, ...], ...] | None = None
    transformation: PointTransformation | None = None


@dataclass(frozen=True)
class NormalizationWitness:
    steps: tuple[WitnessStep, ...]
    case_trace: tuple[str, ...] = ()

    def replay(self, basis: Sequence[EquivAlgebraElement]) -> list[EquivAlgebraElement]:
        cur = list(basis)
        for step in self.steps:
            if step.kind == "project-kernel":
                cur = [v.drop_kernel() for v in cur]
            elif step.kind == "basis":
                m = step.matrix
                cur = [_combo(m[i], cur) for i in range(len(m))]
            elif step.kind == "pushforward":
                cur = [element_pushforward(step.transformation, v) for v in cur]
            else:
                raise ClassifyError(f"unknown witness step {step.kind!r}")
        return cur

    def describe(self) -> list[str]:
        return [f"{s.kind}: {s.note}" for s in self.steps]


def _combo(row: Sequence[Fraction], basis: Sequence[EquivAlgebraElement]) -> EquivAlgebraElement:
    out = element()
    for c, v in zip(row, basis):
        if c != 0:
            out = out.plus(v.scale(Rat(c)))
    return out


def element_pushforward(p: PointTransformation,
                        v: EquivAlgebraElement) -> EquivAlgebraElement:
    """Push an element forward through an equivalence transformation using the
    generic vector-field machinery, then decompose back."""
    return from_vector_field(pushforward(p, v.realize()))


@dataclass(frozen=True)
class CanonicalSubalgebra:
    list_id: str
    params: tuple[tuple[str, Fraction], ...]
    basis: tuple[EquivAlgebraElement, ...]

    def param(self, name: str) -> Fraction:
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)

    def __str__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.list_id}" + (f" [{ps}]" if ps else "")


def canonical_1d(list_id: str, a: Fraction = Fraction(0), delta: int = 0,
                 delta_t: int = 0) -> CanonicalSubalgebra:
    a = Fraction(a)
    if list_id == "1D-1":
        basis = (element(a1=1, a2=Rat(a), h=Rat(-delta)),)
        params = (("a", a), ("delta", Fraction(delta)))
    elif list_id == "1D-2":
        basis = (element(a2=1, a3=delta_t, h=Rat(-delta)),)
        params = (("delta_t", Fraction(delta_t)), ("delta", Fraction(delta)))
    elif list_id == "1D-3":
        basis = (element(a3=1, h=Rat(-delta)),)
        params = (("delta", Fraction(delta)),)
    elif list_id == "1D-4":
        basis = (element(h=1),)
        params = ()
    else:
        raise ClassifyError(f"unknown 1D list id {list_id!r}")
    return CanonicalSubalgebra(list_id, params, basis)


def canonical_2d(list_id: str, a: Fraction = Fraction(0), b: Fraction = Fraction(0),
                 delta: int = 0, delta_t: int = 0,
                 delta_hat: Fraction = Fraction(0)) -> CanonicalSubalgebra:
    a, b, delta_hat = Fraction(a), Fraction(b), Fraction(delta_hat)
    if list_id == "2D-1":
        basis = (element(a1=1, h=Rat(-delta_hat)), element(a2=1, h=Rat(-delta)))
        params = (("delta_hat", delta_hat), ("delta", Fraction(delta)))
    elif list_id == "2D-2":
        basis = (element(a1=1, a2=Rat(a), h=U), element(a3=1, h=Rat(-1)))
        params = (("a", a),)
    elif list_id == "2D-3":
        basis = (element(a1=1, a2=Rat(a), h=Rat(-delta)), element(a3=1))
        params = (("a", a), ("delta", Fraction(delta)))
    elif list_id == "2D-4":
        basis = (element(a2=1, h=Rat(-delta)), element(a3=1, h=Rat(-delta_t)))
        params = (("delta", Fraction(delta)), ("delta_t", Fraction(delta_t)))
    elif list_id == "2D-5":
        basis = (element(a1=1, a2=Rat(a), h=mul(Rat(b), U)), element(h=1))
        params = (("a", a), ("b", b))
    elif list_id == "2D-6":
        basis = (element(a2=1, a3=Rat(-delta), h=mul(Rat(b), U)), element(h=1))
        params = (("delta", Fraction(delta)), ("b", b))
    elif list_id == "2D-7":
        basis = (element(a3=1, h=mul(Rat(-delta), U)), element(h=1))
        params = (("delta", Fraction(delta)),)
    elif list_id == "2D-8":
        basis = (element(h=1), element(h=U))
        params = ()
    else:
        raise ClassifyError(f"unknown 2D list id {list_id!r}")
    return CanonicalSubalgebra(list_id, params, basis)


def theorem5_subalgebra(list_id: str, a: Fraction = Fraction(0),
                        b: Fraction = Fraction(0), delta: int = 1) -> CanonicalSubalgebra:
    a, b = Fraction(a), Fraction(b)
    if list_id == "HD-1":
        basis = (element(a1=1, h=2), element(a3=1), element(a2=1, h=Rat(-1)))
        params = ()
    elif list_id == "HD-2":
        basis = (element(a1=1, a2=2, h=mul(Rat(b), U)), element(a3=1), element(h=1))
        params = (("b", b),)
    elif list_id == "HD-3":
        basis = (element(a1=1, a2=Rat(a)), element(h=1), element(h=U))
        params = (("a", a),)
    elif list_id == "HD-4":
        basis = (element(a3=1, a2=Rat(-delta)), element(h=1), element(h=U))
        params = (("delta", Fraction(delta)),)
    elif list_id == "HD-5":
        basis = (element(a1=1, a2=2), element(a3=1), element(h=1), element(h=U))
        params = ()
    else:
        raise ClassifyError(f"unknown appropriate-subalgebra id {list_id!r}")
    return CanonicalSubalgebra(list_id, params, basis)


# ---------------------------------------------------------------------------
# Span and closure tests (essential quotient)
# ---------------------------------------------------------------------------

PARAMETER_INSTANCES = (Fraction(1), Fraction(-2), Fraction(3, 2))


def _free_parameters(basis: Sequence[EquivAlgebraElement]) -> tuple[str, ...]:
    names: set[str] = set()
    for v in basis:
        for c in (v.a0, v.a1, v.a2, v.a3, v.h):
            names |= free_symbols(c)
    names.discard("u")
    return tuple(sorted(names))


def _instantiate(basis: Sequence[EquivAlgebraElement], params: Sequence[str],
                 value: Fraction) -> list[EquivAlgebraElement]:
    bind = {Sym(p): Rat(value) for p in params}
    return [EquivAlgebraElement(substitute(v.a0, bind), substitute(v.a1, bind),
                                substitute(v.a2, bind), substitute(v.a3, bind),
                                substitute(v.h, bind)) for v in basis]


def _with_parameter_samples(basis, fn):
    """Run an exact-rational predicate on the basis itself, or on rational
    instantiations of any free symbolic parameters (generic-value check)."""
    params = _free_parameters(basis)
    if not params:
        return fn(basis)
    results = [fn(_instantiate(basis, params, val)) for val in PARAMETER_INSTANCES]
    first = results[0]
    if any(r != first for r in results[1:]):
        raise ClassifyError(
            f"predicate is unstable across parameter samples {params}")
    return first


def _ess_vectors(basis: Sequence[EquivAlgebraElement]):
    """Vectors (a1, a2, a3 | h-monomials) over Q for the essential quotient."""
    for v in basis:
        for c in (v.a1, v.a2, v.a3):
            as_fraction(c)
    keys, hrows = h_matrix([v.h for v in basis])
    rows = []
    for v, hr in zip(basis, hrows):
        rows.append([as_fraction(v.a1), as_fraction(v.a2), as_fraction(v.a3)] + hr)
    return rows


def in_span(target: EquivAlgebraElement,
            basis: Sequence[EquivAlgebraElement]) -> list[Fraction] | None:
    """Coefficients over Q expressing target in span(basis), modulo d_t."""
    all_rows = _ess_vectors(list(basis) + [target])
    a_cols = [[all_rows[i][j] for i in range(len(basis))] for j in range(len(all_rows[0]))]
    b = [all_rows[-1][j] for j in range(len(all_rows[0]))]
    return solve_exact(a_cols, b)


def is_closed(basis: Sequence[EquivAlgebraElement]) -> bool:
    def check(b):
        for i, v in enumerate(b):
            for w in b[i + 1:]:
                if in_span(bracket(v, w), b) is None:
                    return False
        return True

    return _with_parameter_samples(list(basis), check)


def span_dimension(basis: Sequence[EquivAlgebraElement]) -> int:
    return _with_parameter_samples(list(basis), lambda b: rank(_ess_vectors(b)))


def m_value(basis: Sequence[EquivAlgebraElement]) -> int:
    """dim(span ∩ <D^t, G(h)>): elements with zero d_t, D^x and d_x parts
    (the d_t component is ignored throughout the classification)."""

    def compute(b):
        rows = _ess_vectors(b)
        dim = rank(rows)
        proj = [[r[0], r[2]] for r in rows]  # a1 and a3 columns
        return dim - rank(proj)

    return _with_parameter_samples(list(basis), compute)


# ---------------------------------------------------------------------------
# Normalization of 1D subalgebras (optimal list of Theorem on 1D subalgebras)
# ---------------------------------------------------------------------------

def _flow_step(basis: list[EquivAlgebraElement], index: int, sigma: int,
               steps: list[WitnessStep], trace: list[str]) -> list[EquivAlgebraElement]:
    """Push-forward G(U) normalizing basis[index].h to 1/sigma."""
    fam = match_flow_family(basis[index].h)
    if fam is None or fam.kind == "zero":
        raise FlowCatalogError(f"h = {basis[index].h} outside the flow catalog")
    p = normalizing_map(fam, sigma)
    new_basis = [element_pushforward(p, v) for v in basis]
    target = Rat(Fraction(1, sigma))
    if not add(new_basis[index].h, mul(Rat(-1), target)).is_zero:
        raise ClassifyError(
            f"flow normalization failed: got h = {new_basis[index].h}")
    steps.append(WitnessStep("pushforward", f"G_*(U) with U = {p.rule('u')}",
                             transformation=p))
    trace.append(f"h[{index}] -> {target}")
    return new_basis


def normalize_1d(v: EquivAlgebraElement) -> tuple[CanonicalSubalgebra, NormalizationWitness]:
    steps: list[WitnessStep] = []
    trace: list[str] = []
    if not v.a0.is_zero:
        steps.append(WitnessStep("project-kernel", "drop the d_t component (Remark on the kernel ideal)"))
    w = v.drop_kernel()
    if w.is_zero_ess:
        raise DegenerateSpanError("zero element (modulo the kernel)")
    a1, a2, a3 = as_fraction(w.a1), as_fraction(w.a2), as_fraction(w.a3)
    basis = [w]

    def scale_step(c: Fraction, note: str):
        nonlocal basis
        basis = [basis[0].scale(Rat(c))]
        steps.append(WitnessStep("basis", note, matrix=((c,),)))

    if a1 != 0:
        trace.append("case a1 != 0 -> 1D-1")
        if a1 != 1:
            scale_step(Fraction(1, 1) / a1, f"scale by 1/a1 = {Fraction(1,1)/a1}")
        a3p = as_fraction(basis[0].a3)
        if a3p != 0:
            p = x_translation(Rat(a3p))
            basis = [element_pushforward(p, basis[0])]
            steps.append(WitnessStep("pushforward", f"T^x_*({a3p}) removes the d_x part",
                                     transformation=p))
        delta = 0
        if not basis[0].h.is_zero:
            basis = _flow_step(basis, 0, -1, steps, trace)
            delta = 1
        target = canonical_1d("1D-1", a=as_fraction(basis[0].a2), delta=delta)
    elif a2 != 0:
        trace.append("case a1 = 0, a2 != 0 -> 1D-2")
        if a2 != 1:
            scale_step(Fraction(1, 1) / a2, f"scale by 1/a2 = {Fraction(1,1)/a2}")
        delta = 0
        if not basis[0].h.is_zero:
            basis = _flow_step(basis, 0, -1, steps, trace)
            delta = 1
        a3p = as_fraction(basis[0].a3)
        delta_t = 0
        if a3p != 0:
            p = x_scaling(Rat(Fraction(1, 1) / a3p))
            basis = [element_pushforward(p, basis[0])]
            steps.append(WitnessStep("pushforward", f"D^x_*({Fraction(1,1)/a3p}) rescales the d_x part",
                                     transformation=p))
            delta_t = 1
        target = canonical_1d("1D-2", delta=delta, delta_t=delta_t)
    elif a3 != 0:
        trace.append("case a1 = a2 = 0, a3 != 0 -> 1D-3")
        if a3 != 1:
            scale_step(Fraction(1, 1) / a3, f"scale by 1/a3 = {Fraction(1,1)/a3}")
        delta = 0
        if not basis[0].h.is_zero:
            basis = _flow_step(basis, 0, -1, steps, trace)
            delta = 1
        target = canonical_1d("1D-3", delta=delta)
    else:
        trace.append("case a1 = a2 = a3 = 0 -> 1D-4")
        basis = _flow_step(basis, 0, -1, steps, trace)
        scale_step(Fraction(-1), "rescale G(-1) to G(1)")
        target = canonical_1d("1D-4")

    witness = NormalizationWitness(tuple(steps), tuple(trace))
    _assert_witness(witness, [v], target)
    return target, witness


def _assert_witness(witness: NormalizationWitness,
                    basis: Sequence[EquivAlgebraElement],
                    target: CanonicalSubalgebra) -> None:
    replayed = witness.replay(basis)
    for got, want in zip(replayed, target.basis):
        deltas = [add(g, mul(Rat(-1), w)) for g, w in
                  ((got.a0, want.a0), (got.a1, want.a1), (got.a2, want.a2),
                   (got.a3, want.a3), (got.h, want.h))]
        if any(not d.is_zero for d in deltas[1:]):  # a0 ignored
            raise ClassifyError(
                f"witness replay mismatch: got {got}, want {want}")


# ---------------------------------------------------------------------------
# Normalization of 2D subalgebras
# ---------------------------------------------------------------------------

def normalize_2d(v1: EquivAlgebraElement, v2: EquivAlgebraElement
                 ) -> tuple[CanonicalSubalgebra, NormalizationWitness]:
    steps: list[WitnessStep] = []
    trace: list[str] = []
    if not (v1.a0.is_zero and v2.a0.is_zero):
        steps.append(WitnessStep("project-kernel", "drop the d_t components"))
    basis = [v1.drop_kernel(), v2.drop_kernel()]
    if span_dimension(basis) != 2:
        raise DegenerateSpanError("the two elements do not span a 2-dimensional space")
    if in_span(bracket(basis[0], basis[1]), basis) is None:
        raise NotASubalgebraError("[v1, v2] is not in span{v1, v2}")

    def basis_step(m: tuple[tuple[Fraction, ...], ...], note: str):
        basis[:] = [_combo(row, basis) for row in m]
        steps.append(WitnessStep("basis", note, matrix=m))

    def push_step(p: PointTransformation, note: str):
        basis[:] = [element_pushforward(p, v) for v in basis]
        steps.append(WitnessStep("pushforward", note, transformation=p))

    a = [[as_fraction(basis[i].a1), as_fraction(basis[i].a2), as_fraction(basis[i].a3)]
         for i in range(2)]

    def det(c1: int, c2: int) -> Fraction:
        return a[0][c1] * a[1][c2] - a[0][c2] * a[1][c1]

    if rank(a) == 2:
        if det(0, 1) != 0:
            trace.append("rank 2, subcase (a): det A_12 != 0")
            target = _case_1a(basis, basis_step, push_step, steps, trace, det(0, 1))
        elif det(0, 2) != 0:
            trace.append("rank 2, subcase (b): det A_12 = 0, det A_13 != 0")
            target = _case_1b(basis, basis_step, push_step, steps, trace, det(0, 2))
        else:
            trace.append("rank 2, subcase (c): det A_12 = det A_13 = 0, det A_23 != 0")
            target = _case_1c(basis, basis_step, push_step, steps, trace, det(1, 2))
    else:
        trace.append("rank <= 1")
        target = _case_2(basis, basis_step, push_step, steps, trace, a)

    witness = NormalizationWitness(tuple(steps), tuple(trace))
    _assert_witness(witness, [v1, v2], target)
    return target, witness


def _rows_a(basis):
    return [[as_fraction(v.a1), as_fraction(v.a2), as_fraction(v.a3)] for v in basis]


def _inv2(m: list[list[Fraction]]) -> tuple[tuple[Fraction, ...], ...]:
    d = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return ((m[1][1] / d, -m[0][1] / d), (-m[1][0] / d, m[0][0] / d))


def _const_fraction(h: Expr) -> Fraction:
    if h.is_zero:
        return Fraction(0)
    if not is_rational(h):
        raise ClassifyError(f"expected a constant h, got {h}")
    return as_fraction(h)


def _case_1a(basis, basis_step, push_step, steps, trace, d12):
    a = _rows_a(basis)
    m = _inv2([[a[0][0], a[0][1]], [a[1][0], a[1][1]]])
    basis_step(m, "change of basis: A_12 -> identity")
    if not basis[1].a3.is_zero or not bracket(basis[0], basis[1]).is_zero_ess:
        raise NotASubalgebraError("subcase (a) requires commuting D^x- and D^t-elements")
    a31 = as_fraction(basis[0].a3)
    if a31 != 0:
        push_step(x_translation(Rat(a31)), f"T^x_*({a31}) removes the d_x part of v1")
    delta = 0
    if not basis[1].h.is_zero:
        basis[:] = _flow_step(basis, 1, -1, steps, trace)
        delta = 1
        delta_hat = -_const_fraction(basis[0].h)
    else:
        delta_hat = Fraction(0)
        if not basis[0].h.is_zero:
            basis[:] = _flow_step(basis, 0, -1, steps, trace)
            delta_hat = Fraction(1)
    return canonical_2d("2D-1", delta=delta, delta_hat=delta_hat)


def _case_1b(basis, basis_step, push_step, steps, trace, d13):
    a = _rows_a(basis)
    m = _inv2([[a[0][0], a[0][2]], [a[1][0], a[1][2]]])
    basis_step(m, "change of basis: A_13 -> identity")
    if not basis[1].a2.is_zero:
        raise NotASubalgebraError("subcase (b) requires [v1, v2] = -v2, so v2 has no D^t part")
    a_param = as_fraction(basis[0].a2)
    if not basis[1].h.is_zero:
        basis[:] = _flow_step(basis, 1, -1, steps, trace)
        hv = in_function_span(basis[0].h, [U, ONE])
        if hv is None or hv[0] != 1:
            raise NotASubalgebraError("closure forces h1 = u + const in subcase (b)")
        c = hv[1]
        if c != 0:
            basis_step(((Fraction(1), c), (Fraction(0), Fraction(1))),
                       f"add {c}*v2 to v1 to remove the constant part of h1")
            push_step(x_translation(Rat(c)), f"T^x_*({c}) removes the induced d_x part")
        return canonical_2d("2D-2", a=a_param)
    delta = 0
    if not basis[0].h.is_zero:
        basis[:] = _flow_step(basis, 0, -1, steps, trace)
        delta = 1
    return canonical_2d("2D-3", a=a_param, delta=delta)


def _case_1c(basis, basis_step, push_step, steps, trace, d23):
    a = _rows_a(basis)
    m = _inv2([[a[0][1], a[0][2]], [a[1][1], a[1][2]]])
    basis_step(m, "change of basis: A_23 -> identity")
    if as_fraction(basis[0].a1) != 0 or as_fraction(basis[1].a1) != 0:
        raise NotASubalgebraError("subcase (c) requires no D^x components")
    delta = 0
    if not basis[0].h.is_zero:
        basis[:] = _flow_step(basis, 0, -1, steps, trace)
        delta = 1
    delta_t = 0
    h2 = basis[1].h
    if not h2.is_zero:
        if delta == 1:
            c = -_const_fraction(h2)  # closure makes h2 constant here
            lam = Fraction(1) / c
            basis_step(((Fraction(1), Fraction(0)), (Fraction(0), lam)),
                       f"rescale v2 by {lam}")
            push_step(x_scaling(Rat(Fraction(1) / lam)),
                      f"D^x_*({Fraction(1)/lam}) restores the d_x part of v2")
            delta_t = 1
        else:
            basis[:] = _flow_step(basis, 1, -1, steps, trace)
            delta_t = 1
    return canonical_2d("2D-4", delta=delta, delta_t=delta_t)


def _case_2(basis, basis_step, push_step, steps, trace, a):
    if any(x != 0 for x in a[0]) or any(x != 0 for x in a[1]):
        # concentrate the a-part in v1
        if all(x == 0 for x in a[0]):
            basis_step(((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))),
                       "swap v1 and v2")
            a = _rows_a(basis)
        col = next(j for j in range(3) if a[0][j] != 0)
        lam = a[1][col] / a[0][col]
        if any(a[1][j] != lam * a[0][j] for j in range(3)):
            raise ClassifyError("rank computation mismatch")
        if lam != 0:
            basis_step(((Fraction(1), Fraction(0)), (-lam, Fraction(1))),
                       f"subtract {lam}*v1 from v2")
        if basis[1].h.is_zero:
            raise DegenerateSpanError("v2 vanishes after the basis change")
        trace.append("rank 1: v2 is a pure G-element")
        basis[:] = _flow_step(basis, 1, 1, steps, trace)
        hv = in_function_span(basis[0].h, [U, ONE])
        if hv is None:
            raise NotASubalgebraError("closure forces an affine h1 over G(1)")
        b_param, d = hv
        if d != 0:
            basis_step(((Fraction(1), -d), (Fraction(0), Fraction(1))),
                       f"subtract {d}*v2 from v1")
        a = _rows_a(basis)
        if a[0][0] != 0:
            trace.append("subcase (a) -> 2D-5")
            s = Fraction(1) / a[0][0]
            if s != 1:
                basis_step(((s, Fraction(0)), (Fraction(0), Fraction(1))), f"scale v1 by {s}")
            a3p = as_fraction(basis[0].a3)
            if a3p != 0:
                push_step(x_translation(Rat(a3p)), f"T^x_*({a3p}) removes the d_x part")
            hv = in_function_span(basis[0].h, [U, ONE])
            return canonical_2d("2D-5", a=as_fraction(basis[0].a2), b=hv[0])
        if a[0][1] != 0:
            trace.append("subcase (b) -> 2D-6")
            s = Fraction(1) / a[0][1]
            if s != 1:
                basis_step(((s, Fraction(0)), (Fraction(0), Fraction(1))), f"scale v1 by {s}")
            a3p = as_fraction(basis[0].a3)
            delta = 0
            if a3p != 0:
                push_step(x_scaling(Rat(Fraction(-1) / a3p)),
                          f"D^x_*({Fraction(-1)/a3p}) sets the d_x part to -1")
                delta = 1
            hv = in_function_span(basis[0].h, [U, ONE])
            return canonical_2d("2D-6", delta=delta, b=hv[0])
        trace.append("subcase (c) -> 2D-7")
        s = Fraction(1) / a[0][2]
        if s != 1:
            basis_step(((s, Fraction(0)), (Fraction(0), Fraction(1))), f"scale v1 by {s}")
        hv = in_function_span(basis[0].h, [U, ONE])
        b_param = hv[0]
        delta = 0
        if b_param != 0:
            lam = Fraction(-1) / b_param
            basis_step(((lam, Fraction(0)), (Fraction(0), Fraction(1))),
                       f"scale v1 by {lam}")
            push_step(x_scaling(Rat(Fraction(1) / lam)),
                      f"D^x_*({Fraction(1)/lam}) restores the d_x part")
            delta = 1
        return canonical_2d("2D-7", delta=delta)
    trace.append("subcase (d): two pure G-elements -> 2D-8")
    return _case_2d_pure_g(basis, basis_step, push_step, steps, trace)


def _rref_transform_2x2(h1: Expr, h2: Expr) -> tuple[tuple[Fraction, ...], ...] | None:
    """Basis change echelonizing the pair of h-vectors, or None if already
    echelonized (each element a single monomial family up to scale)."""
    keys, rows = h_matrix([h1, h2])
    aug = [rows[0] + [Fraction(1), Fraction(0)],
           rows[1] + [Fraction(0), Fraction(1)]]
    m, _ = rref(aug)
    t = ((m[0][-2], m[0][-1]), (m[1][-2], m[1][-1]))
    if t == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))):
        return None
    return t


def _case_2d_pure_g(basis, basis_step, push_step, steps, trace):
    for _ in range(4):
        # determine whether span{h1, h2} = span{1, u}
        combo1 = in_function_span(ONE, [basis[0].h, basis[1].h])
        combou = in_function_span(U, [basis[0].h, basis[1].h])
        if combo1 is not None and combou is not None:
            basis_step((tuple(combo1), tuple(combou)),
                       "change of basis to (G(1), G(u))")
            return canonical_2d("2D-8")
        # separate the monomial families, then flow-normalize the non-affine
        # echelon leader to the constant function
        t = _rref_transform_2x2(basis[0].h, basis[1].h)
        if t is not None:
            basis_step(t, "echelonize the pair of G-parameters")
        flowed = False
        for idx in (1, 0):
            fam = match_flow_family(basis[idx].h)
            if fam is not None and fam.kind in ("exp", "power"):
                basis[:] = _flow_step(basis, idx, 1, steps, trace)
                flowed = True
                break
        if not flowed and t is None:
            raise FlowCatalogError(
                f"cannot normalize pure-G pair ({basis[0].h}, {basis[1].h})")
    raise ClassifyError("pure-G normalization did not converge")


# ---------------------------------------------------------------------------
# Appropriateness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AppropriatenessReport:
    closed: bool
    dim: int
    dt_in_span: bool
    m: int
    pure_g_intersection: bool | None
    isc_compatible: bool | None
    notes: tuple[str, ...]

    @property
    def passes(self) -> bool:
        ok = self.closed and not self.dt_in_span and self.m <= 2 and self.dim <= 4
        if self.pure_g_intersection is not None:
            ok = ok and self.pure_g_intersection
        if self.isc_compatible is not None:
            ok = ok and self.isc_compatible
        return ok


def appropriateness(basis: Sequence[EquivAlgebraElement],
                    candidate: tuple[Expr, Expr] | None = None,
                    cls=None) -> AppropriatenessReport:
    """Necessary conditions for a subalgebra to induce a symmetry extension:
    D^t not contained, at most a 2-dimensional intersection with <D^t, G(h)>,
    dimension at most 4; optionally checks a candidate (f0, g0) against the
    invariant-surface system."""
    notes: list[str] = []
    closed = is_closed(basis)
    if not closed:
        notes.append("not closed under the commutator")
    dim = span_dimension(basis)
    dt = _with_parameter_samples(
        list(basis), lambda b: in_span(DT_ELEMENT, b) is not None)
    if dt:
        notes.append("contains D^t: the invariant-surface condition forces g = 0")
    m = m_value(basis)
    if m > 2:
        notes.append(f"m = {m} > 2 (Wronskian obstruction)")
    if dim > 4:
        notes.append(f"dimension {dim} > 4")
    pure_g: bool | None = None
    if m == 2:
        pure_g = _with_parameter_samples(list(basis), _intersection_is_pure_g)
        if not pure_g:
            notes.append("intersection with <D^t, G(h)> is not spanned by pure G-elements")
    isc_ok: bool | None = None
    if candidate is not None:
        from .verify import isc_check
        if cls is None:
            raise ClassifyError("candidate check requires the equation class")
        result = isc_check(basis, candidate[0], candidate[1], cls)
        isc_ok = result.passed
        if not isc_ok:
            notes.append("candidate (f, g) fails the invariant-surface system")
    return AppropriatenessReport(closed, dim, dt, m, pure_g, isc_ok, tuple(notes))


def _intersection_is_pure_g(basis: Sequence[EquivAlgebraElement]) -> bool:
    """For m = 2: the intersection with <D^t, G(h)> contains no D^t part."""
    rows = _ess_vectors(basis)
    n = len(rows)
    # combinations with zero D^x and d_x parts: nullspace of the projection
    a_cols = [[rows[i][0] for i in range(n)], [rows[i][2] for i in range(n)]]
    for lam in _nullspace(a_cols):
        combo = element()
        for c, v in zip(lam, basis):
            combo = combo.plus(v.scale(Rat(c)))
        if not combo.a2.is_zero:
            return False
    return True


def _nullspace(a_rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a_rows[0]) if a_rows else 0
    m, pivots = rref(a_rows)
    free = [j for j in range(n) if j not in pivots]
    out = []
    for fj in free:
        vec = [Fraction(0)] * n
        vec[fj] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -m[r][fj]
        out.append(vec)
    return out
