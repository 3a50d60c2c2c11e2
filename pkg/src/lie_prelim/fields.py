"""Vector fields, prolongation, commutators and point transformations.

Base vector fields live on (t, x, u).  Equivalence vector fields carry
additional coefficients along the arbitrary-element directions; inside those
coefficients the arbitrary elements are *formal symbols* (Sym('f'), Sym('g')),
because on the joint space they are coordinates, not functions of (x, u).

Point transformations map coordinates to expressions in the source
coordinates; catalog transformations carry exact inverses, so composition,
inversion and push-forward are exact symbolic operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .expr import (Expr, ExprError, Jet, Rat, Sym, add, diff, exp, jet, ln,
                   mul, power, substitute, ZERO, ONE)
from .jet import JS, EquationClass, JetSpace, total_derivative

BASE_COORDS = ("t", "x", "u")


@dataclass(frozen=True)
class VectorField:
    """Coefficients per coordinate; missing coordinates mean zero."""

    coeffs: tuple[tuple[str, Expr], ...]

    @staticmethod
    def make(mapping: Mapping[str, Expr | int]) -> "VectorField":
        items = []
        for k, v in mapping.items():
            e = v if isinstance(v, Expr) else Rat(v)
            if not e.is_zero:
                items.append((k, e))
        items.sort(key=lambda kv: kv[0])
        return VectorField(tuple(items))

    def get(self, coord: str) -> Expr:
        for k, v in self.coeffs:
            if k == coord:
                return v
        return ZERO

    @property
    def coords(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict(self, coords: Sequence[str]) -> "VectorField":
        return VectorField.make({k: v for k, v in self.coeffs if k in coords})

    def scale(self, c: Expr | int | Fraction) -> "VectorField":
        c = c if isinstance(c, Expr) else Rat(c)
        return VectorField.make({k: mul(c, v) for k, v in self.coeffs})

    def plus(self, other: "VectorField") -> "VectorField":
        names = set(self.coords) | set(other.coords)
        return VectorField.make({k: add(self.get(k), other.get(k)) for k in names})

    def __str__(self):
        from .printing import to_text
        if not self.coeffs:
            return "0"
        return " + ".join(f"({to_text(v)})*d_{k}" for k, v in self.coeffs)


def vector_field(**coeffs) -> VectorField:
    return VectorField.make(coeffs)


def commutator(v: VectorField, w: VectorField,
               coords: Sequence[str] | None = None) -> VectorField:
    """[v, w] = v(w) - w(v) componentwise."""
    if coords is None:
        coords = sorted(set(v.coords) | set(w.coords))
    out = {}
    for i in coords:
        terms = []
        for j in coords:
            vj, wj = v.get(j), w.get(j)
            if not vj.is_zero:
                terms.append(mul(vj, diff(w.get(i), Sym(j))))
            if not wj.is_zero:
                terms.append(mul(Rat(-1), wj, diff(v.get(i), Sym(j))))
        out[i] = add(*terms) if terms else ZERO
    return VectorField.make(out)


# ---------------------------------------------------------------------------
# Prolongation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    eta_t: Expr
    eta_x: Expr
    eta_xx: Expr


def prolong(vf: VectorField, js: JetSpace = JS) -> ProlongedField:
    """Second prolongation coefficients eta^t, eta^x, eta^xx."""
    tau, xi, eta = vf.get("t"), vf.get("x"), vf.get("u")
    w = add(eta, mul(Rat(-1), tau, Jet("u_t")), mul(Rat(-1), xi, Jet("u_x")))
    eta_t = add(total_derivative(w, "t", js), mul(tau, Jet("u_tt")), mul(xi, Jet("u_tx")))
    eta_x = add(total_derivative(w, "x", js), mul(tau, Jet("u_tx")), mul(xi, Jet("u_xx")))
    dxx = total_derivative(total_derivative(w, "x", js), "x", js)
    eta_xx = add(dxx, mul(tau, Jet("u_txx")), mul(xi, Jet("u_xxx")))
    return ProlongedField(vf, eta_t, eta_x, eta_xx)


def apply_prolonged(pf: ProlongedField, e: Expr) -> Expr:
    """Directional derivative Q^(2) e (plus arbitrary-element directions when
    the base field carries them)."""
    for high in ("u_tt", "u_txx", "u_xxx"):
        if not diff(e, Jet(high)).is_zero:
            raise ExprError(f"apply: expression involves {high}, beyond the "
                            "computed second-prolongation coefficients")
    terms = []
    for coord, coeff in pf.base.coeffs:
        if coord in BASE_COORDS:
            terms.append(mul(coeff, diff(e, Sym(coord))))
        else:
            terms.append(mul(coeff, diff(e, Sym(coord))))
    for co, name in ((pf.eta_t, "u_t"), (pf.eta_x, "u_x"), (pf.eta_xx, "u_xx")):
        d = diff(e, Jet(name))
        if not d.is_zero:
            terms.append(mul(co, d))
    d_tx = diff(e, Jet("u_tx"))
    if not d_tx.is_zero:
        raise ExprError("apply: expression involves u_tx, beyond the computed "
                        "second-prolongation coefficients")
    return add(*terms) if terms else ZERO


def equivalence_prolongation(vf: VectorField, cls: EquationClass) -> dict[tuple[str, str], Expr]:
    """First-prolongation coefficients of the arbitrary-element directions
    along the auxiliary-constrained coordinates, reduced on the auxiliary
    manifold (all元 derivatives of the elements in the constrained direction
    vanish, so the total derivative collapses to the partial one).

    Returns {(element, direction): coefficient}; e.g. for the diffusion class
    {('f','t'): phi_t - xi_t f_x - eta_t f_u, ...} with formal symbols f_x etc.
    """
    out = {}
    for name, direction in cls.auxiliary:
        sig = cls.signature(name)
        phi = vf.get(name)
        terms = [diff(phi, Sym(direction))]
        for w in sig.args:
            cw = vf.get(w) if w in BASE_COORDS else ZERO
            dcw = diff(vf.get(w), Sym(direction))
            if not dcw.is_zero:
                terms.append(mul(Rat(-1), dcw, Sym(f"{name}_{w}")))
        out[(name, direction)] = add(*terms)
    return out


# ---------------------------------------------------------------------------
# Point transformations
# ---------------------------------------------------------------------------

class TransformationError(ExprError):
    pass


@dataclass(frozen=True)
class PointTransformation:
    """Coordinate map; rules give target coordinates as expressions in the
    source coordinates (same names).  inverse_rules, when present, give the
    source coordinates as expressions in the target coordinates."""

    coords: tuple[str, ...]
    rules: tuple[tuple[str, Expr], ...]
    inverse_rules: tuple[tuple[str, Expr], ...] | None = None
    constraints: tuple[Expr, ...] = ()

    @staticmethod
    def make(coords: Sequence[str], rules: Mapping[str, Expr],
             inverse: Mapping[str, Expr] | None = None,
             constraints: Sequence[Expr] = ()) -> "PointTransformation":
        co = tuple(coords)
        r = tuple((c, rules.get(c, Sym(c))) for c in co)
        inv = None if inverse is None else tuple((c, inverse.get(c, Sym(c))) for c in co)
        return PointTransformation(co, r, inv, tuple(constraints))

    def rule(self, coord: str) -> Expr:
        for k, v in self.rules:
            if k == coord:
                return v
        return Sym(coord)

    def inverse_rule(self, coord: str) -> Expr:
        if self.inverse_rules is None:
            raise TransformationError("transformation carries no exact inverse")
        for k, v in self.inverse_rules:
            if k == coord:
                return v
        return Sym(coord)

    @property
    def has_inverse(self) -> bool:
        return self.inverse_rules is not None


def identity_transformation(coords: Sequence[str] = ("t", "x", "u", "f", "g")) -> PointTransformation:
    return PointTransformation.make(coords, {}, {})


def compose(p: PointTransformation, q: PointTransformation) -> PointTransformation:
    """p after q: apply q first."""
    if p.coords != q.coords:
        raise TransformationError("composition of transformations on different spaces")
    subs_q = {Sym(c): q.rule(c) for c in q.coords}
    rules = {c: substitute(p.rule(c), subs_q) for c in p.coords}
    inv = None
    if p.has_inverse and q.has_inverse:
        subs_pinv = {Sym(c): p.inverse_rule(c) for c in p.coords}
        inv = {c: substitute(q.inverse_rule(c), subs_pinv) for c in p.coords}
    return PointTransformation.make(p.coords, rules, inv,
                                    p.constraints + q.constraints)


def invert(p: PointTransformation) -> PointTransformation:
    if not p.has_inverse:
        raise TransformationError("transformation carries no exact inverse")
    return PointTransformation(p.coords, p.inverse_rules, p.rules, p.constraints)


def pushforward(p: PointTransformation, v: VectorField) -> VectorField:
    """Standard change of coordinates of a vector field: the coefficient of
    the target coordinate z~^i is v(rules[i]) re-expressed in target
    coordinates through the inverse map."""
    subs_inv = {Sym(c): p.inverse_rule(c) for c in p.coords}
    out = {}
    for i in p.coords:
        terms = []
        for j in p.coords:
            vj = v.get(j)
            if vj.is_zero:
                continue
            d = diff(p.rule(i), Sym(j))
            if not d.is_zero:
                terms.append(mul(vj, d))
        if terms:
            out[i] = substitute(add(*terms), subs_inv)
    return VectorField.make(out)


# -- generating transformations of the equivalence group (paper class) ------

EQUIV_COORDS = ("t", "x", "u", "f", "g")
_F, _G, _U = Sym("f"), Sym("g"), Sym("u")


def t_translation(a0) -> PointTransformation:
    a0 = a0 if isinstance(a0, Expr) else Rat(a0)
    return PointTransformation.make(
        EQUIV_COORDS, {"t": add(Sym("t"), a0)}, {"t": add(Sym("t"), mul(Rat(-1), a0))})


def x_translation(b0) -> PointTransformation:
    b0 = b0 if isinstance(b0, Expr) else Rat(b0)
    return PointTransformation.make(
        EQUIV_COORDS, {"x": add(Sym("x"), b0)}, {"x": add(Sym("x"), mul(Rat(-1), b0))})


def t_scaling(a1) -> PointTransformation:
    a1 = a1 if isinstance(a1, Expr) else Rat(a1)
    if a1.is_zero:
        raise TransformationError("degenerate scaling A1 = 0")
    inv = power(a1, Rat(-1))
    return PointTransformation.make(
        EQUIV_COORDS,
        {"t": mul(a1, Sym("t")), "f": mul(inv, _F), "g": mul(inv, _G)},
        {"t": mul(inv, Sym("t")), "f": mul(a1, _F), "g": mul(a1, _G)},
        constraints=(a1,))


def x_scaling(b1) -> PointTransformation:
    b1 = b1 if isinstance(b1, Expr) else Rat(b1)
    if b1.is_zero:
        raise TransformationError("degenerate scaling B1 = 0")
    sq = power(b1, Rat(2))
    isq = power(b1, Rat(-2))
    return PointTransformation.make(
        EQUIV_COORDS,
        {"x": mul(b1, Sym("x")), "f": mul(sq, _F), "g": mul(sq, _G)},
        {"x": mul(power(b1, Rat(-1)), Sym("x")), "f": mul(isq, _F), "g": mul(isq, _G)},
        constraints=(b1,))


def u_transformation(u_expr: Expr, u_inverse: Expr | None = None) -> PointTransformation:
    """G(U): u~ = U(u), g~ = g, f~ = f/U_u - g U_uu / U_u^2.

    u_expr is U as an expression in u; u_inverse, when given, is the exact
    inverse function, also as an expression in u.
    """
    uu = diff(u_expr, _U)
    if uu.is_zero:
        raise TransformationError("degenerate u-transformation: U_u = 0")
    uuu = diff(uu, _U)
    f_rule = add(mul(_F, power(uu, Rat(-1))),
                 mul(Rat(-1), _G, uuu, power(uu, Rat(-2))))
    rules = {"u": u_expr, "f": f_rule}
    inv = None
    if u_inverse is not None:
        vu = diff(u_inverse, _U)
        vuu = diff(vu, _U)
        inv = {"u": u_inverse,
               "f": add(mul(_F, power(vu, Rat(-1))),
                        mul(Rat(-1), _G, vuu, power(vu, Rat(-2))))}
    return PointTransformation.make(EQUIV_COORDS, rules, inv, constraints=(uu,))


def theorem2_transformation(a0, a1, b0, b1, u_expr: Expr,
                            u_inverse: Expr | None = None) -> PointTransformation:
    """The composition T^t(A0) T^x(B0) D^t(A1) D^x(B1) G(U) (rightmost first)."""
    p = u_transformation(u_expr, u_inverse)
    for factor in (x_scaling(b1), t_scaling(a1), x_translation(b0), t_translation(a0)):
        p = compose(factor, p)
    return p


def discrete_It() -> PointTransformation:
    return t_scaling(-1)


def discrete_Ix() -> PointTransformation:
    return x_scaling(-1)


def discrete_Iu() -> PointTransformation:
    return u_transformation(mul(Rat(-1), _U), mul(Rat(-1), _U))


def transform_class_element(p: PointTransformation, f0: Expr, g0: Expr,
                            element_names: tuple[str, str] = ("f", "g")) -> tuple[Expr, Expr]:
    """Image (f~, g~) of a class member under an equivalence transformation,
    expressed in the new coordinates."""
    fn, gn = element_names
    bind = {Sym(fn): f0, Sym(gn): g0}
    subs_inv = {Sym(c): p.inverse_rule(c) for c in p.coords if c not in element_names}
    out = []
    for name in element_names:
        image = substitute(p.rule(name), bind)
        out.append(substitute(image, subs_inv))
    return out[0], out[1]
