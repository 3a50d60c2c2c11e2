"""Jet-space bookkeeping: total derivatives, manifold restriction, splitting.

The jet space is fixed: independent coordinates (t, x), dependent u,
truncation order 3 with the admitted variables u, u_t, u_x, u_tt, u_tx,
u_xx, u_txx, u_xxx.  Restriction to the equation manifold substitutes the
solved jet variable only (u_t for the classes treated here); differential
consequences such as u_tx are never substituted, so the split keeps the
u_tx-labelled equations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .expr import (Add, Expr, ExprError, FunctionSignature, Jet, Rat, Sym,
                   add, collect, diff, jet, make_env, monomial_parts, mul,
                   power, sort_key, substitute, term_coeff, _base_exp,
                   _make_term)
from .parse import parse
from .printing import to_latex, to_text


class TruncationError(ExprError):
    """A total derivative left the order-3 jet space."""


@dataclass(frozen=True)
class JetSpace:
    independent: tuple[str, str] = ("t", "x")
    dependent: str = "u"
    order: int = 3

    @property
    def jets(self) -> tuple[str, ...]:
        return ("u_t", "u_x", "u_tt", "u_tx", "u_xx", "u_txx", "u_xxx")

    def split_variables(self) -> tuple[Expr, ...]:
        return tuple(Jet(n) for n in ("u_x", "u_xx", "u_tx", "u_xxx", "u_tt", "u_txx"))


JS = JetSpace()


def _jet_successor(name: str, wrt: str) -> Expr:
    base = "u" if name == "u" else name[2:]
    idx = "".join(sorted((base if base != "u" else "") + wrt))
    return jet("u_" + idx)


def total_derivative(e: Expr, wrt: str, js: JetSpace = JS) -> Expr:
    """D_t or D_x on the truncated jet space; raises TruncationError when a
    required jet of order > 3 has a nonzero coefficient."""
    if wrt not in js.independent:
        raise ExprError(f"total derivative direction must be in {js.independent}")
    out = [diff(e, Sym(wrt))]
    for name in ("u",) + js.jets:
        v = Sym("u") if name == "u" else Jet(name)
        coeff = diff(e, v)
        if coeff.is_zero:
            continue
        try:
            succ = _jet_successor(name, wrt)
        except ExprError:
            raise TruncationError(
                f"D_{wrt} of {name} leaves the order-{js.order} jet space") from None
        out.append(mul(coeff, succ))
    return add(*out)


# ---------------------------------------------------------------------------
# Equation classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquationClass:
    """A class L|_S: defining expression, arbitrary elements, auxiliary
    system and nonvanishing conditions."""

    name: str
    delta: Expr
    solved_for: str
    rhs: Expr
    arbitrary: tuple[FunctionSignature, ...]
    auxiliary: tuple[tuple[str, str], ...]  # (function name, constrained direction)
    nonvanishing: tuple[Expr, ...]

    def __post_init__(self):
        residual = add(self.delta, mul(Rat(-1), Jet(self.solved_for)), self.rhs)
        if not residual.is_zero:
            raise ExprError(f"class {self.name!r}: delta != {self.solved_for} - rhs")

    @property
    def env(self) -> dict[str, FunctionSignature]:
        return make_env(*self.arbitrary)

    def signature(self, name: str) -> FunctionSignature:
        for s in self.arbitrary:
            if s.name == name:
                return s
        raise KeyError(name)

    @staticmethod
    def from_dict(d: dict) -> "EquationClass":
        sigs = tuple(FunctionSignature(n, tuple(args))
                     for n, args in d.get("arbitrary_elements", {}).items())
        env = make_env(*sigs)
        aux = []
        for s in d.get("auxiliary", []):
            name, _, direction = s.partition("_")
            if not direction or name not in env:
                raise ExprError(f"malformed auxiliary condition {s!r}")
            aux.append((name, direction))
        return EquationClass(
            name=d.get("name", "class"),
            delta=parse(d["delta"], env),
            solved_for=d["solved_for"],
            rhs=parse(d["rhs"], env),
            arbitrary=sigs,
            auxiliary=tuple(aux),
            nonvanishing=tuple(parse(s, env) for s in d.get("nonvanishing", [])),
        )

    @staticmethod
    def from_json(text: str) -> "EquationClass":
        return EquationClass.from_dict(json.loads(text))

    @staticmethod
    def from_file(path: str | Path) -> "EquationClass":
        return EquationClass.from_json(Path(path).read_text())


def on_manifold(e: Expr, cls: EquationClass) -> Expr:
    return substitute(e, {Jet(cls.solved_for): cls.rhs})


# ---------------------------------------------------------------------------
# Determining systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeterminingEquation:
    monomial: Expr
    lhs: Expr

    @property
    def label(self) -> str:
        return to_text(self.monomial)


@dataclass(frozen=True)
class DeterminingSystem:
    equations: tuple[DeterminingEquation, ...]

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)

    def to_text(self) -> str:
        if not self.equations:
            return "(empty system)"
        width = max(len(eq.label) for eq in self.equations)
        return "\n".join(f"{eq.label.ljust(width)} :  {to_text(eq.lhs)} = 0"
                         for eq in self.equations)

    def to_latex(self) -> str:
        rows = [f"{to_latex(eq.monomial)}\\colon\\quad & {to_latex(eq.lhs)} = 0"
                for eq in self.equations]
        return "\\begin{align*}\n" + " \\\\\n".join(rows) + "\n\\end{align*}"

    def to_json(self) -> list[dict]:
        return [{"monomial": eq.label, "lhs": to_text(eq.lhs)} for eq in self.equations]

    def reconstruct(self) -> Expr:
        return add(*[mul(eq.monomial, eq.lhs) for eq in self.equations])


def split_determining(e: Expr, js: JetSpace = JS) -> DeterminingSystem:
    """Collect by monomials in the positive-order jets (u_t excluded: it is
    removed by the manifold restriction)."""
    pairs = collect(e, list(js.split_variables()))
    return DeterminingSystem(tuple(DeterminingEquation(m, c) for m, c in pairs
                                   if not c.is_zero))


def strip_content(e: Expr, nonvanishing: tuple[Expr, ...]) -> Expr:
    """Drop the rational content and any overall factor that is a power of a
    declared-nonvanishing atom; then flip the sign so the first term in the
    canonical order is positive.  Used to present determining equations."""
    if e.is_zero:
        return e
    terms = e.terms if isinstance(e, Add) else (e,)
    nv_keys = {sort_key(v): v for v in nonvanishing}
    # common signed power of each nonvanishing atom (missing counts as zero,
    # so denominators are cleared as well)
    common: dict[tuple, tuple[Expr, Rat]] = {}
    for k, v in nv_keys.items():
        exps = []
        for t in terms:
            found = Rat(0)
            for p in monomial_parts(t):
                b, ex = _base_exp(p)
                if sort_key(b) == k and isinstance(ex, Rat):
                    found = ex
            exps.append(found.value)
        m = min(exps)
        if m != 0:
            common[k] = (v, Rat(m))
    stripped_terms = []
    for t in terms:
        c, parts = term_coeff(t), monomial_parts(t)
        if common:
            new_parts = []
            seen = set()
            for p in parts:
                b, ex = _base_exp(p)
                k = sort_key(b)
                if k in common:
                    seen.add(k)
                    new_ex = add(ex, mul(Rat(-1), common[k][1]))
                    if not new_ex.is_zero:
                        new_parts.append(power(b, new_ex))
                else:
                    new_parts.append(p)
            for k, (b, m) in common.items():
                if k not in seen:
                    new_parts.append(power(b, Rat(-m.value)))
            stripped_terms.append(mul(Rat(c), *new_parts))
        else:
            stripped_terms.append(_make_term(c, parts))
    out = add(*stripped_terms)
    # rational content and sign
    terms2 = out.terms if isinstance(out, Add) else (out,)
    coeffs = [term_coeff(t) for t in terms2]
    from math import gcd
    num, den = 0, 1
    for c in coeffs:
        num = gcd(num, abs(c.numerator))
        den = den * c.denominator // gcd(den, c.denominator)
    content = Rat(num, den) if num else Rat(1)
    if coeffs[0] < 0:
        content = Rat(-content.value)
    return mul(power(content, Rat(-1)), out) if not content.is_one else out
