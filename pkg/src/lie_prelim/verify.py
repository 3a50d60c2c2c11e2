"""Determining systems, kernel extraction, equivalence-generator checks,
admissible-transformation splitting, invariant-surface conditions and
row-by-row verification of the classification tables.

Checks are exact wherever the normal form certifies zero; rows carrying
symbolic parameters that resist structural cancellation fall back to the
seeded numeric oracle (parameters sampled away from their excluded values).
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .expr import (Add, Expr, ExprError, Func, FunctionSignature, Jet, Mul,
                   Pow, Rat, Sym, add, diff, eval_numeric, exp,
                   free_symbols, function_names, jet, ln, make_env,
                   monomial_parts, mul, power, sort_key, substitute,
                   term_coeff, DomainError, ZERO, ONE, _base_exp, _make_term)
from .fields import (VectorField, apply_prolonged, equivalence_prolongation,
                     prolong, vector_field)
from .jet import (JS, DeterminingEquation, DeterminingSystem, EquationClass,
                  on_manifold, split_determining, strip_content)
from .parse import parse
from .printing import to_latex, to_text

DEFAULT_SEED = 8271
ORACLE_TOL = 1e-9
PARAM_SAMPLES = (Fraction(-2), Fraction(-1), Fraction(1, 2), Fraction(1), Fraction(3))


class VerifyError(ExprError):
    pass


# ---------------------------------------------------------------------------
# Solved-atom reduction of determining systems
# ---------------------------------------------------------------------------

def _zap(e: Expr, facts: set[tuple[str, tuple[str, ...]]]) -> Expr:
    """Set to zero every derivative implied by the facts (a fact (name, dvars)
    kills any Func of that name whose derivative multiset contains dvars)."""
    if not facts:
        return e

    def dead(f: Func) -> bool:
        cnt = Counter(f.dvars)
        for name, dv in facts:
            if f.name == name and not (Counter(dv) - cnt):
                return True
        return False

    def walk(n: Expr) -> Expr:
        if isinstance(n, Func):
            if dead(n):
                return ZERO
            return Func(n.name, n.dvars, tuple(walk(a) for a in n.args), n.params)
        if isinstance(n, (Rat, Sym, Jet)):
            return n
        if isinstance(n, Add):
            return add(*[walk(t) for t in n.terms])
        if isinstance(n, Mul):
            return mul(Rat(n.coeff), *[walk(p) for p in n.parts])
        if isinstance(n, Pow):
            return power(walk(n.base), walk(n.exp))
        from .expr import ExpF, LnF
        if isinstance(n, ExpF):
            return exp(walk(n.arg))
        if isinstance(n, LnF):
            return ln(walk(n.arg))
        raise TypeError(type(n))

    return walk(e)


def _single_unknown_atom(e: Expr, unknowns: set[str]) -> tuple[str, tuple[str, ...]] | None:
    """Detect lhs of the form (single derivative of an unknown) after content
    stripping: returns (name, dvars) or None."""
    if isinstance(e, Func) and e.name in unknowns:
        return (e.name, e.dvars)
    return None


def reduce_system(system: DeterminingSystem, unknowns: set[str],
                  nonvanishing: tuple[Expr, ...]) -> tuple[DeterminingSystem, set]:
    """Iteratively extract facts 'derivative = 0' from single-atom equations,
    propagate them with their differential consequences, and return the
    reduced system (facts presented as their atoms, zero rows dropped)."""
    facts: set[tuple[str, tuple[str, ...]]] = set()
    fact_atoms: dict[int, Expr] = {}
    changed = True
    while changed:
        changed = False
        for i, eq in enumerate(system.equations):
            if i in fact_atoms:
                continue
            lhs = strip_content(_zap(eq.lhs, facts), nonvanishing)
            atom = _single_unknown_atom(lhs, unknowns)
            if atom is not None and atom not in facts:
                facts.add(atom)
                fact_atoms[i] = lhs
                changed = True
    rows = []
    for i, eq in enumerate(system.equations):
        if i in fact_atoms:
            rows.append(DeterminingEquation(eq.monomial, fact_atoms[i]))
            continue
        lhs = strip_content(_zap(eq.lhs, facts), nonvanishing)
        if not lhs.is_zero:
            rows.append(DeterminingEquation(eq.monomial, lhs))
    return DeterminingSystem(tuple(rows)), facts


# ---------------------------------------------------------------------------
# Determining systems for Lie symmetries
# ---------------------------------------------------------------------------

GENERIC_ANSATZ = (FunctionSignature("tau", ("t", "x", "u")),
                  FunctionSignature("xi", ("t", "x", "u")),
                  FunctionSignature("eta", ("t", "x", "u")))


def generic_symmetry_field() -> VectorField:
    from .expr import func
    tau, xi, eta = (func(s) for s in GENERIC_ANSATZ)
    return vector_field(t=tau, x=xi, u=eta)


def determining_system(cls: EquationClass,
                       ansatz: VectorField | None = None) -> DeterminingSystem:
    """Prolong, apply to the class expression, restrict to the manifold and
    split.  With the generic ansatz the system is reduced by the solved-atom
    rules, reproducing the published determining equations; with a concrete
    ansatz the rows are the residuals (empty system == all residuals vanish)."""
    vf = ansatz if ansatz is not None else generic_symmetry_field()
    invariance = apply_prolonged(prolong(vf), cls.delta)
    restricted = on_manifold(invariance, cls)
    system = split_determining(restricted)
    if ansatz is not None:
        return system
    reduced, _ = reduce_system(system, {s.name for s in GENERIC_ANSATZ},
                               cls.nonvanishing)
    return reduced


def symmetry_residuals(cls: EquationClass, vf: VectorField) -> DeterminingSystem:
    return determining_system(cls, ansatz=vf)


# ---------------------------------------------------------------------------
# Kernel conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelConditions:
    conditions: tuple[Expr, ...]      # new constraints, e.g. xi, eta, Diff(tau,t)
    localization: tuple[Expr, ...]    # pre-split consequences, e.g. Diff(tau,u)
    unresolved: tuple[Expr, ...]      # equations the rule-based reduction left over

    def to_text(self) -> str:
        conds = ", ".join(f"{to_text(c)} = 0" for c in self.conditions)
        out = f"kernel conditions: {conds}"
        if self.unresolved:
            out += "\nunresolved: " + "; ".join(to_text(u) for u in self.unresolved)
        return out


def _formalize_elements(e: Expr, cls: EquationClass) -> Expr:
    """Replace arbitrary-element applications and their first derivatives by
    formal symbols f, f_x, f_u, ... (the joint-space coordinate view)."""

    def walk(n: Expr) -> Expr:
        if isinstance(n, Func) and n.name in {s.name for s in cls.arbitrary}:
            if len(n.dvars) > 1:
                raise VerifyError(f"second derivative of {n.name} cannot be formalized")
            name = n.name if not n.dvars else f"{n.name}_{n.dvars[0]}"
            return Sym(name)
        if isinstance(n, (Rat, Sym, Jet)):
            return n
        if isinstance(n, Func):
            return Func(n.name, n.dvars, tuple(walk(a) for a in n.args), n.params)
        if isinstance(n, Add):
            return add(*[walk(t) for t in n.terms])
        if isinstance(n, Mul):
            return mul(Rat(n.coeff), *[walk(p) for p in n.parts])
        if isinstance(n, Pow):
            return power(walk(n.base), walk(n.exp))
        from .expr import ExpF, LnF
        if isinstance(n, ExpF):
            return exp(walk(n.arg))
        if isinstance(n, LnF):
            return ln(walk(n.arg))
        raise TypeError(type(n))

    return walk(e)


def kernel_conditions(cls: EquationClass) -> KernelConditions:
    """Split the classifying equations with respect to the arbitrary elements
    and their first derivatives treated as independent symbols, then reduce
    by the single-atom rules."""
    reduced = determining_system(cls)
    unknowns = {s.name for s in GENERIC_ANSATZ}
    element_names = {s.name for s in cls.arbitrary}
    element_syms = []
    for s in cls.arbitrary:
        element_syms.append(Sym(s.name))
        element_syms.extend(Sym(f"{s.name}_{arg}") for arg in s.args)
    localization: list[Expr] = []
    pool: list[Expr] = []
    for eq in reduced:
        if any(fn in element_names for fn in function_names(eq.lhs)):
            formal = _formalize_elements(eq.lhs, cls)
            from .expr import collect
            for _, coeff in collect(formal, element_syms):
                pool.append(coeff)
        else:
            localization.append(eq.lhs)
    base_facts: set[tuple[str, tuple[str, ...]]] = set()
    for lhs in localization:
        atom = _single_unknown_atom(lhs, unknowns)
        if atom is not None:
            base_facts.add(atom)
    facts = set(base_facts)
    equations = list(pool)
    changed = True
    while changed:
        changed = False
        rest = []
        for lhs in equations:
            z = strip_content(_zap(lhs, facts), cls.nonvanishing) if not _zap(lhs, facts).is_zero else ZERO
            if z.is_zero:
                continue
            atom = _single_unknown_atom(z, unknowns)
            if atom is not None:
                if atom not in facts:
                    facts.add(atom)
                    changed = True
            else:
                rest.append(lhs)
        equations = rest
    unresolved = tuple(strip_content(_zap(l, facts), cls.nonvanishing)
                       for l in equations if not _zap(l, facts).is_zero)
    new_facts = facts - base_facts
    # present minimal generators: a fact with dvars D is implied by one with a
    # subset of D
    minimal = []
    for name, dv in sorted(new_facts):
        implied = any(n2 == name and not (Counter(d2) - Counter(dv)) and d2 != dv
                      for n2, d2 in new_facts)
        if not implied:
            minimal.append((name, dv))
    env = {s.name: s for s in GENERIC_ANSATZ}
    from .expr import func
    conditions = tuple(func(env[name], dv) for name, dv in
                       sorted(minimal, key=lambda nd: (nd[0], nd[1])))
    loc = tuple(localization)
    return KernelConditions(conditions, loc, unresolved)


@dataclass(frozen=True)
class KernelCheck:
    passed: bool
    residuals: tuple[tuple[str, Expr], ...]


def kernel_check(cls: EquationClass, vf: VectorField) -> KernelCheck:
    """Check a candidate field against the kernel conditions."""
    conds = kernel_conditions(cls)
    coord_of = {"tau": "t", "xi": "x", "eta": "u"}
    residuals = []
    ok = True
    for c in conds.conditions + conds.localization:
        assert isinstance(c, Func)
        value = vf.get(coord_of[c.name])
        for dv in c.dvars:
            value = diff(value, Sym(dv))
        if not value.is_zero:
            ok = False
        residuals.append((to_text(c), value))
    return KernelCheck(ok, tuple(residuals))


# ---------------------------------------------------------------------------
# Equivalence-algebra invariance check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivCheckResult:
    passed: bool
    main_residuals: tuple[DeterminingEquation, ...]
    auxiliary_residuals: tuple[tuple[str, Expr], ...]

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"equivalence invariance: {status}"]
        for eq in self.main_residuals:
            lines.append(f"  [{eq.label}]  {to_text(eq.lhs)} = 0 violated")
        for name, r in self.auxiliary_residuals:
            if not r.is_zero:
                lines.append(f"  [{name}]  {to_text(r)} = 0 violated")
        return "\n".join(lines)


def equiv_invariance_check(Y: VectorField, cls: EquationClass) -> EquivCheckResult:
    """Joint invariance of the class expression and its auxiliary system under
    a candidate equivalence vector field (arbitrary elements as formal
    coordinates in the coefficients of Y)."""
    delta_formal = _formalize_elements(cls.delta, cls)
    rhs_formal = _formalize_elements(cls.rhs, cls)
    pf = prolong(Y.restrict(("t", "x", "u")))
    terms = [apply_prolonged(pf, delta_formal)]
    for s in cls.arbitrary:
        phi = Y.get(s.name)
        if not phi.is_zero or True:
            terms.append(mul(phi, diff(delta_formal, Sym(s.name))))
    invariance = add(*terms)
    restricted = substitute(invariance, {Jet(cls.solved_for): rhs_formal})
    system = split_determining(restricted)
    main = tuple(eq for eq in system if not eq.lhs.is_zero)
    aux = []
    for (name, direction), value in equivalence_prolongation(Y, cls).items():
        aux.append((f"{name}_{direction}", value))
    passed = not main and all(r.is_zero for _, r in aux)
    return EquivCheckResult(passed, main, tuple(aux))


def equivalence_generators(cls: EquationClass, h: Expr | None = None) -> dict[str, VectorField]:
    """The generator family of the equivalence algebra of the diffusion class,
    with G(h) taking an explicit or symbolic parameter function."""
    f, g, t, x, u = Sym("f"), Sym("g"), Sym("t"), Sym("x"), Sym("u")
    if h is None:
        h = parse("h", make_env(FunctionSignature("h", ("u",))))
        h = Func("h", (), (u,), ("u",))
    hu = diff(h, u)
    huu = diff(hu, u)
    return {
        "d_t": vector_field(t=Rat(1)),
        "d_x": vector_field(x=Rat(1)),
        "D^t": vector_field(t=t, f=mul(Rat(-1), f), g=mul(Rat(-1), g)),
        "D^x": vector_field(x=x, f=mul(Rat(2), f), g=mul(Rat(2), g)),
        "G(h)": vector_field(u=h, f=mul(Rat(-1), add(mul(hu, f), mul(huu, g)))),
    }


# ---------------------------------------------------------------------------
# Admissible transformations (direct method)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleSplit:
    equations: tuple[DeterminingEquation, ...]   # the four labelled equations
    constraints: tuple[Expr, ...]                # reduced: X_t, X_xx, U_x, U_t, T_tt

    def to_text(self) -> str:
        lines = ["admissible-transformation determining equations:"]
        for eq in self.equations:
            lines.append(f"  {eq.label:6} :  {to_text(eq.lhs)} = 0")
        lines.append("equivalence-group constraints: "
                     + ", ".join(f"{to_text(c)} = 0" for c in self.constraints))
        return "\n".join(lines)


TRANSFORM_ANSATZ = (FunctionSignature("T", ("t",)),
                    FunctionSignature("X", ("t", "x")),
                    FunctionSignature("U", ("t", "x", "u")))


def admissible_split(cls: EquationClass) -> AdmissibleSplit:
    """Direct-method determining equations for transformations mapping a class
    member to a class member, split with respect to the target arbitrary
    elements, for the ansatz t~ = T(t), x~ = X(t, x), u~ = U(t, x, u)."""
    from .expr import func
    from .jet import total_derivative
    T, Xf, Uf = (func(s) for s in TRANSFORM_ANSATZ)
    f, g = Sym("f"), Sym("g")
    ft, gt = Sym("ftilde"), Sym("gtilde")
    t = Sym("t")
    Tt = diff(T, t)
    DxU = total_derivative(Uf, "x")
    DtU = total_derivative(Uf, "t")
    DxX = total_derivative(Xf, "x")
    XtoverXx = mul(total_derivative(Xf, "t"), power(DxX, Rat(-1)))
    u_tilde_t = mul(power(Tt, Rat(-1)), add(DtU, mul(Rat(-1), XtoverXx, DxU)))
    u_tilde_x = mul(DxU, power(DxX, Rat(-1)))
    u_tilde_xx = mul(power(DxX, Rat(-1)), total_derivative(u_tilde_x, "x"))
    residual = add(u_tilde_t,
                   mul(Rat(-1), ft, power(u_tilde_x, Rat(2))),
                   mul(Rat(-1), gt, u_tilde_xx))
    manifold_rhs = add(mul(f, power(Jet("u_x"), Rat(2))), mul(g, Jet("u_xx")))
    residual = substitute(residual, {Jet("u_t"): manifold_rhs})
    from .expr import collect
    nonvanishing = (Tt, diff(Xf, Sym("x")), diff(Uf, Sym("u")), g, gt)
    rows = []
    for mon, coeff in collect(residual, [Jet("u_x"), Jet("u_xx")]):
        rows.append(DeterminingEquation(mon, strip_content(coeff, nonvanishing)))
    # split the u_x- and 1-labelled equations with respect to ftilde, gtilde
    unknowns = {"T", "X", "U"}
    facts: set[tuple[str, tuple[str, ...]]] = set()
    pool: list[Expr] = []
    for eq in rows:
        deg = eq.label
        if deg in ("u_x", "1"):
            for _, coeff in collect(eq.lhs, [ft, gt]):
                pool.append(coeff)
    changed = True
    while changed:
        changed = False
        for lhs in pool:
            z = _zap(lhs, facts)
            if z.is_zero:
                continue
            atom = _single_unknown_atom(strip_content(z, nonvanishing), unknowns)
            if atom is not None and atom not in facts:
                facts.add(atom)
                changed = True
    # T_tt = 0 from differentiating the u_xx-labelled equation with respect to t
    uxx_row = next(eq for eq in rows if eq.label == "u_xx")
    dt_row = _zap(diff(uxx_row.lhs, t), facts)
    atom = _single_unknown_atom(strip_content(dt_row, nonvanishing), unknowns)
    if atom is not None:
        facts.add(atom)
    env = {s.name: s for s in TRANSFORM_ANSATZ}
    order = {"X": 0, "U": 1, "T": 2}
    from .expr import func as mkfunc
    constraints = tuple(mkfunc(env[name], dv) for name, dv in
                        sorted(facts, key=lambda nd: (order[nd[0]], nd[1])))
    return AdmissibleSplit(tuple(rows), constraints)


# ---------------------------------------------------------------------------
# Invariant surface conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ISCResult:
    passed: bool
    residuals: tuple[tuple[str, str, Expr], ...]  # (element, f|g, residual)
    mode: str  # 'exact' | 'numeric' | 'fail'


def isc_system(elements: Sequence, cls: EquationClass) -> list[tuple[Expr, Expr]]:
    """One pair of first-order constraints per basis element:
    xi f_x + eta f_u - phi and xi g_x + eta g_u - theta, with the arbitrary
    elements as declared functions of (x, u)."""
    from .expr import func
    fsig = cls.signature("f")
    gsig = cls.signature("g")
    f_app, g_app = func(fsig), func(gsig)
    out = []
    for el in elements:
        vf = el.realize()
        bind = {Sym("f"): f_app, Sym("g"): g_app}
        xi, eta = vf.get("x"), vf.get("u")
        phi = substitute(vf.get("f"), bind)
        theta = substitute(vf.get("g"), bind)
        eq_f = add(mul(xi, func(fsig, ("x",))), mul(eta, func(fsig, ("u",))),
                   mul(Rat(-1), phi))
        eq_g = add(mul(xi, func(gsig, ("x",))), mul(eta, func(gsig, ("u",))),
                   mul(Rat(-1), theta))
        out.append((eq_f, eq_g))
    return out


def isc_check(elements: Sequence, f0: Expr, g0: Expr, cls: EquationClass,
              seed: int = DEFAULT_SEED, excluded: Mapping[str, Sequence[Fraction]] = (),
              tol: float = ORACLE_TOL) -> ISCResult:
    """Substitute a candidate (f0, g0) into the invariant-surface system."""
    if g0.is_zero:
        raise VerifyError("candidate g vanishes identically (nonvanishing condition)")
    from .expr import func
    fsig, gsig = cls.signature("f"), cls.signature("g")
    bind = {func(fsig): f0, func(gsig): g0}
    residuals = []
    all_exact = True
    passed = True
    for i, (eq_f, eq_g) in enumerate(isc_system(elements, cls)):
        for tag, eq in (("f", eq_f), ("g", eq_g)):
            r = substitute(eq, bind)
            if r.is_zero:
                continue
            all_exact = False
            if residual_vanishes_numerically(r, seed=seed + i, excluded=excluded, tol=tol):
                residuals.append((f"element {i + 1}", tag, r))
            else:
                passed = False
                residuals.append((f"element {i + 1}", tag, r))
    mode = "exact" if all_exact else ("numeric" if passed else "fail")
    return ISCResult(passed, tuple(residuals), mode)


# ---------------------------------------------------------------------------
# Numeric fallback for residuals with symbolic parameters
# ---------------------------------------------------------------------------

def residual_vanishes_numerically(e: Expr, seed: int = DEFAULT_SEED,
                                  excluded: Mapping[str, Sequence[Fraction]] = (),
                                  samples: int = 10, tol: float = ORACLE_TOL) -> bool:
    """Evaluate a residual at random chart points, sampling symbolic
    parameters from the design set minus their excluded values and assigning
    deterministic concrete shapes to unknown functions."""
    rng = random.Random(seed)
    syms = free_symbols(e)
    fnames = function_names(e)
    excluded = dict(excluded or {})
    sigs = _collect_signatures(e)
    for _ in range(samples):
        assignment: dict[str, float] = {}
        for s in sorted(syms):
            if s in ("x", "u") or s.startswith("u_"):
                assignment[s] = 0.6 + 1.8 * rng.random()
            elif s == "t":
                assignment[s] = rng.uniform(-2, 2)
            else:
                choices = [p for p in PARAM_SAMPLES if p not in excluded.get(s, ())]
                assignment[s] = float(rng.choice(choices))
        fn_table = {}
        for name in sorted(fnames):
            sig = sigs[name]
            c0 = Fraction(rng.randint(1, 4))
            c1 = Fraction(rng.randint(1, 3), 2)
            c2 = Fraction(rng.randint(0, 2), 3)
            arg_sum = add(*[Sym(a) for a in sig.args])
            fn_table[name] = add(Rat(c0), mul(Rat(c1), arg_sum),
                                 mul(Rat(c2), power(arg_sum, Rat(2))))
        try:
            v = eval_numeric(e, assignment, fn_table)
        except (DomainError, ZeroDivisionError):
            continue
        if abs(v) > tol:
            return False
    return True


def _collect_signatures(e: Expr) -> dict[str, FunctionSignature]:
    out: dict[str, FunctionSignature] = {}

    def walk(n: Expr):
        if isinstance(n, Func):
            out[n.name] = FunctionSignature(n.name, n.params)
            for a in n.args:
                walk(a)
        elif isinstance(n, Add):
            for t in n.terms:
                walk(t)
        elif isinstance(n, Mul):
            for p in n.parts:
                walk(p)
        elif isinstance(n, Pow):
            walk(n.base)
            walk(n.exp)
        else:
            from .expr import ExpF, LnF
            if isinstance(n, (ExpF, LnF)):
                walk(n.arg)

    walk(e)
    return out


# ---------------------------------------------------------------------------
# Built-in classes and the classification-table database
# ---------------------------------------------------------------------------

def builtin_class(name: str) -> EquationClass:
    fname = {"gen-diff": "gen_diff.json", "heat": "heat.json",
             "linear-evolution": "linear_evolution.json"}.get(name)
    if fname is None:
        raise VerifyError(f"unknown builtin class {name!r}")
    text = resources.files("lie_prelim.data").joinpath("classes").joinpath(fname).read_text()
    return EquationClass.from_json(text)


@dataclass(frozen=True)
class TableRow:
    table: int
    case: str
    modes: tuple[str, ...]
    chart: str | None
    f: Expr
    g: Expr
    operators: tuple[VectorField, ...]
    subalgebra: tuple
    param_excluded: dict[str, tuple[Fraction, ...]]
    notes: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"T{self.table}.{self.case}"


def _row_env(unknowns: Mapping[str, Sequence[str]]):
    sigs = [FunctionSignature(n, tuple(args)) for n, args in unknowns.items()]
    return make_env(*sigs)


def load_rows(corrected: bool = True) -> list[TableRow]:
    from .classify import EquivAlgebraElement
    text = resources.files("lie_prelim.data").joinpath("tables.json").read_text()
    raw = json.loads(text)
    mode = "corrected" if corrected else "uncorrected"
    rows = []
    for r in raw["rows"]:
        if mode not in r["modes"]:
            continue
        env = _row_env(r.get("unknowns", {}))
        ops = []
        for op in r["operators"]:
            ops.append(vector_field(**{c: parse(s, env) for c, s in op.items()}))
        elements = []
        for el in r["subalgebra"]:
            elements.append(EquivAlgebraElement.make(
                a0=parse(el.get("a0", "0"), env), a1=parse(el.get("a1", "0"), env),
                a2=parse(el.get("a2", "0"), env), a3=parse(el.get("a3", "0"), env),
                h=parse(el.get("h", "0"), env)))
        excluded = {k: tuple(Fraction(v) for v in vs)
                    for k, vs in r.get("param_excluded", {}).items()}
        rows.append(TableRow(
            table=r["table"], case=r["case"], modes=tuple(r["modes"]),
            chart=r.get("chart"), f=parse(r["f"], env), g=parse(r["g"], env),
            operators=tuple(ops), subalgebra=tuple(elements),
            param_excluded=excluded, notes=tuple(r.get("notes", ()))))
    return rows


def instance_class(row: TableRow, base: EquationClass) -> EquationClass:
    ux2 = power(Jet("u_x"), Rat(2))
    rhs = add(mul(row.f, ux2), mul(row.g, Jet("u_xx")))
    delta = add(Jet("u_t"), mul(Rat(-1), rhs))
    sigs = tuple(s for _, s in sorted(_collect_signatures(rhs).items()))
    return EquationClass(name=f"{row.label} instance", delta=delta,
                         solved_for="u_t", rhs=rhs, arbitrary=sigs,
                         auxiliary=(), nonvanishing=(row.g,))


# ---------------------------------------------------------------------------
# Row verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckOutcome:
    status: str  # 'exact' | 'numeric' | 'fail'
    detail: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.status in ("exact", "numeric")


@dataclass(frozen=True)
class RowResult:
    row: TableRow
    isc: CheckOutcome
    symmetry: CheckOutcome
    notes: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.isc.passed and self.symmetry.passed

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        mode = "exact" if (self.isc.status == "exact" and self.symmetry.status == "exact") \
            else "numeric"
        return (f"{self.row.label:7} {status}  "
                f"[isc: {self.isc.status}, symmetry: {self.symmetry.status}] "
                f"({len(self.row.operators)} operator(s) + kernel)")


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple[RowResult, ...]
    anomalies: tuple[tuple[str, bool, str], ...]  # (name, detected, description)
    extras: tuple[tuple[str, bool, str], ...]
    corrected: bool

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_text(self) -> str:
        lines = [f"table verification ({'corrected' if self.corrected else 'uncorrected'} rows)"]
        lines += [r.line() for r in self.rows]
        npass = sum(r.passed for r in self.rows)
        lines.append(f"summary: {npass}/{len(self.rows)} rows pass")
        for name, detected, desc in self.anomalies:
            lines.append(f"anomaly {name}: {'detected' if detected else 'NOT detected'} - {desc}")
        for name, ok, desc in self.extras:
            lines.append(f"extra {name}: {'PASS' if ok else 'FAIL'} - {desc}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "corrected": self.corrected,
            "rows": [{
                "table": r.row.table, "case": r.row.case,
                "isc": r.isc.status, "symmetry": r.symmetry.status,
                "passed": r.passed,
                "f": to_text(r.row.f), "g": to_text(r.row.g),
                "operators": [str(op) for op in r.row.operators],
                "notes": list(r.notes),
            } for r in self.rows],
            "anomalies": [{"name": n, "detected": d, "description": s}
                          for n, d, s in self.anomalies],
            "extras": [{"name": n, "passed": ok, "description": s}
                       for n, ok, s in self.extras],
            "passed": self.passed,
        }


def _symmetry_outcome(cls: EquationClass, operators: Sequence[VectorField],
                      seed: int, excluded) -> CheckOutcome:
    detail = []
    status = "exact"
    kernel = vector_field(t=Rat(1))
    for i, op in enumerate(tuple(operators) + (kernel,)):
        residuals = symmetry_residuals(cls, op)
        for eq in residuals:
            if eq.lhs.is_zero:
                continue
            if residual_vanishes_numerically(eq.lhs, seed=seed + 17 * i,
                                             excluded=excluded):
                status = "numeric" if status == "exact" else status
                detail.append(f"op {i + 1} [{eq.label}]: numeric only")
            else:
                status = "fail"
                detail.append(f"op {i + 1} [{eq.label}]: {to_text(eq.lhs)}")
    return CheckOutcome(status, tuple(detail))


def verify_row(row: TableRow, base: EquationClass, seed: int = DEFAULT_SEED) -> RowResult:
    isc = isc_check(row.subalgebra, row.f, row.g, base, seed=seed,
                    excluded=row.param_excluded)
    isc_status = isc.mode if isc.passed else "fail"
    isc_detail = tuple(f"element {el} ({tag}): {to_text(r)}"
                       for el, tag, r in isc.residuals) if not isc.passed else ()
    inst = instance_class(row, base)
    sym = _symmetry_outcome(inst, row.operators, seed, row.param_excluded)
    notes = row.notes
    if row.chart:
        notes = notes + (f"checked on the chart {row.chart}",)
    return RowResult(row, CheckOutcome(isc_status, isc_detail), sym, notes)


def _anomaly_t1c3_duplicates_t2c3b(rows_unc: list[TableRow]) -> tuple[bool, str]:
    t1c3 = next(r for r in rows_unc if r.table == 1 and r.case == "3")
    t2c3b = next(r for r in rows_unc if r.table == 2 and r.case == "3b")
    delta0 = {Sym("delta"): ZERO}
    same = (substitute(t1c3.f, delta0) == t2c3b.f
            and substitute(t1c3.g, delta0) == t2c3b.g)
    return same, ("table 1 case 3 with delta = 0 has the same arbitrary elements as "
                  "table 2 case 3b, so it must be excluded from the extension list")


def _anomaly_t2c7_extra_operator(rows_unc: list[TableRow], base: EquationClass,
                                 seed: int) -> tuple[bool, str]:
    row = next(r for r in rows_unc if r.table == 2 and r.case == "7")
    f0 = substitute(row.f, {Sym("delta"): ZERO})
    g0 = row.g
    special = TableRow(row.table, "7 (delta=0)", row.modes, row.chart, f0, g0,
                       row.operators, row.subalgebra, row.param_excluded, row.notes)
    inst = instance_class(special, base)
    extra = vector_field(t=mul(Rat(2), Sym("t")), x=Sym("x"))
    outcome = _symmetry_outcome(inst, (extra,), seed, row.param_excluded)
    return outcome.passed, ("for delta = 0 the case-7 equation admits the additional "
                            "operator 2t*d_t + x*d_x induced by D^x + 2D^t")


def _anomaly_t2c3a_coincidence(rows_unc: list[TableRow]) -> tuple[bool, str]:
    t2c3a = next(r for r in rows_unc if r.table == 2 and r.case == "3a")
    t2c7 = next(r for r in rows_unc if r.table == 2 and r.case == "7")
    a2 = {Sym("a"): Rat(2)}
    d0 = {Sym("delta"): ZERO}
    same = (substitute(t2c3a.f, a2) == substitute(t2c7.f, d0)
            and substitute(t2c3a.g, a2) == substitute(t2c7.g, d0))
    return same, ("for a = 2 the arbitrary elements of case 3a coincide with those of "
                  "case 7 with delta = 0")


def _extra_potential_burgers(base: EquationClass, seed: int) -> tuple[bool, str]:
    c1, c2, u = Sym("c1"), Sym("c2"), Sym("u")
    eta = exp(mul(Rat(-1), c1, power(c2, Rat(-1)), u))
    row = TableRow(0, "potential Burgers", ("corrected",), None, c1, c2, (), (),
                   {"c2": (Fraction(0),)}, ())
    inst = instance_class(row, base)
    outcome = _symmetry_outcome(inst, (vector_field(u=eta),), seed,
                                {"c2": (Fraction(0),)})
    return outcome.passed, ("f = c1, g = c2 admits the additional operator "
                            "exp(-c1*u/c2)*d_u")


def verify_table(table: int | str, corrected: bool = True,
                 seed: int = DEFAULT_SEED) -> VerificationReport:
    """Verify the classification rows of one table (or 'all'): the candidate
    arbitrary elements solve the invariant-surface system of the lifted
    subalgebra, and every listed operator (plus the kernel d_t) is an exact
    symmetry of the instance equation."""
    base = builtin_class("gen-diff")
    rows = load_rows(corrected=corrected)
    if table != "all":
        table = int(table)
        if table not in (1, 2, 3):
            raise VerifyError(f"no such table: {table}")
        rows = [r for r in rows if r.table == table]
    results = tuple(verify_row(r, base, seed=seed) for r in rows)
    anomalies = []
    if not corrected:
        rows_unc = load_rows(corrected=False)
        if table == "all" or table == 1 or table == 2:
            anomalies.append(("T1.3[delta=0] duplicates T2.3b",)
                             + _anomaly_t1c3_duplicates_t2c3b(rows_unc))
        if table == "all" or table == 2:
            anomalies.append(("T2.7[delta=0] extra operator",)
                             + _anomaly_t2c7_extra_operator(rows_unc, base, seed))
            anomalies.append(("T2.3a[a=2] coincides with T2.7[delta=0]",)
                             + _anomaly_t2c3a_coincidence(rows_unc))
    extras = []
    if corrected and table == "all":
        extras.append(("potential-Burgers G(exp(-c1*u/c2))",)
                      + _extra_potential_burgers(base, seed))
    anomalies = tuple((n, d, s) for n, d, s in anomalies)
    extras = tuple((n, ok, s) for n, ok, s in extras)
    return VerificationReport(results, anomalies, extras, corrected)
