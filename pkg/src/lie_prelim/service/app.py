"""FastAPI service wrapping the symbolic engine.

All endpoints are pure request/response: expressions come in as grammar
strings, reports go out as JSON.  Input problems surface as HTTP 422 with a
structured detail; inputs that parse but violate structural preconditions
(for example a basis that is not closed under the commutator) surface as
HTTP 409."""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..classify import (ClassifyError, DegenerateSpanError,
                        EquivAlgebraElement, NotASubalgebraError,
                        appropriateness, normalize_1d, normalize_2d)
from ..expr import ExprError, FunctionSignature, make_env
from ..fields import VectorField, commutator, theorem2_transformation, vector_field
from ..jet import EquationClass
from ..parse import ParseError, parse
from ..printing import to_latex, to_text
from ..verify import (DEFAULT_SEED, admissible_split, builtin_class,
                      determining_system, equiv_invariance_check,
                      equivalence_generators, kernel_check, kernel_conditions,
                      verify_table)
from . import schemas as S

app = FastAPI(title="lie-prelim",
              description="Symbolic Lie-symmetry analysis and preliminary group "
                          "classification of generalized diffusion equations",
              version=__version__)


def _bad_input(msg: str):
    raise HTTPException(status_code=422, detail={"kind": "input", "message": msg})


def _bad_structure(msg: str):
    raise HTTPException(status_code=409, detail={"kind": "structure", "message": msg})


def _load_class(source: S.ClassSource) -> EquationClass:
    try:
        if source.builtin:
            return builtin_class(source.builtin)
        if source.inline:
            return EquationClass.from_dict(source.inline)
    except (ExprError, KeyError, ValueError) as e:
        _bad_input(str(e))
    _bad_input("class source needs either a builtin name or an inline declaration")


def _env_of(functions: dict[str, list[str]]):
    return make_env(*(FunctionSignature(n, tuple(a)) for n, a in functions.items()))


def _parse_field(spec: S.FieldSpec) -> VectorField:
    env = _env_of(spec.functions)
    if set(spec.coefficients) == {"_ansatz"}:
        return _parse_ansatz(spec.coefficients["_ansatz"], env)
    try:
        return vector_field(**{c: parse(s, env) for c, s in spec.coefficients.items()})
    except ExprError as e:
        _bad_input(str(e))


def _parse_element(spec: S.ElementSpec, functions=None) -> EquivAlgebraElement:
    env = _env_of(functions or {})
    try:
        return EquivAlgebraElement.make(
            a0=parse(spec.a0, env), a1=parse(spec.a1, env),
            a2=parse(spec.a2, env), a3=parse(spec.a3, env), h=parse(spec.h, env))
    except ExprError as e:
        _bad_input(str(e))


def _element_out(el: EquivAlgebraElement) -> S.ElementSpec:
    return S.ElementSpec(a0=to_text(el.a0), a1=to_text(el.a1), a2=to_text(el.a2),
                         a3=to_text(el.a3), h=to_text(el.h))


def _parse_ansatz(text: str, env) -> VectorField:
    """Vector-field strings like 'Q = 2*t*dt + x*dx - u*du' (directions dt,
    dx, du; df, dg for equivalence fields)."""
    from ..expr import Sym, collect, diff
    body = text.split("=", 1)[1] if "=" in text else text
    try:
        e = parse(body, env)
    except ExprError as err:
        _bad_input(str(err))
    directions = {"dt": "t", "dx": "x", "du": "u", "df": "f", "dg": "g"}
    coeffs = {}
    rest = e
    for dname, coord in directions.items():
        c = diff(e, Sym(dname))
        from ..expr import contains_symbol, mul, add, Rat
        if contains_symbol(c, dname):
            _bad_input(f"ansatz is not linear in {dname}")
        if not c.is_zero:
            coeffs[coord] = c
            rest = add(rest, mul(Rat(-1), c, Sym(dname)))
    if not rest.is_zero:
        _bad_input("ansatz must be a combination of dt, dx, du (df, dg)")
    if not coeffs:
        _bad_input("empty ansatz")
    return vector_field(**coeffs)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/derive", response_model=S.DeriveResponse)
def derive(req: S.DeriveRequest):
    cls = _load_class(req.source)
    ansatz = None
    if req.ansatz is not None:
        env = dict(cls.env)
        ansatz = _parse_ansatz(req.ansatz, env)
    try:
        system = determining_system(cls, ansatz=ansatz)
    except ExprError as e:
        _bad_input(str(e))
    residuals = None if ansatz is None else not system.equations
    return S.DeriveResponse(
        equations=[S.EquationOut(monomial=eq.label, lhs=to_text(eq.lhs))
                   for eq in system],
        residuals_vanish=residuals,
        text=system.to_text(),
        latex=system.to_latex())


@app.post("/kernel", response_model=S.KernelResponse)
def kernel(req: S.KernelRequest):
    cls = _load_class(req.source)
    kc = kernel_conditions(cls)
    passes = None
    residuals = None
    if req.candidate is not None:
        check = kernel_check(cls, _parse_field(req.candidate))
        passes = check.passed
        residuals = [(label, to_text(r)) for label, r in check.residuals]
    return S.KernelResponse(
        conditions=[to_text(c) for c in kc.conditions],
        unresolved=[to_text(u) for u in kc.unresolved],
        candidate_passes=passes, candidate_residuals=residuals)


@app.post("/check-equiv", response_model=S.CheckEquivResponse)
def check_equiv(req: S.CheckEquivRequest):
    cls = _load_class(req.source)
    Y = _parse_field(req.field)
    try:
        result = equiv_invariance_check(Y, cls)
    except ExprError as e:
        _bad_input(str(e))
    return S.CheckEquivResponse(
        passed=result.passed,
        main_residuals=[S.EquationOut(monomial=eq.label, lhs=to_text(eq.lhs))
                        for eq in result.main_residuals],
        auxiliary_residuals=[(n, to_text(r)) for n, r in result.auxiliary_residuals])


@app.post("/admissible", response_model=S.AdmissibleResponse)
def admissible(req: S.AdmissibleRequest):
    cls = _load_class(req.source)
    try:
        split = admissible_split(cls)
    except ExprError as e:
        _bad_input(str(e))
    return S.AdmissibleResponse(
        equations=[S.EquationOut(monomial=eq.label, lhs=to_text(eq.lhs))
                   for eq in split.equations],
        constraints=[to_text(c) for c in split.constraints])


@app.post("/transform", response_model=S.TransformResponse)
def transform(req: S.TransformRequest):
    from ..fields import TransformationError, transform_class_element
    env = _env_of(req.functions)
    spec = req.transformation
    try:
        f0, g0 = parse(req.f, env), parse(req.g, env)
        u_rule = parse(spec.u_rule, {})
        u_inv = parse(spec.u_inverse, {}) if spec.u_inverse else None
        p = theorem2_transformation(parse(spec.A0, {}), parse(spec.A1, {}),
                                    parse(spec.B0, {}), parse(spec.B1, {}),
                                    u_rule, u_inv)
        f_new, g_new = transform_class_element(p, f0, g0)
    except (ExprError, TransformationError) as e:
        _bad_input(str(e))
    return S.TransformResponse(f=to_text(f_new), g=to_text(g_new))


@app.post("/commutator", response_model=S.CommutatorResponse)
def commutator_ep(req: S.CommutatorRequest):
    v, w = _parse_field(req.v), _parse_field(req.w)
    result = commutator(v, w)
    return S.CommutatorResponse(result={c: to_text(e) for c, e in result.coeffs})


@app.post("/adjoint", response_model=S.AdjointResponse)
def adjoint(req: S.AdjointRequest):
    from ..classify import adjoint_closed, adjoint_series
    v, w = _parse_element(req.v), _parse_element(req.w)
    eps = parse(req.eps, {})
    try:
        if req.method == "series":
            result, terminated = adjoint_series(v, w, eps, req.order)
        else:
            result, terminated = adjoint_closed(v, w, eps), None
    except ClassifyError as e:
        _bad_input(str(e))
    return S.AdjointResponse(result=_element_out(result), terminated=terminated)


@app.post("/classify", response_model=S.ClassifyResponse)
def classify_ep(req: S.ClassifyRequest):
    basis = [_parse_element(spec) for spec in req.basis]
    if not basis:
        _bad_input("empty basis")
    report = appropriateness(basis)
    list_id = None
    params: dict[str, str] = {}
    canonical = basis
    witness_steps: list[S.WitnessStepOut] = []
    trace: list[str] = []
    try:
        if len(basis) == 1:
            target, witness = normalize_1d(basis[0])
        elif len(basis) == 2:
            target, witness = normalize_2d(basis[0], basis[1])
        else:
            target = witness = None
            trace = [f"dimension {len(basis)} > 2: appropriateness predicates only"]
        if target is not None:
            list_id = target.list_id
            params = {k: str(v) for k, v in target.params}
            canonical = list(target.basis)
            witness_steps = [S.WitnessStepOut(kind=s.kind, note=s.note)
                             for s in witness.steps]
            trace = list(witness.case_trace)
    except NotASubalgebraError as e:
        _bad_structure(str(e))
    except DegenerateSpanError as e:
        _bad_structure(str(e))
    except ClassifyError as e:
        _bad_input(str(e))
    return S.ClassifyResponse(
        list_id=list_id, params=params,
        canonical_basis=[_element_out(el) for el in canonical],
        witness=witness_steps, case_trace=trace,
        appropriateness=S.AppropriatenessOut(
            closed=report.closed, dim=report.dim, dt_in_span=report.dt_in_span,
            m=report.m, pure_g_intersection=report.pure_g_intersection,
            passes=report.passes, notes=list(report.notes)))


def _verify_response(report) -> S.VerifyResponse:
    return S.VerifyResponse(
        rows=[S.RowOut(table=r.row.table, case=r.row.case, isc=r.isc.status,
                       symmetry=r.symmetry.status, passed=r.passed,
                       f=to_text(r.row.f), g=to_text(r.row.g), notes=list(r.notes))
              for r in report.rows],
        anomalies=[S.FindingOut(name=n, detected=d, description=s)
                   for n, d, s in report.anomalies],
        extras=[S.FindingOut(name=n, detected=ok, description=s)
                for n, ok, s in report.extras],
        passed=report.passed,
        text=report.to_text())


@app.post("/verify", response_model=S.VerifyResponse)
def verify_ep(req: S.VerifyRequest):
    if req.table not in ("1", "2", "3", "all"):
        _bad_input(f"no such table: {req.table}")
    seed = req.seed if req.seed is not None else DEFAULT_SEED
    report = verify_table(req.table if req.table == "all" else int(req.table),
                          corrected=req.corrected, seed=seed)
    return _verify_response(report)


@app.post("/report", response_model=S.ReportResponse)
def full_report(req: S.ReportRequest):
    seed = req.seed if req.seed is not None else DEFAULT_SEED
    cls = builtin_class("gen-diff")
    system = determining_system(cls)
    kc = kernel_conditions(cls)
    gens_pass = all(equiv_invariance_check(Y, cls).passed
                    for Y in equivalence_generators(cls).values())
    adm = admissible_split(cls)
    tables = verify_table("all", corrected=True, seed=seed)
    summary = (f"determining system: {len(system)} equations; "
               f"kernel: {', '.join(to_text(c) + ' = 0' for c in kc.conditions)}; "
               f"equivalence generators: {'PASS' if gens_pass else 'FAIL'}; "
               f"tables: {'PASS' if tables.passed else 'FAIL'}")
    return S.ReportResponse(
        determining_text=system.to_text(),
        kernel_conditions=[to_text(c) for c in kc.conditions],
        equivalence_generators_pass=gens_pass,
        admissible_constraints=[to_text(c) for c in adm.constraints],
        tables=_verify_response(tables),
        summary=summary)
