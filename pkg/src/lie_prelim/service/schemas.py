"""Pydantic request/response models for the verification service.

Expressions travel as grammar strings; vector fields and algebra elements as
string-valued coefficient maps.  Every request carries an optional seed so
randomized oracles are reproducible."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Format = Literal["text", "latex", "json"]


class ClassSource(BaseModel):
    builtin: str | None = None
    inline: dict | None = None


class FieldSpec(BaseModel):
    """Vector-field coefficients as expression strings, plus declarations of
    any unknown functions appearing in them (name -> argument list)."""
    coefficients: dict[str, str]
    functions: dict[str, list[str]] = Field(default_factory=dict)


class ElementSpec(BaseModel):
    """Equivalence-algebra element in the generator basis."""
    a0: str = "0"
    a1: str = "0"
    a2: str = "0"
    a3: str = "0"
    h: str = "0"


class TransformationSpec(BaseModel):
    """Theorem-2 transformation: affine parameters and the u-component with
    its exact inverse (both as expressions in u)."""
    A0: str = "0"
    A1: str = "1"
    B0: str = "0"
    B1: str = "1"
    u_rule: str = "u"
    u_inverse: str | None = "u"


class DeriveRequest(BaseModel):
    source: ClassSource
    ansatz: str | None = None
    seed: int | None = None


class EquationOut(BaseModel):
    monomial: str
    lhs: str


class DeriveResponse(BaseModel):
    equations: list[EquationOut]
    residuals_vanish: bool | None = None
    text: str
    latex: str


class KernelRequest(BaseModel):
    source: ClassSource
    candidate: FieldSpec | None = None


class KernelResponse(BaseModel):
    conditions: list[str]
    unresolved: list[str]
    candidate_passes: bool | None = None
    candidate_residuals: list[tuple[str, str]] | None = None


class CheckEquivRequest(BaseModel):
    source: ClassSource
    field: FieldSpec


class CheckEquivResponse(BaseModel):
    passed: bool
    main_residuals: list[EquationOut]
    auxiliary_residuals: list[tuple[str, str]]


class AdmissibleRequest(BaseModel):
    source: ClassSource


class AdmissibleResponse(BaseModel):
    equations: list[EquationOut]
    constraints: list[str]


class TransformRequest(BaseModel):
    transformation: TransformationSpec
    f: str
    g: str
    functions: dict[str, list[str]] = Field(default_factory=dict)


class TransformResponse(BaseModel):
    f: str
    g: str


class CommutatorRequest(BaseModel):
    v: FieldSpec
    w: FieldSpec


class CommutatorResponse(BaseModel):
    result: dict[str, str]


class AdjointRequest(BaseModel):
    v: ElementSpec
    w: ElementSpec
    eps: str = "eps"
    order: int = 6
    method: Literal["series", "closed"] = "closed"


class AdjointResponse(BaseModel):
    result: ElementSpec
    terminated: bool | None = None


class ClassifyRequest(BaseModel):
    basis: list[ElementSpec]
    seed: int | None = None


class WitnessStepOut(BaseModel):
    kind: str
    note: str


class AppropriatenessOut(BaseModel):
    closed: bool
    dim: int
    dt_in_span: bool
    m: int
    pure_g_intersection: bool | None
    passes: bool
    notes: list[str]


class ClassifyResponse(BaseModel):
    list_id: str | None
    params: dict[str, str]
    canonical_basis: list[ElementSpec]
    witness: list[WitnessStepOut]
    case_trace: list[str]
    appropriateness: AppropriatenessOut


class VerifyRequest(BaseModel):
    table: str = "all"
    corrected: bool = True
    seed: int | None = None


class RowOut(BaseModel):
    table: int
    case: str
    isc: str
    symmetry: str
    passed: bool
    f: str
    g: str
    notes: list[str]


class FindingOut(BaseModel):
    name: str
    detected: bool
    description: str


class VerifyResponse(BaseModel):
    rows: list[RowOut]
    anomalies: list[FindingOut]
    extras: list[FindingOut]
    passed: bool
    text: str


class ReportRequest(BaseModel):
    seed: int | None = None


class ReportResponse(BaseModel):
    determining_text: str
    kernel_conditions: list[str]
    equivalence_generators_pass: bool
    admissible_constraints: list[str]
    tables: VerifyResponse
    summary: str


class ErrorDetail(BaseModel):
    kind: Literal["input", "structure"]
    message: str
