"""Pydantic request/response models for the compute service.

Forms, matrices and certificates travel as the same JSON the library uses:
rationals are "p/q" strings, multi-indices are integer arrays.  Request
models validate shape; exactness checks stay in the core library.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

OrderName = Literal["lex", "example34"]


class CoeffEntry(BaseModel):
    alpha: list[int]
    c: str


class FormModel(BaseModel):
    n: int = Field(ge=1)
    deg: int = Field(ge=0)
    coeffs: list[CoeffEntry]


class BasisRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    order: OrderName = "lex"


class BasisResponse(BaseModel):
    n: int
    d: int
    order: OrderName
    k: int
    entries: list[list[int]]


class FiltrationRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    order: OrderName = "lex"


class GramRequest(BaseModel):
    form: FormModel
    order: OrderName = "lex"


class KernelRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    order: OrderName = "lex"
    include_elements: bool = True


class TestRequest(BaseModel):
    form: FormModel
    mode: Literal["sos", "psd", "ci", "interior", "boundary"] = "sos"
    level: int = Field(default=0, ge=0)
    lift: int = Field(default=1, ge=0)
    order: OrderName = "lex"
    seed: Optional[int] = None
    margin: Optional[str] = None          # interior mode: rational margin, default "1"
    max_iter: Optional[int] = Field(default=None, ge=1)
    pool: Optional[int] = Field(default=None, ge=1)
    residual_tol: Optional[float] = Field(default=None, gt=0)


class VerdictResponse(BaseModel):
    verdict: Literal["accepted", "refuted", "unknown"]
    mode: str
    level: int
    certificate: Optional[dict[str, Any]] = None
    evidence: dict[str, Any] = Field(default_factory=dict)
    elapsed_ms: float


class VerifyRequest(BaseModel):
    certificate: dict[str, Any]
    form: FormModel


class VerifyResponse(BaseModel):
    valid: bool
    reason: Optional[str] = None
    structural: bool = False
    elapsed_ms: float


class ReportRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)


class CorpusRequest(BaseModel):
    name: Literal["motzkin", "quartic_psd_not_sos", "basis_sos", "zero"]
    n: Optional[int] = Field(default=None, ge=1)
    d: Optional[int] = Field(default=None, ge=1)


class SampleRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    order: OrderName = "lex"
    level: int = Field(default=0, ge=0)
    seed: int = 0
    count: int = Field(default=10, ge=1, le=10000)


class SampleResponse(BaseModel):
    n: int
    d: int
    order: OrderName
    level: int
    fixed_coordinates: int
    points: list[dict[str, Any]]
    elapsed_ms: float
