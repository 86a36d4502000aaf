"""FastAPI service wrapping the verification engine.

The CLI is a thin client of these endpoints; the CSV text returned in
each response is the authoritative report so that clients reproduce it
byte for byte.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import suite as S
from .errors import VerifierError
from .hypergraph import (gm_of_gms_check, hypergraph_from_dict, to_instance,
                         validate_and_degrees)
from .model import Instance, instance_from_dict, instance_to_dict

app = FastAPI(title="jensengap", version="0.1.0",
              description="Numerical verification of Jensen-type "
                          "inequalities on pairs of measure spaces.")


class VerifyRequest(BaseModel):
    instance: dict | None = None
    generator: str | None = None
    checks: list[str] = Field(default_factory=lambda: ["all"])
    phi: list[str] = Field(default_factory=lambda: ["id", "log"])
    tol: float = 1e-9
    eq_tol: float = 1e-9
    seed: int = 0
    trials: int = 100


class RowModel(BaseModel):
    instance_id: str
    check_name: str
    phi: str
    lhs: float | None
    rhs: float | None
    gap: float | None
    bound: float | None
    status: str
    tol: float


class VerifyResponse(BaseModel):
    rows: list[RowModel]
    skipped: list[dict]
    violations: int
    ok: bool
    csv: str
    json_report: str


class FuzzRequest(BaseModel):
    count: int = 100
    seed: int = 0
    phi: list[str] = Field(default_factory=lambda: ["id", "log"])
    tol: float = 1e-9
    eq_tol: float = 1e-9
    literal_power_mean: bool = False


class FuzzResponse(BaseModel):
    instances_tried: int
    seed: int
    violations: list[dict]
    ok: bool
    csv: str
    json_report: str


class SweepRequest(BaseModel):
    instance: dict | None = None
    generator: str | None = None
    family: str
    tol: float = 1e-9
    eq_tol: float = 1e-9
    seed: int = 0


class GenerateRequest(BaseModel):
    generator: str
    seed: int = 0


class GenerateResponse(BaseModel):
    instance: dict


class HypergraphRequest(BaseModel):
    hypergraph: dict
    phi: list[str] = Field(default_factory=lambda: ["id", "log"])
    tol: float = 1e-9
    eq_tol: float = 1e-9


def _resolve_instance(instance: dict | None, generator: str | None,
                      seed: int) -> Instance:
    if (instance is None) == (generator is None):
        raise HTTPException(
            status_code=422,
            detail="provide exactly one of 'instance' and 'generator'")
    try:
        if instance is not None:
            return instance_from_dict(instance)
        return S.parse_generator(generator, seed)
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _suite_response(report: S.SuiteReport) -> VerifyResponse:
    rows = [RowModel(instance_id=r.instance_id, check_name=r.check_name,
                     phi=r.phi, lhs=r.lhs, rhs=r.rhs, gap=r.gap,
                     bound=r.bound, status=r.status, tol=r.tol)
            for r in report.rows]
    return VerifyResponse(rows=rows, skipped=report.skipped,
                          violations=len(report.violations), ok=report.ok,
                          csv=S.rows_to_csv(report.rows),
                          json_report=S.report_to_json(report))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    inst = _resolve_instance(req.instance, req.generator, req.seed)
    try:
        config = S.SuiteConfig(checks=tuple(req.checks),
                               phi_list=tuple(req.phi), tol=req.tol,
                               eq_tol=req.eq_tol, seed=req.seed,
                               trials=req.trials)
        report = S.run_suite_on_instance(inst, config)
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    if not report.rows and not report.skipped:
        raise HTTPException(status_code=400, detail="no applicable checks")
    return _suite_response(report)


@app.post("/fuzz", response_model=FuzzResponse)
def run_fuzz(req: FuzzRequest) -> FuzzResponse:
    try:
        config = S.SuiteConfig(phi_list=tuple(req.phi), tol=req.tol,
                               eq_tol=req.eq_tol, seed=req.seed)
        report = S.fuzz(config, req.count,
                        literal_power_mean=req.literal_power_mean)
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return FuzzResponse(
        instances_tried=report.instances_tried, seed=report.seed,
        violations=[{"check": v.check, "phi": v.phi, "gap": v.gap,
                     "instance": v.instance} for v in report.violations],
        ok=report.ok, csv=S.fuzz_report_to_csv(report),
        json_report=S.fuzz_report_to_json(report))


@app.post("/sweep", response_model=VerifyResponse)
def run_sweep(req: SweepRequest) -> VerifyResponse:
    inst = _resolve_instance(req.instance, req.generator, req.seed)
    try:
        config = S.SuiteConfig(tol=req.tol, eq_tol=req.eq_tol, seed=req.seed)
        report = S.sweep(inst, req.family, config)
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _suite_response(report)


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    try:
        inst = S.parse_generator(req.generator, req.seed)
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return GenerateResponse(instance=instance_to_dict(inst))


@app.post("/hypergraph/verify", response_model=VerifyResponse)
def verify_hypergraph(req: HypergraphRequest) -> VerifyResponse:
    try:
        h = hypergraph_from_dict(req.hypergraph)
        summary = validate_and_degrees(h)
        inst = to_instance(h)
        config = S.SuiteConfig(phi_list=tuple(req.phi), tol=req.tol,
                               eq_tol=req.eq_tol)
        report = S.run_suite_on_instance(inst, config)
        if bool((h.edge_weights == 1.0).all()) and summary.degrees.min() > 0:
            res = gm_of_gms_check(h, tol=req.tol, eq_tol=req.eq_tol)
            report.rows.append(S.ReportRow(
                instance_id=inst.instance_id, check_name=res.check_name,
                phi=res.phi_label, lhs=res.lhs, rhs=res.rhs, gap=res.gap,
                bound=res.bound, status=res.status, tol=res.tol))
    except VerifierError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _suite_response(report)
