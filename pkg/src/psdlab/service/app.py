"""FastAPI app exposing the toolkit; the CLI is a thin client of these routes.

Every route is a pure function of its request body, so identical requests
give identical responses except for the elapsed_ms timing field.  Structural
errors (mismatched shapes, out-of-range levels) map to HTTP 400; semantic
verdicts are data, not errors.
"""

from __future__ import annotations

import os
import time
from fractions import Fraction

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..forms import Form, corpus
from ..gram import canonical_gram, filtration, kernel_basis_cached, separation_pattern
from ..forms import classify_hilbert_case, HilbertCase
from ..gram import a_index_set
from ..membership import (
    Options,
    boundary_probe,
    certificate_from_json,
    ci_inner_certify,
    ci_refute,
    hi_sample,
    interior_sigma_test,
    psd_sample_test,
    sos_test,
    verify_certificate,
)
from ..monomials import MonomialOrder, k_of, ordered_basis
from ..rational import parse_rational
from . import models

DEFAULT_SEED = int(os.environ.get("PSDLAB_SEED", "0"))


def _form_from_model(m: models.FormModel) -> Form:
    try:
        return Form.from_json(m.model_dump())
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _options(req: models.TestRequest) -> Options:
    opts = Options(seed=req.seed if req.seed is not None else DEFAULT_SEED)
    if req.max_iter is not None:
        opts.max_iter = req.max_iter
    if req.pool is not None:
        opts.pool = req.pool
    if req.residual_tol is not None:
        opts.residual_tol = req.residual_tol
    return opts


def create_app() -> FastAPI:
    app = FastAPI(title="psdlab", version=__version__,
                  description="Exact Gram filtrations and certificate-checked cone membership")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/basis", response_model=models.BasisResponse)
    def basis(req: models.BasisRequest) -> models.BasisResponse:
        order = MonomialOrder.from_name(req.order)
        try:
            b = ordered_basis(req.n, req.d, order)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return models.BasisResponse(n=req.n, d=req.d, order=req.order, k=b.k,
                                    entries=[list(a) for a in b.entries])

    @app.post("/filtration")
    def filtration_route(req: models.FiltrationRequest) -> dict:
        started = time.perf_counter()
        order = MonomialOrder.from_name(req.order)
        try:
            desc = filtration(req.n, req.d, order)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        payload = desc.to_json()
        payload["elapsed_ms"] = (time.perf_counter() - started) * 1_000
        return payload

    @app.post("/gram")
    def gram_route(req: models.GramRequest) -> dict:
        started = time.perf_counter()
        f = _form_from_model(req.form)
        if f.deg % 2 != 0:
            raise HTTPException(status_code=400, detail="gram fiber needs an even-degree form")
        order = MonomialOrder.from_name(req.order)
        basis = ordered_basis(f.n, f.deg // 2, order)
        a_f = canonical_gram(f, basis)
        kern = kernel_basis_cached(f.n, f.deg // 2, order)
        return {
            "n": f.n,
            "deg": f.deg,
            "order": req.order,
            "gram": a_f.to_json(),
            "kernel_dimension": len(kern),
            "elapsed_ms": (time.perf_counter() - started) * 1_000,
        }

    @app.post("/kernel")
    def kernel_route(req: models.KernelRequest) -> dict:
        started = time.perf_counter()
        order = MonomialOrder.from_name(req.order)
        try:
            kern = kernel_basis_cached(req.n, req.d, order)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        out = {
            "n": req.n,
            "d": req.d,
            "order": req.order,
            "dimension": len(kern),
            "elapsed_ms": (time.perf_counter() - started) * 1_000,
        }
        if req.include_elements:
            out["elements"] = [b.to_json() for b in kern]
        return out

    @app.post("/test", response_model=models.VerdictResponse)
    def test_route(req: models.TestRequest) -> models.VerdictResponse:
        started = time.perf_counter()
        f = _form_from_model(req.form)
        order = MonomialOrder.from_name(req.order)
        opts = _options(req)
        if f.deg % 2 != 0:
            raise HTTPException(status_code=400, detail="tests need an even-degree form")
        desc = filtration(f.n, f.deg // 2, order)
        if not 0 <= req.level <= desc.varieties:
            raise HTTPException(status_code=400,
                                detail=f"level {req.level} out of range 0..{desc.varieties}")
        verdict, cert, evidence = _dispatch_test(f, req, order, opts)
        return models.VerdictResponse(
            verdict=verdict, mode=req.mode, level=req.level,
            certificate=None if cert is None else cert.to_json(),
            evidence=evidence,
            elapsed_ms=(time.perf_counter() - started) * 1_000,
        )

    @app.post("/verify", response_model=models.VerifyResponse)
    def verify_route(req: models.VerifyRequest) -> models.VerifyResponse:
        started = time.perf_counter()
        f = _form_from_model(req.form)
        try:
            cert = certificate_from_json(req.certificate)
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"malformed certificate: {exc}") from exc
        v = verify_certificate(cert, f)
        return models.VerifyResponse(valid=v.valid, reason=v.reason, structural=v.structural,
                                     elapsed_ms=(time.perf_counter() - started) * 1_000)

    @app.post("/report")
    def report_route(req: models.ReportRequest) -> dict:
        started = time.perf_counter()
        n, d = req.n, req.d
        k = k_of(n, d)
        case = classify_hilbert_case(n, 2 * d)
        kern = kernel_basis_cached(n, d, MonomialOrder.LEX_DESC)
        pattern, strict = separation_pattern(n, d)
        sym_dim = (k + 1) * (k + 2) // 2
        aset_sizes = {str(i): len(a_index_set(n, d, i)) for i in range(0, k - n + 1)}
        lines = [
            f"forms: {n + 1} variables, degree {2 * d}; k = {k}",
            f"hilbert case: {'EQUAL (every PSD form is SOS)' if case is HilbertCase.EQUAL else 'strict'}",
            f"gram matrices: dim Sym = {sym_dim}, kernel dimension = {len(kern)}",
            f"chain: {pattern}",
            f"strictly separating intermediate cones: {strict}",
        ]
        return {
            "n": n, "d": d, "k": k,
            "hilbert_case": "equal" if case is HilbertCase.EQUAL else "strict",
            "kernel_dimension": len(kern),
            "sym_dimension": sym_dim,
            "pattern": pattern,
            "strict_count": strict,
            "a_set_sizes": aset_sizes,
            "text": "\n".join(lines),
            "elapsed_ms": (time.perf_counter() - started) * 1_000,
        }

    @app.post("/corpus")
    def corpus_route(req: models.CorpusRequest) -> dict:
        try:
            f = corpus(req.name, req.n, req.d)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"name": req.name, "form": f.to_json()}

    @app.post("/sample", response_model=models.SampleResponse)
    def sample_route(req: models.SampleRequest) -> models.SampleResponse:
        started = time.perf_counter()
        order = MonomialOrder.from_name(req.order)
        desc = filtration(req.n, req.d, order)
        if not 0 <= req.level <= desc.varieties:
            raise HTTPException(status_code=400,
                                detail=f"level {req.level} out of range 0..{desc.varieties}")
        pts = hi_sample(desc, req.level, req.seed, req.count)
        return models.SampleResponse(
            n=req.n, d=req.d, order=req.order, level=req.level,
            fixed_coordinates=desc.fixed_coordinates(req.level),
            points=[p.to_json() for p in pts],
            elapsed_ms=(time.perf_counter() - started) * 1_000,
        )

    return app


def _dispatch_test(f: Form, req: models.TestRequest, order: MonomialOrder, opts: Options):
    if req.mode == "sos":
        res = sos_test(f, opts)
        return res.status, res.certificate, res.diagnostics
    if req.mode == "interior":
        margin = parse_rational(req.margin) if req.margin else Fraction(1)
        res = interior_sigma_test(f, margin, opts)
        return res.status, res.certificate, res.diagnostics
    if req.mode == "ci":
        res = ci_inner_certify(f, req.level, req.lift, order, opts)
        if res.accepted:
            return "accepted", res.certificate, res.diagnostics
        refutation = ci_refute(f, req.level, order, opts)
        if refutation is not None:
            return "refuted", refutation, res.diagnostics
        return "unknown", None, res.diagnostics
    if req.mode == "psd":
        report = psd_sample_test(f, seed=opts.seed, starts=opts.sample_starts)
        evidence = {"min_value": report.min_value, "argmin": list(report.argmin), **report.evidence}
        if report.refuted:
            cert = ci_refute(f, req.level, order, opts)
            if cert is not None:
                return "refuted", cert, evidence
            return "refuted", None, evidence
        # One-sided probe: a non-negative sampled minimum is evidence, never acceptance.
        return "unknown", None, evidence
    if req.mode == "boundary":
        rep = boundary_probe(f, req.level, lift=req.lift, order=order, options=opts)
        evidence = {"classification": rep.classification,
                    "t_out": str(rep.t_out),
                    "t_in": None if rep.t_in is None else str(rep.t_in),
                    "bracket_width": None if rep.bracket_width is None else str(rep.bracket_width),
                    **rep.evidence}
        verdict = {"interior": "accepted", "exterior": "refuted"}.get(rep.classification, "unknown")
        return verdict, None, evidence
    raise HTTPException(status_code=400, detail=f"unknown mode {req.mode!r}")


app = create_app()
