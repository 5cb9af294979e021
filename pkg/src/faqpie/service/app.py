"""HTTP face of the encoding pipeline.

Images travel base64-encoded (PPM or PNG bytes, sniffed); reports come
back both as typed JSON and, for comparisons, as rendered table/CSV text.
Domain errors map to 400 with a structured detail carrying the error kind.
"""
from __future__ import annotations

import base64
import binascii
import importlib.resources
import json

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..image_io import ImageFormatError, RgbImage, decode_image, encode_ppm, _encode_png
from ..pipeline import (
    EncodeSettings,
    PipelineError,
    compare_strategies,
    encode_image,
    generate_test_image,
    verify_image,
)
from ..reports import report_to_dict, reports_to_csv, reports_to_table
from . import models

__all__ = ["create_app", "app"]


def _bad_request(kind: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail={"kind": kind, "message": message})


def _decode_request_image(image_b64: str) -> RgbImage:
    try:
        raw = base64.b64decode(image_b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise _bad_request("image", f"invalid base64 payload: {exc}") from exc
    try:
        return decode_image(raw)
    except ImageFormatError as exc:
        raise _bad_request("image", str(exc)) from exc


def _encode_response_image(img: RgbImage, fmt: str) -> str:
    raw = _encode_png(img) if fmt == "png" else encode_ppm(img)
    return base64.b64encode(raw).decode("ascii")


def _settings(options: models.EncodeOptions) -> EncodeSettings:
    return EncodeSettings.from_flags(
        strategy=options.strategy,
        m=options.m,
        mode=options.mode,
        partition_n0=options.partition_n0,
        m0=options.m0,
        prune_fraction=options.prune_fraction,
        prune_abs=options.prune_abs,
        parity_cancel=options.parity_cancel,
        exclude_zero_blocks=options.exclude_zero_blocks,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="faqpie",
        version=__version__,
        description="Approximate quantum amplitude encoding of raster images "
                    "via truncated Fourier spectra and compressed loader circuits.",
    )

    @app.get("/healthz", response_model=models.HealthResponse)
    def healthz() -> models.HealthResponse:
        return models.HealthResponse(status="ok", version=__version__)

    @app.get("/schemas/report")
    def report_schema() -> JSONResponse:
        text = (importlib.resources.files("faqpie") / "schemas" / "report.schema.json").read_text()
        return JSONResponse(content=json.loads(text))

    @app.post("/encode", response_model=models.EncodeResponse)
    def encode(req: models.EncodeRequest) -> models.EncodeResponse:
        img = _decode_request_image(req.image_b64)
        try:
            result = encode_image(img, _settings(req.options),
                                  want_dump=req.dump_circuits)
        except PipelineError as exc:
            raise _bad_request("domain", str(exc)) from exc
        return models.EncodeResponse(
            report=models.Report(**report_to_dict(result.report)),
            image_b64=(_encode_response_image(result.image, req.image_format)
                       if req.include_image else None),
            circuit_dumps=result.dumps if req.dump_circuits else None,
        )

    @app.post("/compare", response_model=models.CompareResponse)
    def compare(req: models.CompareRequest) -> models.CompareResponse:
        img = _decode_request_image(req.image_b64)
        try:
            rows = compare_strategies(img, list(req.strategies), _settings(req.options))
        except PipelineError as exc:
            raise _bad_request("domain", str(exc)) from exc
        return models.CompareResponse(
            rows=[models.Report(**report_to_dict(r)) for r in rows],
            table=reports_to_table(rows),
            csv=reports_to_csv(rows),
        )

    @app.post("/verify", response_model=models.VerifyResponse)
    def verify(req: models.VerifyRequest) -> models.VerifyResponse:
        img = _decode_request_image(req.image_b64)
        try:
            result = verify_image(img, m=req.m, tolerance=req.tolerance,
                                  corrupt_angle=req.corrupt_angle)
        except PipelineError as exc:
            raise _bad_request("domain", str(exc)) from exc
        return models.VerifyResponse(
            passed=result.passed,
            max_deviation=result.max_deviation,
            tolerance=result.tolerance,
            per_channel=result.per_channel,
        )

    @app.post("/generate", response_model=models.GenerateResponse)
    def generate(req: models.GenerateRequest) -> models.GenerateResponse:
        img = generate_test_image(req.width, req.height, seed=req.seed,
                                  smooth=req.smooth)
        return models.GenerateResponse(
            image_b64=_encode_response_image(img, req.image_format),
            width=img.width,
            height=img.height,
        )

    return app


app = create_app()
