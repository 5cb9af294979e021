"""Request and response schemas of the encoding service."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Channel = Literal["r", "g", "b"]
Mode = Literal["centered", "nonneg"]
StrategyName = Literal["faqpie", "faqpie+cucr", "faqpie+ip", "faqpie+cucr+ip", "exact-qpie"]


class EncodeOptions(BaseModel):
    strategy: StrategyName | None = None
    m: int | None = Field(default=None, ge=0)
    mode: Mode = "centered"
    partition_n0: int | None = Field(default=None, ge=1)
    m0: int | None = Field(default=None, ge=0)
    prune_fraction: float | None = Field(default=None, ge=0.0, lt=1.0)
    prune_abs: float | None = Field(default=None, ge=0.0)
    parity_cancel: bool = True
    exclude_zero_blocks: bool = False


class EncodeRequest(BaseModel):
    image_b64: str
    options: EncodeOptions = EncodeOptions()
    include_image: bool = True
    image_format: Literal["ppm", "png"] = "ppm"
    dump_circuits: bool = False


class Percent(BaseModel):
    raw: float
    rounded: float


class Fidelity(BaseModel):
    r: float
    g: float
    b: float


class Baseline(BaseModel):
    rotations: int
    cnots: int
    m: int


class CircuitRow(BaseModel):
    channel: Channel
    block_row: int
    block_col: int
    skipped: bool
    qubits: int
    rotations_ucr: int
    cnots_ucr: int
    fidelity: float
    preprocess_ms: float


class BlockRow(BaseModel):
    channel: Channel
    block_row: int
    block_col: int
    block_norm: float
    weight: float
    skipped: bool


class Report(BaseModel):
    strategy: StrategyName
    qubits: int
    circuit_count: int
    m: int | None
    mode: Mode
    partition_n0: int | None
    fidelity: Fidelity
    rotations_max: int
    cnots_max: int
    rot_reduction_pct: Percent
    cnot_reduction_pct: Percent
    baseline: Baseline
    preprocess_ms: float
    circuits: list[CircuitRow]
    blocks: list[BlockRow]


class EncodeResponse(BaseModel):
    report: Report
    image_b64: str | None = None
    circuit_dumps: dict[str, str] | None = None


class CompareRequest(BaseModel):
    image_b64: str
    strategies: list[StrategyName] = Field(min_length=2)
    options: EncodeOptions = EncodeOptions()


class CompareResponse(BaseModel):
    rows: list[Report]
    table: str
    csv: str


class VerifyRequest(BaseModel):
    image_b64: str
    m: int = Field(ge=0)
    tolerance: float = Field(default=1e-9, gt=0.0)
    corrupt_angle: float = 0.0


class VerifyResponse(BaseModel):
    passed: bool
    max_deviation: float
    tolerance: float
    per_channel: dict[Channel, float]


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    width: int = Field(ge=1, le=4096)
    height: int = Field(ge=1, le=4096)
    seed: int = 0
    smooth: bool = False
    image_format: Literal["ppm", "png"] = "ppm"


class GenerateResponse(BaseModel):
    image_b64: str
    width: int
    height: int
