"""Blockwise encoding: tile a plane, encode each tile independently, and
aggregate metrics by the maxima over tiles (sum for preprocessing time).

Tile index j runs row-major over the 2^{n-n0} x 2^{n-n0} grid of tiles.
Tiles are separate circuits on 2*n0 qubits each; the tile index is
classical bookkeeping, not a qubit register.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, count_gates
from .compress import CompressionOptions, compress
from .fsl import FslLayout, build_fsl_2d
from .image_io import ImagePlane
from .spectrum import (
    FidelityValue,
    SpectrumBlock,
    averaged_fidelity,
    block_weight,
    forward_dft,
    truncate_spectrum,
)

__all__ = [
    "BlockEntry",
    "PartitionPlan",
    "BlockEncoding",
    "AggregateMetrics",
    "split",
    "encode_blocks",
    "reassemble",
    "aggregate_metrics",
]


@dataclass(frozen=True)
class BlockEntry:
    block_row: int
    block_col: int
    block_norm: float
    weight: float


@dataclass(frozen=True)
class PartitionPlan:
    """Tiling of a 2^n plane into 2^{n0} tiles with their norm weights."""

    n: int
    n0: int
    blocks: list[BlockEntry]

    def __post_init__(self):
        if self.n0 >= self.n:
            raise ValueError(f"block size n0={self.n0} must be smaller than n={self.n}")
        expected = 1 << (2 * (self.n - self.n0))
        if len(self.blocks) != expected:
            raise ValueError(f"expected {expected} blocks, got {len(self.blocks)}")

    @property
    def blocks_per_side(self) -> int:
        return 1 << (self.n - self.n0)


@dataclass(frozen=True)
class BlockEncoding:
    """Per-tile result: circuit plus the numbers the report needs."""

    block_row: int
    block_col: int
    skipped: bool
    circuit: Circuit | None
    spectrum_block: SpectrumBlock | None
    qubits: int
    rotations_ucr: int
    cnots_ucr: int
    fidelity: FidelityValue
    preprocess_ms: float


@dataclass(frozen=True)
class AggregateMetrics:
    max_rotations: int
    max_cnots: int
    max_qubits: int
    total_preprocess_ms: float
    avg_fidelity: FidelityValue


def split(plane: ImagePlane, n0: int) -> tuple[PartitionPlan, list[ImagePlane]]:
    """Non-overlapping 2^{n0} tiles in row-major order with norm weights."""
    if n0 >= plane.n:
        raise ValueError(f"block size n0={n0} must be smaller than n={plane.n}")
    side = 1 << n0
    per = 1 << (plane.n - n0)
    total = plane.frobenius_norm
    entries = []
    blocks = []
    for r in range(per):
        for c in range(per):
            tile = plane.pixels[r * side : (r + 1) * side, c * side : (c + 1) * side]
            bp = ImagePlane(n=n0, pixels=tile.copy())
            weight = block_weight(bp.frobenius_norm, total) if total > 0 else 0.0
            entries.append(BlockEntry(r, c, bp.frobenius_norm, weight))
            blocks.append(bp)
    return PartitionPlan(n=plane.n, n0=n0, blocks=entries), blocks


def encode_blocks(
    blocks: list[ImagePlane],
    plan: PartitionPlan,
    m0: int,
    opts: CompressionOptions | None = None,
) -> list[BlockEncoding]:
    """Independent loader pipeline per tile at truncation order m0.

    All-zero tiles are flagged and carry no circuit; their fidelity is 1 by
    convention (nothing was lost) and they are excluded from gate maxima.
    """
    if m0 > plan.n0 - 2:
        raise ValueError(f"block truncation order m0={m0} exceeds n0-2={plan.n0 - 2}")
    out = []
    layout = FslLayout(n=plan.n0, m=m0)
    for entry, bp in zip(plan.blocks, blocks):
        if bp.frobenius_norm == 0.0:
            out.append(
                BlockEncoding(
                    block_row=entry.block_row,
                    block_col=entry.block_col,
                    skipped=True,
                    circuit=None,
                    spectrum_block=None,
                    qubits=0,
                    rotations_ucr=0,
                    cnots_ucr=0,
                    fidelity=FidelityValue(1.0),
                    preprocess_ms=0.0,
                )
            )
            continue
        spec = forward_dft(bp)
        sblock = truncate_spectrum(spec, m0, "centered")
        t0 = time.perf_counter()
        circ = build_fsl_2d(sblock, layout)
        if opts is not None:
            circ, _ = compress(circ, opts)
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        counts = count_gates(circ)
        fid = FidelityValue((sblock.block_norm / spec.norm) ** 2)
        out.append(
            BlockEncoding(
                block_row=entry.block_row,
                block_col=entry.block_col,
                skipped=False,
                circuit=circ,
                spectrum_block=sblock,
                qubits=layout.width,
                rotations_ucr=counts.rotations_ucr,
                cnots_ucr=counts.cnots_ucr,
                fidelity=fid,
                preprocess_ms=elapsed_ms,
            )
        )
    return out


def reassemble(
    block_images: list[np.ndarray],
    plan: PartitionPlan,
    scales: list[float] | None = None,
) -> ImagePlane:
    """Tile unit-norm block grids back into a full plane.

    Each grid is rescaled by `scales` (default: the plan's stored block
    norms, which round-trips an exact per-tile reconstruction).
    """
    if len(block_images) != len(plan.blocks):
        raise ValueError("block image count does not match the plan")
    if scales is None:
        scales = [b.block_norm for b in plan.blocks]
    if len(scales) != len(plan.blocks):
        raise ValueError("scale count does not match the plan")
    side = 1 << plan.n0
    full = np.zeros((1 << plan.n, 1 << plan.n), dtype=np.float64)
    for entry, grid, scale in zip(plan.blocks, block_images, scales):
        if grid.shape != (side, side):
            raise ValueError(f"block grid shape {grid.shape} is not {side}x{side}")
        r, c = entry.block_row, entry.block_col
        full[r * side : (r + 1) * side, c * side : (c + 1) * side] = grid * scale
    return ImagePlane(n=plan.n, pixels=np.clip(full, 0.0, None))


def aggregate_metrics(reports: list[BlockEncoding]) -> AggregateMetrics:
    """Maxima over non-skipped tiles for gates/qubits, sum of preprocessing
    times, mean fidelity across all tiles."""
    if not reports:
        raise ValueError("no block reports to aggregate")
    active = [r for r in reports if not r.skipped]
    return AggregateMetrics(
        max_rotations=max((r.rotations_ucr for r in active), default=0),
        max_cnots=max((r.cnots_ucr for r in active), default=0),
        max_qubits=max((r.qubits for r in active), default=0),
        total_preprocess_ms=sum(r.preprocess_ms for r in reports),
        avg_fidelity=averaged_fidelity([r.fidelity for r in reports]),
    )
