"""End-to-end encoding runs: image in, report + reconstruction out.

A run loads an image, pads each channel to a power-of-two plane, truncates
its spectrum, synthesizes loader circuits (whole-image or per tile),
optionally compresses them, simulates, and reassembles a displayable
image. Reductions are always measured against the uncompressed whole-image
run at the session's reference order, which is how the strategy table is
normalized.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, count_gates, dump_circuit
from .compress import CompressionOptions, compress
from .fsl import FslLayout, build_exact_qpie, build_fsl_2d
from .image_io import (
    ImagePlane,
    PadRecord,
    RgbImage,
    crop_and_merge,
    log2_side_for,
    to_planes,
    zero_pad,
)
from .partition import aggregate_metrics, encode_blocks, reassemble, split
from .reports import STRATEGIES, BlockReport, CircuitReport, EncodingReport
from .simulator import run, run_fsl_fast
from .spectrum import (
    FidelityValue,
    averaged_fidelity,
    classical_reconstruct,
    fidelity,
    forward_dft,
    truncate_spectrum,
)

__all__ = [
    "PipelineError",
    "EncodeSettings",
    "EncodeResult",
    "VerifyResult",
    "encode_image",
    "compare_strategies",
    "verify_image",
    "generate_test_image",
]

CHANNELS = ("r", "g", "b")
VERIFY_MAX_N = 6


class PipelineError(ValueError):
    """Invalid settings or image/parameter mismatch."""


@dataclass(frozen=True)
class EncodeSettings:
    """Resolved knobs for one strategy run.

    `m` is the whole-image truncation order and the reference order for
    reduction percentages (default: 6 when the image allows it); partitioned
    runs encode tiles at `m0` (default m-1) on 2^{n0} tiles (default n-1).
    """

    strategy: str = "faqpie"
    m: int | None = None
    mode: str = "centered"
    partition_n0: int | None = None
    m0: int | None = None
    prune_fraction: float | None = None
    prune_abs: float | None = None
    parity_cancel: bool = True
    exclude_zero_blocks: bool = False

    def resolve(self, n: int) -> "EncodeSettings":
        """Fill strategy-dependent defaults for an image of log-size n."""
        name = self.strategy
        if name not in STRATEGIES:
            raise PipelineError(f"unknown strategy {name!r}")
        if self.mode not in ("centered", "nonneg"):
            raise PipelineError(f"unknown mode {self.mode!r}")
        partitioned = name.endswith("+ip")
        compressed = "+cucr" in name
        if self.mode == "nonneg" and (partitioned or compressed or name == "exact-qpie"):
            raise PipelineError("nonneg mode is a classical oracle: no circuits, "
                                "no partition or compression")
        m = self.m if self.m is not None else min(6, n - 2)
        out = replace(self, m=m)
        if name == "exact-qpie":
            # m is only the reduction baseline here; an out-of-range value
            # just disables the baseline instead of rejecting the run
            return replace(out, partition_n0=None, m0=None,
                           prune_fraction=None, prune_abs=None)
        if m > n - 2 or m < 0:
            raise PipelineError(f"m exceeds n-2 (m={m}, n={n})")
        if partitioned:
            n0 = out.partition_n0 if out.partition_n0 is not None else n - 1
            m0 = out.m0 if out.m0 is not None else m - 1
            if not 1 <= n0 < n:
                raise PipelineError(f"partition size n0={n0} invalid for n={n}")
            if m0 > n0 - 2 or m0 < 0:
                raise PipelineError(f"m exceeds n-2 (m0={m0}, n0={n0})")
            out = replace(out, partition_n0=n0, m0=m0)
        else:
            out = replace(out, partition_n0=None, m0=None)
        if compressed:
            frac = out.prune_fraction if out.prune_fraction is not None else 0.30
            out = replace(out, prune_fraction=frac)
        else:
            out = replace(out, prune_fraction=None, prune_abs=None)
        return out

    @classmethod
    def from_flags(cls, *, strategy: str | None = None, m: int | None = None,
                   mode: str = "centered", partition_n0: int | None = None,
                   m0: int | None = None, prune_fraction: float | None = None,
                   prune_abs: float | None = None, parity_cancel: bool = True,
                   exclude_zero_blocks: bool = False) -> "EncodeSettings":
        """Derive the strategy name from flags when not given explicitly."""
        if strategy is None:
            pruned = (prune_fraction is not None and prune_fraction > 0) or prune_abs is not None
            strategy = "faqpie"
            if pruned:
                strategy += "+cucr"
            if partition_n0 is not None:
                strategy += "+ip"
        return cls(strategy=strategy, m=m, mode=mode, partition_n0=partition_n0,
                   m0=m0, prune_fraction=prune_fraction, prune_abs=prune_abs,
                   parity_cancel=parity_cancel,
                   exclude_zero_blocks=exclude_zero_blocks)


@dataclass(frozen=True)
class EncodeResult:
    report: EncodingReport
    image: RgbImage
    dumps: dict[str, str] | None


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    max_deviation: float
    tolerance: float
    per_channel: dict[str, float]


def _pad_channels(img: RgbImage) -> tuple[list[ImagePlane], PadRecord, int]:
    n = log2_side_for(img.height, img.width)
    planes = []
    rec = None
    for grid in to_planes(img):
        plane, rec = zero_pad(grid, n)
        planes.append(plane)
    return planes, rec, n


def _compression(settings: EncodeSettings) -> CompressionOptions | None:
    if settings.prune_fraction is None and settings.prune_abs is None:
        return None
    return CompressionOptions(
        prune_fraction=settings.prune_fraction or 0.0,
        prune_abs=settings.prune_abs,
        parity_cancel=settings.parity_cancel,
    )


def _skipped_circuit(channel: str) -> CircuitReport:
    return CircuitReport(channel=channel, block_row=0, block_col=0, skipped=True,
                         qubits=0, rotations_ucr=0, cnots_ucr=0, fidelity=1.0,
                         preprocess_ms=0.0)


def _baseline_counts(planes: list[ImagePlane], m: int) -> tuple[int, int]:
    """Maximal counts of the uncompressed whole-image run at order m."""
    rot = cnot = 0
    layout = FslLayout(n=planes[0].n, m=m)
    for plane in planes:
        if plane.frobenius_norm == 0.0:
            continue
        block = truncate_spectrum(forward_dft(plane), m, "centered")
        if block.block_norm == 0.0:
            continue
        counts = count_gates(build_fsl_2d(block, layout))
        rot = max(rot, counts.rotations_ucr)
        cnot = max(cnot, counts.cnots_ucr)
    return rot, cnot


def _encode_whole_channel(channel: str, plane: ImagePlane, settings: EncodeSettings,
                          opts: CompressionOptions | None,
                          want_dump: bool) -> tuple[CircuitReport, np.ndarray, Circuit | None]:
    side = plane.side
    if plane.frobenius_norm == 0.0:
        return _skipped_circuit(channel), np.zeros((side, side)), None
    spec = forward_dft(plane)
    block = truncate_spectrum(spec, settings.m, "centered")
    if block.block_norm == 0.0:
        return _skipped_circuit(channel), np.zeros((side, side)), None
    layout = FslLayout(n=plane.n, m=settings.m)
    t0 = time.perf_counter()
    circ = build_fsl_2d(block, layout)
    if opts is not None:
        circ, _ = compress(circ, opts)
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    sv = run_fsl_fast(circ, layout)
    pvec = plane.pixels.reshape(-1) / plane.frobenius_norm
    fid = min(abs(np.vdot(sv.amplitudes, pvec)) ** 2, 1.0)
    recon = np.abs(sv.amplitudes).reshape(side, side) * (block.block_norm / side)
    counts = count_gates(circ)
    rep = CircuitReport(channel=channel, block_row=0, block_col=0, skipped=False,
                        qubits=layout.width, rotations_ucr=counts.rotations_ucr,
                        cnots_ucr=counts.cnots_ucr, fidelity=fid,
                        preprocess_ms=elapsed_ms)
    return rep, recon, (circ if want_dump else None)


def _encode_partitioned_channel(channel: str, plane: ImagePlane,
                                settings: EncodeSettings,
                                opts: CompressionOptions | None, want_dump: bool):
    n0, m0 = settings.partition_n0, settings.m0
    plan, tiles = split(plane, n0)
    encodings = encode_blocks(tiles, plan, m0, opts)
    layout = FslLayout(n=n0, m=m0)
    side0 = 1 << n0

    circuit_reports = []
    tile_grids = []
    scales = []
    dumps = {}
    updated = []
    for enc, tile in zip(encodings, tiles):
        if enc.skipped:
            circuit_reports.append(
                CircuitReport(channel=channel, block_row=enc.block_row,
                              block_col=enc.block_col, skipped=True, qubits=0,
                              rotations_ucr=0, cnots_ucr=0, fidelity=1.0,
                              preprocess_ms=0.0))
            tile_grids.append(np.zeros((side0, side0)))
            scales.append(0.0)
            updated.append(enc)
            continue
        sv = run_fsl_fast(enc.circuit, layout)
        tvec = tile.pixels.reshape(-1) / tile.frobenius_norm
        fid = min(abs(np.vdot(sv.amplitudes, tvec)) ** 2, 1.0)
        circuit_reports.append(
            CircuitReport(channel=channel, block_row=enc.block_row,
                          block_col=enc.block_col, skipped=False,
                          qubits=enc.qubits, rotations_ucr=enc.rotations_ucr,
                          cnots_ucr=enc.cnots_ucr, fidelity=fid,
                          preprocess_ms=enc.preprocess_ms))
        tile_grids.append(np.abs(sv.amplitudes).reshape(side0, side0))
        scales.append(enc.spectrum_block.block_norm / side0)
        updated.append(replace(enc, fidelity=FidelityValue(fid)))
        if want_dump:
            dumps[f"{channel}_r{enc.block_row}c{enc.block_col}.txt"] = dump_circuit(enc.circuit)

    recon = reassemble(tile_grids, plan, scales=scales).pixels
    if settings.exclude_zero_blocks:
        active_enc = [e for e in updated if not e.skipped]
        metrics = aggregate_metrics(active_enc if active_enc else updated)
    else:
        metrics = aggregate_metrics(updated)
    block_reports = [BlockReport(channel=channel, block_row=b.block_row,
                                 block_col=b.block_col, block_norm=b.block_norm,
                                 weight=b.weight, skipped=e.skipped)
                     for b, e in zip(plan.blocks, encodings)]
    return circuit_reports, recon, metrics, block_reports, dumps


def _encode_exact_channel(channel: str, plane: ImagePlane,
                          want_dump: bool) -> tuple[CircuitReport, np.ndarray, Circuit | None]:
    if plane.frobenius_norm == 0.0:
        return _skipped_circuit(channel), np.zeros((plane.side, plane.side)), None
    t0 = time.perf_counter()
    circ = build_exact_qpie(plane)
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    counts = count_gates(circ)
    # the cascade prepares the pixel state exactly, so no simulation is
    # needed for the report; small-width equality is covered by tests
    rep = CircuitReport(channel=channel, block_row=0, block_col=0, skipped=False,
                        qubits=2 * plane.n, rotations_ucr=counts.rotations_ucr,
                        cnots_ucr=counts.cnots_ucr, fidelity=1.0,
                        preprocess_ms=elapsed_ms)
    return rep, plane.pixels.copy(), (circ if want_dump else None)


def _encode_nonneg_channel(channel: str, plane: ImagePlane,
                           m: int) -> tuple[CircuitReport, np.ndarray]:
    side = plane.side
    if plane.frobenius_norm == 0.0:
        return _skipped_circuit(channel), np.zeros((side, side))
    spec = forward_dft(plane)
    block = truncate_spectrum(spec, m, "nonneg")
    fid = fidelity(block, spec).value if block.block_norm > 0 else 0.0
    recon = np.abs(classical_reconstruct(block))
    rep = CircuitReport(channel=channel, block_row=0, block_col=0, skipped=False,
                        qubits=2 * plane.n, rotations_ucr=0, cnots_ucr=0,
                        fidelity=fid, preprocess_ms=0.0)
    return rep, recon


def encode_image(img: RgbImage, settings: EncodeSettings,
                 want_dump: bool = False) -> EncodeResult:
    """Run one strategy over all three channels of an image."""
    planes, rec, n = _pad_channels(img)
    resolved = settings.resolve(n)
    opts = _compression(resolved)

    circuit_reports: list[CircuitReport] = []
    block_reports: list[BlockReport] = []
    recon_planes: list[np.ndarray] = []
    dumps: dict[str, str] = {}
    channel_fid: dict[str, float] = {}

    for channel, plane in zip(CHANNELS, planes):
        if resolved.mode == "nonneg":
            rep, recon = _encode_nonneg_channel(channel, plane, resolved.m)
            circuit_reports.append(rep)
            channel_fid[channel] = rep.fidelity
            recon_planes.append(recon)
        elif resolved.strategy == "exact-qpie":
            rep, recon, circ = _encode_exact_channel(channel, plane, want_dump)
            circuit_reports.append(rep)
            channel_fid[channel] = rep.fidelity
            recon_planes.append(recon)
            if circ is not None:
                dumps[f"{channel}.txt"] = dump_circuit(circ)
        elif resolved.partition_n0 is not None:
            reps, recon, metrics, blocks, ch_dumps = _encode_partitioned_channel(
                channel, plane, resolved, opts, want_dump)
            circuit_reports.extend(reps)
            channel_fid[channel] = metrics.avg_fidelity.value
            recon_planes.append(recon)
            dumps.update(ch_dumps)
            block_reports.extend(blocks)
        else:
            rep, recon, circ = _encode_whole_channel(channel, plane, resolved,
                                                     opts, want_dump)
            circuit_reports.append(rep)
            channel_fid[channel] = rep.fidelity
            recon_planes.append(recon)
            if circ is not None:
                dumps[f"{channel}.txt"] = dump_circuit(circ)

    active = [r for r in circuit_reports if not r.skipped]
    rotations_max = max((r.rotations_ucr for r in active), default=0)
    cnots_max = max((r.cnots_ucr for r in active), default=0)
    qubits = max((r.qubits for r in active), default=0)

    if resolved.mode == "nonneg":
        baseline_rot = baseline_cnot = 0
        circuit_count = 0
        qubits = 2 * n
    else:
        if resolved.strategy == "faqpie":
            baseline_rot, baseline_cnot = rotations_max, cnots_max
        elif resolved.m > n - 2:
            baseline_rot = baseline_cnot = 0
        else:
            baseline_rot, baseline_cnot = _baseline_counts(planes, resolved.m)
        circuit_count = len(circuit_reports)

    rot_pct = (100.0 * (baseline_rot - rotations_max) / baseline_rot
               if baseline_rot else 0.0)
    cnot_pct = (100.0 * (baseline_cnot - cnots_max) / baseline_cnot
                if baseline_cnot else 0.0)

    report = EncodingReport(
        strategy=resolved.strategy,
        qubits=qubits,
        circuit_count=circuit_count,
        m=(None if resolved.strategy == "exact-qpie"
           else (resolved.m0 if resolved.partition_n0 is not None else resolved.m)),
        mode=resolved.mode,
        partition_n0=resolved.partition_n0,
        fidelity_r=channel_fid["r"],
        fidelity_g=channel_fid["g"],
        fidelity_b=channel_fid["b"],
        rotations_max=rotations_max,
        cnots_max=cnots_max,
        rot_reduction_pct=rot_pct,
        cnot_reduction_pct=cnot_pct,
        baseline_rotations=baseline_rot,
        baseline_cnots=baseline_cnot,
        baseline_m=resolved.m,
        preprocess_ms=sum(r.preprocess_ms for r in circuit_reports),
        circuits=circuit_reports,
        blocks=block_reports,
    )
    image = crop_and_merge(tuple(recon_planes), rec)
    return EncodeResult(report=report, image=image, dumps=dumps or None)


def compare_strategies(img: RgbImage, strategies: list[str],
                       base: EncodeSettings) -> list[EncodingReport]:
    """Run several strategies on the same image with shared parameters."""
    if len(strategies) < 2:
        raise PipelineError("compare needs at least two strategies")
    out = []
    for name in strategies:
        settings = replace(base, strategy=name)
        out.append(encode_image(img, settings).report)
    return out


def verify_image(img: RgbImage, m: int, tolerance: float = 1e-9,
                 corrupt_angle: float = 0.0) -> VerifyResult:
    """Full-simulation check of loader circuits against the classical oracle.

    Runs the gate-by-gate simulator, the structured fast path, and the
    spectral reconstruction on every nonzero channel, and reports the
    largest amplitude-magnitude deviation. `corrupt_angle` perturbs the
    first cascade rotation (a negative-control hook for the tooling).
    """
    planes, _, n = _pad_channels(img)
    if n > VERIFY_MAX_N:
        raise PipelineError(
            f"image side 2^{n} too large for full simulation (max 2^{VERIFY_MAX_N})")
    if m > n - 2:
        raise PipelineError(f"m exceeds n-2 (m={m}, n={n})")
    layout = FslLayout(n=n, m=m)
    per_channel = {}
    for channel, plane in zip(CHANNELS, planes):
        if plane.frobenius_norm == 0.0:
            continue
        block = truncate_spectrum(forward_dft(plane), m, "centered")
        if block.block_norm == 0.0:
            continue
        circ = build_fsl_2d(block, layout)
        if corrupt_angle:
            angles = circ.angles.copy()
            angles[0] += corrupt_angle
            circ = Circuit(circ.width, circ.kinds, circ.targets, circ.controls,
                           angles, circ.regions)
        oracle = classical_reconstruct(block).reshape(-1)
        oracle /= np.linalg.norm(oracle)
        slow = run(circ).amplitudes
        fast = run_fsl_fast(circ, layout).amplitudes
        dev = max(
            float(np.max(np.abs(np.abs(slow) - np.abs(oracle)))),
            float(np.max(np.abs(slow - fast))),
        )
        per_channel[channel] = dev
    worst = max(per_channel.values(), default=0.0)
    return VerifyResult(passed=worst <= tolerance, max_deviation=worst,
                        tolerance=tolerance, per_channel=per_channel)


def generate_test_image(width: int, height: int, seed: int = 0,
                        smooth: bool = False) -> RgbImage:
    """Deterministic random RGB image; `smooth` low-passes each channel so
    truncated encodings keep high fidelity (closer to natural images)."""
    rng = np.random.default_rng(seed)
    data = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    if smooth:
        out = np.empty_like(data)
        for ch in range(3):
            spec = np.fft.fft2(data[:, :, ch].astype(np.float64))
            fy = np.fft.fftfreq(height)[:, None]
            fx = np.fft.fftfreq(width)[None, :]
            spec *= np.exp(-40.0 * (fy**2 + fx**2))
            grid = np.fft.ifft2(spec).real
            lo, hi = grid.min(), grid.max()
            scale = 255.0 / (hi - lo) if hi > lo else 0.0
            out[:, :, ch] = np.floor((grid - lo) * scale + 0.5).astype(np.uint8)
        data = out
    return RgbImage(width=width, height=height, data=data)
