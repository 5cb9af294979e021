import numpy as np
import pytest

from faqpie.compress import CompressionOptions
from faqpie.fsl import FslLayout
from faqpie.image_io import ImagePlane
from faqpie.partition import (
    BlockEncoding,
    aggregate_metrics,
    encode_blocks,
    reassemble,
    split,
)
from faqpie.simulator import run_fsl_fast
from faqpie.spectrum import FidelityValue

from conftest import make_rng, random_plane


def test_split_counting_grid_quadrants():
    grid = np.arange(16, dtype=float).reshape(4, 4)
    plane = ImagePlane(n=2, pixels=grid)
    plan, blocks = split(plane, 1)
    assert plan.blocks_per_side == 2
    assert len(blocks) == 4
    assert np.array_equal(blocks[0].pixels, grid[:2, :2])
    assert np.array_equal(blocks[1].pixels, grid[:2, 2:])
    assert np.array_equal(blocks[2].pixels, grid[2:, :2])
    assert np.array_equal(blocks[3].pixels, grid[2:, 2:])
    assert [(b.block_row, b.block_col) for b in plan.blocks] == [
        (0, 0), (0, 1), (1, 0), (1, 1)]


def test_split_tiles_partition_every_pixel():
    plane = random_plane(make_rng(70), 4)
    plan, blocks = split(plane, 2)
    seen = np.zeros_like(plane.pixels, dtype=int)
    for entry, block in zip(plan.blocks, blocks):
        r, c = entry.block_row * 4, entry.block_col * 4
        seen[r : r + 4, c : c + 4] += 1
        assert np.array_equal(block.pixels, plane.pixels[r : r + 4, c : c + 4])
    assert np.all(seen == 1)


def test_split_uniform_plane_equal_weights():
    plane = ImagePlane(n=3, pixels=np.full((8, 8), 3.0))
    plan, _ = split(plane, 2)
    assert all(b.weight == pytest.approx(0.5) for b in plan.blocks)
    assert sum(b.weight**2 for b in plan.blocks) == pytest.approx(1.0, abs=1e-10)


def test_split_paper_geometry():
    plane = ImagePlane(n=10, pixels=np.ones((1024, 1024)))
    plan, blocks = split(plane, 9)
    assert len(blocks) == 4
    assert all(b.pixels.shape == (512, 512) for b in blocks)


def test_split_rejects_large_n0():
    with pytest.raises(ValueError, match="smaller"):
        split(random_plane(make_rng(71), 3), 3)


def test_encode_blocks_qubits_and_counts():
    plane = random_plane(make_rng(72), 4)
    plan, blocks = split(plane, 3)
    encs = encode_blocks(blocks, plan, 1)
    assert all(e.qubits == 6 for e in encs)
    assert all(e.cnots_ucr == (1 << 5) - 4 for e in encs)


def test_encode_blocks_zero_tile_flagged():
    pixels = np.zeros((8, 8))
    pixels[:4, :4] = make_rng(73).uniform(1, 255, size=(4, 4))
    plane = ImagePlane(n=3, pixels=pixels)
    plan, blocks = split(plane, 2)
    encs = encode_blocks(blocks, plan, 0)
    skipped = [e for e in encs if e.skipped]
    active = [e for e in encs if not e.skipped]
    assert len(skipped) == 3 and len(active) == 1
    assert all(e.circuit is None for e in skipped)
    assert all(e.fidelity.value == 1.0 for e in skipped)
    metrics = aggregate_metrics(encs)
    assert metrics.max_rotations == active[0].rotations_ucr
    assert metrics.max_qubits == 4


def test_encode_blocks_rejects_large_m0():
    plane = random_plane(make_rng(74), 4)
    plan, blocks = split(plane, 2)
    with pytest.raises(ValueError, match="m0=1 exceeds"):
        encode_blocks(blocks, plan, 1)


def test_reassemble_round_trip_exact():
    plane = random_plane(make_rng(75), 4)
    plan, blocks = split(plane, 2)
    unit_grids = [b.pixels / b.frobenius_norm for b in blocks]
    back = reassemble(unit_grids, plan)
    assert np.max(np.abs(back.pixels - plane.pixels)) <= 1e-8


def test_reassemble_single_nonzero_block():
    pixels = np.zeros((8, 8))
    pixels[4:, :4] = 7.0
    plane = ImagePlane(n=3, pixels=pixels)
    plan, blocks = split(plane, 2)
    grids = [b.pixels / b.frobenius_norm if b.frobenius_norm else b.pixels
             for b in blocks]
    back = reassemble(grids, plan)
    assert np.array_equal(back.pixels, pixels)


def test_reassemble_uniform_plane_any_m0():
    plane = ImagePlane(n=3, pixels=np.full((8, 8), 4.0))
    plan, blocks = split(plane, 2)
    encs = encode_blocks(blocks, plan, 0)
    layout = FslLayout(n=2, m=0)
    grids = [np.abs(run_fsl_fast(e.circuit, layout).amplitudes).reshape(4, 4)
             for e in encs]
    scales = [e.spectrum_block.block_norm / 4 for e in encs]
    back = reassemble(grids, plan, scales=scales)
    assert np.max(np.abs(back.pixels - plane.pixels)) <= 1e-8


def test_reassemble_validates_plan():
    plane = random_plane(make_rng(76), 3)
    plan, blocks = split(plane, 2)
    with pytest.raises(ValueError, match="does not match"):
        reassemble([b.pixels for b in blocks[:-1]], plan)


def test_simulated_tiles_reassemble_close_to_plane():
    plane = random_plane(make_rng(77), 4)
    plan, blocks = split(plane, 2)
    m0 = 0
    encs = encode_blocks(blocks, plan, m0)
    layout = FslLayout(n=2, m=m0)
    grids, scales = [], []
    for enc in encs:
        sv = run_fsl_fast(enc.circuit, layout)
        grids.append(np.abs(sv.amplitudes).reshape(4, 4))
        scales.append(enc.spectrum_block.block_norm / 4)
    back = reassemble(grids, plan, scales=scales)
    # m0=0 keeps the lowest tile frequencies; fidelity-weighted energy match
    assert back.frobenius_norm <= plane.frobenius_norm + 1e-9


def _fake_encoding(rot, cnot, fid, skipped=False, ms=1.0) -> BlockEncoding:
    return BlockEncoding(block_row=0, block_col=0, skipped=skipped, circuit=None,
                         spectrum_block=None, qubits=0 if skipped else 18,
                         rotations_ucr=rot, cnots_ucr=cnot,
                         fidelity=FidelityValue(fid), preprocess_ms=ms)


def test_aggregate_identical_reports():
    encs = [_fake_encoding(10, 20, 0.9) for _ in range(4)]
    metrics = aggregate_metrics(encs)
    assert metrics.max_rotations == 10
    assert metrics.max_cnots == 20
    assert metrics.max_qubits == 18
    assert metrics.total_preprocess_ms == pytest.approx(4.0)
    assert metrics.avg_fidelity.value == pytest.approx(0.9)


def test_aggregate_maxima_example():
    cnots = (8188, 8190, 8000, 7900)
    encs = [_fake_encoding(0, c, 1.0) for c in cnots]
    assert aggregate_metrics(encs).max_cnots == 8190


def test_aggregate_rejects_empty():
    with pytest.raises(ValueError, match="no block"):
        aggregate_metrics([])


def test_compressed_blocks_inherit_compression():
    plane = random_plane(make_rng(78), 4)
    plan, blocks = split(plane, 3)
    plain = encode_blocks(blocks, plan, 1)
    squeezed = encode_blocks(blocks, plan, 1, CompressionOptions(prune_fraction=0.3))
    for a, b in zip(plain, squeezed):
        assert b.rotations_ucr < a.rotations_ucr
        assert b.cnots_ucr <= a.cnots_ucr
