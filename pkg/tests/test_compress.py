import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faqpie.circuit import Circuit, Gate, count_gates
from faqpie.compress import CompressionOptions, cancel_cnots, compress, prune_rotations
from faqpie.fsl import FslLayout, build_fsl_2d
from faqpie.simulator import run
from faqpie.spectrum import forward_dft, truncate_spectrum

from conftest import dense_unitary, make_rng, random_plane


def ladder_circuit(magnitudes) -> Circuit:
    gates = [Gate(kind="RY", target=0, angle=float(v), region="ucr") for v in magnitudes]
    return Circuit.from_gates(1, gates)


def fsl_circuit(seed: int, n: int = 4, m: int = 2) -> Circuit:
    plane = random_plane(make_rng(seed), n)
    block = truncate_spectrum(forward_dft(plane), m, "centered")
    return build_fsl_2d(block, FslLayout(n=n, m=m))


def test_fraction_zero_is_identity():
    circ = fsl_circuit(60)
    out = prune_rotations(circ, CompressionOptions(prune_fraction=0.0))
    assert out == circ


def test_compress_fraction_zero_fully_unchanged():
    circ = fsl_circuit(61)
    out, stats = compress(circ, CompressionOptions(prune_fraction=0.0))
    assert out == circ
    assert stats.rotations_removed == 0
    assert stats.cnots_removed == 0


def test_prune_order_statistics():
    circ = ladder_circuit(range(1, 11))
    out = prune_rotations(circ, CompressionOptions(prune_fraction=0.3))
    kept = [g.angle for g in out.gates]
    assert len(kept) == 7
    assert kept == [float(v) for v in range(4, 11)]


def test_prune_tie_break_earliest_first():
    circ = ladder_circuit([0.5, 0.5, 0.5, 2.0])
    out = prune_rotations(circ, CompressionOptions(prune_fraction=0.5))
    # the two earliest tied 0.5s go; the third survives in place
    kept = [g.angle for g in out.gates]
    assert kept == [0.5, 2.0]


def test_prune_abs_threshold():
    circ = ladder_circuit([1e-4, 0.2, 1e-3, 0.8])
    out = prune_rotations(circ, CompressionOptions(prune_abs=1e-3))
    assert [g.angle for g in out.gates] == [0.2, 0.8]


def test_prune_leaves_other_regions_alone():
    gates = [
        Gate(kind="RY", target=0, angle=1e-9, region="ucr"),
        Gate(kind="CNOT", target=1, control=0, region="fanout"),
        Gate(kind="CPHASE", target=0, control=1, angle=1e-12, region="iqft"),
        Gate(kind="H", target=1, region="iqft"),
    ]
    circ = Circuit.from_gates(2, gates)
    out = prune_rotations(circ, CompressionOptions(prune_abs=1e-6))
    # only the cascade rotation goes; the tiny-angle iqft phase is off limits
    assert [g.kind for g in out.gates] == ["CNOT", "CPHASE", "H"]
    assert [g.region for g in out.gates] == ["fanout", "iqft", "iqft"]


def test_cancel_self_inverse_pair():
    gates = [
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
    ]
    out = cancel_cnots(Circuit.from_gates(3, gates))
    assert len(out) == 0


def test_cancel_parity_run_by_dense_product():
    gates = [
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
        Gate(kind="CNOT", target=2, control=1, region="ucr"),
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
    ]
    circ = Circuit.from_gates(3, gates)
    out = cancel_cnots(circ)
    assert [(g.control, g.target) for g in out.gates] == [(1, 2)]
    assert np.max(np.abs(dense_unitary(circ) - dense_unitary(out))) < 1e-15


def test_cancel_leaves_isolated_cnots():
    gates = [
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
        Gate(kind="RY", target=2, angle=0.3, region="ucr"),
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
        Gate(kind="CNOT", target=1, control=0, region="ucr"),
    ]
    circ = Circuit.from_gates(3, gates)
    out = cancel_cnots(circ)
    assert out == circ


def test_cancel_respects_region_boundaries():
    gates = [
        Gate(kind="CNOT", target=2, control=0, region="ucr"),
        Gate(kind="CNOT", target=2, control=0, region="fanout"),
    ]
    out = cancel_cnots(Circuit.from_gates(3, gates))
    assert len(out) == 2


def test_cancel_idempotent_and_exact_on_pruned_cascades():
    rng = make_rng(62)
    for seed in range(6):
        circ = fsl_circuit(100 + seed, n=3, m=1)
        pruned = prune_rotations(circ, CompressionOptions(
            prune_fraction=float(rng.uniform(0.1, 0.7))))
        cancelled = cancel_cnots(pruned)
        twice = cancel_cnots(cancelled)
        assert twice == cancelled
        a = run(pruned).amplitudes
        b = run(cancelled).amplitudes
        assert np.max(np.abs(a - b)) <= 1e-12


def test_compress_stats_and_counts():
    circ = fsl_circuit(63)
    opts = CompressionOptions(prune_fraction=0.4)
    out, stats = compress(circ, opts)
    before, after = count_gates(circ), count_gates(out)
    assert stats.counts_before == before
    assert stats.counts_after == after
    assert stats.rotations_removed == before.rotations_ucr - after.rotations_ucr
    assert stats.cnots_removed == before.cnots_ucr - after.cnots_ucr
    assert stats.rotations_removed == int(0.4 * before.rotations_ucr)
    assert 0 < stats.cnots_removed


def test_compress_no_parity_cancel_flag():
    circ = fsl_circuit(64)
    pruned_only, stats = compress(circ, CompressionOptions(prune_fraction=0.4,
                                                           parity_cancel=False))
    assert pruned_only == prune_rotations(circ, CompressionOptions(prune_fraction=0.4))


@settings(max_examples=12, deadline=None)
@given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_counts_monotone_in_fraction(f1, f2):
    circ = fsl_circuit(65, n=3, m=1)
    lo, hi = sorted([f1, f2])
    c_lo = count_gates(compress(circ, CompressionOptions(prune_fraction=lo))[0])
    c_hi = count_gates(compress(circ, CompressionOptions(prune_fraction=hi))[0])
    assert c_hi.rotations_ucr <= c_lo.rotations_ucr
    assert c_hi.cnots_ucr <= c_lo.cnots_ucr


def test_pruned_fidelity_lower_bound():
    # sanity bound: overlap loss accumulates at most half the pruned angles
    circ = fsl_circuit(66, n=3, m=1)
    rotations = sorted(abs(float(a)) for a, k, r in
                       zip(circ.angles, circ.kinds, circ.regions)
                       if r == 0 and k in (0, 1))
    opts = CompressionOptions(prune_fraction=0.15)
    removed = rotations[: int(0.15 * len(rotations))]
    total_half_angle = sum(removed) / 2.0
    assert total_half_angle < np.pi / 2
    pruned, _ = compress(circ, opts)
    a = run(circ).amplitudes
    b = run(pruned).amplitudes
    overlap = abs(np.vdot(a, b)) ** 2
    assert overlap >= np.cos(total_half_angle) ** 2 - 1e-12


def test_compression_reduction_brackets_at_reference_order():
    # the 30% default prune removes 29.95..30.00% of rotations at the
    # reference cascade size (floor effects only)
    circ = fsl_circuit(67, n=4, m=2)
    before = count_gates(circ)
    out, stats = compress(circ, CompressionOptions(prune_fraction=0.30))
    rot_pct = 100.0 * stats.rotations_removed / before.rotations_ucr
    assert 29.0 <= rot_pct <= 30.0
    cnot_pct = 100.0 * stats.cnots_removed / before.cnots_ucr
    assert 0.0 < cnot_pct < rot_pct


def test_options_validation():
    with pytest.raises(ValueError):
        CompressionOptions(prune_fraction=1.0)
    with pytest.raises(ValueError):
        CompressionOptions(prune_abs=-0.1)
