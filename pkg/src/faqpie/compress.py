"""Two-step cascade compression: rotation pruning, then CNOT parity cancellation.

Step one discards the smallest-magnitude rotation angles in the loading
cascade (a fixed fraction, an absolute threshold, or both). Step two is
exact: consecutive cascade CNOTs sharing a target commute freely, so each
maximal run collapses to one CNOT per odd-parity control. Fan-out and
inverse-Fourier gates are never touched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateCounts, count_gates

__all__ = [
    "CompressionOptions",
    "CompressionStats",
    "prune_rotations",
    "cancel_cnots",
    "compress",
]

_RY, _RZ, _CNOT = 0, 1, 2
_UCR = 0


@dataclass(frozen=True)
class CompressionOptions:
    """prune_fraction removes the floor(fraction * count) smallest |angle|
    rotations; prune_abs additionally removes every rotation with
    |angle| <= prune_abs. Scope is always the cascade region."""

    prune_fraction: float = 0.0
    prune_abs: float | None = None
    parity_cancel: bool = True

    def __post_init__(self):
        if not 0.0 <= self.prune_fraction < 1.0:
            raise ValueError("prune_fraction must lie in [0, 1)")
        if self.prune_abs is not None and self.prune_abs < 0.0:
            raise ValueError("prune_abs must be nonnegative")


@dataclass(frozen=True)
class CompressionStats:
    rotations_removed: int
    cnots_removed: int
    counts_before: GateCounts
    counts_after: GateCounts


def prune_rotations(c: Circuit, opts: CompressionOptions) -> Circuit:
    """Delete the smallest-|angle| cascade rotations; order preserved.

    Ties on |angle| are broken by position, earliest deleted first, so a
    given circuit always prunes the same way.
    """
    is_rot = ((c.kinds == _RY) | (c.kinds == _RZ)) & (c.regions == _UCR)
    rot_pos = np.nonzero(is_rot)[0]
    if len(rot_pos) == 0:
        return c
    mags = np.abs(c.angles[rot_pos])
    drop = np.zeros(len(rot_pos), dtype=bool)
    k = int(np.floor(opts.prune_fraction * len(rot_pos)))
    if k > 0:
        order = np.argsort(mags, kind="stable")
        drop[order[:k]] = True
    if opts.prune_abs is not None:
        drop |= mags <= opts.prune_abs
    keep = np.ones(len(c), dtype=bool)
    keep[rot_pos[drop]] = False
    return c.keep(keep)


def cancel_cnots(c: Circuit) -> Circuit:
    """Collapse each maximal run of consecutive same-target cascade CNOTs
    to its parity signature (one CNOT per odd-count control, ascending).

    Exact: the run's product unitary is unchanged. Idempotent.
    """
    is_run_cnot = (c.kinds == _CNOT) & (c.regions == _UCR)
    keep = np.ones(len(c), dtype=bool)
    inserts: list[tuple[int, list[int]]] = []  # (position of run start, controls)

    i = 0
    size = len(c)
    while i < size:
        if not is_run_cnot[i]:
            i += 1
            continue
        target = c.targets[i]
        j = i
        while j < size and is_run_cnot[j] and c.targets[j] == target:
            j += 1
        run_controls = c.controls[i:j]
        ctrls, counts = np.unique(run_controls, return_counts=True)
        odd = sorted(int(q) for q, cnt in zip(ctrls, counts) if cnt % 2 == 1)
        if len(odd) != j - i:
            keep[i:j] = False
            if odd:
                inserts.append((i, odd))
        i = j

    if not inserts and keep.all():
        return c

    kinds, targets, controls, angles, regions = [], [], [], [], []
    insert_map = dict(inserts)
    for i in range(size):
        if i in insert_map:
            for q in insert_map[i]:
                kinds.append(_CNOT)
                targets.append(int(c.targets[i]))
                controls.append(q)
                angles.append(0.0)
                regions.append(_UCR)
        if keep[i]:
            kinds.append(int(c.kinds[i]))
            targets.append(int(c.targets[i]))
            controls.append(int(c.controls[i]))
            angles.append(float(c.angles[i]))
            regions.append(int(c.regions[i]))
    return Circuit(c.width, kinds, targets, controls, angles, regions)


def compress(c: Circuit, opts: CompressionOptions) -> tuple[Circuit, CompressionStats]:
    """Prune rotations, then cancel CNOT parities; stats from full recounts."""
    before = count_gates(c)
    pruned = prune_rotations(c, opts)
    out = cancel_cnots(pruned) if opts.parity_cancel else pruned
    after = count_gates(out)
    stats = CompressionStats(
        rotations_removed=before.rotations_ucr - after.rotations_ucr,
        cnots_removed=before.cnots_ucr - after.cnots_ucr,
        counts_before=before,
        counts_after=after,
    )
    return out, stats
