"""Gate-list circuit representation with region tags.

Gates live in parallel numpy arrays (kind, target, control, angle, region)
so that a two-million-gate exact encoding can be built and counted in
milliseconds; `Gate` views are materialized on demand. Region tags split a
circuit into the coefficient-loading cascade (ucr), the sign-controlled
fan-out (fanout), and the inverse Fourier stage (iqft), which is what lets
gate counting exclude everything after the cascade.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "KINDS",
    "REGIONS",
    "ROTATION_KINDS",
    "Gate",
    "Circuit",
    "CircuitBuilder",
    "GateCounts",
    "count_gates",
    "reduction_percent",
    "trunc_percent",
    "dump_circuit",
    "parse_circuit",
]

KINDS = ("RY", "RZ", "CNOT", "X", "H", "CPHASE", "SWAP")
REGIONS = ("ucr", "fanout", "iqft")
ROTATION_KINDS = frozenset({"RY", "RZ", "CPHASE"})
_PAIR_KINDS = frozenset({"CNOT", "CPHASE", "SWAP"})

_KIND_CODE = {name: i for i, name in enumerate(KINDS)}
_REGION_CODE = {name: i for i, name in enumerate(REGIONS)}
_NO_CONTROL = -1


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target, optional control, optional angle, region."""

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None
    region: str = "ucr"

    def __post_init__(self):
        if self.kind not in _KIND_CODE:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.region not in _REGION_CODE:
            raise ValueError(f"unknown region {self.region!r}")
        needs_pair = self.kind in _PAIR_KINDS
        if needs_pair and self.control is None:
            raise ValueError(f"{self.kind} requires a control/pair qubit")
        if not needs_pair and self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.control is not None and self.control == self.target:
            raise ValueError("control and target must differ")
        needs_angle = self.kind in ("RY", "RZ", "CPHASE")
        if needs_angle and self.angle is None:
            raise ValueError(f"{self.kind} requires an angle")
        if not needs_angle and self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


class Circuit:
    """Ordered gate list over a fixed qubit count."""

    __slots__ = ("width", "kinds", "targets", "controls", "angles", "regions")

    def __init__(self, width: int, kinds, targets, controls, angles, regions):
        self.width = int(width)
        self.kinds = np.asarray(kinds, dtype=np.int8)
        self.targets = np.asarray(targets, dtype=np.int32)
        self.controls = np.asarray(controls, dtype=np.int32)
        self.angles = np.asarray(angles, dtype=np.float64)
        self.regions = np.asarray(regions, dtype=np.int8)
        sizes = {a.shape for a in (self.kinds, self.targets, self.controls, self.angles, self.regions)}
        if len(sizes) != 1:
            raise ValueError("gate arrays must have equal length")
        if len(self.targets) and (
            self.targets.max() >= self.width
            or self.controls.max(initial=_NO_CONTROL) >= self.width
            or self.targets.min() < 0
        ):
            raise ValueError("qubit index out of range for circuit width")

    @classmethod
    def from_gates(cls, width: int, gates: Iterable[Gate]) -> "Circuit":
        gates = list(gates)
        return cls(
            width,
            [_KIND_CODE[g.kind] for g in gates],
            [g.target for g in gates],
            [_NO_CONTROL if g.control is None else g.control for g in gates],
            [0.0 if g.angle is None else g.angle for g in gates],
            [_REGION_CODE[g.region] for g in gates],
        )

    @classmethod
    def empty(cls, width: int) -> "Circuit":
        return cls.from_gates(width, [])

    def __len__(self) -> int:
        return len(self.kinds)

    def gate(self, i: int) -> Gate:
        kind = KINDS[self.kinds[i]]
        control = int(self.controls[i])
        angle = float(self.angles[i])
        return Gate(
            kind=kind,
            target=int(self.targets[i]),
            control=None if control == _NO_CONTROL else control,
            angle=angle if kind in ("RY", "RZ", "CPHASE") else None,
            region=REGIONS[self.regions[i]],
        )

    @property
    def gates(self) -> Iterator[Gate]:
        return (self.gate(i) for i in range(len(self)))

    def keep(self, mask: np.ndarray) -> "Circuit":
        """New circuit retaining only gates where mask is True, order preserved."""
        return Circuit(
            self.width,
            self.kinds[mask],
            self.targets[mask],
            self.controls[mask],
            self.angles[mask],
            self.regions[mask],
        )

    def concat(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("cannot concatenate circuits of different widths")
        return Circuit(
            self.width,
            np.concatenate([self.kinds, other.kinds]),
            np.concatenate([self.targets, other.targets]),
            np.concatenate([self.controls, other.controls]),
            np.concatenate([self.angles, other.angles]),
            np.concatenate([self.regions, other.regions]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.width == other.width
            and np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.controls, other.controls)
            and np.array_equal(self.angles, other.angles)
            and np.array_equal(self.regions, other.regions)
        )


class CircuitBuilder:
    """Accumulates gate arrays column-wise; cheap appends, one final copy."""

    def __init__(self, width: int):
        self.width = width
        self._kinds: list[int] = []
        self._targets: list[int] = []
        self._controls: list[int] = []
        self._angles: list[float] = []
        self._regions: list[int] = []

    def add(self, kind: str, target: int, control: int | None = None,
            angle: float | None = None, region: str = "ucr") -> None:
        self._kinds.append(_KIND_CODE[kind])
        self._targets.append(target)
        self._controls.append(_NO_CONTROL if control is None else control)
        self._angles.append(0.0 if angle is None else angle)
        self._regions.append(_REGION_CODE[region])

    def extend_arrays(self, kinds, targets, controls, angles, regions) -> None:
        """Bulk append from parallel arrays (already in code form)."""
        self._kinds.extend(int(k) for k in kinds)
        self._targets.extend(int(t) for t in targets)
        self._controls.extend(int(c) for c in controls)
        self._angles.extend(float(a) for a in angles)
        self._regions.extend(int(r) for r in regions)

    def build(self) -> Circuit:
        return Circuit(self.width, self._kinds, self._targets,
                       self._controls, self._angles, self._regions)


@dataclass(frozen=True)
class GateCounts:
    """Gate tallies; the ucr-region fields follow the reported counting
    convention (rotations and CNOTs before fan-out and the inverse QFT)."""

    rotations_ucr: int
    cnots_ucr: int
    total_by_kind: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.total_by_kind.values())


def count_gates(c: Circuit) -> GateCounts:
    ucr = c.regions == _REGION_CODE["ucr"]
    is_rot = (c.kinds == _KIND_CODE["RY"]) | (c.kinds == _KIND_CODE["RZ"])
    is_cnot = c.kinds == _KIND_CODE["CNOT"]
    by_kind = {}
    for name, code in _KIND_CODE.items():
        count = int(np.count_nonzero(c.kinds == code))
        if count:
            by_kind[name] = count
    return GateCounts(
        rotations_ucr=int(np.count_nonzero(is_rot & ucr)),
        cnots_ucr=int(np.count_nonzero(is_cnot & ucr)),
        total_by_kind=by_kind,
    )


def trunc_percent(x: float, digits: int = 2) -> float:
    """Truncate toward zero at `digits` decimals, the convention the
    published tables use (75.00916 prints as 75.00, 82.4767 as 82.47).

    A 1e-7 nudge toward the value absorbs float representation error in
    ratios that are exact in decimal.
    """
    scale = 10.0**digits
    return float(np.trunc(x * scale + np.copysign(1e-7, x)) / scale)


def reduction_percent(before: GateCounts, after: GateCounts) -> tuple[float, float]:
    """Raw percentage drop in ucr rotations and CNOTs relative to `before`."""
    if before.rotations_ucr <= 0 or before.cnots_ucr <= 0:
        raise ValueError("baseline counts must be positive")
    rot = 100.0 * (before.rotations_ucr - after.rotations_ucr) / before.rotations_ucr
    cnot = 100.0 * (before.cnots_ucr - after.cnots_ucr) / before.cnots_ucr
    return rot, cnot


def dump_circuit(c: Circuit) -> str:
    """Line-per-gate text form: KIND target [control] [angle] region."""
    lines = [f"# width {c.width}"]
    for g in c.gates:
        parts = [g.kind, str(g.target)]
        if g.control is not None:
            parts.append(str(g.control))
        if g.angle is not None:
            parts.append(format(g.angle, ".17g"))
        parts.append(g.region)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    """Inverse of dump_circuit."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# width "):
        raise ValueError("missing width header")
    width = int(lines[0].split()[2])
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        kind, target, region = parts[0], int(parts[1]), parts[-1]
        mid = parts[2:-1]
        control = int(mid.pop(0)) if kind in _PAIR_KINDS else None
        angle = float(mid.pop(0)) if kind in ("RY", "RZ", "CPHASE") else None
        if mid:
            raise ValueError(f"malformed gate line: {ln!r}")
        gates.append(Gate(kind=kind, target=target, control=control, angle=angle, region=region))
    return Circuit.from_gates(width, gates)
