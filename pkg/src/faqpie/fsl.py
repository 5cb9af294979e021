"""Loader-circuit synthesis from Fourier coefficient blocks.

The loader prepares the retained coefficient grid on the 2(m+1) sign+low
qubits with a cascade of uniformly controlled rotations (RY levels for
magnitudes, then RZ levels for phases), fans the sign qubit of each
dimension out to its high register so negative frequencies land at their
two's-complement positions, and finishes with an inverse Fourier stage per
dimension whose kernel is e^{+i2pi jk/N}/sqrt(N).

Each uniformly controlled rotation with c controls decomposes into 2^c
rotations interleaved with 2^c CNOTs whose controls walk the Gray-code
transition sequence; the transformed angles come from a fast
Walsh-Hadamard transform permuted by the Gray code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CircuitBuilder, Gate
from .image_io import ImagePlane
from .spectrum import SpectrumBlock

__all__ = [
    "UCRCascade",
    "FslLayout",
    "ucr_angles",
    "gray_ucr_to_gates",
    "build_fsl_2d",
    "materialize_cascade",
    "build_exact_qpie",
    "build_iqft",
    "cascade_cnot_count",
]

_KIND = {"RY": 0, "RZ": 1, "CNOT": 2, "X": 3, "H": 4, "CPHASE": 5, "SWAP": 6}
_REGION = {"ucr": 0, "fanout": 1, "iqft": 2}


@dataclass(frozen=True)
class UCRCascade:
    """Per-level rotation angles preparing a 2^k-amplitude state.

    Level t (1-based) holds 2^{t-1} angles for the rotation on qubit t-1
    multiplexed over qubits 0..t-2. Emitting all RY levels then all RZ
    levels onto |0...0> prepares the source vector times
    e^{-i*global_phase}; the global phase is recorded, never emitted.
    """

    k: int
    magnitude_levels: list[np.ndarray]
    phase_levels: list[np.ndarray]
    global_phase: float

    def __post_init__(self):
        for levels in (self.magnitude_levels, self.phase_levels):
            if len(levels) != self.k:
                raise ValueError(f"expected {self.k} levels, got {len(levels)}")
            for t, arr in enumerate(levels, start=1):
                if len(arr) != 1 << (t - 1):
                    raise ValueError(f"level {t} must hold {1 << (t - 1)} angles")


@dataclass(frozen=True)
class FslLayout:
    """Qubit map of a two-dimensional loader on 2n big-endian qubits.

    Each dimension owns n consecutive qubits split as
    [high: n-m-1][sign: 1][low: m]; dimension 0 (rows) occupies the more
    significant half.
    """

    n: int
    m: int

    def __post_init__(self):
        if not 0 <= self.m <= self.n - 2:
            raise ValueError(f"truncation order m={self.m} outside 0..n-2 for n={self.n}")

    @property
    def width(self) -> int:
        return 2 * self.n

    def register(self, dim: int) -> list[int]:
        return list(range(dim * self.n, (dim + 1) * self.n))

    def high_qubits(self, dim: int) -> list[int]:
        return self.register(dim)[: self.n - self.m - 1]

    def sign_qubit(self, dim: int) -> int:
        return dim * self.n + (self.n - self.m - 1)

    def low_qubits(self, dim: int) -> list[int]:
        return self.register(dim)[self.n - self.m :]

    def loaded_qubits(self) -> list[int]:
        """The 2(m+1) cascade qubits, most significant first; the sign bit
        leads each dimension's group."""
        out = []
        for dim in (0, 1):
            out.append(self.sign_qubit(dim))
            out.extend(self.low_qubits(dim))
        return out


def _block_sums(values: np.ndarray, k: int, reducer) -> list[np.ndarray]:
    """values folded to per-block aggregates for depths k..0 (index = depth)."""
    levels = [None] * (k + 1)
    levels[k] = values
    for depth in range(k, 0, -1):
        levels[depth - 1] = reducer(levels[depth].reshape(-1, 2))
    return levels


def ucr_angles(amplitudes: np.ndarray) -> UCRCascade:
    """Rotation-angle cascade preparing the given complex vector.

    The magnitude tree assigns each level the half-angle split of block
    norms; the phase tree assigns each level the mean phase difference
    between sibling blocks, leaving only a global phase unpaid.
    """
    vec = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    size = len(vec)
    k = size.bit_length() - 1
    if size != 1 << k or size < 2:
        raise ValueError(f"amplitude count {size} is not a power of two >= 2")
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("cannot prepare the zero vector")
    vec = vec / norm

    power = np.abs(vec) ** 2
    pow_levels = _block_sums(power, k, lambda pairs: pairs.sum(axis=1))
    magnitude_levels = []
    for t in range(1, k + 1):
        child = pow_levels[t]
        left, right = child[0::2], child[1::2]
        magnitude_levels.append(2.0 * np.arctan2(np.sqrt(right), np.sqrt(left)))

    omega = np.angle(vec)
    mean_levels = _block_sums(omega, k, lambda pairs: pairs.mean(axis=1))
    phase_levels = []
    for t in range(1, k + 1):
        child = mean_levels[t]
        phase_levels.append(child[1::2] - child[0::2])

    return UCRCascade(
        k=k,
        magnitude_levels=magnitude_levels,
        phase_levels=phase_levels,
        global_phase=float(mean_levels[0][0]),
    )


def _fwht(values: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform, natural (Hadamard) ordering."""
    out = values.astype(np.float64, copy=True)
    size = len(out)
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        a = view[:, 0, :].copy()
        b = view[:, 1, :].copy()
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
        h *= 2
    return out


def _gray_transition_bits(c: int) -> np.ndarray:
    """Bit index toggled after each step of the cyclic c-bit Gray walk."""
    steps = np.arange(1, 1 << c)
    trailing = np.zeros(len(steps), dtype=np.int64)
    rem = steps.copy()
    while np.any(rem % 2 == 0):
        even = rem % 2 == 0
        trailing[even] += 1
        rem[even] //= 2
    return np.concatenate([trailing, [c - 1]])


def _gray_ucr_arrays(kind_code: int, angles: np.ndarray, target: int,
                     controls: list[int], region_code: int):
    """Parallel gate arrays for one uniformly controlled rotation."""
    c = len(controls)
    if len(angles) != 1 << c:
        raise ValueError(f"expected {1 << c} angles for {c} controls, got {len(angles)}")
    if c == 0:
        return (
            np.array([kind_code], dtype=np.int8),
            np.array([target], dtype=np.int32),
            np.array([-1], dtype=np.int32),
            np.asarray(angles, dtype=np.float64),
            np.array([region_code], dtype=np.int8),
        )
    size = 1 << c
    idx = np.arange(size)
    gray = idx ^ (idx >> 1)
    hat = _fwht(np.asarray(angles, dtype=np.float64))[gray] / size

    controls_arr = np.asarray(controls, dtype=np.int32)
    # transition bit b (LSB numbering) toggles qubit controls[c-1-b]
    cnot_controls = controls_arr[c - 1 - _gray_transition_bits(c)]

    kinds = np.empty(2 * size, dtype=np.int8)
    targets = np.full(2 * size, target, dtype=np.int32)
    ctrls = np.full(2 * size, -1, dtype=np.int32)
    angs = np.zeros(2 * size, dtype=np.float64)
    regions = np.full(2 * size, region_code, dtype=np.int8)
    kinds[0::2] = kind_code
    kinds[1::2] = _KIND["CNOT"]
    angs[0::2] = hat
    ctrls[1::2] = cnot_controls
    return kinds, targets, ctrls, angs, regions


def gray_ucr_to_gates(kind: str, angles: np.ndarray, target: int,
                      controls: list[int], region: str = "ucr") -> list[Gate]:
    """Gray-code gate sequence of one uniformly controlled rotation.

    The composite of the 2^c rotations and 2^c CNOTs equals the multiplexed
    rotation applying angles[j] when the controls read j (controls[0] is
    the most significant bit of j).
    """
    if kind not in ("RY", "RZ"):
        raise ValueError("uniformly controlled rotations are RY or RZ")
    arrays = _gray_ucr_arrays(_KIND[kind], np.asarray(angles, dtype=np.float64),
                              target, list(controls), _REGION[region])
    width = max([target, *controls]) + 1
    return list(Circuit(width, *arrays).gates)


def _emit_cascade(builder: CircuitBuilder, cascade: UCRCascade,
                  qubits: list[int], region: str) -> None:
    """Materialize a cascade onto the given qubits (most significant first).

    The two top-of-cascade rotations (one RY, one RZ, no controls) are
    dropped when their angle is exactly zero; deeper levels always emit
    their full interleaved pattern.
    """
    region_code = _REGION[region]
    for kind, levels in (("RY", cascade.magnitude_levels), ("RZ", cascade.phase_levels)):
        kind_code = _KIND[kind]
        for t, angles in enumerate(levels, start=1):
            if t == 1 and angles[0] == 0.0:
                continue
            arrays = _gray_ucr_arrays(kind_code, angles, qubits[t - 1],
                                      qubits[: t - 1], region_code)
            builder.extend_arrays(*arrays)


def materialize_cascade(cascade: UCRCascade, qubits: list[int],
                        width: int | None = None, region: str = "ucr") -> Circuit:
    """Standalone circuit applying the cascade to the given qubits."""
    if len(qubits) != cascade.k:
        raise ValueError(f"cascade spans {cascade.k} qubits, got {len(qubits)}")
    builder = CircuitBuilder(width if width is not None else max(qubits) + 1)
    _emit_cascade(builder, cascade, qubits, region)
    return builder.build()


def build_iqft(register: list[int]) -> list[Gate]:
    """Inverse Fourier stage on a big-endian register.

    Realizes the kernel e^{+i2pi jk/2^n}/sqrt(2^n), which maps loaded
    frequency-domain amplitudes to sample-domain amplitudes.
    """
    if not register:
        raise ValueError("empty register")
    n = len(register)
    gates = []
    for i in range(n):
        gates.append(Gate(kind="H", target=register[i], region="iqft"))
        for t in range(i + 1, n):
            angle = 2.0 * np.pi / float(1 << (t - i + 1))
            gates.append(Gate(kind="CPHASE", target=register[i],
                              control=register[t], angle=angle, region="iqft"))
    for i in range(n // 2):
        gates.append(Gate(kind="SWAP", target=register[i],
                          control=register[n - 1 - i], region="iqft"))
    return gates


def build_fsl_2d(block: SpectrumBlock, layout: FslLayout) -> Circuit:
    """Loader circuit whose statevector is the normalized reconstruction of
    the centered coefficient block."""
    if block.mode != "centered":
        raise ValueError("loader circuits require a centered coefficient block")
    if block.n != layout.n or block.m != layout.m:
        raise ValueError(
            f"block (n={block.n}, m={block.m}) does not match layout "
            f"(n={layout.n}, m={layout.m})"
        )
    if block.block_norm == 0.0:
        raise ValueError("retained coefficient block has zero norm; nothing to load")

    builder = CircuitBuilder(layout.width)
    cascade = ucr_angles(block.coeffs.reshape(-1))
    _emit_cascade(builder, cascade, layout.loaded_qubits(), "ucr")

    for dim in (0, 1):
        sign = layout.sign_qubit(dim)
        for high in layout.high_qubits(dim):
            builder.add("CNOT", target=high, control=sign, region="fanout")

    for dim in (0, 1):
        for g in build_iqft(layout.register(dim)):
            builder.add(g.kind, g.target, g.control, g.angle, g.region)

    return builder.build()


def build_exact_qpie(plane: ImagePlane) -> Circuit:
    """Full-cascade circuit preparing the exact pixel-amplitude state."""
    if plane.frobenius_norm == 0.0:
        raise ValueError("zero image has no normalized state")
    width = 2 * plane.n
    builder = CircuitBuilder(width)
    cascade = ucr_angles(plane.pixels.reshape(-1).astype(np.complex128))
    _emit_cascade(builder, cascade, list(range(width)), "ucr")
    return builder.build()


def cascade_cnot_count(k: int) -> int:
    """CNOTs in a k-qubit cascade: both rotation families, levels with at
    least one control."""
    return (1 << (k + 1)) - 4
