"""Dense statevector execution of circuits.

Gate semantics (all fixed here, nowhere else):

    RY(t)     [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
    RZ(t)     diag(e^{-it/2}, e^{+it/2})
    X         [[0, 1], [1, 0]]
    H         [[1, 1], [1, -1]] / sqrt(2)
    CNOT      flips target where control = 1
    CPHASE(t) multiplies the |11> component by e^{it} (symmetric in the pair)
    SWAP      exchanges the pair

Qubit 0 is the most significant basis bit. The width guard keeps a dense
state under 256 MB of complex doubles.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .circuit import Circuit
from .fsl import FslLayout
from .spectrum import FidelityValue

__all__ = [
    "MAX_WIDTH",
    "Statevector",
    "run",
    "run_fsl_fast",
    "extract_image",
    "state_fidelity",
]

MAX_WIDTH = 24


@dataclass(frozen=True)
class Statevector:
    """Complex amplitudes over 2^width basis states, qubit 0 = MSB."""

    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.width,):
            raise ValueError(
                f"amplitude vector length {self.amplitudes.shape} is not 2^{self.width}"
            )

    @classmethod
    def zero(cls, width: int) -> "Statevector":
        amp = np.zeros(1 << width, dtype=np.complex128)
        amp[0] = 1.0
        return cls(width=width, amplitudes=amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int, w: int) -> np.ndarray:
    t = state.reshape((1 << q, 2, -1))
    a, b = t[:, 0, :].copy(), t[:, 1, :].copy()
    t[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    t[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b
    return state


def _pair_index(state: np.ndarray, q0: int, q1: int, w: int):
    """Views of the four (q0, q1) basis combinations of the state."""
    qa, qb = (q0, q1) if q0 < q1 else (q1, q0)
    t = state.reshape(1 << qa, 2, 1 << (qb - qa - 1), 2, -1)
    first_is_q0 = q0 < q1

    def sel(v0, v1):
        va, vb = (v0, v1) if first_is_q0 else (v1, v0)
        return t[:, va, :, vb, :]

    return sel


def run(c: Circuit, initial: Statevector | None = None) -> Statevector:
    """Apply the circuit's gates in order to the initial state (default |0...0>)."""
    if c.width > MAX_WIDTH:
        raise ValueError(f"circuit width {c.width} exceeds simulator guard {MAX_WIDTH}")
    if initial is None:
        initial = Statevector.zero(c.width)
    if initial.width != c.width:
        raise ValueError(f"state width {initial.width} does not match circuit width {c.width}")
    state = initial.amplitudes.astype(np.complex128, copy=True)
    w = c.width
    sqrt2_inv = 1.0 / np.sqrt(2.0)
    for i in range(len(c)):
        kind = c.kinds[i]
        tgt = int(c.targets[i])
        if kind == 0:  # RY
            th = 0.5 * c.angles[i]
            mat = np.array([[cos(th), -sin(th)], [sin(th), cos(th)]], dtype=np.complex128)
            state = _apply_1q(state, mat, tgt, w)
        elif kind == 1:  # RZ
            th = 0.5 * c.angles[i]
            mat = np.array([[np.exp(-1j * th), 0.0], [0.0, np.exp(1j * th)]])
            state = _apply_1q(state, mat, tgt, w)
        elif kind == 2:  # CNOT
            sel = _pair_index(state, int(c.controls[i]), tgt, w)
            a = sel(1, 0).copy()
            sel(1, 0)[...] = sel(1, 1)
            sel(1, 1)[...] = a
        elif kind == 3:  # X
            t = state.reshape((1 << tgt, 2, -1))
            t[:, [0, 1], :] = t[:, [1, 0], :]
        elif kind == 4:  # H
            mat = np.array([[sqrt2_inv, sqrt2_inv], [sqrt2_inv, -sqrt2_inv]], dtype=np.complex128)
            state = _apply_1q(state, mat, tgt, w)
        elif kind == 5:  # CPHASE
            sel = _pair_index(state, int(c.controls[i]), tgt, w)
            sel(1, 1)[...] *= np.exp(1j * c.angles[i])
        else:  # SWAP
            sel = _pair_index(state, int(c.controls[i]), tgt, w)
            a = sel(0, 1).copy()
            sel(0, 1)[...] = sel(1, 0)
            sel(1, 0)[...] = a
    return Statevector(width=w, amplitudes=state.reshape(-1))


def run_fsl_fast(c: Circuit, layout) -> Statevector:
    """Fast execution path for loader circuits built on an FslLayout.

    The cascade region is simulated on its 2(m+1)-qubit subspace, the
    fan-out is applied as an index permutation, and the inverse Fourier
    stage as a fast transform. Matches `run` to 1e-9 at testable sizes.
    """
    if not isinstance(layout, FslLayout):
        raise TypeError("layout must be an FslLayout")
    n, m = layout.n, layout.m
    if c.width != 2 * n:
        raise ValueError(f"circuit width {c.width} does not match layout width {2 * n}")

    loaded = layout.loaded_qubits()
    sub_index = {q: i for i, q in enumerate(loaded)}
    if np.any(np.diff(c.regions.astype(np.int64)) < 0):
        raise ValueError("regions out of order: expected ucr, then fanout, then iqft")
    ucr_mask = c.regions == 0
    fanout_mask = c.regions == 1
    touched = set(c.targets[ucr_mask].tolist()) | {
        int(q) for q in c.controls[ucr_mask] if q >= 0
    }
    if not touched <= set(loaded):
        raise ValueError("cascade region touches qubits outside the loaded sub-register")
    sign_qubits = {layout.sign_qubit(0), layout.sign_qubit(1)}
    if not {int(q) for q in c.controls[fanout_mask]} <= sign_qubits:
        raise ValueError("fan-out region must be controlled on the sign qubits")

    part = c.keep(ucr_mask)
    sub = Circuit(
        2 * (m + 1),
        part.kinds,
        np.array([sub_index[int(t)] for t in part.targets], dtype=np.int32),
        np.array([sub_index[int(q)] if q >= 0 else -1 for q in part.controls], dtype=np.int32),
        part.angles,
        part.regions,
    )
    sub_state = run(sub).amplitudes.reshape(1 << (m + 1), 1 << (m + 1))

    side = 1 << n
    grid = np.zeros((side, side), dtype=np.complex128)
    # sign bit set (index >= 2^m within the loaded group) means a negative
    # frequency living at the top of the full register after fan-out
    half = 1 << m
    block = 1 << (m + 1)
    perm = np.arange(block)
    perm = np.where(perm < half, perm, side - block + perm)
    grid[np.ix_(perm, perm)] = sub_state

    out = (side * np.fft.ifft2(grid)).reshape(-1)
    return Statevector(width=2 * n, amplitudes=out)


def extract_image(sv: Statevector, norm: float, layout) -> np.ndarray:
    """Pixel grid from a statevector: |amplitude| at basis (row, col), rescaled.

    Magnitudes are used rather than real parts; they are invariant to the
    loader's global phase and to the tiny imaginary residue of truncation.
    """
    if sv.width % 2 != 0:
        raise ValueError("image statevector must have an even qubit count")
    side = 1 << (sv.width // 2)
    return np.abs(sv.amplitudes).reshape(side, side) * norm


def state_fidelity(a: Statevector, b: Statevector) -> FidelityValue:
    """|<a|b>|^2 for two states of equal width."""
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} vs {b.width}")
    return FidelityValue(min(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2, 1.0))
