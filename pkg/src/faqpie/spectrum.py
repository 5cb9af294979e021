"""2D discrete Fourier analysis of image planes.

Forward transform is the unnormalized sum with kernel exp(-i2pi(kx+ly)/2^n);
reconstruction applies the matching 1/4^n so that keeping every frequency
reproduces the plane exactly. Truncation keeps a low-frequency block either
centered (two's-complement frequencies -2^m..2^m-1, the set the loader
circuit realizes) or nonneg (0..2^m-1 per axis, classical oracle only).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image_io import ImagePlane

__all__ = [
    "Spectrum",
    "SpectrumBlock",
    "FidelityValue",
    "forward_dft",
    "inverse_dft",
    "truncate_spectrum",
    "classical_reconstruct",
    "fidelity",
    "averaged_fidelity",
    "block_weight",
    "centered_frequencies",
]

MODES = ("centered", "nonneg")


@dataclass(frozen=True)
class Spectrum:
    """Full 2^n x 2^n grid of complex Fourier coefficients."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        side = 1 << self.n
        if self.coeffs.shape != (side, side):
            raise ValueError(f"coefficient grid shape {self.coeffs.shape} is not {side}x{side}")

    @property
    def norm(self) -> float:
        """L2 norm of the coefficient grid."""
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class SpectrumBlock:
    """Retained low-frequency coefficients after truncation to order m.

    Centered blocks are indexed by (f mod 2^{m+1}) per axis, i.e. row/col i
    holds frequency i for i < 2^m and i - 2^{m+1} otherwise. Nonneg blocks
    hold frequencies 0..2^m-1 literally.
    """

    n: int
    m: int
    mode: str
    coeffs: np.ndarray
    block_norm: float = field(default=0.0)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        if self.m > self.n - 2:
            raise ValueError(f"truncation order m={self.m} exceeds n-2={self.n - 2}")
        if self.m < 0:
            raise ValueError("truncation order must be nonnegative")
        side = (1 << (self.m + 1)) if self.mode == "centered" else (1 << self.m)
        if self.coeffs.shape != (side, side):
            raise ValueError(f"block shape {self.coeffs.shape} is not {side}x{side}")
        object.__setattr__(self, "block_norm", float(np.linalg.norm(self.coeffs)))

    @property
    def side(self) -> int:
        return self.coeffs.shape[0]


@dataclass(frozen=True)
class FidelityValue:
    """Squared overlap of two normalized states, in [0, 1]."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0 + 1e-12:
            raise ValueError(f"fidelity {self.value} outside [0, 1]")


def forward_dft(plane: ImagePlane) -> Spectrum:
    """Unnormalized forward 2D DFT of the plane (sign convention e^{-i2pi...})."""
    return Spectrum(n=plane.n, coeffs=np.fft.fft2(plane.pixels))


def inverse_dft(spec: Spectrum) -> np.ndarray:
    """Full inverse with the matching 1/4^n scaling; exact round trip."""
    return np.fft.ifft2(spec.coeffs)


def centered_frequencies(m: int) -> np.ndarray:
    """Frequencies -2^m..2^m-1 in block index order (two's complement in m+1 bits)."""
    half = 1 << m
    freqs = np.arange(2 * half)
    return np.where(freqs < half, freqs, freqs - 2 * half)


def truncate_spectrum(spec: Spectrum, m: int, mode: str = "centered") -> SpectrumBlock:
    """Keep the order-m low-frequency block of the spectrum, drop the rest."""
    if mode not in MODES:
        raise ValueError(f"unknown truncation mode {mode!r}")
    if m > spec.n - 2:
        raise ValueError(f"truncation order m={m} exceeds n-2={spec.n - 2}")
    if mode == "nonneg":
        side = 1 << m
        block = spec.coeffs[:side, :side].copy()
    else:
        src = centered_frequencies(m) % (1 << spec.n)
        block = spec.coeffs[np.ix_(src, src)].copy()
    return SpectrumBlock(n=spec.n, m=m, mode=mode, coeffs=block)


def classical_reconstruct(block: SpectrumBlock) -> np.ndarray:
    """Evaluate the retained-frequency double sum on the full 2^n x 2^n grid.

    Returns the unnormalized complex pixel grid; this, normalized, is the
    oracle every loader circuit statevector is checked against.
    """
    side = 1 << block.n
    embedded = np.zeros((side, side), dtype=np.complex128)
    if block.mode == "nonneg":
        bs = block.side
        embedded[:bs, :bs] = block.coeffs
    else:
        src = centered_frequencies(block.m) % side
        embedded[np.ix_(src, src)] = block.coeffs
    return np.fft.ifft2(embedded)


def fidelity(block: SpectrumBlock, spec: Spectrum) -> FidelityValue:
    """Squared overlap of the truncated state with the full state.

    Computed from the normalized inner product over the retained set; the
    Parseval shortcut (retained energy over total energy) must agree to
    1e-10 because truncation is an orthogonal projection.
    """
    if block.n != spec.n:
        raise ValueError(f"dimension mismatch: block n={block.n}, spectrum n={spec.n}")
    total = spec.norm
    if total == 0.0:
        raise ValueError("zero spectrum has no normalized state")
    if block.block_norm == 0.0:
        return FidelityValue(0.0)
    if block.mode == "nonneg":
        retained = spec.coeffs[: block.side, : block.side]
    else:
        src = centered_frequencies(block.m) % (1 << spec.n)
        retained = spec.coeffs[np.ix_(src, src)]
    overlap = abs(np.vdot(block.coeffs, retained) / (block.block_norm * total)) ** 2
    energy_ratio = (block.block_norm / total) ** 2
    if abs(overlap - energy_ratio) > 1e-10:
        raise AssertionError("Parseval identity violated in fidelity computation")
    return FidelityValue(min(overlap, 1.0))


def averaged_fidelity(per_block: list[FidelityValue]) -> FidelityValue:
    """Arithmetic mean of per-piece fidelities (plain fidelity for one piece)."""
    if not per_block:
        raise ValueError("cannot average an empty fidelity list")
    return FidelityValue(sum(f.value for f in per_block) / len(per_block))


def block_weight(block_norm: float, total_norm: float) -> float:
    """Relative amplitude weight of one piece of a partition."""
    if total_norm <= 0.0:
        raise ValueError("total norm must be positive")
    return block_norm / total_norm
