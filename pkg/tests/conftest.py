"""Shared fixtures and the dense-matrix oracle used to check the simulator
and the multiplexed-rotation synthesis independently of either."""
from __future__ import annotations

import base64

import numpy as np
import pytest

from faqpie.circuit import Circuit, Gate
from faqpie.image_io import ImagePlane, RgbImage, encode_ppm


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(1234)


def random_plane(rng: np.random.Generator, n: int) -> ImagePlane:
    return ImagePlane(n=n, pixels=rng.uniform(0.0, 255.0, size=(1 << n, 1 << n)))


def random_rgb(rng: np.random.Generator, width: int, height: int) -> RgbImage:
    data = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    return RgbImage(width=width, height=height, data=data)


def ppm_bytes(img: RgbImage) -> bytes:
    return encode_ppm(img)


def ppm_b64(img: RgbImage) -> str:
    return base64.b64encode(encode_ppm(img)).decode("ascii")


# dense-matrix oracle: builds every gate as an explicit 2^w x 2^w matrix by
# index arithmetic (qubit 0 = most significant bit), with no code shared
# with the simulator's reshape-based kernels

def _bit(w: int, q: int) -> int:
    return 1 << (w - 1 - q)


def _single_qubit_matrix(g: Gate) -> np.ndarray:
    if g.kind == "RY":
        t = g.angle / 2.0
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], dtype=complex)
    if g.kind == "RZ":
        t = g.angle / 2.0
        return np.array([[np.exp(-1j * t), 0], [0, np.exp(1j * t)]], dtype=complex)
    if g.kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if g.kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    raise ValueError(g.kind)


def gate_unitary(g: Gate, width: int) -> np.ndarray:
    dim = 1 << width
    idx = np.arange(dim)
    if g.kind == "CNOT":
        cb, tb = _bit(width, g.control), _bit(width, g.target)
        perm = np.where(idx & cb, idx ^ tb, idx)
        U = np.zeros((dim, dim), dtype=complex)
        U[perm, idx] = 1.0
        return U
    if g.kind == "SWAP":
        ab, bb = _bit(width, g.control), _bit(width, g.target)
        a = (idx & ab) > 0
        b = (idx & bb) > 0
        perm = np.where(a != b, idx ^ ab ^ bb, idx)
        U = np.zeros((dim, dim), dtype=complex)
        U[perm, idx] = 1.0
        return U
    if g.kind == "CPHASE":
        cb, tb = _bit(width, g.control), _bit(width, g.target)
        both = ((idx & cb) > 0) & ((idx & tb) > 0)
        diag = np.where(both, np.exp(1j * g.angle), 1.0)
        return np.diag(diag)
    mat = _single_qubit_matrix(g)
    before = np.eye(1 << g.target, dtype=complex)
    after = np.eye(1 << (width - g.target - 1), dtype=complex)
    return np.kron(np.kron(before, mat), after)


def dense_unitary(circ: Circuit) -> np.ndarray:
    """Product of explicit gate matrices; practical up to ~10 qubits."""
    dim = 1 << circ.width
    U = np.eye(dim, dtype=complex)
    for g in circ.gates:
        U = gate_unitary(g, circ.width) @ U
    return U


def phase_aligned_error(a: np.ndarray, b: np.ndarray) -> float:
    """Max deviation between states after removing the global phase."""
    overlap = np.vdot(a, b)
    if abs(overlap) == 0.0:
        return float(max(np.max(np.abs(a)), np.max(np.abs(b))))
    return float(np.max(np.abs(a * (overlap / abs(overlap)) - b)))
