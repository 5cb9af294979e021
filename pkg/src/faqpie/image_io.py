"""Raster image I/O: load, pad, split, and reassemble power-of-two planes.

Binary PPM (P6, maxval 255) is the bit-exact interchange format; PNG is a
convenience layer that must decode to identical bytes.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ImageFormatError",
    "RgbImage",
    "ImagePlane",
    "PadRecord",
    "load_image",
    "decode_image",
    "save_image",
    "encode_ppm",
    "to_planes",
    "zero_pad",
    "crop_and_merge",
    "log2_side_for",
]


class ImageFormatError(ValueError):
    """Raised for unreadable, malformed, or unsupported image data."""


@dataclass(frozen=True)
class RgbImage:
    """8-bit RGB raster held as a (height, width, 3) uint8 array."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3):
            raise ImageFormatError(
                f"pixel buffer shape {self.data.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        if self.data.dtype != np.uint8:
            raise ImageFormatError("pixel buffer must be uint8")

    @classmethod
    def from_bytes(cls, width: int, height: int, raw: bytes) -> "RgbImage":
        expected = width * height * 3
        if len(raw) != expected:
            raise ImageFormatError(f"short read: expected {expected} bytes, got {len(raw)}")
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
        return cls(width=width, height=height, data=arr)


@dataclass(frozen=True)
class ImagePlane:
    """Single-channel 2^n x 2^n grid of nonnegative reals with its Frobenius norm."""

    n: int
    pixels: np.ndarray
    frobenius_norm: float = field(default=0.0)

    def __post_init__(self):
        side = 1 << self.n
        if self.pixels.shape != (side, side):
            raise ValueError(f"plane shape {self.pixels.shape} is not {side}x{side}")
        if np.any(self.pixels < 0):
            raise ValueError("plane contains negative pixel values")
        norm = float(np.linalg.norm(self.pixels))
        object.__setattr__(self, "frobenius_norm", norm)

    @property
    def side(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class PadRecord:
    """Original extent and placement of a plane inside its padded 2^n x 2^n grid."""

    original_width: int
    original_height: int
    offset_row: int = 0
    offset_col: int = 0


_PPM_WHITESPACE = b" \t\r\n"


def _read_ppm_token(buf: io.BytesIO) -> bytes:
    """Next header token, skipping whitespace and # comments."""
    token = b""
    while True:
        ch = buf.read(1)
        if ch == b"":
            raise ImageFormatError("short read: truncated PPM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = buf.read(1)
            continue
        if ch in _PPM_WHITESPACE:
            if token:
                return token
            continue
        token += ch


def _decode_ppm(raw: bytes) -> RgbImage:
    buf = io.BytesIO(raw)
    magic = buf.read(2)
    if magic != b"P6":
        raise ImageFormatError("unsupported format: not a binary PPM (P6)")
    width = int(_read_ppm_token(buf))
    height = int(_read_ppm_token(buf))
    maxval = int(_read_ppm_token(buf))
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported PPM maxval {maxval} (only 255)")
    payload = buf.read(width * height * 3)
    return RgbImage.from_bytes(width, height, payload)


def encode_ppm(img: RgbImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def _decode_png(raw: bytes) -> RgbImage:
    from PIL import Image

    with Image.open(io.BytesIO(raw)) as im:
        rgb = im.convert("RGB")
        arr = np.asarray(rgb, dtype=np.uint8)
    return RgbImage(width=arr.shape[1], height=arr.shape[0], data=arr)


def _encode_png(img: RgbImage) -> bytes:
    from PIL import Image

    out = io.BytesIO()
    Image.fromarray(img.data, mode="RGB").save(out, format="PNG")
    return out.getvalue()


def decode_image(raw: bytes) -> RgbImage:
    """Decode PPM (P6) or PNG bytes, sniffing the magic number."""
    if raw[:2] == b"P6":
        return _decode_ppm(raw)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(raw)
    raise ImageFormatError("unsupported format: expected P6 PPM or PNG")


def load_image(path: str | Path) -> RgbImage:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"unreadable file {path}: {exc}") from exc
    return decode_image(raw)


def save_image(img: RgbImage, path: str | Path) -> None:
    """Write PPM or PNG depending on the file extension (default PPM)."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        path.write_bytes(_encode_png(img))
    else:
        path.write_bytes(encode_ppm(img))


def to_planes(img: RgbImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split RGB data into three float64 channel grids, exact integer-to-float."""
    data = img.data.astype(np.float64)
    return data[:, :, 0], data[:, :, 1], data[:, :, 2]


def log2_side_for(height: int, width: int) -> int:
    """Smallest n with 2^n covering both dimensions."""
    n = 0
    while (1 << n) < max(height, width):
        n += 1
    return n


def zero_pad(plane: np.ndarray, n: int) -> tuple[ImagePlane, PadRecord]:
    """Embed a real grid top-left into a 2^n x 2^n zero grid."""
    rows, cols = plane.shape
    side = 1 << n
    if rows > side or cols > side:
        raise ValueError(f"plane {rows}x{cols} larger than target {side}x{side}")
    padded = np.zeros((side, side), dtype=np.float64)
    padded[:rows, :cols] = plane
    rec = PadRecord(original_width=cols, original_height=rows)
    return ImagePlane(n=n, pixels=padded), rec


def crop_and_merge(planes: tuple[np.ndarray, ...], rec: PadRecord) -> RgbImage:
    """Crop three planes back to the original extent and merge into 8-bit RGB.

    Values are clamped to [0, 255] then rounded half-up; approximate
    reconstructions can land slightly outside the byte range.
    """
    shapes = {p.shape for p in planes}
    if len(planes) != 3 or len(shapes) != 1:
        raise ValueError("expected three planes of identical shape")
    r0, c0 = rec.offset_row, rec.offset_col
    out = np.empty((rec.original_height, rec.original_width, 3), dtype=np.uint8)
    for c, plane in enumerate(planes):
        region = plane[r0 : r0 + rec.original_height, c0 : c0 + rec.original_width]
        clamped = np.clip(region, 0.0, 255.0)
        out[:, :, c] = np.floor(clamped + 0.5).astype(np.uint8)
    return RgbImage(width=rec.original_width, height=rec.original_height, data=out)
