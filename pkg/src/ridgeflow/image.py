"""Grayscale/binary raster types, PGM I/O, sub-pixel sampling and rotation.

Images are stored as 8-bit rasters and promoted to float64 while filtering;
results are rounded half-up and clamped back to [0, 255] on output.
Coordinates: x grows right, y grows down, origin at the top-left pixel
center. Angles are measured from +x toward +y and are pi-periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np


class PgmFormatError(ValueError):
    """Raised for streams that are not binary PGM (P5) with maxval 255."""


class Point(NamedTuple):
    x: float
    y: float


@dataclass(eq=False)
class GrayImage:
    """Dense 8-bit grayscale raster; ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("pixels must be a 2-D array with positive dimensions")
        if not np.issubdtype(px.dtype, np.integer):
            raise ValueError("pixels must be integer-valued; use GrayImage.from_float")
        if int(px.min()) < 0 or int(px.max()) > 255:
            raise ValueError("intensities must lie in [0, 255]")
        px = px.astype(np.uint8)
        px.setflags(write=False)
        self.pixels = px

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def as_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)

    @classmethod
    def from_float(cls, values: np.ndarray) -> "GrayImage":
        """Round half-up and clamp real intensities into an 8-bit raster."""
        v = np.floor(np.asarray(values, dtype=np.float64) + 0.5)
        return cls(np.clip(v, 0.0, 255.0).astype(np.int64))


@dataclass(eq=False)
class BinaryImage:
    """Dense 1-bit raster; bit 0 marks ridge (dark), 1 valley/background."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError("bits must be a 2-D array with positive dimensions")
        if not np.issubdtype(b.dtype, np.integer) and b.dtype != np.bool_:
            raise ValueError("bits must be integer or boolean")
        b = b.astype(np.uint8)
        if b.max(initial=0) > 1:
            raise ValueError("bits must be 0 or 1")
        b.setflags(write=False)
        self.bits = b

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


def binary_as_gray(binary: BinaryImage) -> GrayImage:
    """Viewable rendering of a binary raster: ridge 0 -> black, valley 1 -> white."""
    return GrayImage(binary.bits.astype(np.int64) * 255)


def invert(image: GrayImage) -> GrayImage:
    return GrayImage(255 - image.pixels.astype(np.int64))


@dataclass
class LineSegment:
    """2*half_length+1 sample sites spaced evenly along a direction."""

    center: Point
    angle: float
    half_length: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.half_length < 1:
            raise ValueError("half_length must be >= 1")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")


def line_points(seg: LineSegment) -> list[Point]:
    """Sample sites of ``seg``, ordered; index ``half_length`` is the center."""
    ux = math.cos(seg.angle) * seg.spacing
    uy = math.sin(seg.angle) * seg.spacing
    cx, cy = seg.center
    return [Point(cx + k * ux, cy + k * uy) for k in range(-seg.half_length, seg.half_length + 1)]


# ---------------------------------------------------------------------------
# PGM (binary P5) I/O


def load_pgm(path) -> GrayImage:
    """Read a binary PGM (P5, maxval 255) file without any value scaling."""
    path = Path(path)
    raw = path.read_bytes()
    pos = 0

    def skip_separators():
        nonlocal pos
        while pos < len(raw):
            c = raw[pos]
            if c in b" \t\r\n":
                pos += 1
            elif c == ord("#"):
                while pos < len(raw) and raw[pos] != ord("\n"):
                    pos += 1
            else:
                break

    def read_token(what: str) -> tuple[bytes, int]:
        nonlocal pos
        skip_separators()
        start = pos
        while pos < len(raw) and raw[pos] not in b" \t\r\n":
            pos += 1
        if start == pos:
            raise PgmFormatError(f"{path}: missing {what} at byte {start}")
        return raw[start:pos], start

    def read_int(what: str) -> tuple[int, int]:
        tok, off = read_token(what)
        if not tok.isdigit():
            raise PgmFormatError(f"{path}: malformed {what} {tok[:16]!r} at byte {off}")
        return int(tok), off

    magic, off = read_token("magic number")
    if magic != b"P5":
        raise PgmFormatError(f"{path}: expected binary PGM magic 'P5' at byte {off}, found {magic[:16]!r}")
    width, off_w = read_int("width")
    height, off_h = read_int("height")
    if width < 1 or height < 1:
        raise PgmFormatError(f"{path}: non-positive dimensions {width}x{height} at byte {off_w}")
    maxval, off_m = read_int("maxval")
    if maxval != 255:
        raise PgmFormatError(f"{path}: unsupported maxval {maxval} at byte {off_m} (only 255 is supported)")
    if pos >= len(raw) or raw[pos] not in b" \t\r\n":
        raise PgmFormatError(f"{path}: missing whitespace after maxval at byte {pos}")
    pos += 1
    need = width * height
    if len(raw) - pos < need:
        raise PgmFormatError(
            f"{path}: truncated pixel data at byte {len(raw)} (need {need} bytes from byte {pos})"
        )
    px = np.frombuffer(raw, dtype=np.uint8, count=need, offset=pos).reshape(height, width)
    return GrayImage(px.astype(np.int64))


def save_pgm(image: GrayImage, path) -> None:
    """Write a binary PGM (P5, maxval 255) file, bit-exact row-major payload."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes())


# ---------------------------------------------------------------------------
# Sub-pixel sampling and rotation


def bilinear_many(values: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear samples of a float raster; NaN where a needed pixel is outside.

    Coordinates within 1e-9 of the raster edge count as inside, so exact
    boundary samples survive the rounding noise of rotation transforms.
    """
    eps = 1e-9
    h, w = values.shape
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = (xs >= -eps) & (xs <= w - 1.0 + eps) & (ys >= -eps) & (ys <= h - 1.0 + eps)
    xc = np.clip(xs, 0.0, w - 1.0)
    yc = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xc).astype(np.intp)
    y0 = np.floor(yc).astype(np.intp)
    fx = xc - x0
    fy = yc - y0
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    v = (
        values[y0, x0] * (1.0 - fx) * (1.0 - fy)
        + values[y0, x1] * fx * (1.0 - fy)
        + values[y1, x0] * (1.0 - fx) * fy
        + values[y1, x1] * fx * fy
    )
    return np.where(inside, v, np.nan)


def sample_bilinear(image: GrayImage, p: Point) -> float | None:
    """Bilinear intensity at ``p``; None when the sample needs out-of-raster pixels."""
    v = bilinear_many(image.as_float(), np.array([p[0]]), np.array([p[1]]))[0]
    return None if math.isnan(v) else float(v)


@dataclass(eq=False)
class RotatedRaster:
    """Image resampled so source lines at ``angle`` run along output rows."""

    values: np.ndarray  # float64, 0.0 where invalid
    valid: np.ndarray  # bool, False where mapped from outside the source
    angle: float
    src_center: tuple[float, float]
    dst_center: tuple[float, float]
    source_offset: tuple[float, float] = (0.0, 0.0)

    def to_rotated(self, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map source coordinates into this raster's coordinates."""
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        dx = np.asarray(xs, dtype=np.float64) - self.src_center[0] - self.source_offset[0]
        dy = np.asarray(ys, dtype=np.float64) - self.src_center[1] - self.source_offset[1]
        return self.dst_center[0] + c * dx + s * dy, self.dst_center[1] - s * dx + c * dy


def rotate_raster(
    values: np.ndarray, angle: float, source_offset: tuple[float, float] = (0.0, 0.0)
) -> RotatedRaster:
    """Rotate a float raster about its center by -angle (bilinear resampling).

    The output canvas covers the rotated bounding box; pixels that map from
    outside the source are flagged invalid and set to 0. ``source_offset``
    shifts every source sample position by a constant amount, letting callers
    force interpolation even for lattice-preserving angles.
    """
    h, w = values.shape
    c = math.cos(angle)
    s = math.sin(angle)
    out_w = max(1, math.ceil(w * abs(c) + h * abs(s) - 1e-9))
    out_h = max(1, math.ceil(w * abs(s) + h * abs(c) - 1e-9))
    src_center = ((w - 1) / 2.0, (h - 1) / 2.0)
    dst_center = ((out_w - 1) / 2.0, (out_h - 1) / 2.0)
    dy, dx = np.meshgrid(
        np.arange(out_h, dtype=np.float64) - dst_center[1],
        np.arange(out_w, dtype=np.float64) - dst_center[0],
        indexing="ij",
    )
    sx = src_center[0] + source_offset[0] + c * dx - s * dy
    sy = src_center[1] + source_offset[1] + s * dx + c * dy
    sampled = bilinear_many(values, sx, sy)
    valid = ~np.isnan(sampled)
    return RotatedRaster(np.where(valid, sampled, 0.0), valid, angle, src_center, dst_center, source_offset)


def rotate_image(image: GrayImage, alpha: float) -> tuple[GrayImage, np.ndarray]:
    """Rotate so lines at angle ``alpha`` become horizontal rows.

    Returns the rotated image and a validity mask; masked-out pixels were
    mapped from outside the source raster and hold value 0.
    """
    if not 0.0 <= alpha < math.pi:
        raise ValueError("alpha must lie in [0, pi)")
    rr = rotate_raster(image.as_float(), alpha)
    return GrayImage.from_float(rr.values), rr.valid.copy()


def squared_intensities(image: GrayImage) -> np.ndarray:
    """Element-wise squared intensities, for one-pass variance Var = E[I^2] - E[I]^2."""
    f = image.as_float()
    return f * f
