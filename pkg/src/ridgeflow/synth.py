"""Synthetic ridge patterns with known ground-truth orientation fields.

Noise comes from a self-contained SplitMix64 counter stream mapped through
Box-Muller, so a given seed yields the same image on every platform without
depending on any library's default generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flowfield import FlowField
from .image import GrayImage

PATTERNS = ("parallel", "concentric", "half_plane_stripe")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs offset+1 .. offset+count of the SplitMix64 stream for ``seed``."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def seeded_normals(seed: int, count: int) -> np.ndarray:
    """Standard normal draws via Box-Muller over the SplitMix64 stream."""
    z = _splitmix64(seed, 2 * count)
    # 53-bit uniforms; u1 shifted into (0, 1] so log() is finite
    u1 = ((z[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (z[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


@dataclass
class SyntheticSpec:
    """Parameters of a generated ridge pattern.

    ``orientation`` is the direction ridges run along (parallel pattern only).
    Intensity pre-noise is offset + amplitude * cos(...), so with the defaults
    the pattern spans the full 8-bit range. Dark troughs are the "ridges".
    """

    width: int
    height: int
    pattern: str = "parallel"
    orientation: float = 0.0
    period: float = 8.0
    amplitude: float = 127.0
    offset: float = 127.5
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("dimensions must be positive")
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if self.period < 4:
            raise ValueError("period must be >= 4 pixels")
        if self.amplitude < 0 or self.noise_sigma < 0:
            raise ValueError("amplitude and noise_sigma must be non-negative")
        if self.amplitude + abs(self.offset - 127.5) > 127.5 + 1e-9:
            raise ValueError("amplitude + |offset - 127.5| must stay within [0, 255]")


def generate(spec: SyntheticSpec, stride: int = 2) -> tuple[GrayImage, FlowField]:
    """Render the pattern and its ground-truth flow on a ``stride`` grid."""
    xs = np.arange(spec.width, dtype=np.float64)
    ys = np.arange(spec.height, dtype=np.float64)
    X, Y = np.meshgrid(xs, ys)
    omega = 2.0 * math.pi / spec.period

    if spec.pattern == "parallel":
        normal = spec.orientation + math.pi / 2.0
        nx = math.cos(normal)
        ny = math.sin(normal)
        # snap numeric dust so axis-aligned patterns are exactly axis-aligned
        nx = 0.0 if abs(nx) < 1e-12 else nx
        ny = 0.0 if abs(ny) < 1e-12 else ny
        phase = (X * nx + Y * ny) * omega
        values = spec.offset + spec.amplitude * np.cos(phase)
        truth_angle = spec.orientation % math.pi
        truth = None  # constant; filled below on the grid
    elif spec.pattern == "concentric":
        cx = (spec.width - 1) / 2.0
        cy = (spec.height - 1) / 2.0
        r = np.hypot(X - cx, Y - cy)
        values = spec.offset + spec.amplitude * np.cos(r * omega)
        truth = None
    else:  # half_plane_stripe: horizontal ridges on the left, flat on the right
        boundary = spec.width / 2.0
        stripes = spec.offset + spec.amplitude * np.cos(Y * omega)
        values = np.where(X < boundary, stripes, spec.offset)
        truth = None

    if spec.noise_sigma > 0:
        noise = seeded_normals(spec.rng_seed, values.size).reshape(values.shape)
        values = values + spec.noise_sigma * noise
    image = GrayImage.from_float(values)

    gw = math.ceil(spec.width / stride)
    gh = math.ceil(spec.height / stride)
    gx = np.arange(gw, dtype=np.float64) * stride
    gy = np.arange(gh, dtype=np.float64) * stride
    GX, GY = np.meshgrid(gx, gy)
    if spec.pattern == "parallel":
        angles = np.full((gh, gw), truth_angle)
        valid = np.ones((gh, gw), dtype=bool)
    elif spec.pattern == "concentric":
        cx = (spec.width - 1) / 2.0
        cy = (spec.height - 1) / 2.0
        r = np.hypot(GX - cx, GY - cy)
        angles = np.mod(np.arctan2(GY - cy, GX - cx) + math.pi / 2.0, math.pi)
        valid = r >= 1.0  # tangent direction is ill-defined at the center
        angles = np.where(valid, angles, 0.0)
    else:
        boundary = spec.width / 2.0
        angles = np.zeros((gh, gw))
        valid = GX < boundary
    truth = FlowField(angles, valid, stride)
    return image, truth
