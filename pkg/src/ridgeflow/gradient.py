"""Structure-tensor orientation baseline.

Gradients come from 3x3 Sobel kernels (normalized to intensity per pixel,
borders replicated). The tensor is the Gaussian-weighted sum of gradient
outer products over a square window; its dominant eigenvector points across
ridges, so the flow field stores that angle plus pi/2 to be directly
comparable with the projection method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .flowfield import FlowField
from .image import GrayImage, Point
from .projection import FlowConfig, patch_variance_grid


@dataclass(eq=False)
class GradientField:
    """Per-pixel intensity derivatives, units of intensity per pixel."""

    gx: np.ndarray
    gy: np.ndarray

    def __post_init__(self):
        if self.gx.shape != self.gy.shape or self.gx.ndim != 2:
            raise ValueError("gx and gy must be 2-D arrays of equal shape")

    @property
    def width(self) -> int:
        return self.gx.shape[1]

    @property
    def height(self) -> int:
        return self.gx.shape[0]


@dataclass
class StructureTensor:
    """Symmetric 2x2 sum of gradient outer products (a21 = a12 implied)."""

    a11: float
    a12: float
    a22: float


def gradient(image: GrayImage) -> GradientField:
    """3x3 Sobel derivatives with replicated borders, scaled by 1/8."""
    if image.width < 3 or image.height < 3:
        raise ValueError(f"image must be at least 3x3 pixels, got {image.width}x{image.height}")
    f = np.pad(image.as_float(), 1, mode="edge")
    gx = (
        (f[:-2, 2:] + 2.0 * f[1:-1, 2:] + f[2:, 2:])
        - (f[:-2, :-2] + 2.0 * f[1:-1, :-2] + f[2:, :-2])
    ) / 8.0
    gy = (
        (f[2:, :-2] + 2.0 * f[2:, 1:-1] + f[2:, 2:])
        - (f[:-2, :-2] + 2.0 * f[:-2, 1:-1] + f[:-2, 2:])
    ) / 8.0
    return GradientField(gx, gy)


def _window_weights(window_half: int, weight_sigma: float | None) -> np.ndarray:
    offs = np.arange(-window_half, window_half + 1, dtype=np.float64)
    if weight_sigma is None:
        return np.ones((offs.size, offs.size))
    dx, dy = np.meshgrid(offs, offs)
    return np.exp(-(dx * dx + dy * dy) / (2.0 * weight_sigma * weight_sigma))


def second_moment_matrix(
    grad: GradientField, p: Point, window_half: int = 8, weight_sigma: float | None = 4.0
) -> StructureTensor:
    """Weighted gradient outer-product sums over the window centered at ``p``.

    ``weight_sigma=None`` gives uniform weights. Windows are clipped at the
    raster borders (missing cells simply contribute nothing).
    """
    cx = int(math.floor(p[0] + 0.5))
    cy = int(math.floor(p[1] + 0.5))
    x0 = max(cx - window_half, 0)
    x1 = min(cx + window_half, grad.width - 1)
    y0 = max(cy - window_half, 0)
    y1 = min(cy + window_half, grad.height - 1)
    if x0 > x1 or y0 > y1:
        return StructureTensor(0.0, 0.0, 0.0)
    w = _window_weights(window_half, weight_sigma)[
        y0 - cy + window_half : y1 - cy + window_half + 1,
        x0 - cx + window_half : x1 - cx + window_half + 1,
    ]
    gx = grad.gx[y0 : y1 + 1, x0 : x1 + 1]
    gy = grad.gy[y0 : y1 + 1, x0 : x1 + 1]
    return StructureTensor(
        float((w * gx * gx).sum()), float((w * gx * gy).sum()), float((w * gy * gy).sum())
    )


def tensor_orientation(t: StructureTensor) -> tuple[float, float]:
    """(dominant eigenvector angle in [0, pi), coherence in [0, 1]).

    The angle is the closed-form 0.5 * atan2(2*a12, a11 - a22); coherence is
    (l1 - l2) / (l1 + l2), defined as 0 for a near-zero tensor.
    """
    theta = 0.5 * math.atan2(2.0 * t.a12, t.a11 - t.a22)
    theta %= math.pi
    if theta >= math.pi:
        theta = 0.0
    trace = t.a11 + t.a22
    if trace < 1e-12:
        return theta, 0.0
    spread = math.hypot(t.a11 - t.a22, 2.0 * t.a12)
    return theta, min(spread / trace, 1.0)


def compute_flow_field_gradient(
    image: GrayImage,
    cfg: FlowConfig | None = None,
    window_half: int = 8,
    weight_sigma: float | None = 4.0,
    coherence_threshold: float = 0.1,
) -> FlowField:
    """Structure-tensor flow on the same stride grid as the projection method.

    Stored angles are ridge orientations (tensor angle + pi/2). Sites are
    invalid where coherence < ``coherence_threshold`` or where the local
    patch variance is below the background threshold.
    """
    cfg = cfg or FlowConfig()
    grad = gradient(image)
    kernel = _window_weights(window_half, weight_sigma)
    j11 = ndimage.convolve(grad.gx * grad.gx, kernel, mode="constant", cval=0.0)
    j12 = ndimage.convolve(grad.gx * grad.gy, kernel, mode="constant", cval=0.0)
    j22 = ndimage.convolve(grad.gy * grad.gy, kernel, mode="constant", cval=0.0)

    gh = math.ceil(image.height / cfg.stride)
    gw = math.ceil(image.width / cfg.stride)
    ys = (np.arange(gh) * cfg.stride)[:, None]
    xs = (np.arange(gw) * cfg.stride)[None, :]
    a11 = j11[ys, xs]
    a12 = j12[ys, xs]
    a22 = j22[ys, xs]

    theta = 0.5 * np.arctan2(2.0 * a12, a11 - a22)
    ridge = np.mod(theta + math.pi / 2.0, math.pi)
    ridge = np.where(ridge >= math.pi, 0.0, ridge)
    trace = a11 + a22
    spread = np.hypot(a11 - a22, 2.0 * a12)
    with np.errstate(invalid="ignore", divide="ignore"):
        coherence = np.where(trace < 1e-12, 0.0, np.minimum(spread / np.maximum(trace, 1e-300), 1.0))

    foreground = patch_variance_grid(image, cfg) >= cfg.background_variance_threshold
    valid = foreground & (coherence >= coherence_threshold)
    return FlowField(np.where(valid, ridge, 0.0), valid, cfg.stride, coherence=coherence)
