"""Orientation flow from projection statistics.

For a candidate angle, short perpendicular segments are dropped from every
sample site of the tangent segment and the standard deviation of intensities
along each perpendicular is taken; the dominant orientation is the candidate
with the smallest mean deviation, plus pi/2. Each perpendicular deviation is
the minimum over the full segment and its two halves, which keeps the
statistic meaningful where a ridge ends inside the window.

Two interchangeable evaluators exist: a direct one that samples the source
image along every segment, and a fast one that rotates the image once per
candidate angle so all segments become axis-aligned runs over precomputed
prefix sums of values and squared values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flowfield import FlowField
from .image import GrayImage, Point, RotatedRaster, bilinear_many, rotate_raster

# Variances below this are floating-point dust from interpolation; treating
# them as exact zeros keeps argmin ties deterministic on flat regions.
_VAR_EPS = 1e-9

# Constant sub-pixel shift applied to every statistics sample. Bilinear
# interpolation smooths pixel noise on oblique lines (variance factor
# (f^2+(1-f)^2) per axis, averaging 2/3 over fractional offsets) but not on
# lattice-aligned ones, which would bias the angle comparison toward oblique
# candidates on noisy images. Shifting all samples by f0 with
# f0^2+(1-f0)^2 = 2/3 gives lattice-aligned lines the same expected
# smoothing, so every candidate angle plays by the same rules.
_STAT_OFFSET = (1.0 - 3.0**-0.5) / 2.0


@dataclass
class FlowConfig:
    """Window lengths, angular steps, grid stride and background threshold.

    Angular search is coarse-to-fine: candidates every ``coarse_step`` over
    [0, pi), then a refinement at ``fine_step`` within ``fine_half_range`` of
    the coarse optimum. Flow is computed every ``stride`` pixels; grid sites
    whose local patch variance falls below ``background_variance_threshold``
    are marked invalid. ``use_half_line_rule`` disables the min-over-halves
    rule when False (full-segment deviation only), for ablation.
    """

    tangent_half_length: int = 8
    perp_half_length: int = 8
    coarse_step: float = math.pi / 8
    fine_step: float = math.pi / 32
    fine_half_range: float = math.pi / 16
    stride: int = 2
    background_variance_threshold: float = 25.0
    use_half_line_rule: bool = True

    def __post_init__(self):
        if self.tangent_half_length < 1 or self.perp_half_length < 1:
            raise ValueError("segment half lengths must be >= 1")
        n = round(math.pi / self.coarse_step) if self.coarse_step > 0 else 0
        if n < 1 or abs(n * self.coarse_step - math.pi) > 1e-9:
            raise ValueError("coarse_step must divide pi into an integer number of angles")
        if self.fine_step <= 0 or self.fine_step > self.coarse_step + 1e-12:
            raise ValueError("fine_step must be positive and <= coarse_step")
        if self.fine_half_range < 0 or self.fine_half_range > self.coarse_step / 2 + self.fine_step + 1e-12:
            raise ValueError("fine_half_range must lie in [0, coarse_step/2 + fine_step]")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.background_variance_threshold < 0:
            raise ValueError("background_variance_threshold must be non-negative")

    def coarse_angles(self) -> np.ndarray:
        return np.arange(round(math.pi / self.coarse_step)) * self.coarse_step

    def fine_offsets(self) -> list[float]:
        m = int(math.floor(self.fine_half_range / self.fine_step + 1e-9))
        return [k * self.fine_step for k in range(-m, m + 1)]


def _segment_deviation(vals: np.ndarray) -> np.ndarray:
    """One-pass std over the last axis, NaN-aware; NaN where <2 samples."""
    ok = ~np.isnan(vals)
    n = ok.sum(axis=-1)
    s1 = np.where(ok, vals, 0.0).sum(axis=-1)
    s2 = np.where(ok, vals * vals, 0.0).sum(axis=-1)
    nf = np.maximum(n, 1)
    mean = s1 / nf
    var = s2 / nf - mean * mean
    var = np.where(var < _VAR_EPS, 0.0, var)
    return np.where(n >= 2, np.sqrt(var), np.nan)


def _perp_deviations(img: np.ndarray, qx: np.ndarray, qy: np.ndarray, alpha: float, cfg: FlowConfig) -> np.ndarray:
    """Deviation at each q for the perpendicular of ``alpha``; NaN undefined."""
    s = cfg.perp_half_length
    offs = np.arange(-s, s + 1, dtype=np.float64)
    vx = -math.sin(alpha)
    vy = math.cos(alpha)
    X = qx[..., None] + offs * vx + _STAT_OFFSET
    Y = qy[..., None] + offs * vy + _STAT_OFFSET
    vals = bilinear_many(img, X, Y)
    full = _segment_deviation(vals)
    if not cfg.use_half_line_rule:
        return full
    lo = _segment_deviation(vals[..., : s + 1])
    hi = _segment_deviation(vals[..., s:])
    stacked = np.stack([full, lo, hi])
    all_nan = np.isnan(stacked).all(axis=0)
    out = np.nanmin(np.where(np.isnan(stacked), np.inf, stacked), axis=0)
    return np.where(all_nan, np.nan, out)


def _mean_deviation_direct(img: np.ndarray, px: np.ndarray, py: np.ndarray, alpha: float, cfg: FlowConfig) -> np.ndarray:
    t = cfg.tangent_half_length
    offs = np.arange(-t, t + 1, dtype=np.float64)
    ux = math.cos(alpha)
    uy = math.sin(alpha)
    qx = px[..., None] + offs * ux
    qy = py[..., None] + offs * uy
    sig = _perp_deviations(img, qx, qy, alpha, cfg)
    ok = ~np.isnan(sig)
    n = ok.sum(axis=-1)
    s1 = np.where(ok, sig, 0.0).sum(axis=-1)
    return np.where(n > 0, s1 / np.maximum(n, 1), np.nan)


# ---------------------------------------------------------------------------
# Scalar operations (direct sampling; these are the reference definitions)


def perpendicular_deviation(image: GrayImage, q: Point, alpha: float, cfg: FlowConfig | None = None) -> float | None:
    """Min-rule standard deviation across the perpendicular segment at ``q``.

    The perpendicular of ``alpha`` through q is split into two halves that
    both include q; the result is the smallest defined deviation among the
    two halves and the full segment. None when no sub-segment has two
    in-bounds samples.
    """
    cfg = cfg or FlowConfig()
    v = _perp_deviations(image.as_float(), np.asarray([q[0]], dtype=np.float64), np.asarray([q[1]], dtype=np.float64), alpha, cfg)[0]
    return None if math.isnan(v) else float(v)


def mean_perpendicular_deviation(image: GrayImage, p: Point, alpha: float, cfg: FlowConfig | None = None) -> float | None:
    """Mean of the defined perpendicular deviations along the tangent at ``p``."""
    cfg = cfg or FlowConfig()
    v = _mean_deviation_direct(image.as_float(), np.asarray([p[0]], dtype=np.float64), np.asarray([p[1]], dtype=np.float64), alpha, cfg)[0]
    return None if math.isnan(v) else float(v)


def dominant_orientation(image: GrayImage, p: Point, cfg: FlowConfig | None = None) -> float | None:
    """Coarse-to-fine argmin of the mean deviation at ``p``, plus pi/2.

    Ties prefer the smaller coarse angle and the earlier fine candidate.
    None when every candidate angle is undefined at ``p``.
    """
    cfg = cfg or FlowConfig()
    ev = DirectDeviationEvaluator(image, cfg)
    theta, ok = _search_orientations(ev.mean_deviation, np.asarray([p[0]], dtype=np.float64), np.asarray([p[1]], dtype=np.float64), cfg)
    return float(theta[0]) if bool(ok[0]) else None


# ---------------------------------------------------------------------------
# Batch evaluators


class DirectDeviationEvaluator:
    """Evaluates the mean deviation by sampling the source image directly."""

    def __init__(self, image: GrayImage, cfg: FlowConfig):
        self._img = image.as_float()
        self._cfg = cfg

    def mean_deviation(self, alpha: float, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return _mean_deviation_direct(
            self._img, np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64), float(alpha), self._cfg
        )


class _RotatedStats:
    """Prefix sums of one rotated raster: counts, values, squared values."""

    def __init__(self, rr: RotatedRaster):
        self.rr = rr
        h, w = rr.values.shape
        self.h = h
        self.w = w
        v = np.where(rr.valid, rr.values, 0.0)
        self.pn = np.zeros((h + 1, w))
        self.p1 = np.zeros((h + 1, w))
        self.p2 = np.zeros((h + 1, w))
        self.pn[1:] = np.cumsum(rr.valid, axis=0)
        self.p1[1:] = np.cumsum(v, axis=0)
        self.p2[1:] = np.cumsum(v * v, axis=0)

    def span_stats(self, cols: np.ndarray, y0: np.ndarray, y1: np.ndarray):
        """Count/sum/sum-of-squares over rows [y0, y1] of each column."""
        a = np.clip(y0, 0, self.h)
        b = np.clip(y1 + 1, 0, self.h)
        b = np.maximum(b, a)
        n = self.pn[b, cols] - self.pn[a, cols]
        s1 = self.p1[b, cols] - self.p1[a, cols]
        s2 = self.p2[b, cols] - self.p2[a, cols]
        return n, s1, s2


def _span_deviation(n: np.ndarray, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    nf = np.maximum(n, 1)
    mean = s1 / nf
    var = s2 / nf - mean * mean
    var = np.where(var < _VAR_EPS, 0.0, var)
    return np.where(n >= 2, np.sqrt(var), np.nan)


class RotatedDeviationEvaluator:
    """Fast evaluator: one rotation plus prefix sums per candidate angle.

    Rotating by -alpha turns tangent segments into horizontal runs and the
    perpendiculars into vertical runs, so every deviation reduces to prefix
    sum lookups of values and squared values. Grid sites are snapped to the
    nearest rotated lattice point, so results match the direct evaluator up
    to sub-pixel resampling.
    """

    def __init__(self, image: GrayImage, cfg: FlowConfig):
        self._img = image.as_float()
        self._cfg = cfg
        self._cache: dict[float, _RotatedStats] = {}

    def _stats(self, alpha: float) -> _RotatedStats:
        st = self._cache.get(alpha)
        if st is None:
            st = _RotatedStats(rotate_raster(self._img, alpha, (_STAT_OFFSET, _STAT_OFFSET)))
            self._cache[alpha] = st
        return st

    def mean_deviation(self, alpha: float, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        cfg = self._cfg
        alpha = float(alpha)
        st = self._stats(alpha)
        rx, ry = st.rr.to_rotated(np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64))
        cx = np.floor(rx + 0.5).astype(np.int64)
        cy = np.floor(ry + 0.5).astype(np.int64)

        t = cfg.tangent_half_length
        s = cfg.perp_half_length
        sig_sum = np.zeros(cx.shape)
        sig_cnt = np.zeros(cx.shape, dtype=np.int64)
        for i in range(-t, t + 1):
            col = cx + i
            col_ok = (col >= 0) & (col < st.w)
            colc = np.clip(col, 0, st.w - 1)
            n, s1, s2 = st.span_stats(colc, cy - s, cy + s)
            sig = _span_deviation(n, s1, s2)
            if cfg.use_half_line_rule:
                n, s1, s2 = st.span_stats(colc, cy - s, cy)
                lo = _span_deviation(n, s1, s2)
                n, s1, s2 = st.span_stats(colc, cy, cy + s)
                hi = _span_deviation(n, s1, s2)
                stacked = np.stack([sig, lo, hi])
                all_nan = np.isnan(stacked).all(axis=0)
                sig = np.nanmin(np.where(np.isnan(stacked), np.inf, stacked), axis=0)
                sig = np.where(all_nan, np.nan, sig)
            ok = col_ok & ~np.isnan(sig)
            sig_sum += np.where(ok, sig, 0.0)
            sig_cnt += ok
        return np.where(sig_cnt > 0, sig_sum / np.maximum(sig_cnt, 1), np.nan)


# ---------------------------------------------------------------------------
# Coarse-to-fine search and the flow field


def _search_orientations(mean_deviation, px: np.ndarray, py: np.ndarray, cfg: FlowConfig):
    """Coarse argmin then fine refinement; returns (theta, defined) arrays."""
    n_sites = px.shape[0]
    if n_sites == 0:
        return np.zeros(0), np.zeros(0, dtype=bool)

    coarse = cfg.coarse_angles()
    mu = np.stack([mean_deviation(a, px, py) for a in coarse])
    filled = np.where(np.isnan(mu), np.inf, mu)
    defined = ~np.isinf(filled).all(axis=0)
    best_idx = np.argmin(filled, axis=0)  # ties -> smaller angle
    best_alpha = coarse[best_idx]
    best_mu = filled[best_idx, np.arange(n_sites)]

    offsets = cfg.fine_offsets()
    cand_mu = np.full((len(offsets), n_sites), np.inf)
    cand_alpha = np.zeros((len(offsets), n_sites))
    for oi, off in enumerate(offsets):
        alphas = np.mod(best_alpha + off, math.pi)
        cand_alpha[oi] = alphas
        if off == 0.0:
            cand_mu[oi] = best_mu
            continue
        for a in np.unique(alphas[defined]):
            sel = defined & (alphas == a)
            vals = mean_deviation(float(a), px[sel], py[sel])
            cand_mu[oi, sel] = np.where(np.isnan(vals), np.inf, vals)
    # argmin over candidates; exact mu ties resolve toward the smaller angle
    min_mu = cand_mu.min(axis=0)
    tie_alpha = np.where(cand_mu == min_mu, cand_alpha, np.inf)
    alpha_star = np.where(defined, tie_alpha.min(axis=0), 0.0)
    theta = np.mod(alpha_star + math.pi / 2.0, math.pi)
    return np.where(defined, theta, 0.0), defined


def patch_variance_grid(image: GrayImage, cfg: FlowConfig) -> np.ndarray:
    """Variance of the axis-aligned patch around each grid site (border-clipped)."""
    f = image.as_float()
    h, w = f.shape
    p1 = np.zeros((h + 1, w + 1))
    p2 = np.zeros((h + 1, w + 1))
    p1[1:, 1:] = f.cumsum(axis=0).cumsum(axis=1)
    p2[1:, 1:] = (f * f).cumsum(axis=0).cumsum(axis=1)

    r = cfg.tangent_half_length
    gx = np.arange(math.ceil(w / cfg.stride)) * cfg.stride
    gy = np.arange(math.ceil(h / cfg.stride)) * cfg.stride
    x0 = np.clip(gx - r, 0, w)
    x1 = np.clip(gx + r + 1, 0, w)
    y0 = np.clip(gy - r, 0, h)
    y1 = np.clip(gy + r + 1, 0, h)

    def rect(p, ya, yb, xa, xb):
        return p[yb][:, xb] - p[ya][:, xb] - p[yb][:, xa] + p[ya][:, xa]

    n = (y1 - y0)[:, None] * (x1 - x0)[None, :]
    s1 = rect(p1, y0, y1, x0, x1)
    s2 = rect(p2, y0, y1, x0, x1)
    mean = s1 / n
    return np.maximum(s2 / n - mean * mean, 0.0)


def compute_flow_field(image: GrayImage, cfg: FlowConfig | None = None, *, sampling: str = "rotated") -> FlowField:
    """Dominant orientation on the stride grid, background sites invalid.

    ``sampling`` selects the evaluator: "rotated" (default, fast path) or
    "direct" (per-site reference path).
    """
    cfg = cfg or FlowConfig()
    if sampling not in ("rotated", "direct"):
        raise ValueError("sampling must be 'rotated' or 'direct'")
    min_dim = 2 * (cfg.tangent_half_length + cfg.perp_half_length)
    if image.width < min_dim or image.height < min_dim:
        raise ValueError(
            f"image must be at least {min_dim}x{min_dim} pixels for this configuration, "
            f"got {image.width}x{image.height}"
        )

    var = patch_variance_grid(image, cfg)
    foreground = var >= cfg.background_variance_threshold
    gh, gw = foreground.shape
    gx = np.arange(gw, dtype=np.float64) * cfg.stride
    gy = np.arange(gh, dtype=np.float64) * cfg.stride
    GX, GY = np.meshgrid(gx, gy)
    sel = foreground.ravel()
    px = GX.ravel()[sel]
    py = GY.ravel()[sel]

    if sampling == "rotated":
        ev = RotatedDeviationEvaluator(image, cfg)
    else:
        ev = DirectDeviationEvaluator(image, cfg)
    theta_sel, ok_sel = _search_orientations(ev.mean_deviation, px, py, cfg)

    angles = np.zeros(gh * gw)
    valid = np.zeros(gh * gw, dtype=bool)
    idx = np.flatnonzero(sel)
    angles[idx] = theta_sel
    valid[idx] = ok_sel
    return FlowField(angles.reshape(gh, gw), valid.reshape(gh, gw), cfg.stride)
