"""Subsampled grids of pi-periodic orientation angles with a validity mask."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .image import Point


@dataclass(eq=False)
class FlowField:
    """Orientation samples on a regular grid of source-image pixel positions.

    Site (ix, iy) sits at ``origin + (ix, iy) * stride`` in pixel coordinates.
    Angles are radians in [0, pi); invalid sites store angle 0 and valid=False.
    ``coherence`` is an optional per-site confidence in [0, 1].
    """

    angles: np.ndarray
    valid: np.ndarray
    stride: int
    origin: tuple[float, float] = (0.0, 0.0)
    coherence: np.ndarray | None = None

    def __post_init__(self):
        ang = np.asarray(self.angles, dtype=np.float64)
        val = np.asarray(self.valid, dtype=bool)
        if ang.ndim != 2 or ang.shape != val.shape:
            raise ValueError("angles and valid must be 2-D arrays of equal shape")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if np.any(val & ((ang < 0.0) | (ang >= math.pi))):
            raise ValueError("valid angles must lie in [0, pi)")
        ang = np.where(val, ang, 0.0)
        ang.setflags(write=False)
        val.setflags(write=False)
        self.angles = ang
        self.valid = val
        if self.coherence is not None:
            coh = np.asarray(self.coherence, dtype=np.float64)
            if coh.shape != ang.shape:
                raise ValueError("coherence must match the grid shape")
            coh.setflags(write=False)
            self.coherence = coh

    @property
    def grid_width(self) -> int:
        return self.angles.shape[1]

    @property
    def grid_height(self) -> int:
        return self.angles.shape[0]

    def site_xs(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.grid_width) * self.stride

    def site_ys(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.grid_height) * self.stride


def angular_distance(a, b):
    """Distance between pi-periodic orientations, in [0, pi/2]."""
    d = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)) % math.pi
    return np.minimum(d, math.pi - d)


def angles_at(flow: FlowField, xs, ys) -> tuple[np.ndarray, np.ndarray]:
    """Interpolated orientation at arbitrary pixel positions (vectorized).

    Interpolation runs in the doubled-angle domain: the unit vectors
    (cos 2t, sin 2t) of the four surrounding grid sites are blended with
    bilinear weights renormalized over valid sites, then the angle of the
    blend is halved. Returns (angles, defined); angle is 0 where undefined.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    gx = (xs - flow.origin[0]) / flow.stride
    gy = (ys - flow.origin[1]) / flow.stride
    x0 = np.floor(gx).astype(np.int64)
    y0 = np.floor(gy).astype(np.int64)
    fx = gx - x0
    fy = gy - y0

    gw, gh = flow.grid_width, flow.grid_height
    vx = np.zeros(xs.shape, dtype=np.float64)
    vy = np.zeros(xs.shape, dtype=np.float64)
    wsum = np.zeros(xs.shape, dtype=np.float64)
    for ddx, ddy, wgt in (
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ):
        cx = x0 + ddx
        cy = y0 + ddy
        ok = (cx >= 0) & (cx < gw) & (cy >= 0) & (cy < gh)
        cxc = np.clip(cx, 0, gw - 1)
        cyc = np.clip(cy, 0, gh - 1)
        ok &= flow.valid[cyc, cxc]
        w = np.where(ok, wgt, 0.0)
        doubled = 2.0 * flow.angles[cyc, cxc]
        vx += w * np.cos(doubled)
        vy += w * np.sin(doubled)
        wsum += w

    with np.errstate(invalid="ignore", divide="ignore"):
        nx = vx / wsum
        ny = vy / wsum
    defined = (wsum > 0.0) & (np.hypot(np.where(wsum > 0, nx, 0.0), np.where(wsum > 0, ny, 0.0)) >= 1e-6)
    theta = np.where(defined, 0.5 * np.arctan2(np.where(defined, ny, 0.0), np.where(defined, nx, 1.0)), 0.0)
    theta = np.where(defined, np.mod(theta, math.pi), 0.0)
    # guard against mod returning pi for angles a hair below zero
    theta = np.where(theta >= math.pi, 0.0, theta)
    return theta, defined


def angle_at(flow: FlowField, p: Point) -> float | None:
    """Interpolated orientation at a single point, or None where undefined."""
    theta, ok = angles_at(flow, np.array([p[0]]), np.array([p[1]]))
    return float(theta[0]) if bool(ok[0]) else None


def interior_site_mask(flow: FlowField, width: int, height: int, margin: float) -> np.ndarray:
    """Sites at least ``margin`` pixels away from every raster border."""
    xs = flow.site_xs()
    ys = flow.site_ys()
    okx = (xs >= margin) & (xs <= width - 1 - margin)
    oky = (ys >= margin) & (ys <= height - 1 - margin)
    return oky[:, None] & okx[None, :]


# ---------------------------------------------------------------------------
# CSV serialization: header x,y,theta_radians,valid[,coherence]; one row per
# site in row-major order, 6 decimal places for real values.


def save_flow_csv(flow: FlowField, path) -> None:
    cols = "x,y,theta_radians,valid"
    if flow.coherence is not None:
        cols += ",coherence"
    lines = [cols]
    xs = flow.site_xs()
    ys = flow.site_ys()
    for iy in range(flow.grid_height):
        for ix in range(flow.grid_width):
            row = f"{xs[ix]:g},{ys[iy]:g},{flow.angles[iy, ix]:.6f},{int(flow.valid[iy, ix])}"
            if flow.coherence is not None:
                row += f",{flow.coherence[iy, ix]:.6f}"
            lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_flow_csv(path) -> FlowField:
    path = Path(path)
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty flow CSV")
    header = lines[0].split(",")
    if header[:4] != ["x", "y", "theta_radians", "valid"]:
        raise ValueError(f"{path}: unexpected flow CSV header {lines[0]!r}")
    has_coh = len(header) >= 5 and header[4] == "coherence"
    xs, ys, thetas, valids, cohs = [], [], [], [], []
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split(",")
        xs.append(float(parts[0]))
        ys.append(float(parts[1]))
        thetas.append(float(parts[2]))
        valids.append(int(parts[3]))
        if has_coh:
            cohs.append(float(parts[4]))
    ux = np.unique(np.asarray(xs))
    uy = np.unique(np.asarray(ys))
    gw, gh = len(ux), len(uy)
    if gw * gh != len(xs):
        raise ValueError(f"{path}: sites do not form a complete grid")
    if gw > 1:
        stride = ux[1] - ux[0]
    elif gh > 1:
        stride = uy[1] - uy[0]
    else:
        stride = 1.0
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise ValueError(f"{path}: non-integer grid stride {stride}")
    angles = np.asarray(thetas, dtype=np.float64).reshape(gh, gw)
    valid = np.asarray(valids, dtype=int).reshape(gh, gw).astype(bool)
    coherence = np.asarray(cohs, dtype=np.float64).reshape(gh, gw) if has_coh else None
    return FlowField(angles, valid, int(round(stride)), (float(ux[0]), float(uy[0])), coherence)
