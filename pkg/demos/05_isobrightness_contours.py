"""Curved sampling paths on a circular ridge pattern.

A contour is traced from a seed by unit steps along the local orientation.
On concentric ridges the traced path hugs the circle through the seed,
and contour-guided enhancement beats straight-line smoothing where the
curvature is high.
"""

import math
import pathlib

import numpy as np

import ridgeflow as rf

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

spec = rf.SyntheticSpec(width=128, height=128, pattern="concentric",
                        period=8.0, noise_sigma=25.0, rng_seed=5)
image, truth = rf.generate(spec)
center = (spec.width - 1) / 2.0

print("tracing 10-step contours along ground-truth flow:")
for radius in (16.0, 28.0, 44.0):
    seed = rf.Point(center + radius, center)
    path = rf.trace_contour(truth, seed, 10, bounds=(spec.width, spec.height))
    radii = [math.hypot(q.x - center, q.y - center) for q in path.points]
    drift = max(abs(r - radius) for r in radii)
    print(f"  radius {radius:5.1f}: {len(path.points)} points, max drift off circle {drift:.3f} px")

binary = rf.binarize_image(image, truth)
straight = rf.enhance_values(image, binary, truth)
curved = rf.contour_enhance_values(image, binary, truth)
clean, _ = rf.generate(rf.SyntheticSpec(width=128, height=128, pattern="concentric", period=8.0))
inner = np.s_[40:88, 40:88]  # high-curvature core
print("residual vs clean pattern in the high-curvature core:")
print(f"  straight-line smoothing: {np.abs(straight - clean.as_float())[inner].mean():.3f}")
print(f"  contour smoothing:       {np.abs(curved - clean.as_float())[inner].mean():.3f}")

rf.save_pgm(rf.GrayImage.from_float(curved), OUT / "contour_enhanced.pgm")
print(f"wrote {OUT / 'contour_enhanced.pgm'}")
