import math

import numpy as np
import pytest

import ridgeflow as rf

from oracles import inner_pixel_mask, manual_bilinear


def uniform_flow(theta=math.pi / 4, grid=16, stride=2):
    return rf.FlowField(np.full((grid, grid), theta), np.ones((grid, grid), dtype=bool), stride)


class TestTraceContour:
    def test_uniform_field_reduces_to_straight_line(self):
        flow = uniform_flow()
        p = rf.Point(14.0, 14.0)
        path = rf.trace_contour(flow, p, 5)
        assert len(path.points) == 11
        assert path.points[path.seed_index] == p
        want = rf.line_points(rf.LineSegment(p, math.pi / 4, 5, 1.0))
        for got, exp in zip(path.points, want):
            assert abs(got.x - exp.x) < 1e-9
            assert abs(got.y - exp.y) < 1e-9

    def test_unit_steps(self):
        flow = uniform_flow(theta=1.2)
        path = rf.trace_contour(flow, rf.Point(12.0, 14.0), 8)
        pts = np.array([[q.x, q.y] for q in path.points])
        steps = np.hypot(*np.diff(pts, axis=0).T)
        assert np.allclose(steps, 1.0, atol=1e-12)

    def test_no_direction_reversals(self):
        spec = rf.SyntheticSpec(width=64, height=64, pattern="concentric", period=8.0)
        _, truth = rf.generate(spec)
        rng = np.random.RandomState(8)
        for _ in range(40):
            p = rf.Point(rng.uniform(16, 48), rng.uniform(16, 48))
            path = rf.trace_contour(truth, p, 9, bounds=(64, 64))
            pts = np.array([[q.x, q.y] for q in path.points])
            if len(pts) < 3:
                continue
            d = np.diff(pts, axis=0)
            dots = (d[:-1] * d[1:]).sum(axis=1)
            assert (dots >= -1e-9).all()

    def test_truncates_at_undefined_flow(self):
        angles = np.zeros((8, 8))
        valid = np.zeros((8, 8), dtype=bool)
        valid[:, :3] = True  # valid sites at x in {0, 2, 4}; interpolation reaches x < 6
        flow = rf.FlowField(angles, valid, 2)
        path = rf.trace_contour(flow, rf.Point(2.0, 6.0), 6)
        # forward tracing stops at x = 6 where the angle turns undefined
        assert len(path.points) < 13
        assert max(q.x for q in path.points) <= 6.0 + 1e-9

    def test_truncates_at_raster_bounds(self):
        flow = uniform_flow(theta=0.0, grid=8, stride=2)
        path = rf.trace_contour(flow, rf.Point(12.0, 6.0), 6, bounds=(14, 14))
        assert max(q.x for q in path.points) <= 13.0
        assert path.points[0].x == pytest.approx(6.0)  # backward side ran fully

    def test_follows_circles_on_concentric_truth(self):
        spec = rf.SyntheticSpec(width=128, height=128, pattern="concentric", period=8.0)
        _, truth = rf.generate(spec)
        c = 127 / 2.0
        for r0, phi in [(20, 0.3), (30, 1.2), (40, 2.6), (45, 4.1), (25, 5.7)]:
            p = rf.Point(c + r0 * math.cos(phi), c + r0 * math.sin(phi))
            path = rf.trace_contour(truth, p, 10, bounds=(128, 128))
            assert len(path.points) == 21
            seed_r = math.hypot(p.x - c, p.y - c)
            for q in path.points:
                assert abs(math.hypot(q.x - c, q.y - c) - seed_r) <= 1.5

    def test_rejects_bad_half_steps(self):
        with pytest.raises(ValueError):
            rf.trace_contour(uniform_flow(), rf.Point(5, 5), 0)


class TestContourOps:
    def test_uniform_field_matches_linear_binarize(self):
        spec = rf.SyntheticSpec(width=64, height=64, pattern="parallel",
                                orientation=math.pi / 4, period=8.0)
        img, _ = rf.generate(spec)
        flow = uniform_flow(math.pi / 4, grid=32, stride=2)
        rng = np.random.RandomState(6)
        for _ in range(60):
            p = rf.Point(float(rng.randint(12, 52)), float(rng.randint(12, 52)))
            got = rf.binarize_pixel_contour(img, p, flow)
            want = rf.binarize_pixel(img, p, math.pi / 4)
            assert got == want

    def test_uniform_field_matches_linear_enhance(self):
        spec = rf.SyntheticSpec(width=64, height=64, pattern="parallel",
                                orientation=math.pi / 4, period=8.0, noise_sigma=15.0, rng_seed=2)
        img, _ = rf.generate(spec)
        flow = uniform_flow(math.pi / 4, grid=32, stride=2)
        binary = rf.binarize_image(img, flow)
        for x, y in ((20, 20), (31, 41), (45, 27)):
            got = rf.enhance_pixel_contour(img, binary, rf.Point(x, y), flow)
            want = rf.enhance_pixel(img, binary, rf.Point(x, y), math.pi / 4)
            assert got == pytest.approx(want, abs=1e-9)

    def test_constant_image(self):
        img = rf.GrayImage(np.full((48, 48), 99, dtype=np.int64))
        flow = uniform_flow(0.9, grid=24, stride=2)
        binary = rf.BinaryImage(np.ones((48, 48), dtype=np.int64))
        assert rf.binarize_pixel_contour(img, rf.Point(24, 24), flow) == 1
        assert rf.enhance_pixel_contour(img, binary, rf.Point(24, 24), flow) == pytest.approx(99.0, abs=1e-12)

    def test_image_ops_match_pixel_ops(self):
        spec = rf.SyntheticSpec(width=64, height=64, pattern="parallel",
                                orientation=math.radians(30), period=8.0, noise_sigma=10.0, rng_seed=11)
        img, _ = rf.generate(spec)
        flow = rf.compute_flow_field(img)
        binary_c = rf.binarize_image_contour(img, flow)
        enhanced_c = rf.contour_enhance_values(img, binary_c, flow)
        rng = np.random.RandomState(5)
        for _ in range(30):
            x = int(rng.randint(10, 54))
            y = int(rng.randint(10, 54))
            assert binary_c.bits[y, x] == rf.binarize_pixel_contour(img, rf.Point(x, y), flow)
            want = rf.enhance_pixel_contour(img, binary_c, rf.Point(x, y), flow)
            assert enhanced_c[y, x] == pytest.approx(want, abs=1e-9)

    def test_contour_enhancement_close_to_linear_on_straight_ridges(self):
        spec = rf.SyntheticSpec(width=128, height=128, pattern="parallel",
                                orientation=math.radians(30), period=8.0)
        img, _ = rf.generate(spec)
        flow = rf.compute_flow_field(img)
        binary = rf.binarize_image(img, flow)
        lin = rf.enhance_values(img, binary, flow)
        con = rf.contour_enhance_values(img, binary, flow)
        inner = inner_pixel_mask(128, 128)
        assert (np.abs(lin - con)[inner] < 1.0).mean() >= 0.95

    def test_contour_beats_linear_on_high_curvature(self):
        spec = rf.SyntheticSpec(width=128, height=128, pattern="concentric",
                                period=8.0, noise_sigma=25.0, rng_seed=3)
        img, truth = rf.generate(spec)
        binary = rf.binarize_image(img, truth)
        lin = rf.enhance_values(img, binary, truth)
        con = rf.contour_enhance_values(img, binary, truth)

        # tangential variance probed bilinearly along exact ridge circles
        # (cos(2 pi r / 8) = -1 at r = 12, 20), where straight kernels bend off
        c = 127 / 2.0

        def circle_var(values, r, phi):
            ts = np.linspace(-9.0 / r, 9.0 / r, 19)
            px = c + r * np.cos(phi + ts)
            py = c + r * np.sin(phi + ts)
            vals = [manual_bilinear(values, x, y) for x, y in zip(px, py)]
            return np.var(vals)

        rng = np.random.RandomState(12)
        lin_var = []
        con_var = []
        for _ in range(150):
            r = float(rng.choice([12.0, 20.0]))
            phi = rng.uniform(0, 2 * math.pi)
            lin_var.append(circle_var(lin, r, phi))
            con_var.append(circle_var(con, r, phi))
        assert np.mean(con_var) <= np.mean(lin_var)
