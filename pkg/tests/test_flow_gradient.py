import math

import numpy as np
import pytest

import ridgeflow as rf

from oracles import flow_mae


def sinusoid(orientation_deg, size=64):
    spec = rf.SyntheticSpec(width=size, height=size, pattern="parallel",
                            orientation=math.radians(orientation_deg), period=8.0)
    return rf.generate(spec)


class TestGradient:
    def test_constant_image_has_zero_gradient(self):
        g = rf.gradient(rf.GrayImage(np.full((8, 8), 9, dtype=np.int64)))
        assert (g.gx == 0).all() and (g.gy == 0).all()

    def test_ramp(self):
        img = rf.GrayImage((2 * np.arange(16)[None, :] + np.zeros((10, 1))).astype(np.int64))
        g = rf.gradient(img)
        assert np.allclose(g.gx[1:-1, 1:-1], 2.0)
        assert np.allclose(g.gy[1:-1, 1:-1], 0.0)

    def test_matches_direct_convolution_oracle(self):
        rng = np.random.RandomState(17)
        img = rf.GrayImage(rng.randint(0, 256, size=(7, 7)).astype(np.int64))
        g = rf.gradient(img)
        f = img.as_float()
        kx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64) / 8.0
        ky = kx.T
        for y in range(1, 6):
            for x in range(1, 6):
                patch = f[y - 1 : y + 2, x - 1 : x + 2]
                assert g.gx[y, x] == pytest.approx((patch * kx).sum(), abs=1e-12)
                assert g.gy[y, x] == pytest.approx((patch * ky).sum(), abs=1e-12)

    def test_too_small(self):
        with pytest.raises(ValueError):
            rf.gradient(rf.GrayImage(np.zeros((2, 5), dtype=np.int64)))


class TestSecondMomentMatrix:
    def test_uniform_unit_gradient_x(self):
        grad = rf.GradientField(np.ones((9, 9)), np.zeros((9, 9)))
        t = rf.second_moment_matrix(grad, rf.Point(4, 4), window_half=1, weight_sigma=None)
        assert (t.a11, t.a12, t.a22) == (9.0, 0.0, 0.0)

    def test_uniform_diagonal_gradient(self):
        grad = rf.GradientField(np.ones((11, 11)), np.ones((11, 11)))
        t = rf.second_moment_matrix(grad, rf.Point(5, 5), window_half=2, weight_sigma=2.0)
        offs = np.arange(-2, 3, dtype=np.float64)
        dx, dy = np.meshgrid(offs, offs)
        wsum = float(np.exp(-(dx * dx + dy * dy) / 8.0).sum())
        assert t.a11 == pytest.approx(wsum, rel=1e-12)
        assert t.a12 == pytest.approx(wsum, rel=1e-12)
        assert t.a22 == pytest.approx(wsum, rel=1e-12)

    def test_matches_double_loop_oracle(self):
        img, _ = sinusoid(30)
        grad = rf.gradient(img)
        p = rf.Point(31, 29)
        t = rf.second_moment_matrix(grad, p, window_half=8, weight_sigma=4.0)
        a11 = a12 = a22 = 0.0
        for dy in range(-8, 9):
            for dx in range(-8, 9):
                w = math.exp(-(dx * dx + dy * dy) / (2 * 16.0))
                gx = grad.gx[29 + dy, 31 + dx]
                gy = grad.gy[29 + dy, 31 + dx]
                a11 += w * gx * gx
                a12 += w * gx * gy
                a22 += w * gy * gy
        assert t.a11 == pytest.approx(a11, rel=1e-9)
        assert t.a12 == pytest.approx(a12, rel=1e-9)
        assert t.a22 == pytest.approx(a22, rel=1e-9)

    def test_always_positive_semidefinite(self):
        rng = np.random.RandomState(23)
        img = rf.GrayImage(rng.randint(0, 256, size=(32, 32)).astype(np.int64))
        grad = rf.gradient(img)
        for _ in range(100):
            p = rf.Point(rng.randint(0, 32), rng.randint(0, 32))
            t = rf.second_moment_matrix(grad, p, window_half=3, weight_sigma=2.0)
            assert t.a11 >= 0 and t.a22 >= 0
            assert t.a11 * t.a22 - t.a12 ** 2 >= -1e-6 * (t.a11 + t.a22) ** 2
            tr = t.a11 + t.a22
            disc = math.hypot(t.a11 - t.a22, 2 * t.a12)
            lam2 = (tr - disc) / 2
            assert lam2 >= -1e-9


class TestTensorOrientation:
    def test_rank_one(self):
        theta, coh = rf.tensor_orientation(rf.StructureTensor(9.0, 0.0, 0.0))
        assert theta == 0.0 and coh == 1.0

    def test_isotropic(self):
        theta, coh = rf.tensor_orientation(rf.StructureTensor(3.0, 0.0, 3.0))
        assert coh == 0.0

    def test_zero_tensor(self):
        _, coh = rf.tensor_orientation(rf.StructureTensor(0.0, 0.0, 0.0))
        assert coh == 0.0

    def test_scaling_invariance(self):
        t = rf.StructureTensor(5.0, 1.25, 2.5)
        base = rf.tensor_orientation(t)[0]
        for c in (2.0, 0.5, 4.0):
            scaled = rf.StructureTensor(c * t.a11, c * t.a12, c * t.a22)
            assert rf.tensor_orientation(scaled)[0] == base

    def test_matches_eigendecomposition_oracle(self):
        img, _ = sinusoid(30)
        grad = rf.gradient(img)
        for p in (rf.Point(30, 30), rf.Point(25, 38), rf.Point(40, 22)):
            t = rf.second_moment_matrix(grad, p, window_half=8, weight_sigma=4.0)
            theta, coh = rf.tensor_orientation(t)
            w, v = np.linalg.eigh(np.array([[t.a11, t.a12], [t.a12, t.a22]]))
            dominant = v[:, int(np.argmax(w))]
            want = math.atan2(dominant[1], dominant[0]) % math.pi
            assert float(rf.angular_distance(theta, want)) <= 1e-9
            assert coh == pytest.approx((w[1] - w[0]) / (w[1] + w[0]), abs=1e-12)
            # gradients run across the 30-degree ridges
            assert float(rf.angular_distance(theta, math.radians(120))) < 0.05


class TestGradientFlowField:
    def test_vertical_stripes_report_vertical_ridges(self):
        spec = rf.SyntheticSpec(width=64, height=64, pattern="parallel",
                                orientation=math.pi / 2, period=8.0)
        img, _ = rf.generate(spec)
        flow = rf.compute_flow_field_gradient(img)
        inner = rf.interior_site_mask(flow, 64, 64, 16)
        sel = flow.valid & inner
        assert sel.any()
        assert float(rf.angular_distance(flow.angles[sel], math.pi / 2).max()) < 1e-6

    def test_constant_image_all_invalid(self):
        flow = rf.compute_flow_field_gradient(rf.GrayImage(np.full((64, 64), 80, dtype=np.int64)))
        assert not flow.valid.any()

    def test_sinusoid_accuracy(self):
        img, truth = sinusoid(30)
        flow = rf.compute_flow_field_gradient(img)
        assert flow_mae(flow, truth, 64, 64) <= math.pi / 32

    def test_methods_agree_on_clean_patterns(self):
        for deg in (0, 30, 75, 120):
            img, truth = sinusoid(deg)
            proj = rf.compute_flow_field(img)
            grad = rf.compute_flow_field_gradient(img)
            sel = proj.valid & grad.valid & rf.interior_site_mask(proj, 64, 64, 16)
            d = rf.angular_distance(proj.angles[sel], grad.angles[sel])
            assert float(d.mean()) <= math.pi / 16

    def test_field_matches_scalar_ops(self):
        img, _ = sinusoid(30)
        flow = rf.compute_flow_field_gradient(img)
        grad = rf.gradient(img)
        t = rf.second_moment_matrix(grad, rf.Point(30, 30), window_half=8, weight_sigma=4.0)
        theta, coh = rf.tensor_orientation(t)
        iy, ix = 15, 15  # site at (30, 30) with stride 2
        assert flow.angles[iy, ix] == pytest.approx((theta + math.pi / 2) % math.pi, abs=1e-9)
        assert flow.coherence[iy, ix] == pytest.approx(coh, abs=1e-9)

    def test_coherence_column_round_trips(self, tmp_path):
        img, _ = sinusoid(30)
        flow = rf.compute_flow_field_gradient(img)
        p = tmp_path / "g.csv"
        rf.save_flow_csv(flow, p)
        assert p.read_text().splitlines()[0] == "x,y,theta_radians,valid,coherence"
        back = rf.load_flow_csv(p)
        assert back.coherence is not None
        assert np.array_equal(back.coherence, flow.coherence.round(6))
