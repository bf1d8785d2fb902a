import numpy as np
import pytest

from centroflow import (
    BP_CONSTANT,
    BodySpec,
    LinearMap2,
    apply_linear_map,
    bp_deficit,
    deficit_report,
    disk,
    ellipse,
    fuzz_campaign,
    groemer_gap,
    make_support_fn,
    petty_projection_product,
    random_body,
    ratio_derivative_rhs,
    santalo_product,
    scaled,
    stability_experiment,
)
from centroflow.lab import MIN_CURVATURE, affine_support_bracket
from centroflow.spectral import angles, deriv

import oracles


class TestGenerator:
    def test_deterministic(self):
        spec = BodySpec(seed=123456789)
        a = random_body(spec)
        b = random_body(spec)
        assert np.array_equal(a.samples, b.samples)

    def test_zero_amplitude_is_disk(self):
        b = random_body(BodySpec(seed=5, amplitude=0.0))
        assert np.max(np.abs(b.samples - 1.0)) < 1e-15

    def test_curvature_floor_and_symmetry(self):
        for seed in range(25):
            b = random_body(BodySpec(seed=seed, amplitude=2.0, decay=1.2))
            s = b.samples + deriv(b.samples, 2)
            assert np.min(s) >= MIN_CURVATURE - 1e-9
            assert b.symmetric

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            BodySpec(seed=1, decay=0.9)
        with pytest.raises(ValueError):
            BodySpec(seed=1, mode_count=0)
        with pytest.raises(ValueError):
            BodySpec(seed=1, mode_count=40, n=256)


class TestDeficits:
    def test_bp_disk_zero(self):
        assert abs(bp_deficit(disk(1.0, 128))) < 1e-9

    def test_bp_ellipse_zero(self):
        for a, b, rot in [(1.6, 0.8, 0.5), (2.0, 1.0, 0.0), (1.2, 1.1, 1.3)]:
            assert abs(bp_deficit(ellipse(a, b, rot, 256))) < 1e-6

    def test_bp_wobble_positive_and_matches_oracle(self, wobble):
        eps = bp_deficit(wobble)
        assert eps > 0
        # independent polygon-moment computation of the centroid body ratio
        probe = angles(64)
        gamma_oracle = oracles.centroid_support_polygon(wobble, probe)
        from centroflow import area, centroid_body
        got = centroid_body(wobble)
        sub = got.samples[:: wobble.n // 64]
        assert np.max(np.abs(sub - gamma_oracle) / gamma_oracle) < 1e-5

    def test_santalo(self, wobble):
        assert santalo_product(disk(2.0, 128)) == pytest.approx(
            np.pi ** 2, rel=1e-10)
        assert santalo_product(ellipse(1.5, 0.7, 0.2, 256)) == pytest.approx(
            np.pi ** 2, rel=1e-9)
        assert santalo_product(wobble) < np.pi ** 2

    def test_petty(self, wobble):
        assert petty_projection_product(disk(1.0, 128)) == pytest.approx(
            (np.pi / 2) ** 2, rel=1e-12)
        assert petty_projection_product(ellipse(1.5, 0.9, 0.1, 256)) == \
            pytest.approx((np.pi / 2) ** 2, rel=1e-9)
        assert petty_projection_product(wobble) < (np.pi / 2) ** 2

    def test_groemer_trivial_cases(self, wobble):
        assert groemer_gap(wobble, wobble) == pytest.approx(0.0, abs=1e-12)
        assert groemer_gap(wobble, scaled(wobble, 2.3)) == pytest.approx(
            0.0, abs=1e-10)

    def test_groemer_disk_vs_wobble_regression(self, wobble):
        gap = groemer_gap(disk(1.0, 256), wobble)
        assert gap >= -1e-9
        # frozen regression anchor of the mixed-volume slack
        assert gap == pytest.approx(0.060298293321797716, rel=1e-9)

    def test_ratio_rhs_signs(self, wobble):
        assert ratio_derivative_rhs(disk(1.0, 128)) == pytest.approx(0.0, abs=1e-12)
        assert abs(ratio_derivative_rhs(ellipse(1.4, 0.9, 0.3, 256))) < 1e-6
        val = ratio_derivative_rhs(wobble)
        assert val < 0

    def test_affine_bracket_straddles_one(self, mild_bodies):
        for b in mild_bodies:
            lo, hi = affine_support_bracket(b)
            assert lo <= 1.0 + 1e-8
            assert hi >= 1.0 - 2e-8


class TestGlInvariance:
    def test_deficits_invariant(self, wobble):
        rng = np.random.default_rng(3)
        base = {
            "bp": bp_deficit(wobble),
            "santalo": santalo_product(wobble),
            "petty": petty_projection_product(wobble),
            "rhs": ratio_derivative_rhs(wobble),
        }
        for _ in range(3):
            s = rng.uniform(1.1, 2.0)
            phi = LinearMap2.diagonal(s, 1 / s) @ LinearMap2.rotation(
                rng.uniform(0, np.pi))
            img = apply_linear_map(wobble, phi)
            assert bp_deficit(img) == pytest.approx(base["bp"], rel=1e-5, abs=1e-9)
            assert santalo_product(img) == pytest.approx(base["santalo"], rel=1e-5)
            assert petty_projection_product(img) == pytest.approx(
                base["petty"], rel=1e-5)
            assert ratio_derivative_rhs(img) == pytest.approx(
                base["rhs"], rel=1e-5, abs=1e-10)


class TestReports:
    def test_deficit_report_fields(self, wobble):
        rep = deficit_report(wobble, body_id="w", with_bm=True)
        assert rep.bp_deficit >= -1e-9
        assert rep.santalo_gap >= -1e-9
        assert rep.petty_gap >= -1e-9
        assert rep.groemer_gap >= -1e-9
        assert rep.lambda_gap >= -1e-9
        assert rep.lutwak_residual_rel <= 1e-5
        assert rep.d_bm <= rep.pinching_bound + 1e-3
        assert set(rep.as_dict()) == {
            "body_id", "bp_deficit", "santalo_gap", "petty_gap",
            "groemer_gap", "lambda_gap", "lutwak_residual_rel",
            "d_bm", "pinching_bound"}


class TestFuzz:
    def test_small_campaign_clean(self):
        rep = fuzz_campaign(40, seed=2024)
        assert rep.worst() >= -1e-9
        assert rep.checks["lutwak_residual_rel"]["max"] <= 1e-5
        assert rep.count == 40

    def test_campaign_deterministic(self):
        a = fuzz_campaign(10, seed=9)
        b = fuzz_campaign(10, seed=9)
        assert a.as_dict() == b.as_dict()


class TestStability:
    def test_mini_run(self):
        res = stability_experiment(12, seed=77)
        eps = np.array([s.eps for s in res.samples])
        d1 = np.array([s.d_bm_minus_1 for s in res.samples])
        assert np.all(d1 <= res.gamma * eps ** 0.25 + 1e-12)
        assert np.isfinite(res.gamma)
        assert abs(res.control_eps) < 1e-6
        assert abs(res.control_d_minus_1) < 1e-6
        assert eps.max() > 1e-2

    def test_rejects_tiny_count(self):
        with pytest.raises(ValueError):
            stability_experiment(5, seed=1)

    def test_zero_deficit_implies_near_disk(self):
        # equality-case consistency: vanishing deficit forces d_bm near 1
        from centroflow import banach_mazur_to_disk
        for body in (ellipse(1.8, 0.9, 0.7, 256), ellipse(1.1, 1.0, 0.0, 256)):
            assert abs(bp_deficit(body)) <= 1e-6
            assert banach_mazur_to_disk(body).distance <= 1.0 + 1e-2
