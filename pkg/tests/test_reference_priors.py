import math

import numpy as np
import pytest
from scipy import integrate, stats

from circpc.distributions import TWO_PI, Family
from circpc.divergence import BaseModel, profile_for
from circpc.pc_priors import PcPrior
from circpc.reference_priors import (
    Beta,
    CircularUniformLocation,
    GammaOneB,
    H2,
    H3,
    ScaledBetaHalf,
    UniformHalf,
    VonMisesConjugate,
    distance_scale_pdf,
    overfit_audit,
    ref_pdf,
)
from circpc.special import log_bessel_i0

VM_UNI = profile_for(Family.VON_MISES, BaseModel.UNIFORM)
VM_PM = profile_for(Family.VON_MISES, BaseModel.POINT_MASS)
CARD_UNI = profile_for(Family.CARDIOID, BaseModel.UNIFORM)
CARD_CURVE = profile_for(Family.CARDIOID, BaseModel.CARDIOID_CURVE)
WC_UNI = profile_for(Family.WRAPPED_CAUCHY, BaseModel.UNIFORM)


class TestDensities:
    def test_h2_at_zero(self):
        assert H2().pdf(0.0) == pytest.approx(2.0 / math.pi, rel=1e-15)

    def test_h3_zero_at_origin_then_positive(self):
        assert H3().pdf(0.0) == 0.0
        assert H3().pdf(0.5) > 0.0

    def test_heavy_tails_integrate_to_one(self):
        for prior in (H2(), H3(), GammaOneB(0.34)):
            val, _ = integrate.quad(prior.pdf, 0.0, np.inf)
            assert val == pytest.approx(1.0, abs=1e-9), prior

    def test_gamma_is_exponential(self):
        g = GammaOneB(2.0)
        xs = np.linspace(0.0, 5.0, 50)
        assert g.pdf(xs) == pytest.approx(stats.expon.pdf(xs, scale=0.5), rel=1e-12)

    def test_gamma_rejects_bad_rate(self):
        for bad in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError):
                GammaOneB(bad)

    def test_beta_matches_scipy(self):
        b = Beta(2.5, 1.5)
        xs = np.linspace(0.01, 0.99, 40)
        assert b.pdf(xs) == pytest.approx(stats.beta.pdf(xs, 2.5, 1.5), rel=1e-12)

    def test_beta_endpoint_at_a_equal_one(self):
        # density at 0 finishes the shape limit: b*(1-x)^(b-1) -> b
        assert Beta(1.0, 3.0).pdf(0.0) == pytest.approx(3.0, rel=1e-12)

    def test_scaled_beta_half_is_change_of_variables(self):
        sb = ScaledBetaHalf(2.0, 5.0)
        xs = np.linspace(0.01, 0.49, 30)
        assert sb.pdf(xs) == pytest.approx(2.0 * stats.beta.pdf(2.0 * xs, 2.0, 5.0), rel=1e-12)
        val, _ = integrate.quad(sb.pdf, 0.0, 0.5)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_uniform_half(self):
        assert UniformHalf().pdf(0.3) == 2.0

    def test_circular_uniform_location(self):
        assert CircularUniformLocation().pdf(1.0) == pytest.approx(1.0 / TWO_PI)

    def test_von_mises_conjugate_hand_value(self):
        vc = VonMisesConjugate(2.0, 0.7, 0.0)
        want = math.exp(0.7 * math.cos(0.0) - 2.0 * log_bessel_i0(1.0))
        assert ref_pdf(vc, (0.0, 1.0)) == pytest.approx(want, rel=1e-14)

    def test_von_mises_conjugate_validation(self):
        with pytest.raises(ValueError):
            VonMisesConjugate(0.0, 0.5, 0.0)
        vc = VonMisesConjugate(1.0, 0.5, 0.0)
        with pytest.raises(ValueError):
            vc.pdf(0.0, -1.0)

    def test_ref_pdf_out_of_support_raises(self):
        with pytest.raises(ValueError):
            ref_pdf(GammaOneB(1.0), -0.5)
        with pytest.raises(ValueError):
            ref_pdf(Beta(2.0, 2.0), 1.0)
        with pytest.raises(ValueError):
            ref_pdf(UniformHalf(), 0.5)
        with pytest.raises(ValueError):
            ref_pdf(H2(), math.inf)


class TestDistanceScale:
    def test_beta_on_wc_matches_closed_form(self):
        # rho(d) = sqrt(1 - e^(-d^2)) gives Jacobian d*e^(-d^2)/rho
        prior = Beta(2.0, 3.0)
        ds = np.linspace(0.05, 1.5, 100)
        got = distance_scale_pdf(prior, WC_UNI, ds)
        rho = np.sqrt(-np.expm1(-ds * ds))
        want = prior.pdf(rho) * ds * np.exp(-ds * ds) / rho
        assert np.max(np.abs(got - want)) < 1e-9

    def test_mass_is_conserved(self):
        prior = Beta(2.0, 3.0)
        val, _ = integrate.quad(
            lambda d: distance_scale_pdf(prior, WC_UNI, d), 0.0, 6.0, limit=200
        )
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_pc_prior_is_exponential_on_distance_scale(self):
        lam = 1.3
        prior = PcPrior(Family.VON_MISES, BaseModel.POINT_MASS, lam)
        z = 1.0 - math.exp(-lam * VM_PM.d_max)
        ds = np.linspace(0.05, 0.95, 60)
        got = distance_scale_pdf(prior, VM_PM, ds)
        want = lam * np.exp(-lam * ds) / z
        assert got == pytest.approx(want, rel=1e-4)

    def test_rejects_out_of_range_distance(self):
        with pytest.raises(ValueError):
            distance_scale_pdf(Beta(2.0, 2.0), WC_UNI, -0.1)
        with pytest.raises(ValueError):
            distance_scale_pdf(GammaOneB(1.0), VM_PM, 1.5)

    def test_accepts_plain_callable(self):
        half_normal = lambda x: np.sqrt(2.0 / math.pi) * np.exp(-0.5 * x * x)
        v = distance_scale_pdf(half_normal, VM_UNI, 0.5)
        assert v > 0.0


class TestOverfitAudit:
    def test_h2_keeps_mass_at_base_model(self):
        report = overfit_audit(H2(), VM_UNI)
        assert report.density_at_zero == pytest.approx(4.0 / math.pi, rel=1e-7)
        assert report.monotone_decreasing
        assert report.classification == "base_model_favoring"

    def test_h3_vanishes_at_base_model(self):
        report = overfit_audit(H3(), VM_UNI)
        assert report.density_at_zero == pytest.approx(0.0, abs=1e-8)
        assert not report.monotone_decreasing
        assert report.classification == "complexity_favoring"
        assert report.argmax_d == pytest.approx(0.44533333333333336, abs=1e-12)

    def test_gamma_density_at_zero_is_rate_times_jacobian(self):
        report = overfit_audit(GammaOneB(0.68), VM_UNI)
        assert report.density_at_zero == pytest.approx(1.36, rel=1e-6)
        assert report.monotone_decreasing
        assert report.classification == "base_model_favoring"

    def test_pc_priors_always_base_model_favoring(self):
        cases = [
            (PcPrior(Family.VON_MISES, BaseModel.POINT_MASS, 1.3), VM_PM),
            (PcPrior(Family.CARDIOID, BaseModel.UNIFORM, 1.3), CARD_UNI),
            (PcPrior(Family.CARDIOID, BaseModel.CARDIOID_CURVE, 1.3), CARD_CURVE),
            (PcPrior(Family.WRAPPED_CAUCHY, BaseModel.UNIFORM, 2.0), WC_UNI),
        ]
        for prior, prof in cases:
            report = overfit_audit(prior, prof)
            lam = prior.lam
            z = -math.expm1(-lam * prof.d_max) if math.isfinite(prof.d_max) else 1.0
            assert report.density_at_zero == pytest.approx(lam / z, rel=5e-3), prior
            assert report.monotone_decreasing, prior
            assert report.classification == "base_model_favoring", prior

    def test_beta_shapes_flip_the_verdict(self):
        bump = overfit_audit(Beta(5.0, 2.0), WC_UNI)
        assert bump.classification == "complexity_favoring"
        assert bump.argmax_d == pytest.approx(0.8336246246246246, abs=1e-12)
        horseshoe = overfit_audit(Beta(0.5, 0.5), WC_UNI)
        assert horseshoe.density_at_zero == math.inf
        assert horseshoe.classification == "base_model_favoring"

    def test_audit_deterministic(self):
        a = overfit_audit(H2(), VM_UNI)
        b = overfit_audit(H2(), VM_UNI)
        assert a == b

    def test_report_dict_round_trip(self):
        report = overfit_audit(GammaOneB(1.0), VM_UNI)
        d = report.to_dict()
        assert set(d) == {
            "density_at_zero",
            "monotone_decreasing",
            "argmax_d",
            "classification",
        }
