"""Core noise-loop physics: analytic observables, synthesis, estimation."""

import numpy as np
import pytest

from kljn import (
    BOLTZMANN,
    NORMALIZED,
    SI,
    BandConfig,
    PartyState,
    PhysicalConstants,
    TraceTooShort,
    WireObservables,
    analytic_observables,
    estimate_observables,
    synthesize_bit_period,
)

BAND = BandConfig(bandwidth_hz=1.0, sample_rate_hz=4.0, samples_per_bit=4096)


def alpha_beta_form(r_a, t_a, alpha, beta, df, k):
    """Independent oracle: the ratio-parameterized observable formulas."""
    denom = (1.0 + alpha) ** 2
    s_u = 4 * k * t_a * r_a * alpha * (alpha + beta) / denom
    s_i = 4 * k * t_a / r_a * (1 + alpha * beta) / denom
    p_ab = 4 * k * t_a * df * alpha * (beta - 1) / denom
    return s_u, s_i, p_ab


class TestAnalyticObservables:
    def test_equal_temperature_zero_power(self):
        a = PartyState(1000.0, 300.0)
        b = PartyState(1000.0, 300.0)
        assert analytic_observables(a, b, BAND).p_ab == 0.0

    def test_symmetric_equilibrium_values(self):
        # alpha = beta = 1 collapses to s_u = 2kTR, s_i = 2kT/R
        a = PartyState(1000.0, 300.0)
        obs = analytic_observables(a, a, BAND, NORMALIZED)
        assert obs.s_u == pytest.approx(2 * 300.0 * 1000.0, rel=1e-14)
        assert obs.s_i == pytest.approx(2 * 300.0 / 1000.0, rel=1e-14)

    def test_general_form_matches_ratio_form(self):
        rng = np.random.default_rng(1)
        band = BAND
        for _ in range(200):
            alpha, beta = np.exp(rng.uniform(np.log(0.1), np.log(10), 2))
            r_a, t_a = 1000.0, 300.0
            a = PartyState(r_a, t_a)
            b = PartyState(alpha * r_a, beta * t_a)
            obs = analytic_observables(a, b, band, NORMALIZED)
            s_u, s_i, p_ab = alpha_beta_form(r_a, t_a, alpha, beta,
                                             band.bandwidth_hz, 1.0)
            assert obs.s_u == pytest.approx(s_u, rel=1e-12)
            assert obs.s_i == pytest.approx(s_i, rel=1e-12)
            assert obs.p_ab == pytest.approx(p_ab, rel=1e-12, abs=1e-12)

    def test_party_swap_negates_power_only(self):
        a = PartyState(1000.0, 300.0)
        b = PartyState(2500.0, 700.0)
        ab = analytic_observables(a, b, BAND, NORMALIZED)
        ba = analytic_observables(b, a, BAND, NORMALIZED)
        assert ab.s_u == ba.s_u
        assert ab.s_i == ba.s_i
        assert ab.p_ab == -ba.p_ab

    def test_psd_ratio_is_resistance_product_at_equal_temperature(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            r_a, r_b = np.exp(rng.uniform(np.log(100), np.log(1e5), 2))
            a = PartyState(float(r_a), 300.0)
            b = PartyState(float(r_b), 300.0)
            obs = analytic_observables(a, b, BAND, NORMALIZED)
            assert obs.s_u / obs.s_i == pytest.approx(r_a * r_b, rel=1e-12)

    def test_si_units_use_boltzmann(self):
        a = PartyState(1000.0, 300.0)
        obs = analytic_observables(a, a, BAND, SI)
        assert obs.s_u == pytest.approx(2 * BOLTZMANN * 300.0 * 1000.0, rel=1e-14)


class TestTypes:
    def test_party_state_rejects_nonpositive_resistance(self):
        with pytest.raises(ValueError):
            PartyState(0.0, 300.0)
        with pytest.raises(ValueError):
            PartyState(-5.0, 300.0)

    def test_party_state_allows_zero_temperature_limit(self):
        assert PartyState(1000.0, 0.0).noise_psd(NORMALIZED) == 0.0

    def test_band_requires_nyquist_headroom(self):
        with pytest.raises(ValueError):
            BandConfig(bandwidth_hz=1.0, sample_rate_hz=1.5, samples_per_bit=16)

    def test_observables_reject_negative_psd(self):
        with pytest.raises(ValueError):
            WireObservables(-1.0, 0.1, 0.0)

    def test_constants_positive(self):
        with pytest.raises(ValueError):
            PhysicalConstants(k=0.0)


class TestSynthesis:
    def test_zero_temperature_gives_zero_trace(self):
        a = PartyState(1000.0, 0.0)
        b = PartyState(2000.0, 0.0)
        trace = synthesize_bit_period(a, b, BAND, seed=3, constants=NORMALIZED)
        assert np.all(trace.u_wire == 0.0)
        assert np.all(trace.i_wire == 0.0)

    def test_deterministic_given_seed(self):
        a = PartyState(1000.0, 300.0)
        b = PartyState(2000.0, 450.0)
        t1 = synthesize_bit_period(a, b, BAND, seed=17, constants=NORMALIZED)
        t2 = synthesize_bit_period(a, b, BAND, seed=17, constants=NORMALIZED)
        assert np.array_equal(t1.u_wire, t2.u_wire)
        assert np.array_equal(t1.i_wire, t2.i_wire)
        t3 = synthesize_bit_period(a, b, BAND, seed=18, constants=NORMALIZED)
        assert not np.array_equal(t1.u_wire, t3.u_wire)

    def test_wire_variance_matches_parseval(self):
        # alpha = beta = 1: var(u) should be s_u * bandwidth = 2kTR * df.
        # Band-limited noise at fs = 4 df has ~N/2 independent samples,
        # so the sample variance has relative sigma ~ sqrt(4/N).
        n = 1 << 18
        band = BandConfig(1.0, 4.0, n)
        a = PartyState(1000.0, 300.0)
        trace = synthesize_bit_period(a, a, band, seed=5, constants=NORMALIZED)
        target = 2 * 300.0 * 1000.0 * band.bandwidth_hz
        sigma = target * np.sqrt(4.0 / n)
        assert abs(np.var(trace.u_wire) - target) < 3 * sigma


class TestEstimation:
    def test_zero_trace_gives_zero_observables(self):
        a = PartyState(1000.0, 0.0)
        trace = synthesize_bit_period(a, a, BAND, seed=1, constants=NORMALIZED)
        obs = estimate_observables(trace, BAND, segments=8)
        assert (obs.s_u, obs.s_i, obs.p_ab) == (0.0, 0.0, 0.0)

    def test_too_short_trace_rejected(self):
        a = PartyState(1000.0, 300.0)
        trace = synthesize_bit_period(a, a, BAND, seed=1, constants=NORMALIZED)
        with pytest.raises(TraceTooShort):
            estimate_observables(trace, BAND, segments=4096)
        with pytest.raises(TraceTooShort):
            estimate_observables(trace, BAND, segments=0)

    def test_equal_temperature_power_within_noise_floor(self):
        n = 1 << 18
        band = BandConfig(1.0, 4.0, n)
        a = PartyState(1000.0, 300.0)
        b = PartyState(3000.0, 300.0)
        trace = synthesize_bit_period(a, b, band, seed=9, constants=NORMALIZED)
        segments = 512
        seg_len = n // segments
        blocks = (trace.u_wire[: segments * seg_len].reshape(segments, seg_len)
                  * trace.i_wire[: segments * seg_len].reshape(segments, seg_len))
        per_segment = -blocks.mean(axis=1)
        floor = 3 * per_segment.std(ddof=1) / np.sqrt(segments)
        obs = estimate_observables(trace, band, segments)
        assert abs(obs.p_ab) < floor

    def test_estimates_converge_to_analytic(self):
        n = 1 << 17
        band = BandConfig(1.0, 4.0, n)
        a = PartyState(1000.0, 300.0)
        b = PartyState(2000.0, 900.0)  # alpha=2, beta=3
        exact = analytic_observables(a, b, band, NORMALIZED)
        trace = synthesize_bit_period(a, b, band, seed=11, constants=NORMALIZED)
        est = estimate_observables(trace, band, segments=1024)
        assert est.s_u == pytest.approx(exact.s_u, rel=0.05)
        assert est.s_i == pytest.approx(exact.s_i, rel=0.05)
        assert est.p_ab == pytest.approx(exact.p_ab, rel=0.05)

    def test_psd_error_shrinks_with_segments(self):
        # at fixed segment length, averaged-periodogram error should
        # drop roughly as 1/sqrt(segments)
        seg_len = 256
        a = PartyState(1000.0, 300.0)
        coarse, fine = [], []
        for seed in range(6):
            for segments, bucket in ((8, coarse), (512, fine)):
                band = BandConfig(1.0, 4.0, seg_len * segments)
                exact = analytic_observables(a, a, band, NORMALIZED)
                trace = synthesize_bit_period(a, a, band, seed=seed,
                                              constants=NORMALIZED)
                est = estimate_observables(trace, band, segments)
                bucket.append(abs(est.s_u - exact.s_u) / exact.s_u)
        # expected improvement factor is 8; require at least 2.5 to keep
        # the test robust against one lucky coarse draw
        assert np.mean(coarse) > 2.5 * np.mean(fine)
