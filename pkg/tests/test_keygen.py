"""Observation model, correlation estimates, rate formulas, key bits."""

import numpy as np
import pytest

from irskg.irs import random_phase_config
from irskg.keygen import (ObservationRecord, analytic_correlations,
                          autocorrelation_theoretical, conditional_mutual_information,
                          estimate_correlations, kgr_closed_form, kgr_sample_average,
                          normalize, observe_rounds, otp_xor, quantize_keys)
from irskg.propagation import Geometry, PathLossModel, sample_channel_set

WAVELENGTH = 0.299792458

# operating point used throughout: N = 50 elements, 20 dBm over -96 dBm noise
SIGMA_AB2 = 1e-10
SIGMA_U2 = 4.443105e-08
SIGMA_V2 = 7.521206e-06
NOISE_VAR_HAT = 2.51189e-12


def _channels(seed=1, n_elements=50, *, eve_positions=None, model=None):
    geo = Geometry() if eve_positions is None else Geometry(eve_positions=eve_positions)
    rng = np.random.default_rng(seed)
    return sample_channel_set(geo, model or PathLossModel(), n_elements, WAVELENGTH, rng)


def _record(channels, q, noise_var, seed, *, bits=3, delta_t=1e-3):
    rng = np.random.default_rng(seed)
    configs = [random_phase_config(channels.n_elements, bits, rng) for _ in range(q)]
    return observe_rounds(channels, configs, noise_var, rng, delta_t=delta_t)


def _iid_record(q, seed, n_eves=1):
    rng = np.random.default_rng(seed)
    draw = lambda *shape: rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return ObservationRecord(h_a=draw(q), h_b=draw(q), h_ae=draw(n_eves, q),
                             h_be=draw(n_eves, q), noise_var=1.0, delta_t=1e-3)


class TestObserveRounds:
    def test_shapes_and_reciprocity(self):
        cs = _channels(seed=2, n_elements=8,
                       eve_positions=np.array([[0.5, 0.5], [1.0, -1.0]]))
        rec = _record(cs, 40, 0.0, seed=3)
        assert rec.h_a.shape == (40,) and rec.h_be.shape == (2, 40)
        assert rec.n_rounds == 40 and rec.n_eves == 2
        np.testing.assert_array_equal(rec.h_a, rec.h_b)

    def test_noise_power(self):
        cs = _channels(seed=4, n_elements=4)
        rec = _record(cs, 20000, 0.5, seed=5)
        # h_a - h_b cancels the channel, leaving two independent noise draws
        emp = np.mean(np.abs(rec.h_a - rec.h_b) ** 2)
        assert emp == pytest.approx(1.0, rel=0.05)

    def test_config_length_mismatch(self):
        cs = _channels(seed=6, n_elements=8)
        rng = np.random.default_rng(7)
        bad = [random_phase_config(5, 3, rng)]
        with pytest.raises(ValueError):
            observe_rounds(cs, bad, 0.0, rng)
        with pytest.raises(ValueError):
            observe_rounds(cs, [], 0.0, rng)

    def test_round_to_round_autocorrelation(self):
        # across interval redraws, consecutive noiseless rounds correlate at
        # the static share of the combined power
        pred = autocorrelation_theoretical(SIGMA_AB2, SIGMA_U2, SIGMA_V2, 50)
        assert pred == pytest.approx(0.8568337565, abs=1e-9)
        rng = np.random.default_rng(8)
        geo, model = Geometry(), PathLossModel()
        pairs = np.empty((2000, 2), dtype=complex)
        for i in range(2000):
            cs = sample_channel_set(geo, model, 50, WAVELENGTH, rng)
            rec = observe_rounds(cs, [random_phase_config(50, 3, rng) for _ in range(2)],
                                 0.0, rng)
            pairs[i] = rec.h_a
        a = pairs[:, 0] - pairs[:, 0].mean()
        b = pairs[:, 1] - pairs[:, 1].mean()
        emp = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        se = (1.0 - pred ** 2) / np.sqrt(pairs.shape[0])
        assert abs(emp - pred) < 5.0 * se

    def test_autocorrelation_cascade_dominated(self):
        # suppressing the direct link (steeper exponent) leaves almost no
        # static share, so consecutive rounds decorrelate
        model = PathLossModel(zeta_ab=5.0)
        sigma_ab2 = 1e-13
        pred = autocorrelation_theoretical(sigma_ab2, SIGMA_U2, SIGMA_V2, 50)
        assert pred < 0.01
        rng = np.random.default_rng(9)
        geo = Geometry()
        pairs = np.empty((2000, 2), dtype=complex)
        for i in range(2000):
            cs = sample_channel_set(geo, model, 50, WAVELENGTH, rng)
            rec = observe_rounds(cs, [random_phase_config(50, 3, rng) for _ in range(2)],
                                 0.0, rng)
            pairs[i] = rec.h_a
        a = pairs[:, 0] - pairs[:, 0].mean()
        b = pairs[:, 1] - pairs[:, 1].mean()
        emp = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert emp < pred + 5.0 / np.sqrt(pairs.shape[0])


class TestNormalizeAndEstimate:
    def test_unit_norms(self):
        rec = normalize(_iid_record(64, seed=10))
        for s in (rec.h_a, rec.h_b, rec.h_ae[0], rec.h_be[0]):
            assert np.linalg.norm(s) == pytest.approx(1.0, abs=1e-12)

    def test_scale_invariance(self):
        raw = _iid_record(64, seed=11)
        scaled = ObservationRecord(h_a=7.3 * raw.h_a, h_b=7.3 * raw.h_b,
                                   h_ae=7.3 * raw.h_ae, h_be=7.3 * raw.h_be,
                                   noise_var=raw.noise_var, delta_t=raw.delta_t)
        a = estimate_correlations(normalize(raw))
        b = estimate_correlations(normalize(scaled))
        assert a.rho_l == pytest.approx(b.rho_l, rel=1e-12)
        np.testing.assert_allclose(a.rho_e, b.rho_e, rtol=1e-12)

    def test_mean_removal_strips_static_part(self):
        cs = _channels(seed=12, n_elements=16)
        rec = _record(cs, 2000, 0.0, seed=13)
        est = estimate_correlations(normalize(rec, mean_removal=True))
        assert est.rho_l == pytest.approx(1.0, abs=1e-9)

    def test_unnormalized_record_rejected(self):
        with pytest.raises(ValueError, match="not normalized"):
            estimate_correlations(_iid_record(64, seed=14))

    def test_identical_streams_give_unit_correlation(self):
        raw = _iid_record(64, seed=15)
        rec = normalize(ObservationRecord(h_a=raw.h_a, h_b=raw.h_a.copy(),
                                          h_ae=raw.h_ae, h_be=raw.h_be,
                                          noise_var=0.0, delta_t=1e-3))
        assert estimate_correlations(rec).rho_l == 1.0

    def test_independent_streams_decorrelate(self):
        # at Q = 400 an independent eavesdropper stream shows correlation
        # below 0.15 except with probability well under 1 percent
        for seed in range(50):
            est = estimate_correlations(normalize(_iid_record(400, seed=100 + seed)))
            assert float(est.rho_e[0]) < 0.15

    def test_degenerate_stream(self):
        rec = _iid_record(8, seed=16)
        zero = ObservationRecord(h_a=np.zeros(8, dtype=complex), h_b=rec.h_b,
                                 h_ae=rec.h_ae, h_be=rec.h_be,
                                 noise_var=1.0, delta_t=1e-3)
        with pytest.raises(ValueError, match="zero norm"):
            normalize(zero)


class TestKgrClosedForm:
    def test_reference_values(self):
        assert kgr_closed_form(0.99, 0.0, 1e-3) == pytest.approx(2825.5439, abs=1e-3)
        assert kgr_closed_form(0.9, 0.3, 1e-3) == pytest.approx(1133.6982, abs=1e-3)

    def test_zero_at_equality_boundary(self):
        assert kgr_closed_form(0.9, np.sqrt(0.9), 1e-3) == 0.0
        assert kgr_closed_form(0.25, 0.5, 1e-3) == 0.0

    def test_operating_point_rates(self):
        x = 50 * SIGMA_U2 * SIGMA_V2
        rho_l_mr = x / (x + NOISE_VAR_HAT)
        assert rho_l_mr == pytest.approx(0.86931, abs=5e-6)
        assert kgr_closed_form(rho_l_mr, 0.0, 1e-3) == pytest.approx(1016.65, abs=0.05)
        rho_l_full = (x + SIGMA_AB2) / (x + SIGMA_AB2 + NOISE_VAR_HAT)
        assert rho_l_full == pytest.approx(0.97893, abs=5e-6)
        assert kgr_closed_form(rho_l_full, 0.0, 1e-3) == pytest.approx(2292.0, abs=0.5)

    def test_matches_mutual_information_oracle(self):
        for rho_l in np.linspace(0.05, 0.99, 15):
            for rho_e in np.linspace(0.0, 0.95, 15):
                if rho_e ** 2 >= rho_l - 1e-6:
                    continue
                cmi = conditional_mutual_information(rho_l, rho_e)
                assert kgr_closed_form(rho_l, rho_e, 1e-3) * 2e-3 == pytest.approx(
                    cmi, abs=1e-9)

    def test_monotonicity(self):
        assert kgr_closed_form(0.95, 0.2, 1e-3) > kgr_closed_form(0.9, 0.2, 1e-3)
        assert kgr_closed_form(0.9, 0.1, 1e-3) > kgr_closed_form(0.9, 0.4, 1e-3)
        # halving the slot duration doubles the per-second rate
        assert kgr_closed_form(0.9, 0.2, 5e-4) == pytest.approx(
            2.0 * kgr_closed_form(0.9, 0.2, 1e-3), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            kgr_closed_form(1.0, 0.0, 1e-3)
        with pytest.raises(ValueError):
            kgr_closed_form(0.9, 1.0, 1e-3)
        with pytest.raises(ValueError):
            kgr_closed_form(0.2, 0.8, 1e-3)
        with pytest.raises(ValueError):
            kgr_closed_form(0.9, 0.0, 0.0)


class TestConditionalMutualInformation:
    def test_independent_pair(self):
        assert conditional_mutual_information(0.0, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_no_eavesdropper_reduces_to_pair_information(self):
        assert conditional_mutual_information(0.5, 0.0) == pytest.approx(
            -np.log2(1.0 - 0.25), rel=1e-12)

    def test_degenerate_covariance_rejected(self):
        with pytest.raises(ValueError):
            conditional_mutual_information(1.0, 0.0)


class TestAutocorrelationTheoretical:
    def test_limits(self):
        assert autocorrelation_theoretical(0.0, 1.0, 1.0, 10) == 0.0
        assert autocorrelation_theoretical(1.0, 0.0, 0.0, 10) == 1.0
        assert autocorrelation_theoretical(1.0, 1.0, 1.0, 10, same_round=True) == 1.0

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            autocorrelation_theoretical(1.0, 1.0, 1.0, 0)
        with pytest.raises(ValueError):
            autocorrelation_theoretical(-1.0, 1.0, 1.0, 4)
        with pytest.raises(ValueError):
            autocorrelation_theoretical(0.0, 0.0, 0.0, 4)


class TestAnalyticCorrelations:
    def test_matches_sample_estimates(self):
        cs = _channels(seed=17, n_elements=50,
                       eve_positions=np.array([[0.3, 0.2]]))
        noise = 5e-12
        ana = analytic_correlations(cs, noise)
        rec = _record(cs, 8000, noise, seed=18)
        est = estimate_correlations(normalize(rec))
        assert est.rho_l == pytest.approx(ana.rho_l, abs=0.01)
        assert float(est.rho_e[0]) == pytest.approx(float(ana.rho_e[0]), abs=0.05)

    def test_noiseless_is_perfect(self):
        cs = _channels(seed=19, n_elements=8)
        ana = analytic_correlations(cs, 0.0)
        assert ana.rho_l == 1.0

    def test_mean_removal_drops_static_power(self):
        cs = _channels(seed=20, n_elements=8)
        noise = 1e-12
        full = analytic_correlations(cs, noise)
        mr = analytic_correlations(cs, noise, mean_removal=True)
        assert mr.rho_l < full.rho_l


class TestKeysAndOtp:
    def test_sample_average_pipeline(self):
        cs = _channels(seed=21, n_elements=50,
                       eve_positions=np.array([[5.0, 5.0]]))
        rec = _record(cs, 400, 1e-12, seed=22)
        est = estimate_correlations(normalize(rec))
        expect = kgr_closed_form(est.rho_l, float(est.rho_e.max()), rec.delta_t)
        assert kgr_sample_average(rec) == pytest.approx(expect, rel=1e-12)

    def test_noiseless_keys_agree(self):
        cs = _channels(seed=23, n_elements=16)
        rec = _record(cs, 256, 0.0, seed=24)
        key = quantize_keys(normalize(rec))
        assert key.kdr == 0.0
        np.testing.assert_array_equal(key.bits_alice, key.bits_bob)
        assert set(np.unique(key.bits_alice)) <= {0, 1}

    def test_independent_streams_disagree_half_the_time(self):
        rec = normalize(_iid_record(1000, seed=25))
        key = quantize_keys(rec)
        assert key.kdr == pytest.approx(0.5, abs=0.05)

    def test_otp_involution(self):
        rng = np.random.default_rng(26)
        data = rng.integers(0, 2, size=128).astype(np.uint8)
        key = rng.integers(0, 2, size=128).astype(np.uint8)
        cipher = otp_xor(data, key)
        np.testing.assert_array_equal(otp_xor(cipher, key), data)
        assert not np.array_equal(cipher, data)

    def test_otp_key_too_short(self):
        with pytest.raises(ValueError):
            otp_xor(np.ones(16, dtype=np.uint8), np.ones(8, dtype=np.uint8))
