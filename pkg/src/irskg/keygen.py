"""Key generation core: observation model, correlation estimates, and rates.

One training round spans two slots of duration delta_t: Alice and Bob each
send a pilot while the surface holds a random configuration, so both end up
with an estimate of the same combined channel g plus independent noise of
variance noise_var (transmit power and pilot shape are absorbed into
noise_var = sigma^2 / P).  Eavesdropper k records its own uplink and
downlink estimates in the same two slots.  The per-round secret key rate
follows from the correlation rho_l between the legitimate estimates and the
correlation rho_e between Bob's estimate and the eavesdropper's downlink
estimate:

    R = (1 / (2*delta_t)) * log2( (1 - rho_e^2)^2
                                  / (1 + 2*rho_l*rho_e^2 - 2*rho_e^2 - rho_l^2) )

valid for rho_e^2 < rho_l < 1 and zero exactly at rho_e^2 = rho_l.  A
determinant-based conditional mutual information serves as an independent
oracle for that closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .irs import PhaseConfig
from .propagation import ChannelSet, _complex_gaussian


@dataclass
class ObservationRecord:
    """Channel estimates collected over Q training rounds.

    h_a and h_b are the legitimate estimates (shape (Q,)).  h_ae[k] and
    h_be[k] are eavesdropper k's estimates of the Alice-side and Bob-side
    transmissions (shape (K, Q)).  noise_var is the per-estimate noise power
    sigma^2 / P and delta_t the slot duration in seconds.
    """

    h_a: np.ndarray
    h_b: np.ndarray
    h_ae: np.ndarray
    h_be: np.ndarray
    noise_var: float
    delta_t: float

    @property
    def n_rounds(self) -> int:
        return self.h_a.shape[0]

    @property
    def n_eves(self) -> int:
        return self.h_be.shape[0]


@dataclass
class CorrelationEstimates:
    """Normalized-sample correlation magnitudes: legitimate and per-Eve."""

    rho_l: float
    rho_e: np.ndarray


@dataclass
class KeyMaterial:
    """Sign-quantized key bits for both parties and their disagreement rate."""

    bits_alice: np.ndarray
    bits_bob: np.ndarray
    kdr: float


def observe_rounds(channels: ChannelSet, configs: list[PhaseConfig],
                   noise_var: float, rng: np.random.Generator,
                   delta_t: float = 1e-3) -> ObservationRecord:
    """Simulate Q training rounds under the given surface configurations.

    For round q with configuration theta_q:

        h_a[q] = g_q + z,   h_b[q] = g_q + z'      (reciprocal, independent noise)
        h_be[k, q] = h_be_k + sum_n e_kn * v_n * exp(j theta_qn) + z''
        h_ae[k, q] = h_ae_k + sum_n e_kn * u_n * exp(j theta_qn) + z'''

    with g_q = h_ab + sum_n u_n * v_n * exp(j theta_qn) and all noise draws
    independent CN(0, noise_var).  With noise_var = 0 the legitimate streams
    are exactly equal.
    """
    q = len(configs)
    if q < 1:
        raise ValueError("need at least one round")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    n = channels.n_elements
    theta = np.empty((q, n))
    for i, cfg in enumerate(configs):
        if len(cfg) != n:
            raise ValueError(f"config {i} has length {len(cfg)}, expected {n}")
        theta[i] = cfg.theta
    phases = np.exp(1j * theta)

    g = channels.h_ab + phases @ channels.cascade()
    h_a = g + _complex_gaussian(rng, noise_var, q)
    h_b = g + _complex_gaussian(rng, noise_var, q)

    k = channels.n_eves
    h_ae = np.zeros((k, q), dtype=complex)
    h_be = np.zeros((k, q), dtype=complex)
    for i in range(k):
        h_ae[i] = channels.h_ae[i] + phases @ (channels.e[i] * channels.u) \
            + _complex_gaussian(rng, noise_var, q)
        h_be[i] = channels.h_be[i] + phases @ (channels.e[i] * channels.v) \
            + _complex_gaussian(rng, noise_var, q)

    return ObservationRecord(h_a=h_a, h_b=h_b, h_ae=h_ae, h_be=h_be,
                             noise_var=noise_var, delta_t=delta_t)


def _normalize_stream(x: np.ndarray, mean_removal: bool) -> np.ndarray:
    if mean_removal:
        x = x - x.mean()
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ValueError("degenerate stream: zero norm after normalization")
    return x / norm


def normalize(record: ObservationRecord, mean_removal: bool = False) -> ObservationRecord:
    """Scale each stream to unit Euclidean norm over its Q samples.

    With mean_removal the per-stream sample mean is subtracted first, which
    strips the static part of the combined channel (and makes Q = 1
    degenerate).  The output is a new record; correlations of the result are
    invariant to any positive rescaling of the input.
    """
    h_ae = np.array([_normalize_stream(s, mean_removal) for s in record.h_ae]) \
        if record.n_eves else record.h_ae.copy()
    h_be = np.array([_normalize_stream(s, mean_removal) for s in record.h_be]) \
        if record.n_eves else record.h_be.copy()
    return ObservationRecord(h_a=_normalize_stream(record.h_a, mean_removal),
                             h_b=_normalize_stream(record.h_b, mean_removal),
                             h_ae=h_ae, h_be=h_be,
                             noise_var=record.noise_var, delta_t=record.delta_t)


def estimate_correlations(record: ObservationRecord) -> CorrelationEstimates:
    """Correlation magnitudes from a normalized record.

    rho_l = |sum_q h_a[q] * conj(h_b[q])| and rho_e[k] likewise between h_b
    and h_be[k].  The record must already be unit-norm per stream (run
    normalize first); magnitudes discard the unobservable common phase.
    """
    for name, s in (("h_a", record.h_a), ("h_b", record.h_b)):
        if abs(np.linalg.norm(s) - 1.0) > 1e-6:
            raise ValueError(f"stream {name} is not normalized; call normalize() first")
    rho_l = min(1.0, float(np.abs(np.vdot(record.h_a, record.h_b))))
    rho_e = np.array([min(1.0, float(np.abs(np.vdot(record.h_b, s))))
                      for s in record.h_be])
    return CorrelationEstimates(rho_l=rho_l, rho_e=rho_e)


def kgr_closed_form(rho_l: float, rho_e_max: float, delta_t: float) -> float:
    """Closed-form key generation rate in bits per second.

    Requires 0 <= rho_e_max^2 <= rho_l < 1; at rho_e_max^2 == rho_l the rate
    is exactly zero (the eavesdropper knows as much as the legitimate side).
    For multiple eavesdroppers pass max_k rho_e[k]; the rate is monotone
    decreasing in rho_e, so this realizes the min over eavesdroppers.
    """
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    if not 0.0 <= rho_e_max < 1.0:
        raise ValueError(f"rho_e_max must be in [0, 1), got {rho_e_max}")
    if rho_l >= 1.0:
        raise ValueError(f"rho_l must be < 1 (finite noise), got {rho_l}")
    re2 = rho_e_max * rho_e_max
    if rho_l < re2 - 1e-9:
        raise ValueError(f"no extractable secrecy: rho_l={rho_l} < rho_e^2={re2}")
    if abs(rho_l - re2) <= 1e-9:
        # Collapse the equality boundary (and its float neighborhood, where
        # the exact rate would be below 1e-15 bits/s) to exactly zero.
        return 0.0
    num = (1.0 - re2) ** 2
    den = 1.0 + 2.0 * rho_l * re2 - 2.0 * re2 - rho_l * rho_l
    return float(np.log2(num / den) / (2.0 * delta_t))


def conditional_mutual_information(rho_l: float, rho_e: float) -> float:
    """Determinant-based I(h_a; h_b | eavesdropper estimates), bits per sample.

    Builds the unit-diagonal covariance matrices of (h_a, h_ae, h_be),
    (h_b, h_ae, h_be), (h_ae, h_be), and (h_a, h_b, h_ae, h_be), with rho_l
    between the legitimate pair and rho_e between each legitimate estimate
    and h_be, then evaluates

        log2( det(W_a_ae_be) * det(W_b_ae_be) / (det(W_ae_be) * det(W_ab_ae_be)) )

    by generic determinants.  Serves as the oracle for kgr_closed_form,
    which must equal this divided by 2*delta_t.
    """
    rl, re = float(rho_l), float(rho_e)
    w_a_ae_be = np.array([[1.0, 0.0, re],
                          [0.0, 1.0, 0.0],
                          [re, 0.0, 1.0]])
    w_b_ae_be = w_a_ae_be
    w_ae_be = np.eye(2)
    w_ab_ae_be = np.array([[1.0, rl, 0.0, re],
                           [rl, 1.0, 0.0, re],
                           [0.0, 0.0, 1.0, 0.0],
                           [re, re, 0.0, 1.0]])
    dets = [np.linalg.det(m) for m in (w_a_ae_be, w_b_ae_be, w_ae_be, w_ab_ae_be)]
    if any(d <= 0 for d in dets):
        raise ValueError(f"covariance matrices not positive definite: dets={dets}")
    return float(np.log2(dets[0] * dets[1] / (dets[2] * dets[3])))


def autocorrelation_theoretical(sigma_direct2: float, sigma_u2: float,
                                sigma_v2: float, n_elements: int,
                                same_round: bool = False) -> float:
    """Round-to-round correlation of the combined channel within an interval.

    With phases uniform over the grid, E{exp(j theta)} = 0, so distinct
    rounds decorrelate down to the static share:

        rho = sigma_direct^2 / (sigma_direct^2 + N * sigma_u^2 * sigma_v^2)

    and rho = 1 for the same round.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if sigma_direct2 < 0 or sigma_u2 < 0 or sigma_v2 < 0:
        raise ValueError("powers must be nonnegative")
    if same_round:
        return 1.0
    den = sigma_direct2 + n_elements * sigma_u2 * sigma_v2
    if den == 0.0:
        raise ValueError("all channel powers are zero")
    return float(sigma_direct2 / den)


def analytic_correlations(channels: ChannelSet, noise_var: float,
                          mean_removal: bool = False) -> CorrelationEstimates:
    """Exact per-realization correlations, no observation loop.

    Averages over the uniform random configurations analytically for the
    fixed coefficients in channels.  With mean_removal the static terms
    (h_ab, h_be) drop out and only the cascade carries key material.
    """
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    a = channels.cascade()
    x = float(np.sum(np.abs(a) ** 2))
    if not mean_removal:
        x += abs(channels.h_ab) ** 2
    rho_l = x / (x + noise_var) if x + noise_var > 0 else 0.0

    rho_e = np.zeros(channels.n_eves)
    for k in range(channels.n_eves):
        b = channels.e[k] * channels.v
        y = float(np.sum(np.abs(b) ** 2))
        cross = complex(np.sum(a * np.conj(b)))
        if not mean_removal:
            y += abs(channels.h_be[k]) ** 2
            cross += channels.h_ab * np.conj(channels.h_be[k])
        den = np.sqrt((x + noise_var) * (y + noise_var))
        rho_e[k] = min(1.0, abs(cross) / den) if den > 0 else 0.0
    return CorrelationEstimates(rho_l=min(1.0, rho_l), rho_e=rho_e)


def kgr_sample_average(record: ObservationRecord,
                       mean_removal: bool = False) -> float:
    """Key rate from an observation record: normalize, estimate, closed form.

    Returns the min over eavesdroppers of the closed-form rate, taken at the
    largest per-Eve correlation.  With no eavesdroppers rho_e = 0.
    """
    est = estimate_correlations(normalize(record, mean_removal))
    rho_e_max = float(est.rho_e.max()) if est.rho_e.size else 0.0
    return kgr_closed_form(est.rho_l, rho_e_max, record.delta_t)


def quantize_keys(record: ObservationRecord) -> KeyMaterial:
    """One key bit per round: sign of the real part, after mean removal.

    Operates on a normalized record.  Both parties see symmetric fluctuation
    around the stream mean, so each bit is equally likely; the key
    disagreement rate is the Hamming distance over the length.
    """
    bits_a = (np.real(record.h_a - record.h_a.mean()) >= 0).astype(np.uint8)
    bits_b = (np.real(record.h_b - record.h_b.mean()) >= 0).astype(np.uint8)
    kdr = float(np.mean(bits_a != bits_b))
    return KeyMaterial(bits_alice=bits_a, bits_bob=bits_b, kdr=kdr)


def otp_xor(data: np.ndarray, key: np.ndarray) -> np.ndarray:
    """Bitwise XOR of a data bit string with a key at least as long."""
    data = np.asarray(data, dtype=np.uint8)
    key = np.asarray(key, dtype=np.uint8)
    if key.shape[0] < data.shape[0]:
        raise ValueError(f"key length {key.shape[0]} < data length {data.shape[0]}")
    return np.bitwise_xor(data, key[:data.shape[0]])
