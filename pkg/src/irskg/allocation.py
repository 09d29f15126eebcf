"""Time-slot allocation between key generation and encrypted transmission.

A coherence interval holds L slots.  Q training rounds consume 2Q slots and
produce key bits at rate r_skg; the remaining L - 2Q slots carry data at the
surface-aligned (MRT) rate r_mrt, one-time-pad encrypted, so throughput is
capped by whichever of key bits and data bits runs out first:

    r_edt(Q) = min(Q * r_skg, (L - 2Q) * r_mrt) / L

The best integer Q balances the two terms; a bisection on the monotone gap
delta(Q) = Q * r_skg - (L - 2Q) * r_mrt finds it in O(log L).  The on-line
variant grows Q round by round, re-estimating r_skg from the accumulated
observations, until the collected rounds reach the currently predicted
optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .irs import combined_channel, mrt_phase_config, random_phase_config
from .keygen import (ObservationRecord, analytic_correlations, kgr_closed_form,
                     kgr_sample_average, observe_rounds)
from .propagation import ChannelSet


@dataclass
class AllocationResult:
    """Outcome of the slot-allocation search for one coherence interval."""

    q_star: int
    r_skg: float
    r_mrt: float
    r_edt: float
    c_edt: float
    alpha: float
    ell: int
    q_th: int


def mrt_rate(gamma_b: float, channels: ChannelSet, bits: int | None = None,
             delta_t: float = 1e-3) -> float:
    """Data rate (1/delta_t) * log2(1 + gamma_b * |g_star|^2) in bits/s.

    g_star is the combined channel under the phase-aligning configuration,
    quantized to the B-bit grid when bits is finite.
    """
    if gamma_b < 0:
        raise ValueError("gamma_b must be nonnegative")
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    cfg = mrt_phase_config(channels, bits)
    g_star = combined_channel(channels.h_ab, channels.cascade(), cfg)
    return float(np.log2(1.0 + gamma_b * abs(g_star) ** 2) / delta_t)


def q_max_slots(ell: int) -> int:
    """Largest admissible round count, ceil(L/2) - 1."""
    return math.ceil(ell / 2) - 1


def edt_rate(r_skg: float, r_mrt: float, q: int, ell: int) -> float:
    """Encrypted-data throughput for Q rounds out of L slots, bits/s.

    Key-limited branch when Q * r_skg <= (L - 2Q) * r_mrt, data-limited
    otherwise; equal to min(Q * r_skg, (L - 2Q) * r_mrt) / L.
    """
    if r_skg < 0 or r_mrt < 0:
        raise ValueError("rates must be nonnegative")
    if not 1 <= q <= q_max_slots(ell):
        raise ValueError(f"q={q} outside [1, {q_max_slots(ell)}] for ell={ell}")
    key_bits = q * r_skg
    data_bits = (ell - 2 * q) * r_mrt
    if key_bits <= data_bits:
        return r_skg * q / ell
    return r_mrt * (ell - 2 * q) / ell


def optimal_q_bisection(r_skg: float, r_mrt: float, ell: int, q_th: int) -> int:
    """Integer Q in [q_th, ceil(L/2)-1] minimizing |Q*r_skg - (L-2Q)*r_mrt|.

    delta(Q) is strictly increasing, so bisection brackets the zero
    crossing; the two final endpoints are compared and ties go to the
    smaller Q.  Matches the exhaustive argmin.
    """
    if r_skg < 0 or r_mrt < 0:
        raise ValueError("rates must be nonnegative")
    if r_skg == 0 and r_mrt == 0:
        raise ValueError("at least one of r_skg, r_mrt must be positive")
    hi = q_max_slots(ell)
    if not 1 <= q_th <= hi:
        raise ValueError(f"empty search range: q_th={q_th}, max={hi}")

    def delta(q: int) -> float:
        return q * r_skg - (ell - 2 * q) * r_mrt

    lo = q_th
    if lo == hi:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if delta(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(delta(lo)) <= abs(delta(hi)) else hi


def run_algorithm_1(channels: ChannelSet, gamma_b: float, noise_var: float,
                    ell: int, q_th: int, bits: int,
                    rng: np.random.Generator | None = None,
                    delta_t: float = 1e-3, mode: str = "faithful",
                    mean_removal: bool = False) -> AllocationResult:
    """On-line slot allocation for one coherence interval.

    Faithful mode executes the training loop: collect q_th observation
    rounds, then per iteration estimate r_skg from all rounds so far via
    kgr_sample_average, bisect for the predicted optimum, and append one
    more round until the collected count reaches the prediction.  Fast mode
    skips the loop and evaluates r_skg from the realization's exact
    correlations (analytic_correlations), for large sweeps.
    """
    if mode not in ("faithful", "fast"):
        raise ValueError(f"unknown mode {mode!r}")
    if q_th < 1:
        raise ValueError("q_th must be >= 1")
    if ell < 2 * q_th + 1:
        raise ValueError(f"ell={ell} too small for q_th={q_th}")
    r_mrt = mrt_rate(gamma_b, channels, bits, delta_t)

    if mode == "fast":
        est = analytic_correlations(channels, noise_var, mean_removal)
        rho_e_max = float(est.rho_e.max()) if est.rho_e.size else 0.0
        r_skg = kgr_closed_form(est.rho_l, rho_e_max, delta_t)
        q_star = optimal_q_bisection(r_skg, r_mrt, ell, q_th)
    else:
        if rng is None:
            raise ValueError("faithful mode needs a generator")
        n, b = channels.n_elements, bits
        configs = [random_phase_config(n, b, rng) for _ in range(q_th)]
        record = observe_rounds(channels, configs, noise_var, rng, delta_t)
        q_t = q_th
        q_star = None
        for _ in range(math.ceil(ell / 2)):
            r_skg = kgr_sample_average(record, mean_removal)
            q_star_t = optimal_q_bisection(r_skg, r_mrt, ell, q_th)
            if q_t + 1 >= q_star_t:
                q_star = q_star_t
                break
            extra = observe_rounds(channels, [random_phase_config(n, b, rng)],
                                   noise_var, rng, delta_t)
            record = ObservationRecord(
                h_a=np.concatenate([record.h_a, extra.h_a]),
                h_b=np.concatenate([record.h_b, extra.h_b]),
                h_ae=np.concatenate([record.h_ae, extra.h_ae], axis=1),
                h_be=np.concatenate([record.h_be, extra.h_be], axis=1),
                noise_var=noise_var, delta_t=delta_t)
            q_t += 1
        if q_star is None:
            raise RuntimeError(
                f"allocation loop did not converge within {math.ceil(ell / 2)} "
                f"iterations (q_t={q_t}, last prediction {q_star_t}, "
                f"r_skg={r_skg:.3g}, r_mrt={r_mrt:.3g})")

    r_edt = edt_rate(r_skg, r_mrt, q_star, ell)
    alpha = r_skg / r_mrt if r_mrt > 0 else math.inf
    return AllocationResult(q_star=q_star, r_skg=r_skg, r_mrt=r_mrt,
                            r_edt=r_edt, c_edt=r_edt, alpha=alpha,
                            ell=ell, q_th=q_th)
