"""Poisson-point-process eavesdropper model around Alice.

Eavesdroppers form a homogeneous PPP of intensity lambda_e per square
meter.  The k-th nearest one sits at distance d with density

    f_k(d) = exp(-lambda_e*pi*d^2) * 2*(lambda_e*pi)^k * d^(2k-1) / Gamma(k)

whose k = 1 mean is sqrt(1/(4*lambda_e)).  Without eavesdropper CSI the key
rate is bounded through the worst-case correlation rho_e_max, obtained by
evaluating the spatial correlation [J0(2*pi*d/lambda)]^2 at that expected
nearest distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import j0

from .keygen import kgr_closed_form


@dataclass
class PppConfig:
    """Disk-restricted PPP: intensity, sampling radius around Alice, wavelength."""

    lambda_e: float
    radius: float
    wavelength: float

    def __post_init__(self):
        if self.lambda_e <= 0:
            raise ValueError("lambda_e must be positive")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")


def nearest_eve_pdf(k: int, d, lambda_e: float):
    """Density of the distance to the k-th nearest point, per meter."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if lambda_e <= 0:
        raise ValueError("lambda_e must be positive")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    lp = lambda_e * np.pi
    out = np.exp(-lp * d ** 2) * 2.0 * lp ** k * d ** (2 * k - 1) / gamma_fn(k)
    return out if out.shape else float(out)


def expected_min_distance(lambda_e: float) -> float:
    """Mean distance to the nearest point, sqrt(1/(4*lambda_e))."""
    if lambda_e <= 0:
        raise ValueError("lambda_e must be positive")
    return float(np.sqrt(1.0 / (4.0 * lambda_e)))


def sample_ppp(config: PppConfig, rng: np.random.Generator) -> np.ndarray:
    """One PPP realization on the disk: (n, 2) positions relative to Alice.

    The count is Poisson(lambda_e * pi * R^2) and positions are i.i.d.
    uniform on the disk.
    """
    n = rng.poisson(config.lambda_e * np.pi * config.radius ** 2)
    r = config.radius * np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def independent_envelope_cross_moment(var_a: float, var_b: float) -> float:
    """E{|x||y|} = (pi/4) * sigma_x * sigma_y for independent CN envelopes.

    var_a and var_b are the full complex powers E|x|^2 and E|y|^2; each
    envelope is Rayleigh with mean sigma * sqrt(pi)/2.
    """
    if var_a <= 0 or var_b <= 0:
        raise ValueError("variances must be positive")
    return float(np.pi / 4.0 * np.sqrt(var_a * var_b))


def rho_e_max(exp_abs_cross: float, exp_g_ab2: float, exp_g_be2: float,
              noise_var: float, lambda_e: float, wavelength: float) -> float:
    """Worst-case eavesdropper correlation without its CSI.

    Evaluates

        rho_e_max = E{|g_ab||g_be|} * [J0(2*pi*d/lambda)]^2
                    / sqrt((E|g_ab|^2 + noise_var) * (E|g_be|^2 + noise_var))

    at d = expected_min_distance(lambda_e).  The moments are supplied by the
    caller, analytically (independent_envelope_cross_moment) or empirically.
    """
    if exp_abs_cross <= 0 or exp_g_ab2 <= 0 or exp_g_be2 <= 0:
        raise ValueError("moments must be positive")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    d = expected_min_distance(lambda_e)
    rho_tilde = j0(2.0 * np.pi * d / wavelength) ** 2
    val = exp_abs_cross * rho_tilde / np.sqrt(
        (exp_g_ab2 + noise_var) * (exp_g_be2 + noise_var))
    if not 0.0 <= val <= 1.0:
        raise ValueError(f"rho_e_max={val} outside [0, 1]: inconsistent moments")
    return float(val)


def kgr_ppp(rho_l: float, rho_e_worst: float, delta_t: float) -> float:
    """CSI-free key rate: the closed form evaluated at rho_e_max."""
    return kgr_closed_form(rho_l, rho_e_worst, delta_t)
