"""Geometry, log-distance path loss, and channel sampling for the two-hop IRS layout.

The layout places Alice at the origin, Bob on the x axis at distance d_ab,
and the reflecting surface (IRS) near Bob, offset d2 back along the x axis
and d1 off the line.  Eavesdroppers sit at arbitrary 2-D positions given
relative to Alice.  All small-scale fading is Rayleigh: each coefficient is
a circularly symmetric complex Gaussian whose variance is the linear gain
10^(-PL/10) of its link.  An eavesdropper at distance d from Alice sees
channels correlated with the legitimate ones by the Jakes-model coefficient
c = J0(2*pi*d/lambda).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass
class Geometry:
    """Node placement in meters.

    d_ab is the Alice-Bob distance, d1 the perpendicular offset of the IRS
    from the Alice-Bob line, d2 its horizontal offset back from Bob.
    eve_positions holds one (x, y) point per eavesdropper, relative to Alice.
    """

    d_ab: float = 100.0
    d1: float = 5.0
    d2: float = 5.0
    eve_positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        if self.d_ab <= 0 or self.d1 <= 0 or self.d2 <= 0:
            raise ValueError("geometry distances must be strictly positive")
        self.eve_positions = np.atleast_2d(np.asarray(self.eve_positions, dtype=float))
        if self.eve_positions.size == 0:
            self.eve_positions = np.zeros((0, 2))
        if self.eve_positions.shape[1] != 2:
            raise ValueError("eve_positions must be K x 2")

    @property
    def alice(self) -> np.ndarray:
        return np.array([0.0, 0.0])

    @property
    def bob(self) -> np.ndarray:
        return np.array([self.d_ab, 0.0])

    @property
    def irs(self) -> np.ndarray:
        return np.array([self.d_ab - self.d2, self.d1])

    @property
    def d_ar(self) -> float:
        """Alice to IRS distance, sqrt((d_ab - d2)^2 + d1^2)."""
        return float(np.hypot(self.d_ab - self.d2, self.d1))

    @property
    def d_rb(self) -> float:
        """IRS to Bob distance, sqrt(d2^2 + d1^2)."""
        return float(np.hypot(self.d2, self.d1))

    @property
    def n_eves(self) -> int:
        return self.eve_positions.shape[0]

    def eve_distances(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-eavesdropper distances (d_ae, d_be, d_er) in one coordinate frame."""
        pos = self.eve_positions
        d_ae = np.linalg.norm(pos - self.alice, axis=1)
        d_be = np.linalg.norm(pos - self.bob, axis=1)
        d_er = np.linalg.norm(pos - self.irs, axis=1)
        return d_ae, d_be, d_er


@dataclass
class PathLossModel:
    """Log-distance path loss: PL(d) = pl0_db + 10*zeta*log10(d/d0), in dB."""

    pl0_db: float = 30.0
    d0: float = 1.0
    zeta_ar: float = 2.2
    zeta_rb: float = 2.5
    zeta_ab: float = 3.5
    zeta_er: float = 2.2
    zeta_eb: float = 3.5

    def __post_init__(self):
        if not np.isfinite(self.pl0_db):
            raise ValueError("pl0_db must be finite")
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        exps = (self.zeta_ar, self.zeta_rb, self.zeta_ab, self.zeta_er, self.zeta_eb)
        if any(z < 2.0 for z in exps):
            warnings.warn("path-loss exponent below 2 (free space); proceeding anyway",
                          stacklevel=2)


def path_loss_db(d: float, zeta: float, model: PathLossModel) -> float:
    """Path loss in dB at distance d (meters) for exponent zeta.

    Returns pl0_db + 10*zeta*log10(d/d0).  The corresponding linear power
    gain is 10^(-PL/10).
    """
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return model.pl0_db + 10.0 * zeta * np.log10(d / model.d0)


def linear_gain(pl_db: float) -> float:
    """Linear power gain 10^(-PL/10) for a path loss in dB."""
    return 10.0 ** (-pl_db / 10.0)


def eve_correlation_coefficient(d: float, wavelength: float) -> float:
    """Spatial correlation amplitude c = J0(2*pi*d/lambda) at separation d.

    The squared value c^2 is the power correlation between channels observed
    at two points separated by d under isotropic scattering.
    """
    if d < 0:
        raise ValueError("distance must be nonnegative")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return float(j0(2.0 * np.pi * d / wavelength))


@dataclass
class ChannelSet:
    """One coherence interval of channel coefficients.

    h_ab is the direct Alice-Bob coefficient; u[n] and v[n] are the
    Alice-to-surface and surface-to-Bob element coefficients.  A single
    (h_ab, u, v) triple serves both link directions, so reciprocity of the
    combined channel is exact by construction.  Per eavesdropper k: h_ae[k]
    and h_be[k] are its direct links to Alice and Bob, e[k, n] its
    surface-element coefficients.  The sigma_*2 entries are the linear
    powers each coefficient was drawn with.
    """

    h_ab: complex
    u: np.ndarray
    v: np.ndarray
    h_ae: np.ndarray
    h_be: np.ndarray
    e: np.ndarray
    sigma_ab2: float
    sigma_u2: float
    sigma_v2: float
    sigma_ae2: np.ndarray
    sigma_be2: np.ndarray
    sigma_e2: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.u.shape[0]

    @property
    def n_eves(self) -> int:
        return self.h_be.shape[0]

    def cascade(self) -> np.ndarray:
        """Per-element legitimate cascade products u[n] * v[n]."""
        return self.u * self.v


def _complex_gaussian(rng: np.random.Generator, var, size=None) -> np.ndarray:
    """Circularly symmetric complex Gaussian with E|x|^2 = var."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def sample_channel_set(geometry: Geometry, model: PathLossModel, n_elements: int,
                       wavelength: float, rng: np.random.Generator) -> ChannelSet:
    """Draw one coherence interval of channels for the given layout.

    Legitimate coefficients are independent complex Gaussians with
    link-specific variances.  Eavesdropper k at distance d_ae from Alice is
    correlated with the legitimate side through c = J0(2*pi*d_ae/lambda):

        h_be[k] = c*(sigma_be/sigma_ab)*h_ab + sqrt(1-c^2)*CN(0, sigma_be^2)
        e[k, n] = c*(sigma_e/sigma_u)*u[n]  + sqrt(1-c^2)*CN(0, sigma_e^2)

    while h_ae[k] is independent of everything legitimate.  Same seed gives
    a bit-identical draw.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")

    sigma_ab2 = linear_gain(path_loss_db(geometry.d_ab, model.zeta_ab, model))
    sigma_u2 = linear_gain(path_loss_db(geometry.d_ar, model.zeta_ar, model))
    sigma_v2 = linear_gain(path_loss_db(geometry.d_rb, model.zeta_rb, model))

    h_ab = complex(_complex_gaussian(rng, sigma_ab2))
    u = _complex_gaussian(rng, sigma_u2, n_elements)
    v = _complex_gaussian(rng, sigma_v2, n_elements)

    k = geometry.n_eves
    d_ae, d_be, d_er = geometry.eve_distances()
    sigma_ae2 = np.array([linear_gain(path_loss_db(d, model.zeta_eb, model)) for d in d_ae])
    sigma_be2 = np.array([linear_gain(path_loss_db(d, model.zeta_eb, model)) for d in d_be])
    sigma_e2 = np.array([linear_gain(path_loss_db(d, model.zeta_er, model)) for d in d_er])

    h_ae = np.zeros(k, dtype=complex)
    h_be = np.zeros(k, dtype=complex)
    e = np.zeros((k, n_elements), dtype=complex)
    for i in range(k):
        c = eve_correlation_coefficient(d_ae[i], wavelength)
        mix = np.sqrt(max(0.0, 1.0 - c * c))
        h_be[i] = (c * np.sqrt(sigma_be2[i] / sigma_ab2) * h_ab
                   + mix * _complex_gaussian(rng, sigma_be2[i]))
        e[i] = (c * np.sqrt(sigma_e2[i] / sigma_u2) * u
                + mix * _complex_gaussian(rng, sigma_e2[i], n_elements))
        h_ae[i] = _complex_gaussian(rng, sigma_ae2[i])

    return ChannelSet(h_ab=h_ab, u=u, v=v, h_ae=h_ae, h_be=h_be, e=e,
                      sigma_ab2=sigma_ab2, sigma_u2=sigma_u2, sigma_v2=sigma_v2,
                      sigma_ae2=sigma_ae2, sigma_be2=sigma_be2, sigma_e2=sigma_e2)
