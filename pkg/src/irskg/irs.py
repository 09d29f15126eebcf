"""Discrete phase-shift configurations for the reflecting surface.

Each of the N elements applies a phase theta_n from the uniform B-bit grid
{2*pi*m / 2^B : m = 0..2^B-1}.  Training rounds draw configurations
uniformly at random from the grid; data transmission uses the
phase-aligning (MRT) configuration, optionally rounded onto the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass
class PhaseConfig:
    """A surface configuration: one phase per element.

    bits is the grid resolution B used to generate theta, or None for a
    continuous (unquantized) configuration.
    """

    theta: np.ndarray
    bits: int | None = None

    def __post_init__(self):
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if self.bits is not None and self.bits < 1:
            raise ValueError("bits must be >= 1 when quantized")

    def __len__(self) -> int:
        return self.theta.shape[0]


def phase_grid(bits: int) -> np.ndarray:
    """The 2^B grid points {2*pi*m / 2^B}."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    return TWO_PI * np.arange(2 ** bits) / (2 ** bits)


def random_phase_config(n_elements: int, bits: int,
                        rng: np.random.Generator) -> PhaseConfig:
    """Draw each theta_n i.i.d. uniform over the B-bit grid."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if bits < 1:
        raise ValueError("bits must be >= 1")
    m = rng.integers(0, 2 ** bits, size=n_elements)
    return PhaseConfig(theta=TWO_PI * m / (2 ** bits), bits=bits)


def mrt_phase_config(channels, bits: int | None = None) -> PhaseConfig:
    """Phase-aligning configuration theta_n = arg(h_ab) - arg(u_n * v_n).

    Every cascade term then adds in phase with the direct path.  With finite
    bits each theta_n is rounded to the nearest grid point, ties toward the
    smaller angle.
    """
    if channels.n_elements < 1:
        raise ValueError("channel set has no surface elements")
    theta = np.mod(np.angle(channels.h_ab) - np.angle(channels.u * channels.v), TWO_PI)
    if bits is None:
        return PhaseConfig(theta=theta, bits=None)
    if bits < 1:
        raise ValueError("bits must be >= 1")
    step = TWO_PI / (2 ** bits)
    m = np.ceil(theta / step - 0.5).astype(int) % (2 ** bits)
    return PhaseConfig(theta=step * m, bits=bits)


def combined_channel(direct: complex, cascade: np.ndarray,
                     config: PhaseConfig) -> complex:
    """Combined coefficient direct + sum_n cascade_n * exp(j*theta_n).

    cascade holds the per-element products u_n * v_n (or the eavesdropper
    analogues).  Its length must match the configuration.
    """
    cascade = np.atleast_1d(np.asarray(cascade, dtype=complex))
    if cascade.shape[0] != len(config):
        raise ValueError(f"cascade length {cascade.shape[0]} != config length {len(config)}")
    return complex(direct + np.sum(cascade * np.exp(1j * config.theta)))
