"""Radar configuration and the derived quantities of a coherent pulse-Doppler system.

All quantities are SI.  Velocities are signed radial speeds: positive toward
the radar, negative away from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN_CONSTANT = 1.380649e-23
STANDARD_TEMPERATURE = 290.0


@dataclass(frozen=True)
class RadarConfig:
    """Static description of one coherent processing setup.

    The coherent interval length is always ``n_pulses / prf`` and is exposed
    as the derived property :attr:`cpi_seconds`; it is never stored.
    """

    carrier_frequency: float
    prf: float
    n_pulses: int
    bandwidth: float
    n_range_bins: int
    peak_power: float = 320.0
    noise_figure: float = 2.0
    system_temperature: float = STANDARD_TEMPERATURE
    antenna_gain: float = 1.0
    effective_aperture: float = 1.0

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise DomainError(f"carrier_frequency must be positive, got {self.carrier_frequency}")
        if not self.prf > 0:
            raise DomainError(f"prf must be positive, got {self.prf}")
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 2:
            raise DomainError(f"n_pulses must be an integer >= 2, got {self.n_pulses}")
        if int(self.n_range_bins) != self.n_range_bins or self.n_range_bins < 1:
            raise DomainError(f"n_range_bins must be an integer >= 1, got {self.n_range_bins}")
        for name in ("peak_power", "noise_figure", "system_temperature",
                     "antenna_gain", "effective_aperture"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def cpi_seconds(self) -> float:
        return self.n_pulses / self.prf


@dataclass(frozen=True)
class LinkBudgetQuery:
    """Target and sensitivity assumptions for a detection-range evaluation."""

    target_rcs: float
    required_snr: float
    boltzmann_constant: float = BOLTZMANN_CONSTANT

    def __post_init__(self):
        if not self.target_rcs > 0:
            raise DomainError(f"target_rcs must be positive, got {self.target_rcs}")
        if not self.required_snr > 0:
            raise DomainError(f"required_snr must be positive, got {self.required_snr}")
        if not self.boltzmann_constant > 0:
            raise DomainError(f"boltzmann_constant must be positive, got {self.boltzmann_constant}")


def wavelength(config: RadarConfig) -> float:
    """Carrier wavelength c / f in meters."""
    return SPEED_OF_LIGHT / config.carrier_frequency


def range_resolution(bandwidth: float) -> float:
    """Slant-range bin extent c / (2 B) in meters."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth}")
    return SPEED_OF_LIGHT / (2.0 * bandwidth)


def velocity_resolution(config: RadarConfig) -> float:
    """Doppler velocity step lambda / (2 T) for one coherent interval T."""
    return wavelength(config) / (2.0 * config.cpi_seconds)


def unambiguous_velocity(config: RadarConfig) -> float:
    """Largest unaliased radial speed lambda * PRF / 4."""
    return wavelength(config) * config.prf / 4.0


def fold_velocity(v_true: float, v_ua: float) -> float:
    """Alias a radial velocity into the measurable interval [-v_ua, +v_ua).

    The fold repeatedly adds or subtracts one full ambiguity span 2 * v_ua
    until the value lands in the half-open interval, so +v_ua maps to -v_ua.
    """
    if not v_ua > 0:
        raise DomainError(f"v_ua must be positive, got {v_ua}")
    if not math.isfinite(v_true):
        raise DomainError(f"v_true must be finite, got {v_true}")
    span = 2.0 * v_ua
    v = float(v_true)
    while v >= v_ua:
        v -= span
    while v < -v_ua:
        v += span
    return v


def detection_range(config: RadarConfig, query: LinkBudgetQuery) -> float:
    """Maximum detection range of the single-pulse power budget.

    R = (Pt * G * Ae * sigma / ((4 pi)^2 * k * T0 * Bn * Fn * C))^(1/4)

    with C the required signal-to-noise ratio.  The fourth root is taken as
    two square roots, which keeps exact power-of-two scaling exact.
    """
    numerator = (config.peak_power * config.antenna_gain
                 * config.effective_aperture * query.target_rcs)
    denominator = ((4.0 * math.pi) ** 2 * query.boltzmann_constant
                   * config.system_temperature * config.bandwidth
                   * config.noise_figure * query.required_snr)
    return math.sqrt(math.sqrt(numerator / denominator))


def snr_db(signal_power: float, noise_power: float) -> float:
    """Power ratio in decibels, 10 log10(s / n)."""
    if not signal_power > 0:
        raise DomainError(f"signal_power must be positive, got {signal_power}")
    if not noise_power > 0:
        raise DomainError(f"noise_power must be positive, got {noise_power}")
    return 10.0 * math.log10(signal_power / noise_power)
