"""Doppler spectra, range-Doppler maps, and micro-Doppler spectrograms.

Spectral amplitudes are magnitudes, not powers.  Every spectrum is FFT-shifted
so index N//2 is the zero-velocity cell and the axis covers [-v_ua, +v_ua).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import get_window

from .errors import DimensionError, DomainError
from .params import RadarConfig, unambiguous_velocity, velocity_resolution

WINDOWS = ("rectangular", "hann")


@dataclass
class DopplerSpectrum:
    """Magnitude spectrum of one range bin over one coherent interval."""

    amplitudes: np.ndarray
    velocity_axis: np.ndarray
    bin_index: int
    notch_mask: np.ndarray


@dataclass
class RangeDopplerMap:
    """Per-bin Doppler spectra for one frame, row index = range bin."""

    rows: list[DopplerSpectrum]
    frame_index: int

    @property
    def n_bins(self) -> int:
        return len(self.rows)


@dataclass
class Spectrogram:
    """Short-time spectra of a single bin within one coherent interval.

    ``values`` holds the complex FFT-shifted slices when the spectrogram came
    from :func:`micro_doppler_spectrogram`; magnitude-only instances leave it
    None, which is enough for rendering but not for drift estimation.
    """

    magnitudes: np.ndarray
    time_axis: np.ndarray
    velocity_axis: np.ndarray
    win_len: int = 256
    hop: int = 64
    prf: float = field(default=0.0)
    values: Optional[np.ndarray] = None


def _window(name: str, length: int) -> np.ndarray:
    if name == "rectangular":
        return np.ones(length)
    if name == "hann":
        return get_window("hann", length)
    raise DomainError(f"unknown window {name!r}, expected one of {WINDOWS}")


def _velocity_axis(n_cells: int, step: float) -> np.ndarray:
    return (np.arange(n_cells) - n_cells // 2) * step


def doppler_spectrum(pulses: np.ndarray, config: RadarConfig,
                     window: str = "rectangular", bin_index: int = 0) -> DopplerSpectrum:
    """Magnitude of the windowed, FFT-shifted DFT of one bin's pulse series."""
    pulses = np.asarray(pulses)
    if pulses.ndim != 1 or pulses.shape[0] != config.n_pulses:
        raise DimensionError(
            f"pulse series has shape {pulses.shape}, expected ({config.n_pulses},)")
    w = _window(window, config.n_pulses)
    spec = np.fft.fftshift(np.fft.fft(np.asarray(pulses, dtype=np.complex128) * w))
    axis = _velocity_axis(config.n_pulses, velocity_resolution(config))
    return DopplerSpectrum(
        amplitudes=np.abs(spec),
        velocity_axis=axis,
        bin_index=bin_index,
        notch_mask=np.zeros(config.n_pulses, dtype=bool),
    )


def range_doppler_map(frame_iq: np.ndarray, config: RadarConfig,
                      window: str = "rectangular", frame_index: int = 0) -> RangeDopplerMap:
    """Apply :func:`doppler_spectrum` to every range bin of a frame cube."""
    frame_iq = np.asarray(frame_iq)
    if frame_iq.ndim != 2 or frame_iq.shape != (config.n_range_bins, config.n_pulses):
        raise DimensionError(
            f"frame has shape {frame_iq.shape}, expected "
            f"({config.n_range_bins}, {config.n_pulses})")
    rows = [doppler_spectrum(frame_iq[b], config, window=window, bin_index=b)
            for b in range(config.n_range_bins)]
    return RangeDopplerMap(rows=rows, frame_index=frame_index)


def notch_clutter(spectrum: DopplerSpectrum, half_width: float) -> DopplerSpectrum:
    """Mask every cell with |velocity| <= half_width; amplitudes are untouched.

    Masks accumulate: cells already masked stay masked, so the operation is
    idempotent and monotone in half_width.
    """
    if half_width < 0:
        raise DomainError(f"half_width must be non-negative, got {half_width}")
    mask = spectrum.notch_mask | (np.abs(spectrum.velocity_axis) <= half_width)
    return DopplerSpectrum(
        amplitudes=spectrum.amplitudes,
        velocity_axis=spectrum.velocity_axis,
        bin_index=spectrum.bin_index,
        notch_mask=mask,
    )


def index_for_velocity(spectrum: DopplerSpectrum, velocity: float) -> int:
    """Nearest cell index for a velocity on this spectrum's axis."""
    n = spectrum.velocity_axis.shape[0]
    step = spectrum.velocity_axis[1] - spectrum.velocity_axis[0]
    idx = int(round(velocity / step)) + n // 2
    if not 0 <= idx < n:
        raise DomainError(f"velocity {velocity} lies outside the axis")
    return idx


def micro_doppler_spectrogram(pulses: np.ndarray, config: RadarConfig,
                              win_len: int = 256, hop: int = 64,
                              window: str = "hann") -> Spectrogram:
    """Sliding-window magnitude spectra of one bin's pulse series.

    Produces floor((n_pulses - win_len) / hop) + 1 time slices.  Each slice is
    FFT-shifted onto a velocity axis spanning [-v_ua, +v_ua) with win_len
    cells, and the time axis holds window-center times in seconds.
    """
    pulses = np.asarray(pulses, dtype=np.complex128)
    if pulses.ndim != 1 or pulses.shape[0] != config.n_pulses:
        raise DimensionError(
            f"pulse series has shape {pulses.shape}, expected ({config.n_pulses},)")
    if not 2 <= win_len <= config.n_pulses:
        raise DomainError(f"win_len must be in [2, {config.n_pulses}], got {win_len}")
    if hop < 1:
        raise DomainError(f"hop must be >= 1, got {hop}")
    w = _window(window, win_len)
    n_slices = (config.n_pulses - win_len) // hop + 1
    vals = np.empty((n_slices, win_len), dtype=np.complex128)
    for s in range(n_slices):
        chunk = pulses[s * hop:s * hop + win_len]
        vals[s] = np.fft.fftshift(np.fft.fft(chunk * w))
    v_ua = unambiguous_velocity(config)
    axis = _velocity_axis(win_len, 2.0 * v_ua / win_len)
    times = (np.arange(n_slices) * hop + win_len / 2.0) / config.prf
    return Spectrogram(magnitudes=np.abs(vals), time_axis=times, velocity_axis=axis,
                       win_len=win_len, hop=hop, prf=config.prf, values=vals)
