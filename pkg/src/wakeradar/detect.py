"""Dominant-scatterer contrast detection and per-bin classification.

The contrast measure for a candidate cell D of a magnitude spectrum F is

    DSCR(D) = 10 * log10( F(D) / (sum_K F(K) / N) )

where the mean runs over all N cells, masked ones included.  The notch mask
only restricts which cells may be selected as the dominant cell or reported
as peaks; it never changes the denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .dsp import DopplerSpectrum, RangeDopplerMap, notch_clutter
from .errors import DomainError, NoCandidateError
from .params import RadarConfig, range_resolution

if TYPE_CHECKING:
    from .signature import WakeStage


class DetectionClass(str, Enum):
    AIRCRAFT = "Aircraft"
    WAKE = "Wake"
    OTHER = "Other"
    NOISE = "Noise"


@dataclass
class SpectralPeak:
    velocity: float
    amplitude: float


@dataclass
class Detection:
    """Classification outcome for one range bin of one frame."""

    bin_index: int
    range_m: float
    category: DetectionClass
    snr_db: float
    dscr_db: float
    dominant_velocity: float
    doppler_peaks: list[SpectralPeak]
    stage: Optional["WakeStage"] = None


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds and bands for bin classification.

    ``wake_speed_band`` brackets wake-like dominant speeds in m/s and must sit
    below ``aircraft_min_speed``.  ``min_prominence`` is relative to the
    largest unmasked amplitude; ``peak_floor_ratio`` is relative to the mean
    unmasked amplitude and keeps noise wiggles out of the peak list.
    """

    notch_half_width: float = 2.0
    dscr_threshold: float = 8.0
    aircraft_min_speed: float = 15.0
    wake_speed_band: tuple[float, float] = (2.0, 12.0)
    min_peaks_for_wake: int = 2
    min_prominence: float = 0.15
    peak_floor_ratio: float = 4.5
    wake_gap_tolerance: int = 3
    assumed_wingspan: float = 34.32
    jem_min_lines: int = 5
    jem_min_spacing: float = 8.0

    def __post_init__(self):
        if self.notch_half_width < 0:
            raise DomainError(f"notch_half_width must be >= 0, got {self.notch_half_width}")
        if not self.dscr_threshold > 0:
            raise DomainError(f"dscr_threshold must be positive, got {self.dscr_threshold}")
        lo, hi = self.wake_speed_band
        if not 0 <= lo < hi:
            raise DomainError(f"wake_speed_band must be an increasing pair, got {self.wake_speed_band}")
        if not lo < self.aircraft_min_speed:
            raise DomainError(
                f"wake_speed_band minimum {lo} must lie below aircraft_min_speed "
                f"{self.aircraft_min_speed}")
        if self.min_peaks_for_wake < 1:
            raise DomainError(f"min_peaks_for_wake must be >= 1, got {self.min_peaks_for_wake}")
        if not 0 < self.min_prominence <= 1:
            raise DomainError(f"min_prominence must be in (0, 1], got {self.min_prominence}")
        if not self.peak_floor_ratio > 0:
            raise DomainError(f"peak_floor_ratio must be positive, got {self.peak_floor_ratio}")
        if self.wake_gap_tolerance < 0:
            raise DomainError(f"wake_gap_tolerance must be >= 0, got {self.wake_gap_tolerance}")
        if not self.assumed_wingspan > 0:
            raise DomainError(f"assumed_wingspan must be positive, got {self.assumed_wingspan}")
        if self.jem_min_lines < 3:
            raise DomainError(f"jem_min_lines must be >= 3, got {self.jem_min_lines}")
        if not self.jem_min_spacing > 0:
            raise DomainError(f"jem_min_spacing must be positive, got {self.jem_min_spacing}")


@dataclass
class FrameScan:
    """All detections of one frame plus the aircraft / wake aggregation."""

    frame_index: int
    detections: list[Detection]
    aircraft_bin: Optional[int]
    wake_extent: Optional[tuple[int, int]]
    noise_power: float


def dscr(spectrum: DopplerSpectrum, d_index: int) -> float:
    """Contrast of cell ``d_index`` against the all-cell mean amplitude, in dB."""
    amps = spectrum.amplitudes
    n = amps.shape[0]
    if not 0 <= d_index < n:
        raise DomainError(f"cell index {d_index} outside [0, {n})")
    mean = float(amps.mean())
    if mean == 0.0:
        raise DomainError("all-zero spectrum has no defined contrast")
    value = float(amps[d_index])
    if value == 0.0:
        return -math.inf
    return 10.0 * math.log10(value / mean)


def select_dominant_doppler(spectrum: DopplerSpectrum) -> int:
    """Index of the largest unmasked amplitude.

    Exact ties prefer the smaller |velocity|, then the negative one.
    """
    unmasked = ~spectrum.notch_mask
    if not unmasked.any():
        raise NoCandidateError("every cell is masked")
    amps = spectrum.amplitudes
    best = np.max(amps[unmasked])
    ties = np.flatnonzero(unmasked & (amps == best))
    if ties.shape[0] == 1:
        return int(ties[0])
    vel = spectrum.velocity_axis[ties]
    order = np.lexsort((vel, np.abs(vel)))
    return int(ties[order[0]])


def find_doppler_peaks(spectrum: DopplerSpectrum, min_prominence: float = 0.15,
                       floor_ratio: float = 4.5) -> list[SpectralPeak]:
    """Unmasked local maxima that stand out from the spectrum.

    A cell qualifies when its amplitude reaches ``floor_ratio`` times the mean
    unmasked amplitude and its prominence reaches ``min_prominence`` times the
    largest unmasked amplitude.  Maxima are searched inside each contiguous
    unmasked run; results are sorted by amplitude, descending.
    """
    unmasked = ~spectrum.notch_mask
    if not unmasked.any():
        return []
    amps = spectrum.amplitudes
    gmax = float(np.max(amps[unmasked]))
    if gmax == 0.0:
        return []
    floor = floor_ratio * float(np.mean(amps[unmasked]))
    prom_floor = min_prominence * gmax

    peaks: list[SpectralPeak] = []
    n = amps.shape[0]
    start = 0
    while start < n:
        if not unmasked[start]:
            start += 1
            continue
        stop = start
        while stop < n and unmasked[stop]:
            stop += 1
        run = amps[start:stop]
        if run.shape[0] >= 3:
            found, _ = _scipy_find_peaks(run, height=floor,
                                         prominence=prom_floor)
            for i in found:
                peaks.append(SpectralPeak(
                    velocity=float(spectrum.velocity_axis[start + i]),
                    amplitude=float(run[i]),
                ))
        start = stop
    peaks.sort(key=lambda p: -p.amplitude)
    return peaks


def estimate_noise_power(spectrum: DopplerSpectrum) -> float:
    """Per-sample noise power from the median spectral cell power.

    For white noise E|X_k|^2 = N * sigma^2 and the cell powers are
    exponential, so the median is N * sigma^2 * ln 2.
    """
    n = spectrum.amplitudes.shape[0]
    med = float(np.median(spectrum.amplitudes ** 2))
    if med == 0.0:
        raise DomainError("all-zero spectrum has no noise estimate")
    return med / (n * math.log(2.0))


def estimate_bin_snr_db(spectrum: DopplerSpectrum, noise_power: float) -> float:
    """Total bin power over the noise-floor power, in dB.

    The mean per-pulse power is recovered from the rectangular-window
    spectrum via Parseval: sum |X_k|^2 = N * sum |x_n|^2.
    """
    if not noise_power > 0:
        raise DomainError(f"noise_power must be positive, got {noise_power}")
    n = spectrum.amplitudes.shape[0]
    mean_power = float(np.sum(spectrum.amplitudes ** 2)) / (n * n)
    if mean_power == 0.0:
        return -math.inf
    return 10.0 * math.log10(mean_power / noise_power)


def classify_bin(spectrum: DopplerSpectrum, config: DetectorConfig,
                 jem_result=None, noise_power: Optional[float] = None,
                 range_res: Optional[float] = None) -> Detection:
    """Classify one bin as Noise, Aircraft, Wake, or Other.

    ``jem_result`` is an already-confirmed engine-modulation comb for this
    bin, if the caller ran that analysis; its presence marks the bin as
    aircraft regardless of the folded dominant speed.
    """
    sp = notch_clutter(spectrum, config.notch_half_width)
    if noise_power is None:
        noise_power = estimate_noise_power(spectrum)
    d = select_dominant_doppler(sp)
    v_dom = float(sp.velocity_axis[d])
    contrast = dscr(sp, d)
    snr = estimate_bin_snr_db(sp, noise_power)
    peaks = find_doppler_peaks(sp, config.min_prominence, config.peak_floor_ratio)

    lo, hi = config.wake_speed_band
    if contrast < config.dscr_threshold:
        category = DetectionClass.NOISE
    elif abs(v_dom) >= config.aircraft_min_speed or jem_result is not None:
        category = DetectionClass.AIRCRAFT
    elif lo <= abs(v_dom) <= hi and len(peaks) >= config.min_peaks_for_wake:
        category = DetectionClass.WAKE
    else:
        category = DetectionClass.OTHER

    range_m = spectrum.bin_index * range_res if range_res is not None else math.nan
    return Detection(
        bin_index=spectrum.bin_index,
        range_m=range_m,
        category=category,
        snr_db=snr,
        dscr_db=contrast,
        dominant_velocity=v_dom,
        doppler_peaks=peaks,
    )


def _merge_wake_runs(bins: list[int], gap_tolerance: int) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for b in bins:
        if runs and b - runs[-1][1] - 1 <= gap_tolerance:
            runs[-1] = (runs[-1][0], b)
        else:
            runs.append((b, b))
    return runs


JemProvider = Callable[[DopplerSpectrum, list[SpectralPeak]], object]


def frame_noise_power(rd_map: RangeDopplerMap, notch_half_width: float) -> float:
    """Noise floor of a whole frame: per-bin median cells, median over bins.

    The per-bin median rejects sparse targets, the cross-bin median rejects
    the bins a target lives in, and excluding the clutter notch keeps wind
    clutter out.  Target lines that sit between grid cells leak into every
    cell of their own bin, so a single-bin estimate can read tens of dB high;
    the cross-bin median is immune to that as well.
    """
    n = rd_map.rows[0].amplitudes.shape[0] if rd_map.rows else 0
    estimates = []
    for row in rd_map.rows:
        sp = notch_clutter(row, notch_half_width)
        cells = sp.amplitudes[~sp.notch_mask]
        if cells.size:
            med = float(np.median(cells ** 2))
            if med > 0.0:
                estimates.append(med / (n * math.log(2.0)))
    return float(np.median(estimates)) if estimates else 1.0


def scan_frame(rd_map: RangeDopplerMap, config: DetectorConfig,
               radar: Optional[RadarConfig] = None,
               noise_power: Optional[float] = None,
               jem_provider: Optional[JemProvider] = None) -> FrameScan:
    """Classify every bin of a frame and aggregate the aircraft / wake picture.

    The aircraft bin is the highest-contrast Aircraft detection.  The wake
    extent is the longest run of Wake bins strictly behind the aircraft,
    tolerating gaps of up to ``wake_gap_tolerance`` bins.  When no noise
    floor is supplied, :func:`frame_noise_power` estimates it.
    """
    if noise_power is None:
        noise_power = frame_noise_power(rd_map, config.notch_half_width)
    rr = range_resolution(radar.bandwidth) if radar is not None else None

    detections = []
    for row in rd_map.rows:
        det = classify_bin(row, config, noise_power=noise_power, range_res=rr)
        if (jem_provider is not None
                and det.category in (DetectionClass.WAKE, DetectionClass.OTHER)
                and abs(det.dominant_velocity) < config.aircraft_min_speed):
            comb = jem_provider(notch_clutter(row, config.notch_half_width),
                                det.doppler_peaks)
            if comb is not None:
                det = classify_bin(row, config, jem_result=comb,
                                   noise_power=noise_power, range_res=rr)
        detections.append(det)

    aircraft = [d for d in detections if d.category is DetectionClass.AIRCRAFT]
    aircraft_bin = max(aircraft, key=lambda d: d.dscr_db).bin_index if aircraft else None

    wake_extent = None
    if aircraft_bin is not None:
        behind = [d.bin_index for d in detections
                  if d.category is DetectionClass.WAKE and d.bin_index < aircraft_bin]
        runs = _merge_wake_runs(sorted(behind), config.wake_gap_tolerance)
        if runs:
            wake_extent = max(runs, key=lambda r: (r[1] - r[0], r[1]))

    return FrameScan(frame_index=rd_map.frame_index, detections=detections,
                     aircraft_bin=aircraft_bin, wake_extent=wake_extent,
                     noise_power=noise_power)
