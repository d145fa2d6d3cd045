"""Wake aging, micro-Doppler slope signatures, and engine-modulation combs.

A trailing vortex pair is staged by the dimensionless ratio of the distance
behind the generating aircraft to its wingspan.  Boundaries belong to the
younger stage: a ratio of exactly 1 is still Young, exactly 10 still Mature,
exactly 100 still Old.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .detect import SpectralPeak, find_doppler_peaks
from .dsp import DopplerSpectrum, Spectrogram
from .errors import DomainError, InsufficientSignalError


class StageName(str, Enum):
    YOUNG = "Young"
    MATURE = "Mature"
    OLD = "Old"
    DECAYING = "Decaying"


@dataclass(frozen=True)
class WakeStage:
    """A stage label together with the age ratio that produced it."""

    name: StageName
    r_wv: float


def stage_from_distance(x: float, wingspan: float) -> WakeStage:
    """Stage a wake segment a distance ``x`` behind the aircraft.

    Comparisons are done against wingspan multiples rather than on the
    divided ratio, so exact boundary inputs classify exactly.
    """
    if x < 0:
        raise DomainError(f"distance behind aircraft must be >= 0, got {x}")
    if not wingspan > 0:
        raise DomainError(f"wingspan must be positive, got {wingspan}")
    ratio = x / wingspan
    if x <= wingspan:
        return WakeStage(StageName.YOUNG, ratio)
    if x <= 10.0 * wingspan:
        return WakeStage(StageName.MATURE, ratio)
    if x <= 100.0 * wingspan:
        return WakeStage(StageName.OLD, ratio)
    return WakeStage(StageName.DECAYING, ratio)


class SlopeSign(str, Enum):
    POSITIVE = "positive"
    MIXED = "mixed"
    NEGATIVE = "negative"


@dataclass
class SlopeFit:
    """Fitted common drift of the micro-Doppler lines in one bin.

    ``slope`` is normalized to full-interval velocity-resolution cells per
    coherent interval.  ``n_points`` counts the time slices that carried
    signal, ``focus_gain`` the sharpening achieved at the fitted slope over
    the unfocused spectra.
    """

    sign: SlopeSign
    slope: float
    focus_gain: float = 0.0
    n_points: int = 0


def _focus_sharpness(slices: np.ndarray, hop: int, n_pulses: int,
                     drifts: np.ndarray) -> np.ndarray:
    """Spectral sharpness after removing each candidate drift rate.

    ``slices`` is the complex short-time spectrum restricted to the columns
    worth focusing, one row per slice.  For every candidate (in cells per
    interval) the common quadratic phase it would impose is stripped and the
    slice series is re-transformed per column; a drift matching the true one
    compresses each line into a narrow clump of the fine transform, which a
    negated Shannon entropy of the pooled power rewards.  The quadratic
    phase reference sits mid-interval so that reversing the slice order
    mirrors the sharpness curve exactly.
    """
    n_t, n_cols = slices.shape
    taper = np.hanning(n_t)
    tapered = slices * taper[:, None]
    t_mid = (np.arange(n_t) - (n_t - 1) / 2.0) * hop
    n_fine = 1 << max(5, int(math.ceil(math.log2(4 * n_t))))
    out = np.empty(drifts.shape[0])
    for i, c in enumerate(drifts):
        ramp = np.exp(-1j * math.pi * (c / n_pulses ** 2) * t_mid ** 2)
        fine = np.fft.fft(tapered * ramp[:, None], n=n_fine, axis=0)
        power = np.abs(fine) ** 2
        p = power / power.sum()
        out[i] = float((p * np.log(p + 1e-300)).sum())
    return out


def slope_sign_classify(spg: Spectrogram, dead_band: float = 0.25,
                        clutter_half_width: float = 2.0,
                        noise_ratio: float = 4.0,
                        max_drift: float = 3.0,
                        drift_step: float = 0.25) -> SlopeFit:
    """Classify the shared drift direction of a bin's micro-Doppler lines.

    The spectral lines of one segment drift together, but several of them
    usually share each spectrogram column, and their beating moves magnitude
    centroids far more than the drift itself does.  So instead of tracking
    ridges, the classifier sweeps candidate drift rates over
    [-max_drift, +max_drift], strips the quadratic phase each would imprint,
    and keeps the rate that renders the per-column fine spectra sharpest.
    Beats survive this multiply untouched in every candidate, so they cancel
    out of the comparison.

    The slope is normalized to full-interval resolution cells per coherent
    interval; a magnitude below ``dead_band`` reads ``mixed``.  Columns
    within ``clutter_half_width`` m/s of zero are excluded, and slices whose
    peak stays under ``noise_ratio`` times the floor do not count as signal.
    """
    mag = spg.magnitudes
    n_t, n_f = mag.shape
    if n_t < 3:
        raise DomainError(f"need at least 3 time slices, got {n_t}")
    if spg.values is None:
        raise DomainError("spectrogram carries no complex slices; "
                          "build it with micro_doppler_spectrogram")
    allowed = np.abs(spg.velocity_axis) > clutter_half_width
    if allowed.sum() < 3:
        raise DomainError("clutter exclusion removed nearly the whole axis")

    sub = mag[:, allowed]
    med = float(np.median(sub))
    slice_max = sub.max(axis=1)
    valid = slice_max >= noise_ratio * med if med > 0 else slice_max > 0
    n_points = int(valid.sum())
    if n_points < (n_t + 1) // 2:
        raise InsufficientSignalError(
            f"a ridge rises above the floor in only {n_points} of {n_t} slices")

    col_power = (sub ** 2).sum(axis=0)
    keep = col_power >= 0.02 * float(col_power.max())
    slices = spg.values[:, allowed][:, keep]

    n_pulses = (n_t - 1) * spg.hop + spg.win_len
    grid = np.arange(-max_drift, max_drift + drift_step / 2.0, drift_step)
    sharp = _focus_sharpness(slices, spg.hop, n_pulses, grid)

    j = int(np.argmax(sharp))
    slope = float(grid[j])
    if 0 < j < grid.shape[0] - 1:
        denom = sharp[j - 1] - 2.0 * sharp[j] + sharp[j + 1]
        if denom < 0:
            delta = 0.5 * (sharp[j - 1] - sharp[j + 1]) / denom
            slope += float(np.clip(delta, -0.5, 0.5)) * drift_step
    gain = float(sharp[j] - sharp.min())

    if abs(slope) < dead_band:
        return SlopeFit(SlopeSign.MIXED, slope, focus_gain=gain, n_points=n_points)
    sign = SlopeSign.POSITIVE if slope > 0 else SlopeSign.NEGATIVE
    return SlopeFit(sign, slope, focus_gain=gain, n_points=n_points)


@dataclass
class JemComb:
    """Arithmetic line structure of jet-engine modulation around a body line."""

    body_velocity: float
    stage1_spacing: float
    stage2_spacing: Optional[float]
    stage2_offset: Optional[float]
    stage1_lines: list[float]
    stage2_lines: list[float]
    confidence: float


def _wrap(delta: float, spacing: float) -> float:
    """Reduce a lattice offset to its nearest-zero representative."""
    return delta - spacing * round(delta / spacing)


def _fit_lattice(velocities: np.ndarray, anchor: float, spacing: float,
                 tol: float, passes: int = 5) -> Optional[tuple[float, float, np.ndarray]]:
    """Refine (anchor, spacing) by least squares over matched peaks.

    Early passes match with a widened tolerance: peaks snapped to the grid
    can sit exactly on a whole-cell seed lattice, and matching only those
    would leave the refit stuck at the seed spacing.  The loosened passes
    admit the off-by-one-cell peaks whose trend pulls the spacing onto its
    sub-cell value; the returned membership always uses ``tol`` itself.
    """
    a, s = anchor, spacing
    matched = None
    widths = [2.5 * tol, 1.5 * tol] + [tol] * max(1, passes - 2)
    for width in widths:
        k = np.round((velocities - a) / s)
        resid = velocities - (a + k * s)
        sel = np.abs(resid) <= width
        if sel.sum() < 2 or np.ptp(k[sel]) == 0:
            return None
        kk, vv = k[sel], velocities[sel]
        km, vm = kk.mean(), vv.mean()
        s = float(((kk - km) * (vv - vm)).sum() / ((kk - km) ** 2).sum())
        a = float(vm - s * km)
        if s <= 0:
            return None
        matched = sel
    k = np.round((velocities - a) / s)
    matched = np.abs(velocities - (a + k * s)) <= tol
    if matched.sum() < 2 or np.ptp(k[matched]) == 0:
        return None
    return a, s, matched


def jem_comb_estimate(spectrum: DopplerSpectrum, min_lines: int = 5,
                      min_spacing: Optional[float] = None,
                      max_peaks: int = 40) -> Optional[JemComb]:
    """Recover up to two arithmetic line combs from a spectrum's peaks.

    Candidate spacings are voted from pairwise peak separations, each
    candidate is refined by a least-squares lattice fit, and the fit keeping
    the most peaks (ties broken toward fuller, stronger lattices) wins.  A
    second comb is extracted the same way from the leftover peaks.  Returns
    None when fewer than ``min_lines`` peaks fit the best lattice.
    """
    if min_lines < 3:
        raise DomainError(f"min_lines must be >= 3, got {min_lines}")
    step = float(spectrum.velocity_axis[1] - spectrum.velocity_axis[0])
    if min_spacing is None:
        min_spacing = 4.0 * step
    peaks = find_doppler_peaks(spectrum, min_prominence=0.05, floor_ratio=4.5)
    peaks = peaks[:max_peaks]
    if len(peaks) < min_lines:
        return None

    velocities = np.array([p.velocity for p in peaks])
    amplitudes = np.array([p.amplitude for p in peaks])
    tol = 0.5 * step * (1.0 + 1e-9)

    def extract(idx: np.ndarray) -> Optional[tuple[float, float, np.ndarray]]:
        """Best lattice over the peak subset ``idx``; returns (anchor, spacing, matched idx)."""
        if idx.shape[0] < min_lines:
            return None
        v = velocities[idx]
        diffs = np.abs(v[:, None] - v[None, :])[np.triu_indices(v.shape[0], k=1)]
        diffs = diffs[diffs >= min_spacing]
        if diffs.shape[0] == 0:
            return None
        # Vote in whole-cell buckets, then pool each winner with its grid
        # neighbors: snapping splits one true spacing across adjacent buckets.
        quantized = np.round(diffs / step).astype(int)
        votes: dict[int, int] = {}
        for q in quantized:
            votes[q] = votes.get(q, 0) + 1
        pooled = {q: votes.get(q - 1, 0) + votes[q] + votes.get(q + 1, 0)
                  for q in votes}
        candidates = sorted(pooled, key=pooled.get, reverse=True)[:8]
        anchors = idx[np.argsort(-amplitudes[idx])][:5]

        best = None
        best_key = None
        # Each candidate seeds the fit at its exact whole-cell spacing: peak
        # positions sit on the grid, so pass one keeps only pairs realizing
        # this cell count, and the matched-peak refits recover the sub-cell
        # spacing.  Averaging nearby separations first would blend two combs
        # whose spacings differ by about a cell into a seed fitting neither.
        for q in candidates:
            s0 = q * step
            for a_idx in anchors:
                fit = _fit_lattice(v, float(velocities[a_idx]), s0, tol)
                if fit is None:
                    continue
                anchor, spacing, matched = fit
                count = int(matched.sum())
                if count < min_lines or spacing < min_spacing:
                    continue
                k = np.round((v[matched] - anchor) / spacing)
                slots = int(np.ptp(k)) + 1
                fill = count / slots
                strength = float(amplitudes[idx][matched].sum())
                key = (count, fill, strength)
                if best_key is None or key > best_key:
                    best_key = key
                    best = (anchor, spacing, idx[matched])
        return best

    all_idx = np.arange(velocities.shape[0])
    first = extract(all_idx)
    if first is None:
        return None
    a1, s1, m1 = first
    rest = np.setdiff1d(all_idx, m1)
    second = extract(rest)

    def comb_strength(members: np.ndarray) -> float:
        return float(amplitudes[members].sum())

    combs = [(a1, s1, m1)]
    if second is not None:
        combs.append(second)
        combs.sort(key=lambda c: -comb_strength(c[2]))
    (a1, s1, m1) = combs[0]

    body_idx = m1[np.argmax(amplitudes[m1])]
    body = float(velocities[body_idx])
    stage1_lines = sorted(float(x) for x in velocities[m1])

    stage2_spacing = stage2_offset = None
    stage2_lines: list[float] = []
    matched_total = int(m1.shape[0])
    if len(combs) > 1:
        a2, s2, m2 = combs[1]
        stage2_spacing = s2
        stage2_offset = _wrap(a2 - body, s2)
        stage2_lines = sorted(float(x) for x in velocities[m2])
        matched_total += int(m2.shape[0])

    confidence = min(1.0, matched_total / len(peaks))
    return JemComb(
        body_velocity=body,
        stage1_spacing=float(s1),
        stage2_spacing=stage2_spacing,
        stage2_offset=stage2_offset,
        stage1_lines=stage1_lines,
        stage2_lines=stage2_lines,
        confidence=confidence,
    )


@dataclass
class DopplerGroupStats:
    """Summary statistics of a bin's Doppler peak group."""

    n_peaks: int
    mean_speed: float
    peak_spread: float
    negative_fraction: float
    magnitude_level: float


def doppler_group_stats(peaks: list[SpectralPeak]) -> DopplerGroupStats:
    """Summarize a peak list; an empty list yields all-zero statistics."""
    if not peaks:
        return DopplerGroupStats(0, 0.0, 0.0, 0.0, 0.0)
    v = np.array([p.velocity for p in peaks])
    a = np.array([p.amplitude for p in peaks])
    return DopplerGroupStats(
        n_peaks=len(peaks),
        mean_speed=float(np.mean(np.abs(v))),
        peak_spread=float(np.std(v)),
        negative_fraction=float(np.mean(v < 0)),
        magnitude_level=float(np.mean(a)),
    )
