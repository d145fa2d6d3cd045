"""Synthetic pulse-Doppler scenes: an aircraft line with engine-modulation
combs, trailing vortex scatterer populations, ground clutter, and noise.

Synthesis is deterministic.  Every (seed, frame, bin) triple owns an
independent counter-derived random substream, so frames come out bit-identical
no matter how the work is ordered or parallelized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .params import (RadarConfig, range_resolution, velocity_resolution,
                     wavelength)
from .signature import StageName

SLOPE_CHOICES = ("auto", "positive", "mixed", "negative")

# Substream tags keep the per-purpose random streams disjoint.
_NOISE_STREAM = 0
_WAKE_STREAM = 1
_GHOST_STREAM = 2
_PHASE_STREAM = 3

_N_CLUTTER_LINES = 4

# Radius of the peak tangential speed in core radii.
_PEAK_RADIUS_FACTOR = 1.1209066893888245


@dataclass(frozen=True)
class JemStageOne:
    """First-stage engine comb: lines at body +/- k * spacing."""

    line_spacing: float = 14.4
    n_lines_each_side: int = 5
    relative_amplitude: float = 0.0

    def __post_init__(self):
        if not self.line_spacing > 0:
            raise DomainError(f"line_spacing must be positive, got {self.line_spacing}")
        if self.n_lines_each_side < 0:
            raise DomainError(f"n_lines_each_side must be >= 0, got {self.n_lines_each_side}")
        if not 0.0 <= self.relative_amplitude <= 1.0:
            raise DomainError(
                f"relative_amplitude must be in [0, 1], got {self.relative_amplitude}")


@dataclass(frozen=True)
class JemStageTwo:
    """Second-stage comb, offset from the body line and interleaved with stage one."""

    line_spacing: float = 14.5
    series_offset: float = 2.9
    relative_amplitude: float = 0.0

    def __post_init__(self):
        if not self.line_spacing > 0:
            raise DomainError(f"line_spacing must be positive, got {self.line_spacing}")
        if not 0.0 <= self.relative_amplitude <= 1.0:
            raise DomainError(
                f"relative_amplitude must be in [0, 1], got {self.relative_amplitude}")


@dataclass(frozen=True)
class AircraftSpec:
    """Point target with a body Doppler line and optional engine combs.

    ``radial_velocity_true`` is the unfolded radial speed, negative when the
    aircraft recedes.  ``snr_target`` calibrates the bin's total power against
    the scenario noise floor.
    """

    range_bin: int
    radial_velocity_true: float
    snr_target: float
    jem_stage1: JemStageOne = field(default_factory=JemStageOne)
    jem_stage2: JemStageTwo = field(default_factory=JemStageTwo)
    wingspan: float = 34.32

    def __post_init__(self):
        if self.range_bin < 0:
            raise DomainError(f"range_bin must be >= 0, got {self.range_bin}")
        if not self.wingspan > 0:
            raise DomainError(f"wingspan must be positive, got {self.wingspan}")
        if self.jem_stage2.relative_amplitude > self.jem_stage1.relative_amplitude:
            raise DomainError(
                "stage-2 relative amplitude must not exceed stage 1 "
                f"({self.jem_stage2.relative_amplitude} > {self.jem_stage1.relative_amplitude})")


@dataclass(frozen=True)
class WakeSegmentSpec:
    """A run of range bins filled with vortex scatterers of one age stage.

    ``amplitude_level`` sets the per-bin root power in units of the scenario
    noise amplitude, so a bin's mean signal-to-noise power ratio comes out as
    amplitude_level squared.  ``intermittency`` is the fraction of the
    interval a scatterer spends gated off: 0 keeps every scatterer on for the
    whole interval.  ``slope_sign`` may be left "auto" to follow the stage.
    """

    bin_range: tuple[int, int]
    stage: StageName
    circulation: float
    core_radius: float
    n_scatterers: int = 12
    amplitude_level: float = 100.0
    slope_sign: str = "auto"
    intermittency: float = 0.3

    def __post_init__(self):
        lo, hi = self.bin_range
        if not (0 <= lo <= hi):
            raise DomainError(f"bin_range must satisfy 0 <= lo <= hi, got {self.bin_range}")
        if not self.circulation > 0:
            raise DomainError(f"circulation must be positive, got {self.circulation}")
        if not self.core_radius > 0:
            raise DomainError(f"core_radius must be positive, got {self.core_radius}")
        if self.n_scatterers < 1:
            raise DomainError(f"n_scatterers must be >= 1, got {self.n_scatterers}")
        if not self.amplitude_level > 0:
            raise DomainError(f"amplitude_level must be positive, got {self.amplitude_level}")
        if self.slope_sign not in SLOPE_CHOICES:
            raise DomainError(f"slope_sign must be one of {SLOPE_CHOICES}, got {self.slope_sign!r}")
        if not 0.0 <= self.intermittency <= 1.0:
            raise DomainError(f"intermittency must be in [0, 1], got {self.intermittency}")

    @property
    def resolved_slope_sign(self) -> str:
        if self.slope_sign != "auto":
            return self.slope_sign
        if self.stage is StageName.YOUNG:
            return "positive"
        if self.stage is StageName.MATURE:
            return "mixed"
        return "negative"


@dataclass(frozen=True)
class ClutterSpec:
    """Stationary clutter: a few lines inside +/- half_width meters/second."""

    half_width: float = 1.78
    power_db: float = 20.0

    def __post_init__(self):
        if self.half_width < 0:
            raise DomainError(f"half_width must be >= 0, got {self.half_width}")


@dataclass(frozen=True)
class Scenario:
    """Complete description of a synthetic multi-frame scene."""

    radar: RadarConfig
    aircraft: Optional[AircraftSpec]
    wake_segments: tuple[WakeSegmentSpec, ...] = ()
    ghost_segments: tuple[WakeSegmentSpec, ...] = ()
    clutter: Optional[ClutterSpec] = field(default_factory=ClutterSpec)
    noise_floor: float = 1.0
    n_frames: int = 1
    frame_interval: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "wake_segments", tuple(self.wake_segments))
        object.__setattr__(self, "ghost_segments", tuple(self.ghost_segments))
        if not self.noise_floor > 0:
            raise DomainError(f"noise_floor must be positive, got {self.noise_floor}")
        if self.n_frames < 1:
            raise DomainError(f"n_frames must be >= 1, got {self.n_frames}")
        if not self.frame_interval > 0:
            raise DomainError(f"frame_interval must be positive, got {self.frame_interval}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if (self.wake_segments or self.ghost_segments) and self.aircraft is None:
            raise DomainError("wake and ghost segments need an aircraft to trail")
        if self.aircraft is not None:
            ac = self.aircraft.range_bin
            for seg in self.wake_segments:
                if seg.bin_range[1] >= ac:
                    raise DomainError(
                        f"wake segment {seg.bin_range} must lie strictly behind bin {ac}")
            for seg in self.ghost_segments:
                if seg.bin_range[0] <= ac:
                    raise DomainError(
                        f"ghost segment {seg.bin_range} must lie strictly ahead of bin {ac}")


@dataclass
class CpiFrame:
    """One coherent interval of the whole range window.

    ``iq`` has shape (n_range_bins, n_pulses).  ``aircraft_off_window`` is
    set when the scenario's aircraft has advanced past the range window and
    was therefore left out of this frame.
    """

    iq: np.ndarray
    frame_index: int
    timestamp: float
    aircraft_off_window: bool = False

    def __post_init__(self):
        if not np.isfinite(self.iq).all():
            raise DomainError("frame contains non-finite samples")


@dataclass(frozen=True)
class WakeScatterer:
    """One reflecting filament: a gated, slowly drifting Doppler line."""

    velocity: float
    amplitude: float
    active_interval: tuple[int, int]
    drift: float


# Per-stage sampling shape: where on the vortex the filaments sit (in core
# radii), how the line-of-sight projection is drawn for each velocity sign,
# what fraction of filaments recede, how much the receding side is damped,
# and how steeply amplitudes fall off.
@dataclass(frozen=True)
class _StageShape:
    radius: tuple[float, float]
    proj_pos: tuple[float, float]
    proj_neg: tuple[float, float]
    neg_fraction: float
    neg_amp_factor: float
    amp_decay: float


_STAGE_SHAPES = {
    StageName.YOUNG: _StageShape((0.6, 1.3), (0.55, 0.95), (0.55, 0.95), 0.45, 0.35, 0.985),
    StageName.MATURE: _StageShape((0.7, 1.5), (0.6, 1.0), (0.6, 1.0), 0.4, 0.3, 0.97),
    StageName.OLD: _StageShape((0.5, 2.5), (0.3, 1.0), (0.6, 1.0), 0.35, 0.25, 0.995),
    StageName.DECAYING: _StageShape((0.5, 3.0), (0.25, 1.0), (0.6, 1.0), 0.35, 0.25, 0.997),
}

_DRIFT_RANGE = (1.0, 2.0)


def _stream(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)))


def _stream_key(seed: int, *path: int) -> int:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def lamb_oseen_tangential(r, circulation: float, core_radius: float):
    """Tangential speed of a Lamb-Oseen vortex at radius r.

    v(r) = Gamma / (2 pi r) * (1 - exp(-r^2 / rc^2)), with the removable
    singularity at r = 0 evaluated as 0.
    """
    if not core_radius > 0:
        raise DomainError(f"core_radius must be positive, got {core_radius}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("radius must be >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = circulation / (2.0 * np.pi * r_arr) * (1.0 - np.exp(-(r_arr / core_radius) ** 2))
    v = np.where(r_arr == 0, 0.0, v)
    return float(v) if np.ndim(r) == 0 else v


def peak_tangential_speed(circulation: float, core_radius: float) -> float:
    """Largest tangential speed of the vortex profile."""
    return float(lamb_oseen_tangential(_PEAK_RADIUS_FACTOR * core_radius,
                                       circulation, core_radius))


def wake_doppler_population(spec: WakeSegmentSpec, seed: int,
                            n_pulses: int = 2048,
                            n_subintervals: int = 8) -> list[WakeScatterer]:
    """Draw the scatterer population for one bin of a wake segment.

    Radii are sampled across the roll-up according to the stage, tangential
    speeds projected onto the line of sight, and every scatterer is assigned
    a contiguous on-interval covering (1 - intermittency) of the interval
    plus a per-interval drift whose sign follows the segment's slope sense.
    Line-of-sight speeds stay within 1.2 times the peak tangential speed.
    """
    rng = _stream(seed)
    shape = _STAGE_SHAPES[spec.stage]
    n = spec.n_scatterers

    # Stratified radii: one jittered draw per quantile slot, shuffled so the
    # slot order is independent of the amplitude ordering.  Even coverage of
    # the roll-up keeps the Doppler band filled without clumping.
    slots = rng.permutation(n)
    u = (slots + rng.random(n)) / n
    lo, hi = shape.radius
    radius = (lo + (hi - lo) * u) * spec.core_radius
    tangential = lamb_oseen_tangential(radius, spec.circulation, spec.core_radius)
    negative = rng.random(n) < shape.neg_fraction
    # The strongest filament always projects toward the radar, so a staged
    # bin's dominant line sits on the approach side.
    negative[0] = False
    proj_pos = rng.uniform(*shape.proj_pos, n)
    proj_neg = rng.uniform(*shape.proj_neg, n)
    velocity = np.where(negative, -proj_neg, proj_pos) * tangential
    cap = 1.2 * peak_tangential_speed(spec.circulation, spec.core_radius)
    velocity = np.clip(velocity, -cap, cap)

    amplitude = shape.amp_decay ** np.arange(n)
    amplitude = np.where(negative, amplitude * shape.neg_amp_factor, amplitude)

    n_on = max(1, round((1.0 - spec.intermittency) * n_subintervals))
    n_on = min(n_on, n_subintervals)
    start_sub = rng.integers(0, n_subintervals - n_on + 1, n)

    sense = spec.resolved_slope_sign
    if sense == "positive":
        drift_sign = np.ones(n)
    elif sense == "negative":
        drift_sign = -np.ones(n)
    else:
        drift_sign = rng.choice([-1.0, 1.0], n)
    drift = drift_sign * rng.uniform(*_DRIFT_RANGE, n)
    # The leading filament drifts at the band minimum, keeping the dominant
    # line concentrated in one or two Doppler cells.
    drift[0] = drift_sign[0] * _DRIFT_RANGE[0]

    population = []
    for i in range(n):
        n0 = int(start_sub[i]) * n_pulses // n_subintervals
        n1 = (int(start_sub[i]) + n_on) * n_pulses // n_subintervals
        population.append(WakeScatterer(
            velocity=float(velocity[i]),
            amplitude=float(amplitude[i]),
            active_interval=(n0, n1),
            drift=float(drift[i]),
        ))
    return population


def circulation_for_mean_speed(stage: StageName, core_radius: float,
                               target_mean_speed: float,
                               probe_seed: int = 7, n_probe: int = 20000) -> float:
    """Circulation making the population's mean line-of-sight speed hit a target.

    The mean speed is linear in circulation for a fixed sampling shape, so a
    single large probe draw at unit circulation fixes the scale factor.
    """
    if not target_mean_speed > 0:
        raise DomainError(f"target_mean_speed must be positive, got {target_mean_speed}")
    probe = WakeSegmentSpec(bin_range=(0, 0), stage=stage, circulation=1.0,
                            core_radius=core_radius, n_scatterers=n_probe)
    pop = wake_doppler_population(probe, probe_seed)
    mean_unit = float(np.mean([abs(s.velocity) for s in pop]))
    return target_mean_speed / mean_unit


def aircraft_pulse_series(spec: AircraftSpec, config: RadarConfig,
                          noise_floor: float = 1.0) -> np.ndarray:
    """Pulse series of the aircraft bin: body line plus engine combs.

    Lines are synthesized at their true velocities; sampling at the PRF folds
    anything outside the unambiguous span on its own.  The series is scaled
    so its total power meets the configured signal-to-noise target exactly:
    sum |x|^2 = n_pulses * noise_floor * 10^(snr_target / 10).
    """
    if not noise_floor > 0:
        raise DomainError(f"noise_floor must be positive, got {noise_floor}")
    body = spec.radial_velocity_true
    velocities = [body]
    amplitudes = [1.0]
    s1 = spec.jem_stage1
    if s1.relative_amplitude > 0:
        for k in range(1, s1.n_lines_each_side + 1):
            velocities += [body - k * s1.line_spacing, body + k * s1.line_spacing]
            amplitudes += [s1.relative_amplitude] * 2
    s2 = spec.jem_stage2
    if s2.relative_amplitude > 0:
        center = body + s2.series_offset
        for m in range(-s1.n_lines_each_side, s1.n_lines_each_side + 1):
            velocities.append(center + m * s2.line_spacing)
            amplitudes.append(s2.relative_amplitude)

    lam = wavelength(config)
    t = np.arange(config.n_pulses) / config.prf
    # Deterministic golden-angle phases keep the crest factor reasonable
    # without introducing a random stream.
    phases = 2.0 * np.pi * ((0.6180339887498949 * np.arange(len(velocities))) % 1.0)
    x = np.zeros(config.n_pulses, dtype=np.complex128)
    for v, a, ph in zip(velocities, amplitudes, phases):
        x += a * np.exp(1j * (2.0 * np.pi * (2.0 * v / lam) * t + ph))

    target = config.n_pulses * noise_floor * 10.0 ** (spec.snr_target / 10.0)
    x *= math.sqrt(target / float(np.sum(np.abs(x) ** 2)))
    return x


def wake_bin_series(spec: WakeSegmentSpec, config: RadarConfig,
                    population_seed: int, phase_seed: Optional[int] = None,
                    noise_floor: float = 1.0) -> np.ndarray:
    """Pulse series for one bin of a wake segment.

    Each scatterer contributes a gated linear chirp.  The series is scaled so
    the bin's total power is amplitude_level^2 times the noise floor.
    """
    if not noise_floor > 0:
        raise DomainError(f"noise_floor must be positive, got {noise_floor}")
    population = wake_doppler_population(spec, population_seed, config.n_pulses)
    phase_rng = _stream(phase_seed if phase_seed is not None else population_seed)
    phases = phase_rng.uniform(0.0, 2.0 * np.pi, len(population))

    lam = wavelength(config)
    cpi = config.cpi_seconds
    vres = velocity_resolution(config)
    t = np.arange(config.n_pulses) / config.prf
    x = np.zeros(config.n_pulses, dtype=np.complex128)
    for scatterer, ph in zip(population, phases):
        n0, n1 = scatterer.active_interval
        tt = t[n0:n1]
        drift_speed = scatterer.drift * vres
        phase = 2.0 * np.pi * (
            (2.0 * scatterer.velocity / lam) * tt
            + (2.0 * drift_speed / lam) * tt ** 2 / (2.0 * cpi))
        x[n0:n1] += scatterer.amplitude * np.exp(1j * (phase + ph))

    target = config.n_pulses * noise_floor * spec.amplitude_level ** 2
    x *= math.sqrt(target / float(np.sum(np.abs(x) ** 2)))
    return x


def _clutter_lines(rng: np.random.Generator, clutter: ClutterSpec,
                   noise_floor: float, lam: float, vres: float,
                   t: np.ndarray) -> np.ndarray:
    # Lines are snapped to the Doppler grid so their energy stays confined
    # to in-notch cells even under a rectangular analysis window.
    line_power = noise_floor * 10.0 ** (clutter.power_db / 10.0) / _N_CLUTTER_LINES
    vels = rng.uniform(-clutter.half_width, clutter.half_width, _N_CLUTTER_LINES)
    vels = np.rint(vels / vres) * vres
    phases = rng.uniform(0.0, 2.0 * np.pi, _N_CLUTTER_LINES)
    args = 2.0 * np.pi * (2.0 / lam) * np.outer(vels, t) + phases[:, None]
    return math.sqrt(line_power) * np.exp(1j * args).sum(axis=0)


def synthesize_frame(scenario: Scenario, frame_index: int) -> CpiFrame:
    """Render one coherent interval of the scenario.

    The aircraft bin advances by radial_velocity_true * frame_interval worth
    of range per frame and drags its wake and ghost segments along.  An
    aircraft that has left the range window is omitted and flagged; the frame
    itself is still produced.
    """
    if not 0 <= frame_index < scenario.n_frames:
        raise DomainError(
            f"frame_index {frame_index} outside [0, {scenario.n_frames})")
    cfg = scenario.radar
    n_pulses, n_bins = cfg.n_pulses, cfg.n_range_bins
    lam = wavelength(cfg)
    rres = range_resolution(cfg.bandwidth)
    vres = velocity_resolution(cfg)
    t = np.arange(n_pulses) / cfg.prf
    t_frame = frame_index * scenario.frame_interval

    iq = np.empty((n_bins, n_pulses), dtype=np.complex128)
    noise_amp = math.sqrt(scenario.noise_floor / 2.0)
    for b in range(n_bins):
        rng = _stream(scenario.seed, _NOISE_STREAM, frame_index, b)
        gauss = rng.standard_normal(2 * n_pulses)
        iq[b] = noise_amp * (gauss[:n_pulses] + 1j * gauss[n_pulses:])
        if scenario.clutter is not None:
            iq[b] += _clutter_lines(rng, scenario.clutter, scenario.noise_floor,
                                    lam, vres, t)

    shift = 0
    off_window = False
    if scenario.aircraft is not None:
        ac = scenario.aircraft
        shift = int(round(-ac.radial_velocity_true * t_frame / rres))
        ac_bin = ac.range_bin + shift
        if 0 <= ac_bin < n_bins:
            iq[ac_bin] += aircraft_pulse_series(ac, cfg, scenario.noise_floor)
        else:
            off_window = True

    for tag, segments in ((_WAKE_STREAM, scenario.wake_segments),
                          (_GHOST_STREAM, scenario.ghost_segments)):
        for si, seg in enumerate(segments):
            lo, hi = seg.bin_range
            for rel in range(hi - lo + 1):
                b = lo + rel + shift
                if not 0 <= b < n_bins:
                    continue
                pop_seed = _stream_key(scenario.seed, tag, si, rel)
                phase_seed = _stream_key(scenario.seed, tag, si, rel,
                                         _PHASE_STREAM, frame_index)
                iq[b] += wake_bin_series(seg, cfg, pop_seed, phase_seed,
                                         scenario.noise_floor)

    return CpiFrame(iq=iq, frame_index=frame_index, timestamp=t_frame,
                    aircraft_off_window=off_window)


def synthesize_frames(scenario: Scenario) -> list[CpiFrame]:
    """All frames of the scenario, in order."""
    return [synthesize_frame(scenario, k) for k in range(scenario.n_frames)]
