"""Canned radar configurations and reference scenes.

The main X-band configuration (10.1 GHz, 11.4 kHz PRF, 2048-pulse CPI,
5 MHz) pairs with a 512-bin reference scene: a receding airliner with
two-stage engine combs at bin 286, a staged 6 km wake behind it, a ghost
wake patch ahead, wind clutter, and unit noise floor.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .params import RadarConfig, unambiguous_velocity, velocity_resolution
from .scene import (AircraftSpec, ClutterSpec, JemStageOne, JemStageTwo,
                    Scenario, WakeSegmentSpec, circulation_for_mean_speed)
from .signature import StageName


def whu_radar() -> RadarConfig:
    """Main 10.1 GHz configuration: 30 m bins, 0.083 m/s velocity cells."""
    return RadarConfig(carrier_frequency=10.1e9, prf=11400.0, n_pulses=2048,
                       bandwidth=5e6, n_range_bins=512, peak_power=320.0)


def track16_radar() -> RadarConfig:
    """Slower-PRF variant: 8.7 kHz with a 233 ms coherent interval."""
    return RadarConfig(carrier_frequency=10.1e9, prf=8700.0, n_pulses=2031,
                       bandwidth=5e6, n_range_bins=512, peak_power=320.0)


def comparison_radar() -> RadarConfig:
    """Low-power comparison configuration: 3.75 MHz bandwidth, 40 m bins."""
    return RadarConfig(carrier_frequency=9.8e9, prf=3348.0, n_pulses=256,
                       bandwidth=3.75e6, n_range_bins=512, peak_power=20.0)


# Stage calibration targets for the reference scene: population mean
# line-of-sight speed (m/s), vortex core radius (m), bin SNR target (dB).
_STAGE_MEAN_SPEED = {
    StageName.YOUNG: 6.89,
    StageName.MATURE: 6.93,
    StageName.OLD: 5.53,
    StageName.DECAYING: 5.0,
}

_STAGE_CORE_RADIUS = {
    StageName.YOUNG: 2.0,
    StageName.MATURE: 3.0,
    StageName.OLD: 5.0,
    StageName.DECAYING: 7.0,
}

_STAGE_SNR_DB = {
    StageName.YOUNG: 42.8,
    StageName.MATURE: 43.3,
    StageName.OLD: 41.8,
    StageName.DECAYING: 41.5,
}

_STAGE_SCATTERERS = {
    StageName.YOUNG: 24,
    StageName.MATURE: 28,
    StageName.OLD: 40,
    StageName.DECAYING: 44,
}

_STAGE_INTERMITTENCY = {
    StageName.YOUNG: 0.4,
    StageName.MATURE: 0.2,
    StageName.OLD: 0.4,
    StageName.DECAYING: 0.45,
}


@lru_cache(maxsize=None)
def _cached_circulation(stage: StageName, core_radius: float,
                        mean_speed: float) -> float:
    return circulation_for_mean_speed(stage, core_radius, mean_speed,
                                      n_probe=4000)


def wake_segment_for_stage(stage: StageName, bin_range: tuple[int, int],
                           mean_speed: Optional[float] = None,
                           snr_db: Optional[float] = None,
                           **overrides) -> WakeSegmentSpec:
    """A stage-typical wake segment calibrated to a mean speed and bin SNR."""
    speed = _STAGE_MEAN_SPEED[stage] if mean_speed is None else mean_speed
    level_db = _STAGE_SNR_DB[stage] if snr_db is None else snr_db
    core = overrides.pop("core_radius", _STAGE_CORE_RADIUS[stage])
    fields = dict(
        n_scatterers=_STAGE_SCATTERERS[stage],
        amplitude_level=10.0 ** (level_db / 20.0),
        intermittency=_STAGE_INTERMITTENCY[stage],
    )
    fields.update(overrides)
    return WakeSegmentSpec(bin_range=bin_range, stage=stage,
                           circulation=_cached_circulation(stage, core, speed),
                           core_radius=core, **fields)


def reference_aircraft(radar: Optional[RadarConfig] = None) -> AircraftSpec:
    """The receding airliner: ~140 m/s away, engine combs on, SNR 52.35 dB.

    The true velocity is chosen so its folded value in the main
    configuration lands exactly on a Doppler grid cell.
    """
    grid = whu_radar() if radar is None else radar
    v_true = 352 * velocity_resolution(grid) - 2.0 * unambiguous_velocity(grid)
    return AircraftSpec(
        range_bin=286,
        radial_velocity_true=v_true,
        snr_target=52.35,
        jem_stage1=JemStageOne(line_spacing=14.4, n_lines_each_side=5,
                               relative_amplitude=0.27),
        jem_stage2=JemStageTwo(line_spacing=14.5, series_offset=2.9,
                               relative_amplitude=0.17),
        wingspan=34.32,
    )


def reference_scenario(n_frames: int = 20, seed: int = 2021,
                       with_ghost: bool = True,
                       radar: Optional[RadarConfig] = None) -> Scenario:
    """The 6 km reference scene behind an airliner at bin 286.

    Stage extents follow the distance thresholds for a 34.32 m wingspan, so
    the synthesized stage of every bin agrees with its distance-derived
    label: one young bin at 30 m, mature to 10 wingspans, old to 100, and
    decaying out to 6 km.  A ghost wake patch sits ahead of the aircraft.
    """
    if radar is None:
        radar = whu_radar()
    wake_segments = (
        wake_segment_for_stage(StageName.DECAYING, (86, 171)),
        wake_segment_for_stage(StageName.OLD, (172, 274)),
        wake_segment_for_stage(StageName.MATURE, (275, 284)),
        wake_segment_for_stage(StageName.YOUNG, (285, 285)),
    )
    ghost_segments = ()
    if with_ghost:
        ghost_segments = (
            wake_segment_for_stage(StageName.OLD, (400, 430), mean_speed=4.0,
                                   snr_db=41.85, core_radius=6.0),
        )
    return Scenario(
        radar=radar,
        aircraft=reference_aircraft(),
        wake_segments=wake_segments,
        ghost_segments=ghost_segments,
        clutter=ClutterSpec(half_width=1.78, power_db=20.0),
        noise_floor=1.0,
        n_frames=n_frames,
        frame_interval=0.5,
        seed=seed,
    )


def noise_scenario(seed: int = 0, n_frames: int = 1,
                   radar: Optional[RadarConfig] = None) -> Scenario:
    """Noise-only scene: no aircraft, no wake, no clutter."""
    return Scenario(radar=whu_radar() if radar is None else radar,
                    aircraft=None, clutter=None, n_frames=n_frames, seed=seed)
