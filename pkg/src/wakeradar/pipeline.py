"""End-to-end composition: frames in, enriched frame scans and tracks out.

The detector itself is velocity-and-contrast based; this module wires in the
two signature analyses that need broader context: engine-comb confirmation
for aircraft bins whose folded speed looks slow, and distance-based stage
labels for wake bins once the aircraft bin is known.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from .detect import DetectionClass, DetectorConfig, FrameScan, scan_frame
from .dsp import range_doppler_map
from .errors import DomainError
from .params import (RadarConfig, range_resolution, unambiguous_velocity)
from .scene import CpiFrame, Scenario, synthesize_frame
from .signature import jem_comb_estimate, stage_from_distance
from .tracking import Track, TrackerConfig, new_track, update

FrameLike = Union[CpiFrame, np.ndarray]


def jem_provider_for(config: DetectorConfig):
    """Engine-comb check used to rescue slow-looking aircraft bins.

    Only combs at least ``jem_min_spacing`` wide count as engine evidence;
    wake Doppler groups form tighter accidental lattices.
    """
    def provider(spectrum, peaks):
        try:
            comb = jem_comb_estimate(spectrum, min_lines=config.jem_min_lines,
                                     min_spacing=config.jem_min_spacing)
        except DomainError:
            return None
        return comb
    return provider


def _enrich_stages(scan: FrameScan, rres: float, wingspan: float) -> None:
    if scan.aircraft_bin is None:
        return
    for det in scan.detections:
        if det.category is DetectionClass.WAKE and det.bin_index < scan.aircraft_bin:
            x = (scan.aircraft_bin - det.bin_index) * rres
            det.stage = stage_from_distance(x, wingspan)


def scan_frames(frames, radar: RadarConfig,
                config: Optional[DetectorConfig] = None,
                use_jem: bool = True) -> list[FrameScan]:
    """Run detection over IQ frames (CpiFrame values or bare arrays).

    Wake detections behind the detected aircraft are labeled with their
    distance-derived stage.
    """
    if config is None:
        config = DetectorConfig()
    provider = jem_provider_for(config) if use_jem else None
    rres = range_resolution(radar.bandwidth)
    scans = []
    for k, frame in enumerate(frames):
        iq = getattr(frame, "iq", frame)
        index = getattr(frame, "frame_index", k)
        rd = range_doppler_map(iq, radar, frame_index=index)
        scan = scan_frame(rd, config, radar=radar, jem_provider=provider)
        _enrich_stages(scan, rres, config.assumed_wingspan)
        scans.append(scan)
    return scans


def scan_scenario(scenario: Scenario,
                  config: Optional[DetectorConfig] = None,
                  n_frames: Optional[int] = None,
                  use_jem: bool = True) -> list[FrameScan]:
    """Synthesize and scan a scenario, frame by frame (bounded memory)."""
    count = scenario.n_frames if n_frames is None else min(n_frames, scenario.n_frames)
    if config is None:
        config = DetectorConfig()
    provider = jem_provider_for(config) if use_jem else None
    rres = range_resolution(scenario.radar.bandwidth)
    scans = []
    for k in range(count):
        frame = synthesize_frame(scenario, k)
        rd = range_doppler_map(frame.iq, scenario.radar, frame_index=k)
        scan = scan_frame(rd, config, radar=scenario.radar, jem_provider=provider)
        _enrich_stages(scan, rres, config.assumed_wingspan)
        scans.append(scan)
    return scans


def track_scans(scans: list[FrameScan], radar: RadarConfig,
                frame_interval: float, gate_bins: int = 5,
                coast_limit: int = 3, confirm_hits: int = 3) -> Track:
    """Fold frame scans into an aircraft-plus-wake track."""
    cfg = TrackerConfig(range_resolution=range_resolution(radar.bandwidth),
                        unambiguous_velocity=unambiguous_velocity(radar),
                        gate_bins=gate_bins, coast_limit=coast_limit,
                        confirm_hits=confirm_hits)
    track = new_track(cfg)
    for scan in scans:
        update(track, scan, frame_interval)
    return track


def flatten_detections(scans: list[FrameScan]):
    """(frame_index, Detection) pairs across frame scans, for emission."""
    for scan in scans:
        for det in scan.detections:
            yield scan.frame_index, det


def class_counts(scans: list[FrameScan]) -> dict[str, int]:
    """Total detections per class over all frames."""
    counts = {cls.value: 0 for cls in DetectionClass}
    for scan in scans:
        for det in scan.detections:
            counts[det.category.value] += 1
    return counts
