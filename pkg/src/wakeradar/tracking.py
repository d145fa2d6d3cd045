"""Single-target track state machine over per-frame scan results.

The aircraft detection is associated frame to frame by nearest-neighbor
gating on a constant-velocity prediction.  Because the measured Doppler
velocity is folded, the velocity used for prediction is unfolded by picking
the alias candidate closest to the range rate implied by the observed bin
drift.  The trailing wake extent rides along with the track; anything ahead
of the aircraft is reported separately and never associated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .detect import DetectionClass, FrameScan
from .errors import DomainError, NoStateError

_MAX_ALIAS_ORDER = 8


class TrackStatus(str, Enum):
    TENTATIVE = "Tentative"
    CONFIRMED = "Confirmed"
    COASTING = "Coasting"
    DROPPED = "Dropped"


@dataclass(frozen=True)
class TrackFrame:
    """One frame of track history.

    aircraft_velocity is the unfolded radial velocity, positive toward the
    radar; nan when the frame has no association.
    """

    frame_index: int
    timestamp: float
    aircraft_bin: Optional[int]
    aircraft_velocity: float
    wake_extent: Optional[tuple[int, int]]
    wake_length_m: float
    status: TrackStatus


@dataclass(frozen=True)
class TrackerConfig:
    range_resolution: float
    unambiguous_velocity: float
    gate_bins: int = 5
    coast_limit: int = 3
    confirm_hits: int = 3

    def __post_init__(self):
        if not self.range_resolution > 0:
            raise DomainError(
                f"range_resolution must be positive, got {self.range_resolution}")
        if not self.unambiguous_velocity > 0:
            raise DomainError(
                f"unambiguous_velocity must be positive, got {self.unambiguous_velocity}")
        if self.gate_bins < 0:
            raise DomainError(f"gate_bins must be >= 0, got {self.gate_bins}")
        if self.coast_limit < 0:
            raise DomainError(f"coast_limit must be >= 0, got {self.coast_limit}")
        if self.confirm_hits < 1:
            raise DomainError(f"confirm_hits must be >= 1, got {self.confirm_hits}")


@dataclass
class Track:
    config: TrackerConfig
    frames: list[TrackFrame] = field(default_factory=list)
    status: TrackStatus = TrackStatus.TENTATIVE
    consecutive_hits: int = 0
    consecutive_misses: int = 0
    ever_confirmed: bool = False

    def last_association(self) -> Optional[TrackFrame]:
        for frame in reversed(self.frames):
            if frame.aircraft_bin is not None:
                return frame
        return None


def new_track(config: TrackerConfig) -> Track:
    return Track(config=config)


def predict(track: Track, dt: float) -> int:
    """Constant-velocity prediction of the aircraft bin after dt seconds."""
    if dt < 0:
        raise DomainError(f"dt must be >= 0, got {dt}")
    last = track.last_association()
    if last is None:
        raise NoStateError("track has no aircraft association to predict from")
    # Approaching targets (positive velocity) move to smaller range bins.
    shift = round(-last.aircraft_velocity * dt / track.config.range_resolution)
    return last.aircraft_bin + int(shift)


def unfold_velocity_by_drift(folded: float, drift_velocity: float,
                             unambiguous_velocity: float) -> float:
    """Pick the alias of a folded velocity closest to a drift-implied one.

    drift_velocity is the radial velocity inferred from range-bin motion
    (positive toward the radar).  Ties between alias orders keep the lower
    order.
    """
    span = 2.0 * unambiguous_velocity
    best = folded
    best_err = abs(folded - drift_velocity)
    for k in range(1, _MAX_ALIAS_ORDER + 1):
        for candidate in (folded + k * span, folded - k * span):
            err = abs(candidate - drift_velocity)
            if err < best_err:
                best, best_err = candidate, err
    return best


def _aircraft_velocity_in(scan: FrameScan) -> float:
    for det in scan.detections:
        if det.category is DetectionClass.AIRCRAFT and det.bin_index == scan.aircraft_bin:
            return det.dominant_velocity
    return float("nan")


def update(track: Track, scan: FrameScan, dt: float,
           gate: Optional[int] = None) -> Track:
    """Advance the track by one frame of scan results.

    Associates the scan's aircraft detection when it falls within the gate
    of the prediction; otherwise coasts, and drops once the coast limit is
    exceeded.  The wake extent is copied only on association and only when
    it lies strictly behind the associated bin.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    cfg = track.config
    if gate is None:
        gate = cfg.gate_bins
    timestamp = track.frames[-1].timestamp + dt if track.frames else 0.0

    if track.status is TrackStatus.DROPPED:
        track.frames.append(TrackFrame(scan.frame_index, timestamp, None,
                                       float("nan"), None, 0.0,
                                       TrackStatus.DROPPED))
        return track

    prior = track.last_association()
    candidate_bin = scan.aircraft_bin
    associated = False
    if candidate_bin is not None:
        if prior is None:
            associated = True
        else:
            associated = abs(candidate_bin - predict(track, dt)) <= gate

    if associated:
        folded = _aircraft_velocity_in(scan)
        if prior is None:
            velocity = folded
        else:
            elapsed = timestamp - prior.timestamp
            drift_velocity = -((candidate_bin - prior.aircraft_bin)
                               * cfg.range_resolution / elapsed)
            velocity = unfold_velocity_by_drift(folded, drift_velocity,
                                                cfg.unambiguous_velocity)
        track.consecutive_hits += 1
        track.consecutive_misses = 0
        if track.consecutive_hits >= cfg.confirm_hits or track.ever_confirmed:
            track.status = TrackStatus.CONFIRMED
            track.ever_confirmed = True
        else:
            track.status = TrackStatus.TENTATIVE

        wake_extent = None
        wake_length = 0.0
        if scan.wake_extent is not None and scan.wake_extent[1] < candidate_bin:
            wake_extent = scan.wake_extent
            wake_length = (wake_extent[1] - wake_extent[0] + 1) * cfg.range_resolution
        track.frames.append(TrackFrame(scan.frame_index, timestamp,
                                       candidate_bin, velocity, wake_extent,
                                       wake_length, track.status))
        return track

    # Miss. Misses only start counting once something has been tracked.
    if prior is not None:
        track.consecutive_hits = 0
        track.consecutive_misses += 1
        if track.consecutive_misses > cfg.coast_limit:
            track.status = TrackStatus.DROPPED
        else:
            track.status = TrackStatus.COASTING
    track.frames.append(TrackFrame(scan.frame_index, timestamp, None,
                                   float("nan"), None, 0.0, track.status))
    return track


def ahead_report(track: Track, scan: FrameScan) -> list:
    """Wake/Other detections strictly ahead of the currently associated bin.

    These are candidate ghosts; they are reported and never merged into the
    track.  Returns an empty list when the current frame has no association.
    """
    if not track.frames or track.frames[-1].aircraft_bin is None:
        return []
    aircraft_bin = track.frames[-1].aircraft_bin
    return [det for det in scan.detections
            if det.category in (DetectionClass.WAKE, DetectionClass.OTHER)
            and det.bin_index > aircraft_bin]


def run_track(scans: list[FrameScan], config: TrackerConfig,
              frame_interval: float) -> Track:
    """Fold a sequence of frame scans into one track."""
    if not frame_interval > 0:
        raise DomainError(f"frame_interval must be positive, got {frame_interval}")
    track = new_track(config)
    for scan in scans:
        update(track, scan, frame_interval)
    return track
