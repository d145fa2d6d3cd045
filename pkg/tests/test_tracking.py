"""Track state machine, alias unfolding, and ahead-of-target reporting."""

import math

import numpy as np
import pytest

from wakeradar.detect import Detection, DetectionClass, FrameScan
from wakeradar.errors import DomainError, NoStateError
from wakeradar.tracking import (Track, TrackerConfig, TrackStatus, ahead_report,
                                new_track, predict, run_track,
                                unfold_velocity_by_drift, update)

RRES = 30.0
VUA = 80.0


def mk_det(bin_index, category, velocity=5.0):
    return Detection(bin_index=bin_index, range_m=bin_index * RRES,
                     category=category, snr_db=30.0, dscr_db=12.0,
                     dominant_velocity=velocity, doppler_peaks=[])


def mk_scan(frame_index, aircraft_bin=None, folded=29.0, wake_extent=None,
            extras=()):
    dets = list(extras)
    if aircraft_bin is not None:
        dets.append(mk_det(aircraft_bin, DetectionClass.AIRCRAFT, folded))
    return FrameScan(frame_index=frame_index, detections=dets,
                     aircraft_bin=aircraft_bin, wake_extent=wake_extent,
                     noise_power=1.0)


def cfg(**overrides):
    base = dict(range_resolution=RRES, unambiguous_velocity=VUA,
                gate_bins=5, coast_limit=3, confirm_hits=3)
    base.update(overrides)
    return TrackerConfig(**base)


class TestUnfold:
    def brute(self, folded, drift, vua, max_order=8):
        span = 2.0 * vua
        candidates = [(abs(folded + k * span - drift), abs(k), folded + k * span)
                      for k in range(-max_order, max_order + 1)]
        return min(candidates)[2]

    def test_against_brute_candidate_list(self):
        rng = np.random.default_rng(414)
        for _ in range(2000):
            vua = rng.uniform(10.0, 120.0)
            folded = rng.uniform(-vua, vua)
            drift = rng.uniform(-1000.0, 1000.0)
            got = unfold_velocity_by_drift(folded, drift, vua)
            assert got == self.brute(folded, drift, vua)

    def test_receding_airliner_alias(self):
        # Folded +29 with a drift toward larger bins unfolds one span down.
        assert unfold_velocity_by_drift(29.0, -120.0, VUA) == 29.0 - 2 * VUA

    def test_tie_keeps_the_lower_order(self):
        # drift sits exactly between the k=0 and k=1 candidates
        assert unfold_velocity_by_drift(10.0, 90.0, VUA) == 10.0

    def test_consistent_drift_changes_nothing(self):
        assert unfold_velocity_by_drift(-12.5, -12.5, VUA) == -12.5


class TestPredict:
    def track_at(self, bin_index, velocity):
        track = new_track(cfg())
        scan = mk_scan(0, aircraft_bin=bin_index, folded=velocity)
        return update(track, scan, 0.5)

    def test_receding_target_moves_to_larger_bins(self):
        track = self.track_at(100, -150.0)
        assert predict(track, 1.0) == 105

    def test_approaching_target_moves_to_smaller_bins(self):
        track = self.track_at(100, 150.0)
        assert predict(track, 1.0) == 95

    def test_sub_bin_motion_rounds(self):
        track = self.track_at(100, -140.0)
        # 70 m in half a second is 2.33 bins
        assert predict(track, 0.5) == 102

    def test_zero_dt_is_identity(self):
        assert predict(self.track_at(100, -150.0), 0.0) == 100

    def test_negative_dt_rejected(self):
        with pytest.raises(DomainError):
            predict(self.track_at(100, -150.0), -0.1)

    def test_unassociated_track_has_no_state(self):
        with pytest.raises(NoStateError):
            predict(new_track(cfg()), 1.0)
        coasted = update(new_track(cfg()), mk_scan(0), 0.5)
        with pytest.raises(NoStateError):
            predict(coasted, 1.0)


class TestStateMachine:
    def test_confirmation_takes_three_hits(self):
        track = new_track(cfg())
        for i, bin_index in enumerate((100, 102, 105)):
            update(track, mk_scan(i, aircraft_bin=bin_index), 0.5)
        assert [f.status for f in track.frames] == [
            TrackStatus.TENTATIVE, TrackStatus.TENTATIVE, TrackStatus.CONFIRMED]
        assert track.ever_confirmed

    def test_first_velocity_is_folded_then_unfolded(self):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100, folded=29.0), 0.5)
        update(track, mk_scan(1, aircraft_bin=102, folded=29.0), 0.5)
        assert track.frames[0].aircraft_velocity == 29.0
        # 2 bins in 0.5 s implies -120 m/s; nearest alias is 29 - 160
        assert track.frames[1].aircraft_velocity == 29.0 - 2 * VUA

    def test_miss_coasts_then_reconfirms_immediately(self):
        track = new_track(cfg())
        for i, b in enumerate((100, 102, 105)):
            update(track, mk_scan(i, aircraft_bin=b), 0.5)
        update(track, mk_scan(3), 0.5)
        assert track.status is TrackStatus.COASTING
        assert math.isnan(track.frames[-1].aircraft_velocity)
        # one hit suffices after a confirmation, not another three
        update(track, mk_scan(4, aircraft_bin=110), 0.5)
        assert track.status is TrackStatus.CONFIRMED

    def test_exceeding_coast_limit_drops_for_good(self):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100), 0.5)
        for i in range(1, 5):
            update(track, mk_scan(i), 0.5)
        assert track.status is TrackStatus.DROPPED
        update(track, mk_scan(5, aircraft_bin=101), 0.5)
        assert track.status is TrackStatus.DROPPED
        assert track.frames[-1].aircraft_bin is None

    def test_out_of_gate_detection_is_a_miss(self):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100, folded=-5.0), 0.5)
        update(track, mk_scan(1, aircraft_bin=300, folded=-5.0), 0.5)
        assert track.status is TrackStatus.COASTING
        assert track.frames[-1].aircraft_bin is None

    def test_empty_frames_before_first_association_cost_nothing(self):
        track = new_track(cfg())
        for i in range(6):
            update(track, mk_scan(i), 0.5)
        assert track.status is TrackStatus.TENTATIVE
        assert track.consecutive_misses == 0
        update(track, mk_scan(6, aircraft_bin=100), 0.5)
        assert track.frames[-1].aircraft_bin == 100

    def test_timestamps_accumulate_dt(self):
        track = new_track(cfg())
        for i in range(3):
            update(track, mk_scan(i, aircraft_bin=100 + i), 0.5)
        assert [f.timestamp for f in track.frames] == [0.0, 0.5, 1.0]

    def test_dt_must_be_positive(self):
        with pytest.raises(DomainError):
            update(new_track(cfg()), mk_scan(0), 0.0)
        with pytest.raises(DomainError):
            run_track([mk_scan(0)], cfg(), 0.0)

    @pytest.mark.parametrize("field,value", [
        ("range_resolution", 0.0),
        ("unambiguous_velocity", -1.0),
        ("gate_bins", -1),
        ("coast_limit", -2),
        ("confirm_hits", 0),
    ])
    def test_config_validation(self, field, value):
        with pytest.raises(DomainError):
            cfg(**{field: value})


class TestWakeExtent:
    def test_trailing_extent_rides_along(self):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100, wake_extent=(90, 99)), 0.5)
        frame = track.frames[-1]
        assert frame.wake_extent == (90, 99)
        assert frame.wake_length_m == 10 * RRES

    @pytest.mark.parametrize("extent", [(90, 100), (110, 120), (100, 105)])
    def test_extent_not_strictly_behind_is_ignored(self, extent):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100, wake_extent=extent), 0.5)
        assert track.frames[-1].wake_extent is None
        assert track.frames[-1].wake_length_m == 0.0

    def test_no_extent_on_missed_frames(self):
        track = new_track(cfg())
        update(track, mk_scan(0, aircraft_bin=100, wake_extent=(90, 99)), 0.5)
        update(track, mk_scan(1, wake_extent=(90, 99)), 0.5)
        assert track.frames[-1].wake_extent is None


class TestAheadReport:
    def test_reports_only_bins_past_the_aircraft(self):
        extras = [mk_det(90, DetectionClass.WAKE),
                  mk_det(120, DetectionClass.WAKE),
                  mk_det(130, DetectionClass.OTHER),
                  mk_det(140, DetectionClass.NOISE)]
        scan = mk_scan(0, aircraft_bin=100, extras=extras)
        track = update(new_track(cfg()), scan, 0.5)
        assert [d.bin_index for d in ahead_report(track, scan)] == [120, 130]

    def test_silent_without_an_association(self):
        scan = mk_scan(0, extras=[mk_det(120, DetectionClass.WAKE)])
        track = update(new_track(cfg()), scan, 0.5)
        assert ahead_report(track, scan) == []
        assert ahead_report(new_track(cfg()), scan) == []


class TestRunTrack:
    def test_full_pass_over_a_receding_target(self):
        bins = [100, 102, 105, 107, 110, 112]
        scans = [mk_scan(i, aircraft_bin=b, folded=29.0,
                         wake_extent=(b - 10, b - 1))
                 for i, b in enumerate(bins)]
        track = run_track(scans, cfg(), 0.5)
        assert len(track.frames) == 6
        assert [f.status for f in track.frames] == (
            [TrackStatus.TENTATIVE] * 2 + [TrackStatus.CONFIRMED] * 4)
        assert track.frames[0].aircraft_velocity == 29.0
        for frame in track.frames[1:]:
            assert frame.aircraft_velocity == 29.0 - 2 * VUA
        for frame, b in zip(track.frames, bins):
            assert frame.aircraft_bin == b
            assert frame.wake_extent == (b - 10, b - 1)
