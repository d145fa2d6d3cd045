"""Pulse-Doppler wake vortex simulation and detection toolkit.

Synthesizes coherent IQ scenes (an aircraft with engine-modulation combs,
staged trailing vortices, clutter, noise), processes them into range-Doppler
maps, detects and classifies returns by Doppler contrast, recovers wake and
engine micro-Doppler signatures, and tracks the aircraft and its wake across
coherent intervals.  A link-budget helper sizes detection range from the
radar equation.
"""

from .detect import (Detection, DetectionClass, DetectorConfig, FrameScan,
                     SpectralPeak, classify_bin, dscr, estimate_bin_snr_db,
                     estimate_noise_power, find_doppler_peaks, scan_frame,
                     select_dominant_doppler)
from .dsp import (DopplerSpectrum, RangeDopplerMap, Spectrogram,
                  doppler_spectrum, index_for_velocity,
                  micro_doppler_spectrogram, notch_clutter, range_doppler_map)
from .errors import (DimensionError, DomainError, FormatError,
                     InsufficientSignalError, NoCandidateError, NoStateError,
                     WakeRadarError)
from .formats import (emit_detections, emit_track, read_budget_query,
                      read_detector_config, read_scenario, read_wviq,
                      render_map, render_spectrogram, write_scenario,
                      write_wviq)
from .params import (BOLTZMANN_CONSTANT, SPEED_OF_LIGHT, LinkBudgetQuery,
                     RadarConfig, detection_range, fold_velocity,
                     range_resolution, snr_db, unambiguous_velocity,
                     velocity_resolution, wavelength)
from .pipeline import (class_counts, flatten_detections, scan_frames,
                       scan_scenario, track_scans)
from .presets import (comparison_radar, noise_scenario, reference_aircraft,
                      reference_scenario, track16_radar, whu_radar)
from .scene import (AircraftSpec, ClutterSpec, CpiFrame, JemStageOne,
                    JemStageTwo, Scenario, WakeSegmentSpec,
                    circulation_for_mean_speed, lamb_oseen_tangential,
                    peak_tangential_speed, synthesize_frame, synthesize_frames,
                    wake_doppler_population)
from .signature import (DopplerGroupStats, JemComb, SlopeFit, SlopeSign,
                        StageName, WakeStage, doppler_group_stats,
                        jem_comb_estimate, slope_sign_classify,
                        stage_from_distance)
from .tracking import (Track, TrackFrame, TrackStatus, TrackerConfig,
                       ahead_report, predict, run_track,
                       unfold_velocity_by_drift, update)

__version__ = "0.1.0"
