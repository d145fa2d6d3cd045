"""Command-line front end.

Subcommands: simulate, process, detect, track, analyze, budget, compare.
Exit codes: 0 success, 1 usage error, 2 malformed or unreadable file,
3 numeric or domain error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional

import numpy as np

from .detect import (DetectorConfig, dscr, estimate_bin_snr_db,
                     find_doppler_peaks, frame_noise_power,
                     select_dominant_doppler)
from .dsp import (doppler_spectrum, micro_doppler_spectrogram, notch_clutter,
                  range_doppler_map)
from .errors import DomainError, FormatError, InsufficientSignalError, WakeRadarError
from .formats import (emit_detections, emit_track, read_budget_query,
                      read_detector_config, read_scenario, read_wviq,
                      render_map, render_spectrogram, write_wviq)
from .params import (detection_range, range_resolution, unambiguous_velocity,
                     velocity_resolution, wavelength)
from .pipeline import (class_counts, flatten_detections, scan_frames,
                       scan_scenario, track_scans)
from .scene import synthesize_frame
from .signature import doppler_group_stats, jem_comb_estimate, slope_sign_classify

# Overrides the default detector settings path when `detect`/`track` is run
# without --config.  Explicit flags always win over the environment.
DETECTOR_CONFIG_ENV = "WAKERADAR_DETECTOR_CONFIG"


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit status 2; we contract 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _detector_config(path: Optional[str]) -> DetectorConfig:
    if path is None:
        path = os.environ.get(DETECTOR_CONFIG_ENV)
    if path is None:
        return DetectorConfig()
    return read_detector_config(path)


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        if text and not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            if text and not text.endswith("\n"):
                fh.write("\n")


def _cmd_simulate(args) -> int:
    scenario = read_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    frames = []
    for k in range(scenario.n_frames):
        frame = synthesize_frame(scenario, k)
        frames.append(frame.iq.astype(np.complex64))
    write_wviq(frames, scenario.radar, args.output)
    r = scenario.radar
    print(f"wrote {args.output}: {len(frames)} frame(s), "
          f"{r.n_range_bins} bins x {r.n_pulses} pulses, seed {scenario.seed}")
    return 0


def _frame_in_range(k: int, n: int) -> None:
    if not 0 <= k < n:
        raise DomainError(f"frame {k} out of range, file has {n}")


def _cmd_process(args) -> int:
    frames, config = read_wviq(args.input)
    _frame_in_range(args.frame, len(frames))
    rd = range_doppler_map(frames[args.frame], config, window=args.window,
                           frame_index=args.frame)
    render_map(rd, scale=args.scale, path=args.output,
               db_range=args.db_range, color=args.color)
    print(f"wrote {args.output}")
    return 0


def _cmd_detect(args) -> int:
    frames, config = read_wviq(args.input)
    det_cfg = _detector_config(args.config)
    scans = scan_frames(frames, config, det_cfg)
    text = emit_detections(flatten_detections(scans), fmt=args.format)
    _write_text(text, args.output)
    return 0


def _cmd_track(args) -> int:
    frames, config = read_wviq(args.input)
    det_cfg = _detector_config(args.config)
    scans = scan_frames(frames, config, det_cfg)
    track = track_scans(scans, config, args.interval)
    _write_text(emit_track(track), args.output)
    return 0


def _cmd_analyze(args) -> int:
    frames, config = read_wviq(args.input)
    _frame_in_range(args.frame, len(frames))
    iq = frames[args.frame]
    if not 0 <= args.bin < iq.shape[0]:
        raise DomainError(f"bin {args.bin} out of range, file has {iq.shape[0]}")
    det_cfg = _detector_config(args.config)
    pulses = iq[args.bin]

    # Same floor the detector would use, so the two subcommands agree.
    rd = range_doppler_map(iq, config, frame_index=args.frame)
    noise_power = frame_noise_power(rd, det_cfg.notch_half_width)

    sp = doppler_spectrum(pulses, config, bin_index=args.bin)
    notched = notch_clutter(sp, det_cfg.notch_half_width)
    d = select_dominant_doppler(notched)
    peaks = find_doppler_peaks(notched, min_prominence=det_cfg.min_prominence,
                               floor_ratio=det_cfg.peak_floor_ratio)
    stats = doppler_group_stats(peaks)

    print(f"frame {args.frame} bin {args.bin} "
          f"(range {args.bin * range_resolution(config.bandwidth):.1f} m)")
    print(f"dominant_velocity {notched.velocity_axis[d]:.3f} m/s")
    print(f"dscr {dscr(notched, d):.3f} dB")
    print(f"snr {estimate_bin_snr_db(notched, noise_power):.3f} dB")
    print(f"peaks {stats.n_peaks}: mean_speed {stats.mean_speed:.3f} m/s, "
          f"spread {stats.peak_spread:.3f} m/s, "
          f"negative_fraction {stats.negative_fraction:.3f}")
    for p in peaks:
        print(f"  peak {p.velocity:+.3f} m/s amplitude {p.amplitude:.1f}")

    comb = jem_comb_estimate(notched, min_lines=det_cfg.jem_min_lines,
                             min_spacing=det_cfg.jem_min_spacing)
    if comb is None:
        print("engine comb: none")
    else:
        print(f"engine comb: body {comb.body_velocity:+.3f} m/s, "
              f"spacing {comb.stage1_spacing:.3f} m/s, "
              f"{len(comb.stage1_lines)} lines, "
              f"confidence {comb.confidence:.3f}")
        if comb.stage2_spacing is not None:
            print(f"  second series: spacing {comb.stage2_spacing:.3f} m/s, "
                  f"offset {comb.stage2_offset:+.3f} m/s, "
                  f"{len(comb.stage2_lines)} lines")

    # Window scales with the series so short recordings still get slices;
    # files of 2048+ pulses keep the default 256/64 layout.
    win_len = min(256, max(8, config.n_pulses // 8))
    spg = micro_doppler_spectrogram(pulses, config, win_len=win_len,
                                    hop=max(1, win_len // 4))
    try:
        fit = slope_sign_classify(spg, clutter_half_width=det_cfg.notch_half_width)
        print(f"drift slope: {fit.sign.value} "
              f"({fit.slope:+.3f} cells/interval, {fit.n_points} points)")
    except InsufficientSignalError:
        print("drift slope: insufficient signal")
    if args.render is not None:
        render_spectrogram(spg, path=args.render)
        print(f"wrote {args.render}")
    return 0


def _cmd_budget(args) -> int:
    config, query = read_budget_query(args.config)
    print(f"wavelength {wavelength(config):.4f} m")
    print(f"range_resolution {range_resolution(config.bandwidth):.1f} m")
    print(f"velocity_resolution {velocity_resolution(config):.3f} m/s")
    print(f"unambiguous_velocity {unambiguous_velocity(config):.2f} m/s")
    print(f"cpi {config.cpi_seconds * 1e3:.1f} ms")
    print(f"detection_range {detection_range(config, query):.1f} m "
          f"(rcs {query.target_rcs:g} m^2, required snr {query.required_snr:g} dB)")
    return 0


def _scan_counts(path: str, n_frames: Optional[int]) -> tuple:
    scenario = read_scenario(path)
    frames = scenario.n_frames if n_frames is None else min(n_frames,
                                                            scenario.n_frames)
    scans = scan_scenario(scenario, n_frames=frames)
    truth = sum(hi - lo + 1 for lo, hi in
                (seg.bin_range for seg in
                 scenario.wake_segments + scenario.ghost_segments))
    counts = class_counts(scans)
    wake_rate = None
    if truth:
        wake_rate = counts.get("Wake", 0) / (truth * frames)
    return scenario, frames, counts, wake_rate


def _cmd_compare(args) -> int:
    reports = []
    for path in (args.scenario_a, args.scenario_b):
        scenario, frames, counts, rate = _scan_counts(path, args.frames)
        reports.append((path, frames, counts, rate))
        line = (f"{path}: frames {frames}, aircraft {counts.get('Aircraft', 0)}, "
                f"wake {counts.get('Wake', 0)}, other {counts.get('Other', 0)}")
        if rate is not None:
            line += f", wake_rate {rate:.3f}"
        print(line)
    (_, _, ca, ra), (_, _, cb, rb) = reports
    for label in ("Aircraft", "Wake", "Other"):
        print(f"delta {label.lower()} {cb.get(label, 0) - ca.get(label, 0):+d}")
    if ra is not None and rb is not None:
        print(f"delta wake_rate {rb - ra:+.3f}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="wakeradar",
                     description="Pulse-Doppler wake vortex simulation and "
                                 "detection toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("simulate", help="synthesize a scene into an IQ file")
    p.add_argument("scenario", help="scenario configuration file")
    p.add_argument("-o", "--output", required=True, help="output .wviq path")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("process", help="render one frame's range-Doppler map")
    p.add_argument("input", help="input .wviq file")
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output image path")
    p.add_argument("--scale", choices=("db", "linear"), default="db")
    p.add_argument("--db-range", type=float, default=60.0)
    p.add_argument("--window", default="rectangular")
    p.add_argument("--color", action="store_true",
                   help="write a color pixmap instead of a graymap")
    p.set_defaults(handler=_cmd_process)

    p = sub.add_parser("detect", help="run the detector over every frame")
    p.add_argument("input", help="input .wviq file")
    p.add_argument("--config", default=None, help="detector settings file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", default=None,
                   help="output path (default stdout)")
    p.set_defaults(handler=_cmd_detect)

    p = sub.add_parser("track", help="track the aircraft across frames")
    p.add_argument("input", help="input .wviq file")
    p.add_argument("--config", default=None, help="detector settings file")
    p.add_argument("--interval", type=float, default=0.5,
                   help="seconds between frames")
    p.add_argument("-o", "--output", default=None,
                   help="output path (default stdout)")
    p.set_defaults(handler=_cmd_track)

    p = sub.add_parser("analyze", help="inspect one bin of one frame")
    p.add_argument("input", help="input .wviq file")
    p.add_argument("--bin", type=int, required=True)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--config", default=None, help="detector settings file")
    p.add_argument("--render", default=None,
                   help="also write the bin's spectrogram image here")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("budget", help="derived quantities and link-budget range")
    p.add_argument("config", help="radar + budget configuration file")
    p.set_defaults(handler=_cmd_budget)

    p = sub.add_parser("compare", help="detection deltas between two scenarios")
    p.add_argument("scenario_a")
    p.add_argument("scenario_b")
    p.add_argument("--frames", type=int, default=None,
                   help="limit the number of frames scanned")
    p.set_defaults(handler=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.handler(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WakeRadarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
