"""File formats and serialization: the WVIQ binary capture format, scenario
and detector configuration files, detection/track emission, and portable
graymap renders of range-Doppler maps and spectrograms.

Every reader rejects malformed input with a diagnostic naming the offending
field or byte offset; nothing is read partially or silently.
"""

from __future__ import annotations

import configparser
import json
import math
import struct
from typing import Optional, Union

import numpy as np

from .detect import Detection, DetectionClass, DetectorConfig
from .dsp import RangeDopplerMap, Spectrogram
from .errors import DomainError, FormatError
from .params import (SPEED_OF_LIGHT, LinkBudgetQuery, RadarConfig,
                     range_resolution)
from .scene import (AircraftSpec, ClutterSpec, CpiFrame, JemStageOne,
                    JemStageTwo, Scenario, WakeSegmentSpec)
from .signature import StageName
from .tracking import Track

WVIQ_MAGIC = b"WVIQ"
WVIQ_VERSION = 1

_HEADER = struct.Struct("<4sH3d3I")
_SAMPLE = np.dtype("<c8")


def write_wviq(frames, config: RadarConfig, path) -> None:
    """Write IQ frames to a WVIQ file.

    Accepts CpiFrame values or bare [n_bins x n_pulses] complex arrays.
    Samples are stored as little-endian float32 pairs (I then Q), bin-major.
    """
    arrays = []
    for k, frame in enumerate(frames):
        iq = np.ascontiguousarray(getattr(frame, "iq", frame), dtype=_SAMPLE)
        if iq.shape != (config.n_range_bins, config.n_pulses):
            raise DomainError(
                f"frame {k} shape {iq.shape} does not match config "
                f"({config.n_range_bins}, {config.n_pulses})")
        arrays.append(iq)
    header = _HEADER.pack(WVIQ_MAGIC, WVIQ_VERSION,
                          config.carrier_frequency, config.prf,
                          range_resolution(config.bandwidth),
                          config.n_pulses, config.n_range_bins, len(arrays))
    with open(path, "wb") as fh:
        fh.write(header)
        for iq in arrays:
            fh.write(iq.tobytes())


def read_wviq(path) -> tuple[list[np.ndarray], RadarConfig]:
    """Read a WVIQ file back into complex64 frame arrays plus the config.

    The stored range resolution is converted back to a bandwidth; all other
    RadarConfig fields not present in the header take their defaults.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise FormatError(
            f"truncated header: expected {_HEADER.size} bytes, got {len(data)}")
    magic, version, carrier, prf, rres, n_pulses, n_bins, n_frames = \
        _HEADER.unpack_from(data, 0)
    if magic != WVIQ_MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0")
    if version != WVIQ_VERSION:
        raise FormatError(
            f"unsupported format version {version} at byte offset 4")
    if not (carrier > 0 and prf > 0 and rres > 0):
        raise FormatError(
            f"non-positive header field at byte offset 6: carrier={carrier}, "
            f"prf={prf}, range_res={rres}")
    if n_pulses == 0 or n_bins == 0:
        raise FormatError(
            f"zero dimension at byte offset 30: n_pulses={n_pulses}, n_bins={n_bins}")
    expected = n_frames * n_bins * n_pulses * 8
    actual = len(data) - _HEADER.size
    if actual != expected:
        raise FormatError(
            f"payload at byte offset {_HEADER.size}: expected {expected} "
            f"bytes, got {actual}")
    flat = np.frombuffer(data, dtype=_SAMPLE, offset=_HEADER.size)
    per_frame = n_bins * n_pulses
    frames = [flat[k * per_frame:(k + 1) * per_frame]
              .reshape(n_bins, n_pulses).copy() for k in range(n_frames)]
    config = RadarConfig(carrier_frequency=carrier, prf=prf,
                         n_pulses=int(n_pulses),
                         bandwidth=SPEED_OF_LIGHT / (2.0 * rres),
                         n_range_bins=int(n_bins))
    return frames, config


# --- configuration files ---------------------------------------------------

# Per-section key tables: key -> (converter, required, default).
_REQ = object()

_RADAR_KEYS = {
    "carrier_frequency": (float, _REQ),
    "prf": (float, _REQ),
    "n_pulses": (int, _REQ),
    "bandwidth": (float, _REQ),
    "n_range_bins": (int, _REQ),
    "peak_power": (float, 320.0),
    "noise_figure": (float, 2.0),
    "system_temperature": (float, 290.0),
    "antenna_gain": (float, 1.0),
    "effective_aperture": (float, 1.0),
}

_AIRCRAFT_KEYS = {
    "range_bin": (int, _REQ),
    "radial_velocity": (float, _REQ),
    "snr_db": (float, _REQ),
    "wingspan": (float, 34.32),
    "jem1_spacing": (float, 14.4),
    "jem1_lines": (int, 5),
    "jem1_amplitude": (float, 0.0),
    "jem2_spacing": (float, 14.5),
    "jem2_offset": (float, 2.9),
    "jem2_amplitude": (float, 0.0),
}


def _parse_stage(text: str) -> StageName:
    try:
        return StageName(text.strip().capitalize())
    except ValueError:
        raise FormatError(
            f"unknown stage {text!r}; expected one of "
            f"{[s.value for s in StageName]}") from None


_SEGMENT_KEYS = {
    "bin_lo": (int, _REQ),
    "bin_hi": (int, _REQ),
    "stage": (_parse_stage, _REQ),
    "circulation": (float, _REQ),
    "core_radius": (float, _REQ),
    "n_scatterers": (int, 12),
    "amplitude_level": (float, 100.0),
    "slope_sign": (str, "auto"),
    "intermittency": (float, 0.3),
}

_CLUTTER_KEYS = {
    "half_width": (float, 1.78),
    "power_db": (float, 20.0),
}

_SIM_KEYS = {
    "n_frames": (int, 1),
    "frame_interval": (float, 0.5),
    "seed": (int, 0),
    "noise_floor": (float, 1.0),
}

_DETECTOR_KEYS = {
    "notch_half_width": (float, 2.0),
    "dscr_threshold": (float, 8.0),
    "aircraft_min_speed": (float, 15.0),
    "wake_speed_min": (float, 2.0),
    "wake_speed_max": (float, 12.0),
    "min_peaks_for_wake": (int, 2),
    "min_prominence": (float, 0.15),
    "peak_floor_ratio": (float, 4.5),
    "wake_gap_tolerance": (int, 3),
    "assumed_wingspan": (float, 34.32),
    "jem_min_lines": (int, 5),
    "jem_min_spacing": (float, 8.0),
}

_BUDGET_KEYS = {
    "target_rcs": (float, _REQ),
    "required_snr": (float, _REQ),
}


def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise FormatError(f"malformed configuration {path}: {exc}") from exc
    return parser


def _parse_section(parser: configparser.ConfigParser, name: str,
                   keys: dict) -> dict:
    raw = dict(parser.items(name))
    out = {}
    for key, (conv, default) in keys.items():
        if key in raw:
            text = raw.pop(key)
            try:
                out[key] = conv(text)
            except FormatError:
                raise
            except (TypeError, ValueError):
                raise FormatError(
                    f"bad value for '{key}' in section [{name}]: {text!r}") from None
        elif default is _REQ:
            raise FormatError(f"missing required key '{key}' in section [{name}]")
        else:
            out[key] = default
    if raw:
        raise FormatError(
            f"unknown key '{sorted(raw)[0]}' in section [{name}]")
    return out


def _numbered_sections(parser: configparser.ConfigParser, prefix: str) -> list[str]:
    found = {}
    for name in parser.sections():
        if name == prefix or name.startswith(prefix + "."):
            suffix = name[len(prefix) + 1:] if "." in name else ""
            if not suffix.isdigit():
                raise FormatError(
                    f"section [{name}] must be numbered like [{prefix}.1]")
            found[int(suffix)] = name
    return [found[k] for k in sorted(found)]


def _segment_from(values: dict) -> WakeSegmentSpec:
    return WakeSegmentSpec(
        bin_range=(values["bin_lo"], values["bin_hi"]),
        stage=values["stage"],
        circulation=values["circulation"],
        core_radius=values["core_radius"],
        n_scatterers=values["n_scatterers"],
        amplitude_level=values["amplitude_level"],
        slope_sign=values["slope_sign"],
        intermittency=values["intermittency"],
    )


def read_scenario(path) -> Scenario:
    """Parse a scenario configuration file.

    Sections: [radar] and [sim] drive the radar and simulation settings;
    [aircraft] and [clutter] are optional; wake and ghost segments appear as
    numbered [wake.N] / [ghost.N] sections.  Unknown sections or keys are
    rejected.
    """
    parser = _read_ini(path)
    known = {"radar", "aircraft", "clutter", "sim"}
    for name in parser.sections():
        base = name.split(".")[0]
        if name not in known and base not in ("wake", "ghost"):
            raise FormatError(f"unknown section [{name}]")

    if not parser.has_section("radar"):
        raise FormatError("missing required section [radar]")
    rv = _parse_section(parser, "radar", _RADAR_KEYS)
    try:
        radar = RadarConfig(**rv)
    except DomainError as exc:
        raise FormatError(f"invalid [radar] values: {exc}") from exc

    aircraft = None
    if parser.has_section("aircraft"):
        av = _parse_section(parser, "aircraft", _AIRCRAFT_KEYS)
        try:
            aircraft = AircraftSpec(
                range_bin=av["range_bin"],
                radial_velocity_true=av["radial_velocity"],
                snr_target=av["snr_db"],
                jem_stage1=JemStageOne(av["jem1_spacing"], av["jem1_lines"],
                                       av["jem1_amplitude"]),
                jem_stage2=JemStageTwo(av["jem2_spacing"], av["jem2_offset"],
                                       av["jem2_amplitude"]),
                wingspan=av["wingspan"],
            )
        except DomainError as exc:
            raise FormatError(f"invalid [aircraft] values: {exc}") from exc

    try:
        wakes = tuple(_segment_from(_parse_section(parser, s, _SEGMENT_KEYS))
                      for s in _numbered_sections(parser, "wake"))
        ghosts = tuple(_segment_from(_parse_section(parser, s, _SEGMENT_KEYS))
                       for s in _numbered_sections(parser, "ghost"))
    except DomainError as exc:
        raise FormatError(f"invalid segment values: {exc}") from exc

    clutter = None
    if parser.has_section("clutter"):
        cv = _parse_section(parser, "clutter", _CLUTTER_KEYS)
        clutter = ClutterSpec(**cv)

    sim = (_parse_section(parser, "sim", _SIM_KEYS)
           if parser.has_section("sim")
           else {k: d for k, (c, d) in _SIM_KEYS.items()})
    try:
        return Scenario(radar=radar, aircraft=aircraft, wake_segments=wakes,
                        ghost_segments=ghosts, clutter=clutter,
                        noise_floor=sim["noise_floor"],
                        n_frames=sim["n_frames"],
                        frame_interval=sim["frame_interval"],
                        seed=sim["seed"])
    except DomainError as exc:
        raise FormatError(f"inconsistent scenario: {exc}") from exc


def write_scenario(scenario: Scenario, path) -> None:
    """Write a scenario as a configuration file that read_scenario round-trips."""
    parser = configparser.ConfigParser(interpolation=None)
    r = scenario.radar
    parser["radar"] = {
        "carrier_frequency": repr(r.carrier_frequency),
        "prf": repr(r.prf),
        "n_pulses": str(r.n_pulses),
        "bandwidth": repr(r.bandwidth),
        "n_range_bins": str(r.n_range_bins),
        "peak_power": repr(r.peak_power),
        "noise_figure": repr(r.noise_figure),
        "system_temperature": repr(r.system_temperature),
        "antenna_gain": repr(r.antenna_gain),
        "effective_aperture": repr(r.effective_aperture),
    }
    if scenario.aircraft is not None:
        a = scenario.aircraft
        parser["aircraft"] = {
            "range_bin": str(a.range_bin),
            "radial_velocity": repr(a.radial_velocity_true),
            "snr_db": repr(a.snr_target),
            "wingspan": repr(a.wingspan),
            "jem1_spacing": repr(a.jem_stage1.line_spacing),
            "jem1_lines": str(a.jem_stage1.n_lines_each_side),
            "jem1_amplitude": repr(a.jem_stage1.relative_amplitude),
            "jem2_spacing": repr(a.jem_stage2.line_spacing),
            "jem2_offset": repr(a.jem_stage2.series_offset),
            "jem2_amplitude": repr(a.jem_stage2.relative_amplitude),
        }
    for prefix, segments in (("wake", scenario.wake_segments),
                             ("ghost", scenario.ghost_segments)):
        for i, seg in enumerate(segments, start=1):
            parser[f"{prefix}.{i}"] = {
                "bin_lo": str(seg.bin_range[0]),
                "bin_hi": str(seg.bin_range[1]),
                "stage": seg.stage.value,
                "circulation": repr(seg.circulation),
                "core_radius": repr(seg.core_radius),
                "n_scatterers": str(seg.n_scatterers),
                "amplitude_level": repr(seg.amplitude_level),
                "slope_sign": seg.slope_sign,
                "intermittency": repr(seg.intermittency),
            }
    if scenario.clutter is not None:
        parser["clutter"] = {
            "half_width": repr(scenario.clutter.half_width),
            "power_db": repr(scenario.clutter.power_db),
        }
    parser["sim"] = {
        "n_frames": str(scenario.n_frames),
        "frame_interval": repr(scenario.frame_interval),
        "seed": str(scenario.seed),
        "noise_floor": repr(scenario.noise_floor),
    }
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def read_detector_config(path) -> DetectorConfig:
    """Parse a detector configuration file with a single [detector] section."""
    parser = _read_ini(path)
    for name in parser.sections():
        if name != "detector":
            raise FormatError(f"unknown section [{name}]")
    if not parser.has_section("detector"):
        raise FormatError("missing required section [detector]")
    v = _parse_section(parser, "detector", _DETECTOR_KEYS)
    band = (v.pop("wake_speed_min"), v.pop("wake_speed_max"))
    try:
        return DetectorConfig(wake_speed_band=band, **v)
    except DomainError as exc:
        raise FormatError(f"invalid [detector] values: {exc}") from exc


def read_budget_query(path) -> tuple[RadarConfig, LinkBudgetQuery]:
    """Parse a link-budget configuration: [radar] plus [budget]."""
    parser = _read_ini(path)
    for name in parser.sections():
        if name not in ("radar", "budget"):
            raise FormatError(f"unknown section [{name}]")
    for name in ("radar", "budget"):
        if not parser.has_section(name):
            raise FormatError(f"missing required section [{name}]")
    rv = _parse_section(parser, "radar", _RADAR_KEYS)
    bv = _parse_section(parser, "budget", _BUDGET_KEYS)
    try:
        return RadarConfig(**rv), LinkBudgetQuery(**bv)
    except DomainError as exc:
        raise FormatError(f"invalid budget configuration: {exc}") from exc


# --- detection and track emission ------------------------------------------

_CSV_HEADER = "frame,bin,range_m,class,snr_db,dscr_db,velocity_mps,stage"


def _stage_label(det: Detection) -> str:
    return det.stage.name.value if det.stage is not None else ""


def _json_number(x: float):
    return round(x, 3) if math.isfinite(x) else None


def emit_detections(rows, fmt: str = "csv") -> str:
    """Serialize (frame_index, Detection) pairs, ordered by (frame, bin).

    Noise classifications are omitted; every remaining detection becomes one
    CSV row (3-decimal fixed-point) or one JSON object.
    """
    if fmt not in ("csv", "json"):
        raise DomainError(f"fmt must be 'csv' or 'json', got {fmt!r}")
    picked = sorted(((f, d) for f, d in rows
                     if d.category is not DetectionClass.NOISE),
                    key=lambda fd: (fd[0], fd[1].bin_index))
    if fmt == "csv":
        lines = [_CSV_HEADER]
        for f, d in picked:
            lines.append(
                f"{f},{d.bin_index},{d.range_m:.3f},{d.category.value},"
                f"{d.snr_db:.3f},{d.dscr_db:.3f},{d.dominant_velocity:.3f},"
                f"{_stage_label(d)}")
        return "\n".join(lines) + "\n"
    objects = [{
        "frame": f,
        "bin": d.bin_index,
        "range_m": _json_number(d.range_m),
        "class": d.category.value,
        "snr_db": _json_number(d.snr_db),
        "dscr_db": _json_number(d.dscr_db),
        "velocity_mps": _json_number(d.dominant_velocity),
        "stage": _stage_label(d) or None,
    } for f, d in picked]
    return json.dumps(objects, indent=2) + "\n"


def emit_track(track: Track) -> str:
    """Serialize a track as JSON lines, one object per frame."""
    lines = []
    for fr in track.frames:
        lines.append(json.dumps({
            "frame": fr.frame_index,
            "timestamp": round(fr.timestamp, 6),
            "aircraft_bin": fr.aircraft_bin,
            "aircraft_velocity": (round(fr.aircraft_velocity, 3)
                                  if math.isfinite(fr.aircraft_velocity) else None),
            "wake_extent": list(fr.wake_extent) if fr.wake_extent else None,
            "wake_length_m": round(fr.wake_length_m, 3),
            "status": fr.status.value,
        }))
    return "\n".join(lines) + ("\n" if lines else "")


# --- image renders ----------------------------------------------------------

def _to_bytes(img: np.ndarray, scale: str, db_range: float) -> np.ndarray:
    peak = float(img.max())
    if peak <= 0.0:
        return np.zeros(img.shape, dtype=np.uint8)
    if scale == "db":
        floor = peak * 10.0 ** (-db_range / 20.0)
        db = 20.0 * np.log10(np.maximum(img, floor) / peak)
        unit = 1.0 + db / db_range
    elif scale == "linear":
        unit = img / peak
    else:
        raise DomainError(f"scale must be 'db' or 'linear', got {scale!r}")
    return np.clip(np.rint(unit * 255.0), 0, 255).astype(np.uint8)


def _decimate_rows(img: np.ndarray, limit: int) -> np.ndarray:
    factor = 1
    while img.shape[0] // factor > limit:
        factor *= 2
    if factor == 1:
        return img
    keep = (img.shape[0] // factor) * factor
    return img[:keep].reshape(keep // factor, factor, img.shape[1]).mean(axis=1)


def _write_graymap(path, pixels: np.ndarray, color: bool) -> None:
    h, w = pixels.shape
    if color:
        # Monotone amber map: channels are increasing functions of level.
        v = pixels.astype(np.float64) / 255.0
        rgb = np.stack([v, v ** 1.8, v ** 3.5], axis=-1)
        body = np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)
        header = f"P6\n{w} {h}\n255\n".encode("ascii")
    else:
        body = pixels
        header = f"P5\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())


def render_map(rd_map: RangeDopplerMap, scale: str = "db", path=None, *,
               db_range: float = 60.0, max_doppler: int = 2048,
               color: bool = False) -> np.ndarray:
    """Render a range-Doppler map as a portable graymap (or pixmap).

    Range runs horizontally, Doppler vertically with positive velocities at
    the top.  The Doppler axis is decimated by power-of-two averaging when it
    exceeds ``max_doppler`` rows.  Returns the pixel matrix; writes the image
    when a path is given.
    """
    if not rd_map.rows:
        raise DomainError("empty range-Doppler map")
    amps = np.stack([row.amplitudes for row in rd_map.rows], axis=1)
    img = _decimate_rows(amps[::-1, :], max_doppler)
    pixels = _to_bytes(img, scale, db_range)
    if path is not None:
        _write_graymap(path, pixels, color)
    return pixels


def render_spectrogram(spg: Spectrogram, scale: str = "db", path=None, *,
                       db_range: float = 60.0, color: bool = False) -> np.ndarray:
    """Render a spectrogram: time horizontal, velocity vertical (positive up)."""
    if spg.magnitudes.size == 0:
        raise DomainError("empty spectrogram")
    img = spg.magnitudes.T[::-1, :]
    pixels = _to_bytes(img, scale, db_range)
    if path is not None:
        _write_graymap(path, pixels, color)
    return pixels
