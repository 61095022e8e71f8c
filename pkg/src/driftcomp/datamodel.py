"""Core sensor-domain types, dataset container, windowing and CSV I/O.

A Scenario is a labeled time series of sensor frames (6 ADC channels +
one temperature per frame) with optional ground-truth drift and applied
load, serialized to a plain CSV schema:

    time_s,adc1,...,adc6,temp_c[,dfx,dfy,dfz,dmx,dmy,dmz][,afx,...,amz]

Lines starting with ``#`` before the header carry scenario metadata
(name, sample rate, free-form meta keys) so that save -> load is lossless.
All floats are written with ``repr`` and therefore round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, LabelingError, ParseError, ValidationError

__all__ = [
    "AXES",
    "FULL_SCALE",
    "TMP117_RESOLUTION_C",
    "Wrench",
    "SensorFrame",
    "TemperatureWindow",
    "Scenario",
    "SupervisedSet",
    "quantize_temperature",
    "windows_from_scenario",
    "load_scenario_csv",
    "save_scenario_csv",
]

AXES = ("fx", "fy", "fz", "mx", "my", "mz")

# Measurement ranges of the sensor: |fx|,|fy| <= 600 N, |fz| <= 2000 N,
# |mx|,|my| <= 14 N*m, |mz| <= 20 N*m.
FULL_SCALE = (600.0, 600.0, 2000.0, 14.0, 14.0, 20.0)

# Temperature readings resolve to multiples of 7.8125 m°C (exactly 2^-7).
TMP117_RESOLUTION_C = 0.0078125
TEMP_MIN_C = -55.0
TEMP_MAX_C = 125.0


def quantize_temperature(t_c: float) -> float:
    """Snap a temperature to the nearest representable sensor reading."""
    if not math.isfinite(t_c):
        raise ValidationError(f"temperature must be finite, got {t_c!r}")
    # 2^-7 grid: scaling by 128 is exact in float64.
    return float(np.rint(t_c * 128.0) / 128.0)


@dataclass(frozen=True)
class Wrench:
    """Six-axis force/torque value: forces in N, moments in N*m."""

    fx: float
    fy: float
    fz: float
    mx: float
    my: float
    mz: float

    def __post_init__(self):
        for name in AXES:
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"wrench component {name} must be finite")

    @classmethod
    def zero(cls) -> "Wrench":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, a) -> "Wrench":
        fx, fy, fz, mx, my, mz = (float(v) for v in a)
        return cls(fx, fy, fz, mx, my, mz)

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.fz, self.mx, self.my, self.mz])

    def validate_full_scale(self, ranges=FULL_SCALE) -> "Wrench":
        for name, limit in zip(AXES, ranges):
            if abs(getattr(self, name)) > limit:
                raise ValidationError(f"{name}={getattr(self, name)} exceeds full scale {limit}")
        return self

    def __sub__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.fx - other.fx, self.fy - other.fy, self.fz - other.fz,
                      self.mx - other.mx, self.my - other.my, self.mz - other.mz)

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.fx + other.fx, self.fy + other.fy, self.fz + other.fz,
                      self.mx + other.mx, self.my + other.my, self.mz + other.mz)

    def __neg__(self) -> "Wrench":
        return Wrench(-self.fx, -self.fy, -self.fz, -self.mx, -self.my, -self.mz)


@dataclass(frozen=True)
class SensorFrame:
    """One timestamped sample: 6 raw ADC counts plus a temperature reading."""

    time_s: float
    adc: tuple[int, int, int, int, int, int]
    temp_c: float

    def __post_init__(self):
        if not (math.isfinite(self.time_s) and self.time_s >= 0.0):
            raise ValidationError(f"time_s must be finite and nonnegative, got {self.time_s!r}")
        if len(self.adc) != 6:
            raise DimensionError(f"frame needs 6 ADC channels, got {len(self.adc)}")
        object.__setattr__(self, "adc", tuple(int(v) for v in self.adc))
        if not math.isfinite(self.temp_c) or not (TEMP_MIN_C <= self.temp_c <= TEMP_MAX_C):
            raise ValidationError(
                f"temp_c={self.temp_c!r} outside sensor envelope [{TEMP_MIN_C}, {TEMP_MAX_C}] °C")


@dataclass(frozen=True)
class TemperatureWindow:
    """The most recent N temperature samples, oldest first."""

    temps_c: np.ndarray

    def __post_init__(self):
        arr = np.array(self.temps_c, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise DimensionError("temperature window must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("temperature window entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "temps_c", arr)

    def __len__(self) -> int:
        return int(self.temps_c.size)

    @property
    def last(self) -> float:
        return float(self.temps_c[-1])


@dataclass
class Scenario:
    """A labeled time series of frames; treat as immutable once built."""

    name: str
    sample_rate_hz: float
    frames: list[SensorFrame]
    truth_drift: list[Wrench] | None = None
    truth_applied: list[Wrench] | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.sample_rate_hz) and self.sample_rate_hz > 0):
            raise ValidationError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        for label, lst in (("truth_drift", self.truth_drift), ("truth_applied", self.truth_applied)):
            if lst is not None and len(lst) != len(self.frames):
                raise ValidationError(
                    f"{label} has {len(lst)} entries for {len(self.frames)} frames")
        times = self.times()
        if len(times) > 1:
            dts = np.diff(times)
            bad = np.nonzero(dts <= 0)[0]
            if bad.size:
                k = int(bad[0])
                raise ValidationError(
                    f"time_s not strictly increasing at frame {k + 1} "
                    f"(t={times[k + 1]!r} after t={times[k]!r})")
            nominal = 1.0 / self.sample_rate_hz
            if np.any(np.abs(dts - nominal) > 0.01 * nominal):
                k = int(np.argmax(np.abs(dts - nominal)))
                raise ValidationError(
                    f"sample spacing {dts[k]!r} at frame {k + 1} deviates >1% "
                    f"from 1/{self.sample_rate_hz} s")

    def __len__(self) -> int:
        return len(self.frames)

    # Dense-array views (computed on demand, cached).
    def times(self) -> np.ndarray:
        if "_times" not in self.__dict__:
            self.__dict__["_times"] = np.array([f.time_s for f in self.frames])
        return self.__dict__["_times"]

    def temps(self) -> np.ndarray:
        if "_temps" not in self.__dict__:
            self.__dict__["_temps"] = np.array([f.temp_c for f in self.frames])
        return self.__dict__["_temps"]

    def adc_array(self) -> np.ndarray:
        if "_adc" not in self.__dict__:
            self.__dict__["_adc"] = np.array([f.adc for f in self.frames], dtype=np.int64)
        return self.__dict__["_adc"]

    def drift_array(self) -> np.ndarray | None:
        if self.truth_drift is None:
            return None
        if "_drift" not in self.__dict__:
            self.__dict__["_drift"] = np.array([w.as_array() for w in self.truth_drift])
        return self.__dict__["_drift"]

    def applied_array(self) -> np.ndarray | None:
        if self.truth_applied is None:
            return None
        if "_applied" not in self.__dict__:
            self.__dict__["_applied"] = np.array([w.as_array() for w in self.truth_applied])
        return self.__dict__["_applied"]

    @classmethod
    def from_arrays(cls, name, sample_rate_hz, times, adc, temps,
                    drift=None, applied=None, meta=None) -> "Scenario":
        frames = [SensorFrame(float(t), tuple(int(c) for c in row), float(tc))
                  for t, row, tc in zip(times, adc, temps)]
        return cls(
            name=name,
            sample_rate_hz=sample_rate_hz,
            frames=frames,
            truth_drift=None if drift is None else [Wrench.from_array(r) for r in drift],
            truth_applied=None if applied is None else [Wrench.from_array(r) for r in applied],
            meta=dict(meta or {}),
        )

    def slice(self, start: int, stop: int, name: str | None = None) -> "Scenario":
        """Chronological sub-scenario over frames[start:stop]."""
        return Scenario(
            name=name or f"{self.name}[{start}:{stop}]",
            sample_rate_hz=self.sample_rate_hz,
            frames=self.frames[start:stop],
            truth_drift=None if self.truth_drift is None else self.truth_drift[start:stop],
            truth_applied=None if self.truth_applied is None else self.truth_applied[start:stop],
            meta=dict(self.meta),
        )


@dataclass(frozen=True)
class SupervisedSet:
    """Window/target pairs for training; rows are windows, oldest first.

    ``inputs`` is an (N, window) °C array, ``targets`` an (N, 6) physical
    drift array, ``axis_scale`` the per-axis max-abs of the targets used
    to normalize them (floored at 1e-6 so all-zero axes stay harmless).
    """

    inputs: np.ndarray
    targets: np.ndarray
    axis_scale: np.ndarray

    def __post_init__(self):
        inp = np.array(self.inputs, dtype=np.float64, copy=True)
        tgt = np.array(self.targets, dtype=np.float64, copy=True)
        scale = np.array(self.axis_scale, dtype=np.float64, copy=True)
        if inp.ndim != 2 or tgt.ndim != 2 or tgt.shape[1] != 6:
            raise DimensionError("inputs must be (N, window) and targets (N, 6)")
        if inp.shape[0] != tgt.shape[0]:
            raise DimensionError(
                f"inputs ({inp.shape[0]}) and targets ({tgt.shape[0]}) differ in length")
        if scale.shape != (6,) or np.any(scale <= 0):
            raise ValidationError("axis_scale must be 6 positive reals")
        for arr, what in ((inp, "inputs"), (tgt, "targets")):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{what} must be finite")
            arr.setflags(write=False)
        scale.setflags(write=False)
        object.__setattr__(self, "inputs", inp)
        object.__setattr__(self, "targets", tgt)
        object.__setattr__(self, "axis_scale", scale)

    def __len__(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def window(self) -> int:
        return int(self.inputs.shape[1])

    def window_at(self, i: int) -> TemperatureWindow:
        return TemperatureWindow(self.inputs[i])

    def target_at(self, i: int) -> Wrench:
        return Wrench.from_array(self.targets[i])

    def normalized_targets(self) -> np.ndarray:
        return self.targets / self.axis_scale


def windows_from_scenario(s: Scenario, window: int = 10, stride: int = 1) -> SupervisedSet:
    """Slide a temperature window over a labeled scenario.

    Pair i uses the temperatures of frames [i-window+1 .. i] as input and
    truth_drift[i] as target, for i = window-1, window-1+stride, ...
    """
    if s.truth_drift is None:
        raise LabelingError(f"scenario {s.name!r} has no truth_drift labels")
    if window < 1 or stride < 1:
        raise DimensionError("window and stride must be >= 1")
    n = len(s.frames)
    if n < window:
        raise DimensionError(f"scenario has {n} frames, need at least window={window}")
    temps = s.temps()
    drift = s.drift_array()
    ends = np.arange(window - 1, n, stride)
    offsets = np.arange(-(window - 1), 1)
    inputs = temps[ends[:, None] + offsets[None, :]]
    targets = drift[ends]
    scale = np.maximum(np.max(np.abs(targets), axis=0), 1e-6)
    return SupervisedSet(inputs=inputs, targets=targets, axis_scale=scale)


# ---------------------------------------------------------------------------
# CSV serialization

_BASE_COLS = ["time_s", "adc1", "adc2", "adc3", "adc4", "adc5", "adc6", "temp_c"]
_DRIFT_COLS = ["dfx", "dfy", "dfz", "dmx", "dmy", "dmz"]
_APPLIED_COLS = ["afx", "afy", "afz", "amx", "amy", "amz"]


def save_scenario_csv(s: Scenario, path) -> None:
    cols = list(_BASE_COLS)
    if s.truth_drift is not None:
        cols += _DRIFT_COLS
    if s.truth_applied is not None:
        cols += _APPLIED_COLS
    lines = [f"# name: {s.name}", f"# sample_rate_hz: {s.sample_rate_hz!r}"]
    for key in s.meta:
        lines.append(f"# meta.{key}: {s.meta[key]}")
    lines.append(",".join(cols))
    drift = s.truth_drift
    applied = s.truth_applied
    for i, f in enumerate(s.frames):
        parts = [repr(f.time_s)]
        parts += [str(c) for c in f.adc]
        parts.append(repr(f.temp_c))
        if drift is not None:
            w = drift[i]
            parts += [repr(getattr(w, a)) for a in AXES]
        if applied is not None:
            w = applied[i]
            parts += [repr(getattr(w, a)) for a in AXES]
        lines.append(",".join(parts))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_scenario_csv(path) -> Scenario:
    name = None
    rate = None
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    row_lines: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is not None:
                    continue
                body = line.lstrip("#").strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    key, value = key.strip(), value.strip()
                    if key == "name":
                        name = value
                    elif key == "sample_rate_hz":
                        rate = float(value)
                    elif key.startswith("meta."):
                        meta[key[len("meta."):]] = value
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                base = header[: len(_BASE_COLS)]
                if base != _BASE_COLS:
                    raise ParseError(f"bad header, expected it to start with {','.join(_BASE_COLS)}",
                                     line=lineno)
                extra = header[len(_BASE_COLS):]
                if extra not in ([], _DRIFT_COLS, _APPLIED_COLS, _DRIFT_COLS + _APPLIED_COLS):
                    raise ParseError(
                        "optional column groups must be the full drift and/or applied sets",
                        line=lineno)
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(parts)}", line=lineno)
            rows.append(parts)
            row_lines.append(lineno)
    if header is None:
        raise ParseError("file has no header row", line=1)

    has_drift = "dfx" in header
    has_applied = "afx" in header
    frames: list[SensorFrame] = []
    drift: list[Wrench] | None = [] if has_drift else None
    applied: list[Wrench] | None = [] if has_applied else None
    prev_t = -math.inf
    for parts, lineno in zip(rows, row_lines):
        try:
            t = float(parts[0])
            adc = tuple(int(v) for v in parts[1:7])
            temp = float(parts[7])
            k = 8
            if has_drift:
                dr = Wrench.from_array([float(v) for v in parts[k:k + 6]])
                k += 6
            if has_applied:
                ap = Wrench.from_array([float(v) for v in parts[k:k + 6]])
        except (ValueError, ValidationError) as exc:
            raise ParseError(str(exc), line=lineno) from None
        if t <= prev_t:
            raise ValidationError(
                f"line {lineno}: time_s {t!r} does not increase past {prev_t!r}")
        prev_t = t
        try:
            frames.append(SensorFrame(time_s=t, adc=adc, temp_c=temp))
        except (ValidationError, DimensionError) as exc:
            raise ParseError(str(exc), line=lineno) from None
        if has_drift:
            drift.append(dr)
        if has_applied:
            applied.append(ap)

    if rate is None:
        if len(frames) > 1:
            dts = np.diff([f.time_s for f in frames])
            rate = 1.0 / float(np.median(dts))
        else:
            rate = 1.0
    import os
    if name is None:
        name = os.path.splitext(os.path.basename(str(path)))[0]
    return Scenario(name=name, sample_rate_hz=rate, frames=frames,
                    truth_drift=drift, truth_applied=applied, meta=meta)
