"""Compensation pipeline: ADC -> calibration -> wrench, minus predicted drift.

Raw ADC counts pass through the calibration matrix to a wrench; a ring
buffer of the last N temperatures feeds the drift model; the compensated
output is the calibrated wrench minus the predicted drift (subtraction
happens in physical units, after de-normalization).

The streaming state is single-owner mutable: push_frame mutates and
returns the same state object. Warm-up pads the ring by repeating the
first observed temperature so the pipeline emits compensated output
from the very first frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .datamodel import Scenario, SensorFrame, Wrench
from .errors import ConfigurationError, DimensionError, ValidationError
from .linalg import Matrix, Vector

__all__ = ["CalibrationMatrix", "CompensatorState", "raw_to_wrench", "compensate",
           "push_frame", "run_scenario", "save_calibration", "load_calibration"]

CALIB_FORMAT = "driftcomp-calibration"
CALIB_VERSION = 1


@dataclass(frozen=True)
class CalibrationMatrix:
    """Linear map from 6 ADC counts to a wrench: w = c * adc + o."""

    c: Matrix
    o: Vector

    def __post_init__(self):
        if self.c.rows != 6 or self.c.cols != 6:
            raise DimensionError(f"calibration matrix must be 6x6, got {self.c.rows}x{self.c.cols}")
        if len(self.o) != 6:
            raise DimensionError(f"calibration offset must have 6 entries, got {len(self.o)}")

    @classmethod
    def identity(cls) -> "CalibrationMatrix":
        return cls(c=Matrix.identity(6), o=Vector.zeros(6))


def save_calibration(calib: CalibrationMatrix, path) -> None:
    doc = {
        "format": CALIB_FORMAT,
        "version": CALIB_VERSION,
        "c": [list(row) for row in calib.c.data],
        "o": list(calib.o.data),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_calibration(path) -> CalibrationMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != CALIB_FORMAT:
        raise ValidationError(f"not a calibration document (format={doc.get('format')!r})")
    if doc.get("version") != CALIB_VERSION:
        raise ValidationError(f"unsupported calibration version {doc.get('version')!r}")
    return CalibrationMatrix(c=Matrix(np.array(doc["c"])), o=Vector(np.array(doc["o"])))


def raw_to_wrench(adc, calib: CalibrationMatrix) -> Wrench:
    counts = np.asarray(adc, dtype=np.float64)
    if counts.shape != (6,):
        raise DimensionError(f"expected 6 ADC values, got shape {counts.shape}")
    return Wrench.from_array(calib.c.data @ counts + calib.o.data)


def compensate(measured: Wrench, drift: Wrench) -> Wrench:
    return measured - drift


class CompensatorState:
    """Ring buffer of recent temperatures plus the model and calibration."""

    def __init__(self, model, calib: CalibrationMatrix, window: int | None = None):
        n = int(window if window is not None else getattr(model, "window", 10))
        if n < 1:
            raise ConfigurationError("window must be >= 1")
        model_window = getattr(model, "window", n)
        input_width = getattr(model, "input_width", None)
        if input_width is not None and input_width not in (1, n):
            raise ConfigurationError(
                f"model expects windows of {input_width} temperatures, pipeline provides {n}")
        if getattr(model, "family", "") in ("gru", "tcn", "mlp_seq") and model_window != n:
            raise ConfigurationError(
                f"model was trained with window {model_window}, pipeline provides {n}")
        self.model = model
        self.calib = calib
        self.window = n
        self.count_seen = 0
        self._ring = np.zeros(n)
        self._idx = 0
        self._ordered = np.zeros(n)  # reused oldest-first snapshot

    def ring_snapshot(self) -> np.ndarray:
        """Oldest-first window, padded with the first observed temperature."""
        n = self.window
        out = self._ordered
        if self.count_seen >= n:
            k = self._idx
            out[: n - k] = self._ring[k:]
            out[n - k:] = self._ring[:k]
        else:
            c = self.count_seen
            out[: n - c] = self._ring[0] if c else 0.0
            out[n - c:] = self._ring[:c]
        return out

    def push_temperature(self, temp_c: float) -> None:
        if self.count_seen < self.window:
            self._ring[self.count_seen] = temp_c
        else:
            self._ring[self._idx] = temp_c
            self._idx = (self._idx + 1) % self.window
        self.count_seen += 1
        if self.count_seen == self.window:
            self._idx = 0


def push_frame(state: CompensatorState, frame: SensorFrame):
    """Feed one frame; returns (state, compensated wrench, drift wrench)."""
    state.push_temperature(frame.temp_c)
    window = state.ring_snapshot()
    drift_vec = state.model.predict_drift(window)
    measured = raw_to_wrench(frame.adc, state.calib)
    drift = Wrench.from_array(drift_vec)
    return state, compensate(measured, drift), drift


def run_scenario(s: Scenario, state: CompensatorState):
    """Fold push_frame over a scenario; returns (raw, drift, compensated) lists."""
    if not s.frames:
        raise DimensionError("scenario has no frames")
    raws: list[Wrench] = []
    drifts: list[Wrench] = []
    comps: list[Wrench] = []
    for frame in s.frames:
        state, comp, drift = push_frame(state, frame)
        raws.append(raw_to_wrench(frame.adc, state.calib))
        drifts.append(drift)
        comps.append(comp)
    return raws, drifts, comps
