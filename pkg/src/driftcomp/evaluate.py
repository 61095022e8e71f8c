"""Per-axis RMSE computation, full-scale percentages and method comparison.

Reports come in three shapes: a machine-readable CSV
(``method,fx,fy,fz,mx,my,mz`` with a ``# meta:`` comment header), an
aligned human-readable table (4 decimal places), and a long-format
``time_s,axis,value,series`` CSV for external plotting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import AXES, FULL_SCALE, Scenario, Wrench, windows_from_scenario
from .errors import DimensionError, LabelingError, ValidationError
from .models import MODEL_FAMILIES, forward_train_norm
from .models.lsm import lsm_fit
from .pipeline import CalibrationMatrix, CompensatorState, run_scenario

__all__ = ["AxisRmse", "ComparisonReport", "rmse_axes", "full_scale_pct",
           "compare_methods", "report_table", "report_csv", "longform_rows",
           "METHOD_LABELS", "chronological_split", "held_out_normalized_rmse"]

# Canonical row order and display names for comparison reports.
METHOD_LABELS = {
    "none": "No compensation",
    "lsm": "LSM",
    "mlp": "MLP",
    "mlp_seq": "MLP-Seq",
    "tcn": "TCN",
    "gru": "GRU",
}
_ROW_ORDER = ("none",) + MODEL_FAMILIES


@dataclass(frozen=True)
class AxisRmse:
    """Root-mean-square error per axis; forces in N, moments in N*m."""

    fx: float
    fy: float
    fz: float
    mx: float
    my: float
    mz: float

    def __post_init__(self):
        for name in AXES:
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0.0):
                raise ValidationError(f"AxisRmse.{name} must be finite and >= 0, got {v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, a) for a in AXES])

    @classmethod
    def from_array(cls, a) -> "AxisRmse":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class ComparisonReport:
    rows: dict[str, AxisRmse]          # method name -> per-axis RMSE
    scenario_name: str
    meta: dict[str, str]
    full_scale_pct_best: tuple         # per-axis %, for the best method
    best_method: str


def rmse_axes(pred: list[Wrench], truth: list[Wrench]) -> AxisRmse:
    if len(pred) != len(truth) or not pred:
        raise DimensionError(
            f"rmse_axes needs equal nonempty lists, got {len(pred)} and {len(truth)}")
    p = np.array([w.as_array() for w in pred])
    t = np.array([w.as_array() for w in truth])
    return AxisRmse.from_array(np.sqrt(np.mean((p - t) ** 2, axis=0)))


def _rmse_arrays(pred: np.ndarray, truth: np.ndarray) -> AxisRmse:
    return AxisRmse.from_array(np.sqrt(np.mean((pred - truth) ** 2, axis=0)))


def full_scale_pct(r: AxisRmse, ranges=FULL_SCALE) -> tuple:
    """RMSE as a percentage of each axis' measurement range."""
    ranges = np.asarray(ranges, dtype=np.float64)
    if ranges.shape != (6,) or np.any(ranges <= 0):
        raise DimensionError("ranges must be 6 positive reals")
    return tuple(100.0 * r.as_array() / ranges)


def compare_methods(s: Scenario, models: dict, calib: CalibrationMatrix) -> ComparisonReport:
    """Run the compensation pipeline per model and tabulate per-axis RMSE.

    Ground truth is the applied load when present, zero otherwise. The
    "No compensation" row scores the raw calibrated wrench itself.
    """
    if s.truth_drift is None and s.truth_applied is None:
        raise LabelingError(f"scenario {s.name!r} carries no ground truth")
    n = len(s.frames)
    applied = s.applied_array()
    truth = np.zeros((n, 6)) if applied is None else applied

    raw = s.adc_array() @ calib.c.data.T + calib.o.data[None, :]
    rows: dict[str, AxisRmse] = {"none": _rmse_arrays(raw, truth)}

    for name, model in models.items():
        state = CompensatorState(model=model, calib=calib)
        _, _, comps = run_scenario(s, state)
        comp = np.array([w.as_array() for w in comps])
        rows[name] = _rmse_arrays(comp, truth)

    ordered = {k: rows[k] for k in _ROW_ORDER if k in rows}
    for k in rows:
        if k not in ordered:
            ordered[k] = rows[k]
    # Best = lowest RMS of the six full-scale fractions; deterministic.
    def score(r: AxisRmse) -> float:
        frac = r.as_array() / np.asarray(FULL_SCALE)
        return float(np.sqrt(np.mean(frac ** 2)))

    best = min((k for k in ordered if k != "none"), key=lambda k: score(ordered[k]),
               default="none")
    return ComparisonReport(
        rows=ordered,
        scenario_name=s.name,
        meta=dict(s.meta),
        full_scale_pct_best=full_scale_pct(ordered[best]),
        best_method=best,
    )


def report_table(rep: ComparisonReport) -> str:
    """Aligned text table, 4 decimal places."""
    header = ["method"] + [f"{a}(N)" if i < 3 else f"{a}(N*m)" for i, a in enumerate(AXES)]
    lines = [f"scenario: {rep.scenario_name}"]
    widths = [16] + [10] * 6
    lines.append("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for name, r in rep.rows.items():
        label = METHOD_LABELS.get(name, name)
        cells = [label.rjust(16)] + [f"{v:.4f}".rjust(10) for v in r.as_array()]
        lines.append("  ".join(cells))
    pct = ", ".join(f"{a}={p:.4f}%" for a, p in zip(AXES, rep.full_scale_pct_best))
    lines.append(f"best method: {METHOD_LABELS.get(rep.best_method, rep.best_method)}"
                 f" (full-scale error: {pct})")
    return "\n".join(lines) + "\n"


def report_csv(rep: ComparisonReport) -> str:
    """Machine-readable rows with a # meta: comment header."""
    meta = " ".join(f"{k}={v}" for k, v in sorted(rep.meta.items()))
    lines = [f"# meta: scenario={rep.scenario_name} {meta}".rstrip()]
    lines.append("method," + ",".join(AXES))
    for name, r in rep.rows.items():
        label = METHOD_LABELS.get(name, name)
        lines.append(label + "," + ",".join(f"{v:.4f}" for v in r.as_array()))
    return "\n".join(lines) + "\n"


def longform_rows(s: Scenario, series: dict[str, np.ndarray]) -> str:
    """Long-format plot data: time_s,axis,value,series."""
    times = s.times()
    lines = ["time_s,axis,value,series"]
    for label, arr in series.items():
        arr = np.asarray(arr)
        if arr.shape != (len(times), 6):
            raise DimensionError(f"series {label!r} must be (n_frames, 6), got {arr.shape}")
        for j, axis in enumerate(AXES):
            col = arr[:, j]
            for t, v in zip(times, col):
                lines.append(f"{t!r},{axis},{v!r},{label}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Convergence-experiment helpers (Table-I style comparisons)

def chronological_split(s: Scenario, train_frac: float = 0.8):
    """Split a scenario's frames chronologically into train/test parts."""
    if not 0.0 < train_frac < 1.0:
        raise ValidationError("train_frac must be in (0, 1)")
    cut = int(len(s.frames) * train_frac)
    if cut < 1 or cut >= len(s.frames):
        raise ValidationError("split leaves an empty part")
    return s.slice(0, cut, name=f"{s.name}-train"), s.slice(cut, len(s.frames), name=f"{s.name}-test")


def held_out_normalized_rmse(model, test_inputs: np.ndarray, test_targets: np.ndarray,
                             train_scale: np.ndarray) -> float:
    """Scalar RMSE over all axes in train-scale normalized units."""
    if getattr(model, "family", "") == "lsm":
        pred = model.predict_norm_batch(test_inputs)  # physical units, unit scale
        err = (pred - test_targets) / train_scale
    else:
        pred = forward_train_norm(model, test_inputs)
        err = pred - test_targets / train_scale
    return float(np.sqrt(np.mean(err ** 2)))
