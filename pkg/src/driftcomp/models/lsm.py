"""Linear temperature calibration: drift = o + c_t * t, fit by least squares.

The fit uses the last temperature of each window as the regressor and
works directly in °C and physical units, so the recovered coefficients
are the per-axis offset (N, N*m) and slope (N/°C, N*m/°C).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..datamodel import SupervisedSet, TemperatureWindow, Wrench
from ..errors import SingularMatrixError
from ..linalg import Matrix, Vector, solve_least_squares
from .base import ModelBase, N_AXES

__all__ = ["LsmModel", "lsm_fit", "lsm_predict"]


@dataclass(frozen=True)
class LsmModel(ModelBase):
    """Per-axis affine drift model in the last window temperature."""

    c_t: Matrix  # (6, 1), N or N*m per °C
    o: Vector    # (6,), N or N*m
    window: int = 10

    family = "lsm"
    # LSM predicts physical units directly; keep the common interface by
    # exposing a unit scale and identity temperature mapping.
    t_center = 0.0
    t_half = 1.0

    def __post_init__(self):
        if self.c_t.rows != N_AXES or self.c_t.cols != 1:
            raise ValueError(f"c_t must be 6x1, got {self.c_t.rows}x{self.c_t.cols}")
        if len(self.o) != N_AXES:
            raise ValueError(f"o must have 6 entries, got {len(self.o)}")

    @property
    def axis_scale(self) -> np.ndarray:
        return np.ones(N_AXES)

    def predict_norm_window(self, temps_c: np.ndarray) -> np.ndarray:
        t = float(np.asarray(temps_c, dtype=np.float64)[-1])
        return self.o.data + self.c_t.data[:, 0] * t

    def param_arrays(self) -> dict[str, np.ndarray]:
        return {"c_t": self.c_t.data, "o": self.o.data}

    def replace_params(self, params: dict[str, np.ndarray]) -> "LsmModel":
        return replace(self, c_t=Matrix(params["c_t"]), o=Vector(params["o"]))


def lsm_fit(sset: SupervisedSet, ridge: float = 1e-9) -> LsmModel:
    """Least-squares fit of drift = o + c_t * t over a supervised set."""
    n = len(sset)
    if n < 2:
        raise SingularMatrixError(f"need at least 2 samples to fit, got {n}")
    t = sset.inputs[:, -1]
    if np.all(t == t[0]):
        raise SingularMatrixError(
            "all window temperatures are identical; the slope is unidentifiable")
    a = Matrix(np.column_stack([np.ones(n), t]))
    b = Matrix(sset.targets)
    x = solve_least_squares(a, b, ridge=ridge)
    return LsmModel(c_t=Matrix(x.data[1, :].reshape(N_AXES, 1)),
                    o=Vector(x.data[0, :]),
                    window=sset.window)


def lsm_predict(m: LsmModel, w: TemperatureWindow) -> Wrench:
    return Wrench.from_array(m.predict_drift(w))
