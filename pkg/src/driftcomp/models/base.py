"""Shared plumbing for the drift-model families.

Every model maps a temperature window (°C, oldest first) to a 6-axis
drift estimate. Networks operate on normalized temperatures
``t' = (t - t_center) / t_half`` (defaults map the -20..60 °C chamber
range onto [-1, 1]) and emit drift normalized by a stored per-axis
scale; ``predict_drift`` undoes that scale. The least-squares model is
the exception: it works in raw °C and physical units with a unit scale.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError

TEMP_CENTER_C = 20.0
TEMP_HALF_RANGE_C = 40.0

N_AXES = 6


def freeze_array(arr, shape=None, what="parameter") -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    if shape is not None and out.shape != tuple(shape):
        raise DimensionError(f"{what}: expected shape {tuple(shape)}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{what} must be finite")
    out.setflags(write=False)
    return out


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function (never overflows)."""
    e = np.exp(-np.abs(x))
    return np.where(x >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = float(np.sqrt(1.0 / fan_in))
    return rng.uniform(-bound, bound, size=shape)


class ModelBase:
    """Mixin providing normalization and physical-unit prediction."""

    # Subclasses define: family (str), window (int), axis_scale, t_center, t_half.

    def normalize_temps(self, temps_c: np.ndarray) -> np.ndarray:
        return (np.asarray(temps_c, dtype=np.float64) - self.t_center) / self.t_half

    def predict_norm_window(self, temps_c: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_norm_batch(self, windows_c: np.ndarray) -> np.ndarray:
        """Row-by-row application of the canonical window kernel.

        Kept as an explicit loop so that batch evaluation and the
        streaming pipeline share bit-identical per-window arithmetic.
        """
        windows_c = np.asarray(windows_c, dtype=np.float64)
        if windows_c.ndim != 2:
            raise DimensionError(f"expected (N, window) array, got shape {windows_c.shape}")
        out = np.empty((windows_c.shape[0], N_AXES))
        for i in range(windows_c.shape[0]):
            out[i] = self.predict_norm_window(windows_c[i])
        return out

    def predict_drift(self, temps_c) -> np.ndarray:
        """Physical-unit drift (N / N*m) for one window."""
        temps = getattr(temps_c, "temps_c", temps_c)
        return self.predict_norm_window(np.asarray(temps, dtype=np.float64)) * self.axis_scale

    def predict_drift_batch(self, windows_c: np.ndarray) -> np.ndarray:
        return self.predict_norm_batch(windows_c) * self.axis_scale[None, :]
