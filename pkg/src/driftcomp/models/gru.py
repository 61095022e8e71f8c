"""Gated recurrent unit drift model with exact backprop through time.

Gate equations (no bias terms inside the gates):

    r_t = sigmoid(W_xr x_t + W_hr h_{t-1})
    z_t = sigmoid(W_xz x_t + W_hz h_{t-1})
    g_t = tanh(W_hg (r_t * h_{t-1}) + W_xg x_t)
    h_t = (1 - z_t) * g_t + z_t * h_{t-1}

The window is folded oldest-to-newest from h_0 = 0 and a linear head
(with bias) maps the final hidden state to 6 normalized drift values.

Two implementations coexist:

* a fused single-window kernel (numba-compiled when available) used by
  the streaming pipeline and by batch evaluation, so both paths share
  bit-identical arithmetic, and
* a vectorized numpy forward/backward pair for training.

Both stack the r/z gates ([W_hr; W_hz] as one (2H, H) matrix) so the
per-row dot products agree between them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from ..datamodel import TemperatureWindow
from ..errors import DimensionError
from ..linalg import Vector
from .base import (ModelBase, N_AXES, TEMP_CENTER_C, TEMP_HALF_RANGE_C,
                   freeze_array, sigmoid)

__all__ = ["GruModel", "gru_cell", "gru_forward"]


def _predict_window_numpy(xs, w_x_rz, w_h_rz, w_xg, w_hg, head_w, head_b):
    hidden = w_hg.shape[0]
    h = np.zeros(hidden)
    for x in xs:
        rz = sigmoid(x * w_x_rz + w_h_rz @ h)
        r, z = rz[:hidden], rz[hidden:]
        g = np.tanh(x * w_xg + w_hg @ (r * h))
        h = (1.0 - z) * g + z * h
    return head_w @ h + head_b


_predict_window = _predict_window_numpy
if not os.environ.get("DRIFTCOMP_DISABLE_NUMBA"):
    try:
        from numba import njit

        @njit(cache=True, fastmath=False)
        def _predict_window_numba(xs, w_x_rz, w_h_rz, w_xg, w_hg, head_w, head_b):  # pragma: no cover
            hidden = w_hg.shape[0]
            h = np.zeros(hidden)
            r = np.empty(hidden)
            z = np.empty(hidden)
            rh = np.empty(hidden)
            g = np.empty(hidden)
            for t in range(xs.shape[0]):
                x = xs[t]
                for i in range(hidden):
                    acc_r = x * w_x_rz[i]
                    acc_z = x * w_x_rz[hidden + i]
                    for k in range(hidden):
                        acc_r += w_h_rz[i, k] * h[k]
                        acc_z += w_h_rz[hidden + i, k] * h[k]
                    if acc_r >= 0.0:
                        r[i] = 1.0 / (1.0 + np.exp(-acc_r))
                    else:
                        e = np.exp(acc_r)
                        r[i] = e / (1.0 + e)
                    if acc_z >= 0.0:
                        z[i] = 1.0 / (1.0 + np.exp(-acc_z))
                    else:
                        e = np.exp(acc_z)
                        z[i] = e / (1.0 + e)
                for i in range(hidden):
                    rh[i] = r[i] * h[i]
                for i in range(hidden):
                    acc = x * w_xg[i]
                    for k in range(hidden):
                        acc += w_hg[i, k] * rh[k]
                    g[i] = np.tanh(acc)
                for i in range(hidden):
                    h[i] = (1.0 - z[i]) * g[i] + z[i] * h[i]
            y = np.empty(head_w.shape[0])
            for a in range(head_w.shape[0]):
                acc = head_b[a]
                for k in range(hidden):
                    acc += head_w[a, k] * h[k]
                y[a] = acc
            return y

        _predict_window = _predict_window_numba
    except ImportError:  # pragma: no cover
        pass


@dataclass(frozen=True)
class GruModel(ModelBase):
    """All gate matrices plus the linear readout head."""

    w_xr: np.ndarray  # (H, 1)
    w_hr: np.ndarray  # (H, H)
    w_xz: np.ndarray
    w_hz: np.ndarray
    w_xg: np.ndarray
    w_hg: np.ndarray
    head_w: np.ndarray  # (6, H)
    head_b: np.ndarray  # (6,)
    window: int = 10
    axis_scale: np.ndarray = None
    t_center: float = TEMP_CENTER_C
    t_half: float = TEMP_HALF_RANGE_C

    family = "gru"

    def __post_init__(self):
        h = np.asarray(self.w_hr).shape[0]
        shapes = {"w_xr": (h, 1), "w_hr": (h, h), "w_xz": (h, 1), "w_hz": (h, h),
                  "w_xg": (h, 1), "w_hg": (h, h), "head_w": (N_AXES, h), "head_b": (N_AXES,)}
        for name, shape in shapes.items():
            object.__setattr__(self, name, freeze_array(getattr(self, name), shape, name))
        scale = np.ones(N_AXES) if self.axis_scale is None else self.axis_scale
        object.__setattr__(self, "axis_scale", freeze_array(scale, (N_AXES,), "axis_scale"))
        # Pre-stacked r/z views shared by every execution path.
        w_x_rz = np.concatenate([self.w_xr.ravel(), self.w_xz.ravel()])
        w_h_rz = np.vstack([self.w_hr, self.w_hz])
        for name, arr in (("_w_x_rz", w_x_rz), ("_w_h_rz", w_h_rz),
                          ("_w_xg_flat", self.w_xg.ravel().copy())):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def hidden(self) -> int:
        return self.w_hr.shape[0]

    def predict_norm_window(self, temps_c: np.ndarray) -> np.ndarray:
        temps_c = np.asarray(temps_c, dtype=np.float64)
        if temps_c.size < 1:
            raise DimensionError("temperature window must be nonempty")
        xs = np.ascontiguousarray(self.normalize_temps(temps_c))
        return _predict_window(xs, self._w_x_rz, self._w_h_rz, self._w_xg_flat,
                               self.w_hg, self.head_w, self.head_b)

    def param_arrays(self) -> dict[str, np.ndarray]:
        return {"w_xr": self.w_xr, "w_hr": self.w_hr, "w_xz": self.w_xz,
                "w_hz": self.w_hz, "w_xg": self.w_xg, "w_hg": self.w_hg,
                "head_w": self.head_w, "head_b": self.head_b}

    def replace_params(self, params: dict[str, np.ndarray]) -> "GruModel":
        return replace(self, **params)

    def with_axis_scale(self, scale) -> "GruModel":
        return replace(self, axis_scale=scale)

    # Vectorized training forward; caches what BPTT needs.
    def forward_train(self, xn: np.ndarray):
        batch, steps = xn.shape
        hdim = self.hidden
        h = np.zeros((batch, hdim))
        caches = []
        for t in range(steps):
            xt = xn[:, t:t + 1]
            rz = sigmoid(xt * self._w_x_rz[None, :] + h @ self._w_h_rz.T)
            r, z = rz[:, :hdim], rz[:, hdim:]
            g = np.tanh(xt * self._w_xg_flat[None, :] + (r * h) @ self.w_hg.T)
            h_new = (1.0 - z) * g + z * h
            caches.append((h, rz, g))
            h = h_new
        y = h @ self.head_w.T + self.head_b[None, :]
        return y, (xn, caches, h)


def gru_cell(m: GruModel, x_t: Vector, h_prev: Vector) -> Vector:
    """One gate-equation step; x_t is the raw cell input (not normalized)."""
    if len(x_t) != 1 or len(h_prev) != m.hidden:
        raise DimensionError(
            f"gru_cell expects x of width 1 and h of width {m.hidden}, "
            f"got {len(x_t)} and {len(h_prev)}")
    x = float(x_t.data[0])
    h = h_prev.data
    hdim = m.hidden
    rz = sigmoid(x * m._w_x_rz + m._w_h_rz @ h)
    r, z = rz[:hdim], rz[hdim:]
    g = np.tanh(x * m._w_xg_flat + m.w_hg @ (r * h))
    return Vector((1.0 - z) * g + z * h)


def gru_forward(m: GruModel, w: TemperatureWindow) -> Vector:
    """Fold the cell over a window's normalized temperatures; apply the head."""
    return Vector(m.predict_norm_window(w.temps_c))


def backward_gru(m: GruModel, windows_c: np.ndarray, targets_norm: np.ndarray):
    """MSE loss and exact BPTT gradients over a batch of windows."""
    xn = m.normalize_temps(np.asarray(windows_c, dtype=np.float64))
    y, (xn, caches, h_final) = m.forward_train(xn)
    diff = y - targets_norm
    batch = y.shape[0]
    loss = float(np.mean(diff * diff))
    dy = (2.0 / (batch * N_AXES)) * diff

    hdim = m.hidden
    d_head_w = dy.T @ h_final
    d_head_b = dy.sum(axis=0)
    dh = dy @ m.head_w

    d_w_x_rz = np.zeros(2 * hdim)
    d_w_h_rz = np.zeros((2 * hdim, hdim))
    d_w_xg = np.zeros(hdim)
    d_w_hg = np.zeros((hdim, hdim))

    for t in range(len(caches) - 1, -1, -1):
        h_prev, rz, g = caches[t]
        r, z = rz[:, :hdim], rz[:, hdim:]
        xt = xn[:, t:t + 1]

        dz = dh * (h_prev - g)
        da_z = dz * z * (1.0 - z)
        dg = dh * (1.0 - z)
        da_g = dg * (1.0 - g * g)

        d_w_xg += (da_g * xt).sum(axis=0)
        d_w_hg += da_g.T @ (r * h_prev)
        drh = da_g @ m.w_hg

        dr = drh * h_prev
        da_r = dr * r * (1.0 - r)

        da_rz = np.concatenate([da_r, da_z], axis=1)
        d_w_x_rz += (da_rz * xt).sum(axis=0)
        d_w_h_rz += da_rz.T @ h_prev

        # h_{t-1} feeds the blend, both gates, and the candidate via r*h.
        dh = dh * z + da_rz @ m._w_h_rz + drh * r

    grads = {
        "w_xr": d_w_x_rz[:hdim].reshape(hdim, 1),
        "w_xz": d_w_x_rz[hdim:].reshape(hdim, 1),
        "w_hr": d_w_h_rz[:hdim],
        "w_hz": d_w_h_rz[hdim:],
        "w_xg": d_w_xg.reshape(hdim, 1),
        "w_hg": d_w_hg,
        "head_w": d_head_w,
        "head_b": d_head_b,
    }
    return loss, grads
