"""Temporal convolutional network: causal dilated convs with residuals.

Kernel size is 2 throughout; each residual block applies two dilated
causal convolutions (ReLU after the first, ReLU after adding the
residual), with a 1x1 projection on the residual path whenever the
channel count changes. Dilations default to 1, 2, 4, 8, giving a
receptive field of 1 + 2 * (1 + 2 + 4 + 8) = 31 steps, which covers the
10-sample window. Inputs shorter than the receptive field are
left-padded with their first value; the head reads the last time step,
so outputs depend only on the trailing receptive field.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..datamodel import TemperatureWindow
from ..errors import DimensionError
from ..linalg import Vector
from .base import ModelBase, N_AXES, TEMP_CENTER_C, TEMP_HALF_RANGE_C, freeze_array

__all__ = ["TcnBlock", "TcnModel", "tcn_forward"]

KERNEL = 2


def _shift(x: np.ndarray, d: int) -> np.ndarray:
    """Causal shift along the last axis: out[..., t] = x[..., t - d]."""
    out = np.zeros_like(x)
    out[..., d:] = x[..., :-d]
    return out


def _unshift_add(acc: np.ndarray, u: np.ndarray, d: int) -> None:
    """Adjoint of _shift: acc[..., :-d] += u[..., d:]."""
    acc[..., :-d] += u[..., d:]


def _conv(k: np.ndarray, x: np.ndarray, xsh: np.ndarray, b: np.ndarray,
          batch: int, steps: int) -> np.ndarray:
    """Kernel-2 dilated causal conv on a (C, B, T) tensor via one GEMM per tap."""
    c_in = x.shape[0]
    flat = (k[:, :, 0] @ xsh.reshape(c_in, -1) + k[:, :, 1] @ x.reshape(c_in, -1))
    return flat.reshape(-1, batch, steps) + b[:, None, None]


@dataclass(frozen=True)
class TcnBlock:
    """Two dilated causal conv layers plus a residual connection."""

    k1: np.ndarray  # (C_out, C_in, 2): taps at t-d and t
    b1: np.ndarray
    k2: np.ndarray  # (C_out, C_out, 2)
    b2: np.ndarray
    res_w: np.ndarray | None  # (C_out, C_in) 1x1 projection, None = identity
    dilation: int

    def __post_init__(self):
        c_out, c_in, k = np.asarray(self.k1).shape
        if k != KERNEL:
            raise DimensionError(f"kernel size must be {KERNEL}, got {k}")
        object.__setattr__(self, "k1", freeze_array(self.k1, (c_out, c_in, KERNEL), "k1"))
        object.__setattr__(self, "b1", freeze_array(self.b1, (c_out,), "b1"))
        object.__setattr__(self, "k2", freeze_array(self.k2, (c_out, c_out, KERNEL), "k2"))
        object.__setattr__(self, "b2", freeze_array(self.b2, (c_out,), "b2"))
        if self.res_w is None:
            if c_in != c_out:
                raise DimensionError("identity residual requires matching channel counts")
        else:
            object.__setattr__(self, "res_w", freeze_array(self.res_w, (c_out, c_in), "res_w"))
        if self.dilation < 1:
            raise DimensionError("dilation must be >= 1")

    @property
    def c_in(self) -> int:
        return self.k1.shape[1]

    @property
    def c_out(self) -> int:
        return self.k1.shape[0]


@dataclass(frozen=True)
class TcnModel(ModelBase):
    blocks: tuple[TcnBlock, ...]
    head_w: np.ndarray  # (6, channels)
    head_b: np.ndarray  # (6,)
    window: int = 10
    axis_scale: np.ndarray = None
    t_center: float = TEMP_CENTER_C
    t_half: float = TEMP_HALF_RANGE_C

    family = "tcn"

    def __post_init__(self):
        if not self.blocks:
            raise DimensionError("TCN needs at least one block")
        prev = self.blocks[0].c_in
        if prev != 1:
            raise DimensionError("first block must take the 1-channel temperature input")
        for i, blk in enumerate(self.blocks):
            if blk.c_in != prev:
                raise DimensionError(f"block {i} input channels {blk.c_in} != {prev}")
            prev = blk.c_out
        object.__setattr__(self, "head_w", freeze_array(self.head_w, (N_AXES, prev), "head_w"))
        object.__setattr__(self, "head_b", freeze_array(self.head_b, (N_AXES,), "head_b"))
        scale = np.ones(N_AXES) if self.axis_scale is None else self.axis_scale
        object.__setattr__(self, "axis_scale", freeze_array(scale, (N_AXES,), "axis_scale"))
        if self.receptive_field < self.window:
            raise DimensionError(
                f"receptive field {self.receptive_field} < window {self.window}")

    @property
    def channels(self) -> int:
        return self.blocks[-1].c_out

    @property
    def dilations(self) -> tuple[int, ...]:
        return tuple(b.dilation for b in self.blocks)

    @property
    def receptive_field(self) -> int:
        return 1 + (KERNEL - 1) * sum(2 * b.dilation for b in self.blocks)

    def _pad(self, windows: np.ndarray) -> np.ndarray:
        """Left-pad each window with its first value up to the receptive field."""
        need = self.receptive_field - windows.shape[1]
        if need <= 0:
            return windows
        pad = np.repeat(windows[:, :1], need, axis=1)
        return np.concatenate([pad, windows], axis=1)

    def _run_blocks(self, x: np.ndarray) -> np.ndarray:
        for blk in self.blocks:
            d = blk.dilation
            a1 = blk.k1[:, :, 0] @ _shift(x, d) + blk.k1[:, :, 1] @ x + blk.b1[None, :, None]
            h1 = np.maximum(a1, 0.0)
            a2 = blk.k2[:, :, 0] @ _shift(h1, d) + blk.k2[:, :, 1] @ h1 + blk.b2[None, :, None]
            res = x if blk.res_w is None else blk.res_w @ x
            x = np.maximum(a2 + res, 0.0)
        return x

    def predict_norm_window(self, temps_c: np.ndarray) -> np.ndarray:
        temps_c = np.asarray(temps_c, dtype=np.float64)
        if temps_c.size < 1:
            raise DimensionError("temperature window must be nonempty")
        xn = self._pad(self.normalize_temps(temps_c)[None, :])
        feat = self._run_blocks(xn[:, None, :])[0, :, -1]
        return self.head_w @ feat + self.head_b

    def param_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for i, blk in enumerate(self.blocks):
            out[f"b{i}_k1"] = blk.k1
            out[f"b{i}_b1"] = blk.b1
            out[f"b{i}_k2"] = blk.k2
            out[f"b{i}_b2"] = blk.b2
            if blk.res_w is not None:
                out[f"b{i}_res"] = blk.res_w
        out["head_w"] = self.head_w
        out["head_b"] = self.head_b
        return out

    def replace_params(self, params: dict[str, np.ndarray]) -> "TcnModel":
        blocks = []
        for i, blk in enumerate(self.blocks):
            blocks.append(TcnBlock(
                k1=params[f"b{i}_k1"], b1=params[f"b{i}_b1"],
                k2=params[f"b{i}_k2"], b2=params[f"b{i}_b2"],
                res_w=None if blk.res_w is None else params[f"b{i}_res"],
                dilation=blk.dilation))
        return replace(self, blocks=tuple(blocks),
                       head_w=params["head_w"], head_b=params["head_b"])

    def with_axis_scale(self, scale) -> "TcnModel":
        return replace(self, axis_scale=scale)

    def forward_train(self, xn_windows: np.ndarray):
        """Vectorized forward over (B, W) normalized windows, with caches.

        Training uses a channels-first (C, B, T) layout so every
        convolution is a single GEMM on a (C, B*T) view.
        """
        xp = self._pad(xn_windows)
        batch, steps = xp.shape
        x = xp[None, :, :]  # (1, B, T)
        caches = []
        for blk in self.blocks:
            d = blk.dilation
            xsh = _shift(x, d)
            a1 = _conv(blk.k1, x, xsh, blk.b1, batch, steps)
            h1 = np.maximum(a1, 0.0)
            h1sh = _shift(h1, d)
            a2 = _conv(blk.k2, h1, h1sh, blk.b2, batch, steps)
            if blk.res_w is None:
                pre = a2 + x
            else:
                pre = a2 + (blk.res_w @ x.reshape(x.shape[0], -1)).reshape(-1, batch, steps)
            out = np.maximum(pre, 0.0)
            caches.append((x, xsh, h1, h1sh, a1, pre))
            x = out
        feat = x[:, :, -1]  # (C, B)
        y = feat.T @ self.head_w.T + self.head_b[None, :]
        return y, (caches, feat)


def tcn_forward(m: TcnModel, w: TemperatureWindow) -> Vector:
    """Normalized drift prediction for one window (left-padded as needed)."""
    return Vector(m.predict_norm_window(w.temps_c))


def backward_tcn(m: TcnModel, windows_c: np.ndarray, targets_norm: np.ndarray):
    """MSE loss and exact gradients via transposed-convolution accumulation."""
    xn = m.normalize_temps(np.asarray(windows_c, dtype=np.float64))
    y, (caches, feat) = m.forward_train(xn)
    diff = y - targets_norm
    batch = y.shape[0]
    loss = float(np.mean(diff * diff))
    dy = (2.0 / (batch * N_AXES)) * diff

    grads: dict[str, np.ndarray] = {
        "head_w": dy.T @ feat.T,
        "head_b": dy.sum(axis=0),
    }
    dout = np.zeros_like(caches[-1][5])
    dout[:, :, -1] = m.head_w.T @ dy.T

    def flat(t):
        return t.reshape(t.shape[0], -1)

    for i in range(len(m.blocks) - 1, -1, -1):
        blk = m.blocks[i]
        d = blk.dilation
        x, xsh, h1, h1sh, a1, pre = caches[i]
        dpre = dout * (pre > 0.0)
        dpre_f = flat(dpre)
        grads[f"b{i}_b2"] = dpre.sum(axis=(1, 2))
        dk2 = np.empty_like(blk.k2)
        dk2[:, :, 0] = dpre_f @ flat(h1sh).T
        dk2[:, :, 1] = dpre_f @ flat(h1).T
        grads[f"b{i}_k2"] = dk2
        dh1 = (blk.k2[:, :, 1].T @ dpre_f).reshape(h1.shape)
        _unshift_add(dh1, (blk.k2[:, :, 0].T @ dpre_f).reshape(h1.shape), d)
        da1 = dh1 * (a1 > 0.0)
        da1_f = flat(da1)
        grads[f"b{i}_b1"] = da1.sum(axis=(1, 2))
        dk1 = np.empty_like(blk.k1)
        dk1[:, :, 0] = da1_f @ flat(xsh).T
        dk1[:, :, 1] = da1_f @ flat(x).T
        grads[f"b{i}_k1"] = dk1
        dx = (blk.k1[:, :, 1].T @ da1_f).reshape(x.shape)
        _unshift_add(dx, (blk.k1[:, :, 0].T @ da1_f).reshape(x.shape), d)
        if blk.res_w is None:
            dx += dpre
        else:
            grads[f"b{i}_res"] = dpre_f @ flat(x).T
            dx += (blk.res_w.T @ dpre_f).reshape(x.shape)
        dout = dx
    return loss, grads
