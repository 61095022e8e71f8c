"""Drift-prediction model families and their exact analytic gradients."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from .base import (ModelBase, N_AXES, TEMP_CENTER_C, TEMP_HALF_RANGE_C,
                   sigmoid, uniform_init)
from .gru import GruModel, backward_gru, gru_cell, gru_forward
from .lsm import LsmModel, lsm_fit, lsm_predict
from .mlp import MlpModel, backward_mlp, mlp_forward
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tcn import TcnBlock, TcnModel, backward_tcn, tcn_forward

# Canonical comparison order for reports.
MODEL_FAMILIES = ("lsm", "mlp", "mlp_seq", "tcn", "gru")

DEFAULT_GRU_HIDDEN = 32
DEFAULT_MLP_WIDTH = 36
DEFAULT_MLP_DEPTH = 3
DEFAULT_TCN_CHANNELS = 16
DEFAULT_TCN_DILATIONS = (1, 2, 4, 8)

__all__ = [
    "MODEL_FAMILIES", "ModelBase", "LsmModel", "MlpModel", "GruModel", "TcnModel",
    "TcnBlock", "lsm_fit", "lsm_predict", "mlp_forward", "gru_cell", "gru_forward",
    "tcn_forward", "backward", "loss_only", "init_params", "save_model", "load_model",
    "model_to_dict", "model_from_dict", "sigmoid",
]


def init_params(kind: str, seed: int, hidden: int | None = None, window: int = 10):
    """Deterministic init: matrices uniform in +-sqrt(1/fan_in), biases zero."""
    rng = np.random.default_rng(seed)
    if kind == "lsm":
        from ..linalg import Matrix, Vector
        return LsmModel(c_t=Matrix(np.zeros((N_AXES, 1))), o=Vector(np.zeros(N_AXES)),
                        window=window)
    if kind in ("mlp", "mlp_seq"):
        width = hidden or DEFAULT_MLP_WIDTH
        input_width = 1 if kind == "mlp" else window
        widths = [input_width] + [width] * DEFAULT_MLP_DEPTH + [N_AXES]
        layers = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            layers.append((uniform_init(rng, (fan_out, fan_in), fan_in), np.zeros(fan_out)))
        return MlpModel(layers=tuple(layers), input_width=input_width, window=window)
    if kind == "gru":
        h = hidden or DEFAULT_GRU_HIDDEN
        if h < 1:
            raise DimensionError("hidden must be >= 1")
        return GruModel(
            w_xr=uniform_init(rng, (h, 1), 1), w_hr=uniform_init(rng, (h, h), h),
            w_xz=uniform_init(rng, (h, 1), 1), w_hz=uniform_init(rng, (h, h), h),
            w_xg=uniform_init(rng, (h, 1), 1), w_hg=uniform_init(rng, (h, h), h),
            head_w=uniform_init(rng, (N_AXES, h), h), head_b=np.zeros(N_AXES),
            window=window)
    if kind == "tcn":
        ch = hidden or DEFAULT_TCN_CHANNELS
        blocks = []
        c_in = 1
        for d in DEFAULT_TCN_DILATIONS:
            fan1 = c_in * 2
            blocks.append(TcnBlock(
                k1=uniform_init(rng, (ch, c_in, 2), fan1), b1=np.zeros(ch),
                k2=uniform_init(rng, (ch, ch, 2), ch * 2), b2=np.zeros(ch),
                res_w=None if c_in == ch else uniform_init(rng, (ch, c_in), c_in),
                dilation=d))
            c_in = ch
        return TcnModel(blocks=tuple(blocks), head_w=uniform_init(rng, (N_AXES, ch), ch),
                        head_b=np.zeros(N_AXES), window=window)
    raise DimensionError(f"unknown model kind {kind!r}")


def backward(model, windows_c: np.ndarray, targets_norm: np.ndarray):
    """Batch MSE loss (normalized units) and exact parameter gradients."""
    windows_c = np.asarray(windows_c, dtype=np.float64)
    targets_norm = np.asarray(targets_norm, dtype=np.float64)
    if windows_c.ndim != 2 or targets_norm.ndim != 2 or targets_norm.shape[1] != N_AXES:
        raise DimensionError("expected (B, window) inputs and (B, 6) targets")
    if windows_c.shape[0] != targets_norm.shape[0] or windows_c.shape[0] == 0:
        raise DimensionError("batch must be nonempty with matching input/target counts")
    if isinstance(model, MlpModel):
        return backward_mlp(model, windows_c, targets_norm)
    if isinstance(model, GruModel):
        return backward_gru(model, windows_c, targets_norm)
    if isinstance(model, TcnModel):
        return backward_tcn(model, windows_c, targets_norm)
    raise DimensionError(f"no gradient path for model family {getattr(model, 'family', '?')!r}")


def forward_train_norm(model, windows_c: np.ndarray) -> np.ndarray:
    """Vectorized training-path forward (normalized outputs, no caches kept)."""
    if isinstance(model, MlpModel):
        y, _ = model.forward_train(model.batch_features(windows_c))
        return y
    xn = model.normalize_temps(np.asarray(windows_c, dtype=np.float64))
    y, _ = model.forward_train(xn)
    return y


def loss_only(model, windows_c: np.ndarray, targets_norm: np.ndarray) -> float:
    """Forward-only batch MSE; used by finite-difference checks and training."""
    y = forward_train_norm(model, windows_c)
    diff = y - np.asarray(targets_norm, dtype=np.float64)
    return float(np.mean(diff * diff))
