"""Multi-layer perceptron drift models.

Two variants share this implementation: the single-temperature MLP
(input width 1, fed the newest window entry) and the sequence MLP
(input width = window length, fed the whole window oldest-first).
Hidden layers are ReLU, the output layer is linear with 6 outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DimensionError
from ..linalg import Vector
from .base import ModelBase, N_AXES, TEMP_CENTER_C, TEMP_HALF_RANGE_C, freeze_array

__all__ = ["MlpModel", "mlp_forward"]


@dataclass(frozen=True)
class MlpModel(ModelBase):
    """Affine/ReLU stack; ``layers`` is a tuple of (weight, bias) pairs."""

    layers: tuple[tuple[np.ndarray, np.ndarray], ...]
    input_width: int
    window: int = 10
    axis_scale: np.ndarray = None
    t_center: float = TEMP_CENTER_C
    t_half: float = TEMP_HALF_RANGE_C

    def __post_init__(self):
        frozen = []
        prev = self.input_width
        for i, (w, b) in enumerate(self.layers):
            w = freeze_array(w, what=f"layer {i} weight")
            b = freeze_array(b, what=f"layer {i} bias")
            if w.ndim != 2 or w.shape[1] != prev or b.shape != (w.shape[0],):
                raise DimensionError(
                    f"layer {i}: weight {w.shape} / bias {b.shape} do not chain from width {prev}")
            prev = w.shape[0]
            frozen.append((w, b))
        if prev != N_AXES:
            raise DimensionError(f"final layer must output 6 values, got {prev}")
        object.__setattr__(self, "layers", tuple(frozen))
        scale = np.ones(N_AXES) if self.axis_scale is None else self.axis_scale
        object.__setattr__(self, "axis_scale", freeze_array(scale, (N_AXES,), "axis_scale"))

    @property
    def family(self) -> str:
        return "mlp" if self.input_width == 1 else "mlp_seq"

    def features(self, temps_c: np.ndarray) -> np.ndarray:
        """Normalized network input for one window."""
        temps_c = np.asarray(temps_c, dtype=np.float64)
        if self.input_width == 1:
            x = temps_c[-1:]
        else:
            if temps_c.size != self.input_width:
                raise DimensionError(
                    f"sequence MLP needs a window of {self.input_width}, got {temps_c.size}")
            x = temps_c
        return self.normalize_temps(x)

    def predict_norm_window(self, temps_c: np.ndarray) -> np.ndarray:
        h = self.features(temps_c)
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            h = w @ h + b
            if i != last:
                np.maximum(h, 0.0, out=h)
        return h

    def param_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for i, (w, b) in enumerate(self.layers):
            out[f"w{i}"] = w
            out[f"b{i}"] = b
        return out

    def replace_params(self, params: dict[str, np.ndarray]) -> "MlpModel":
        layers = tuple((params[f"w{i}"], params[f"b{i}"]) for i in range(len(self.layers)))
        return replace(self, layers=layers)

    def with_axis_scale(self, scale) -> "MlpModel":
        return replace(self, axis_scale=scale)

    # Vectorized forward used by training; caches pre-ReLU activations.
    def forward_train(self, xf: np.ndarray):
        acts = [xf]
        pres = []
        h = xf
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            a = h @ w.T + b[None, :]
            if i != last:
                h = np.maximum(a, 0.0)
                pres.append(a)
                acts.append(h)
            else:
                h = a
        return h, (acts, pres)

    def batch_features(self, windows_c: np.ndarray) -> np.ndarray:
        windows_c = np.asarray(windows_c, dtype=np.float64)
        x = windows_c[:, -1:] if self.input_width == 1 else windows_c
        if x.shape[1] != self.input_width:
            raise DimensionError(
                f"expected windows of width {self.input_width}, got {x.shape[1]}")
        return self.normalize_temps(x)


def mlp_forward(m: MlpModel, x: Vector) -> Vector:
    """Evaluate the raw network on an already-featurized input vector."""
    if len(x) != m.input_width:
        raise DimensionError(f"input has {len(x)} entries, network expects {m.input_width}")
    h = x.data
    last = len(m.layers) - 1
    for i, (w, b) in enumerate(m.layers):
        h = w @ h + b
        if i != last:
            h = np.maximum(h, 0.0)
    return Vector(h)


def backward_mlp(m: MlpModel, windows_c: np.ndarray, targets_norm: np.ndarray):
    """MSE loss and exact parameter gradients over a batch."""
    xf = m.batch_features(windows_c)
    y, (acts, pres) = m.forward_train(xf)
    diff = y - targets_norm
    batch = y.shape[0]
    loss = float(np.mean(diff * diff))
    dy = (2.0 / (batch * N_AXES)) * diff
    grads: dict[str, np.ndarray] = {}
    d = dy
    for i in range(len(m.layers) - 1, -1, -1):
        w, _ = m.layers[i]
        grads[f"w{i}"] = d.T @ acts[i]
        grads[f"b{i}"] = d.sum(axis=0)
        if i > 0:
            d = (d @ w) * (pres[i - 1] > 0.0)
    return loss, grads
