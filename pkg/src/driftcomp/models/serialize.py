"""Versioned text serialization for every model family.

Models are stored as JSON with explicit shapes for all parameter
arrays. Python's float repr round-trips exactly through JSON, so
``load_model(save_model(m))`` reproduces outputs bit-identically.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ValidationError
from ..linalg import Matrix, Vector
from .gru import GruModel
from .lsm import LsmModel
from .mlp import MlpModel
from .tcn import TcnBlock, TcnModel

FORMAT = "driftcomp-model"
VERSION = 1

__all__ = ["save_model", "load_model", "model_to_dict", "model_from_dict"]


def _arr(a: np.ndarray) -> dict:
    return {"shape": list(a.shape), "data": np.asarray(a).ravel().tolist()}


def _unarr(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=np.float64).reshape(d["shape"])


def model_to_dict(m) -> dict:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "family": m.family,
        "architecture": {"window": m.window},
        "normalization": {"t_center": m.t_center, "t_half": m.t_half},
        "axis_scale": list(np.asarray(m.axis_scale, dtype=np.float64)),
        "params": {name: _arr(arr) for name, arr in m.param_arrays().items()},
    }
    if isinstance(m, MlpModel):
        doc["architecture"]["input_width"] = m.input_width
        doc["architecture"]["layer_widths"] = [w.shape[0] for w, _ in m.layers]
    elif isinstance(m, GruModel):
        doc["architecture"]["hidden"] = m.hidden
    elif isinstance(m, TcnModel):
        doc["architecture"]["dilations"] = list(m.dilations)
        doc["architecture"]["channels"] = [b.c_out for b in m.blocks]
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ValidationError(f"not a model document (format={doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise ValidationError(f"unsupported model version {doc.get('version')!r}")
    family = doc["family"]
    arch = doc["architecture"]
    params = {name: _unarr(d) for name, d in doc["params"].items()}
    scale = np.array(doc["axis_scale"], dtype=np.float64)
    norm = doc["normalization"]
    window = int(arch["window"])

    if family == "lsm":
        return LsmModel(c_t=Matrix(params["c_t"]), o=Vector(params["o"]), window=window)
    if family in ("mlp", "mlp_seq"):
        n_layers = len(arch["layer_widths"])
        layers = tuple((params[f"w{i}"], params[f"b{i}"]) for i in range(n_layers))
        return MlpModel(layers=layers, input_width=int(arch["input_width"]), window=window,
                        axis_scale=scale, t_center=norm["t_center"], t_half=norm["t_half"])
    if family == "gru":
        return GruModel(w_xr=params["w_xr"], w_hr=params["w_hr"], w_xz=params["w_xz"],
                        w_hz=params["w_hz"], w_xg=params["w_xg"], w_hg=params["w_hg"],
                        head_w=params["head_w"], head_b=params["head_b"], window=window,
                        axis_scale=scale, t_center=norm["t_center"], t_half=norm["t_half"])
    if family == "tcn":
        blocks = []
        for i, d in enumerate(arch["dilations"]):
            blocks.append(TcnBlock(
                k1=params[f"b{i}_k1"], b1=params[f"b{i}_b1"],
                k2=params[f"b{i}_k2"], b2=params[f"b{i}_b2"],
                res_w=params.get(f"b{i}_res"), dilation=int(d)))
        return TcnModel(blocks=tuple(blocks), head_w=params["head_w"],
                        head_b=params["head_b"], window=window,
                        axis_scale=scale, t_center=norm["t_center"], t_half=norm["t_half"])
    raise ValidationError(f"unknown model family {family!r}")


def save_model(m, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
