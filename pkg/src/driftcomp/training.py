"""Adam optimizer and the mini-batch training loop.

Training defaults follow the experimental setup: Adam with learning
rate 0.001, batch size 128, up to 2000 epochs, MSE loss on normalized
targets. Shuffling is seeded, the last partial batch is kept, and the
recorded history entry for each epoch is the full-training-set MSE at
that epoch's end, so the returned best parameters provably score no
worse than any recorded epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datamodel import SupervisedSet
from .errors import DimensionError, DivergenceError
from .models import backward, forward_train_norm
from .models.lsm import LsmModel, lsm_fit

__all__ = ["TrainConfig", "AdamState", "adam_step", "train", "save_history_csv",
           "full_set_loss"]


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.001
    batch: int = 128
    max_epochs: int = 2000
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    early_stop_rmse: float | None = None

    def __post_init__(self):
        if self.lr <= 0 or self.batch < 1 or self.max_epochs < 0 or self.eps <= 0:
            raise ValueError("lr, batch, max_epochs, eps must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must be in (0, 1)")


@dataclass
class AdamState:
    """First/second moment accumulators, shape-congruent with the parameters."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: dict[str, np.ndarray]) -> "AdamState":
        return cls(m={k: np.zeros_like(p) for k, p in params.items()},
                   v={k: np.zeros_like(p) for k, p in params.items()})


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, cfg: TrainConfig):
    """One Adam update; returns (new params, new state)."""
    if set(params) != set(grads):
        raise DimensionError(f"grads keys {sorted(grads)} != params keys {sorted(params)}")
    t = state.step + 1
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    new_p, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise DimensionError(f"grad {name} shape {g.shape} != param shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"non-finite gradient in parameter {name!r}")
        m = cfg.beta1 * state.m[name] + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * state.v[name] + (1.0 - cfg.beta2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        new_p[name] = p - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
        new_m[name] = m
        new_v[name] = v
    return new_p, AdamState(m=new_m, v=new_v, step=t)


def full_set_loss(model, inputs: np.ndarray, targets_norm: np.ndarray,
                  chunk: int = 4096) -> float:
    """Mean squared normalized error over a whole set, in fixed chunk order."""
    n = inputs.shape[0]
    total = 0.0
    for lo in range(0, n, chunk):
        y = forward_train_norm(model, inputs[lo:lo + chunk])
        d = y - targets_norm[lo:lo + chunk]
        total += float(np.sum(d * d))
    return total / (n * targets_norm.shape[1])


def train(model, sset: SupervisedSet, cfg: TrainConfig):
    """Train a drift model; returns (best model, per-epoch loss history).

    The LSM family is closed-form: it is fit directly and the history is
    empty. For network families the model's axis scale is replaced by
    the training set's scale, and targets are normalized by it.
    """
    if len(sset) == 0:
        raise DimensionError("training set is empty")
    if isinstance(model, LsmModel):
        return lsm_fit(sset), []

    model = model.with_axis_scale(sset.axis_scale)
    inputs = sset.inputs
    targets = sset.normalized_targets()

    rng = np.random.default_rng(cfg.seed)
    params = {k: v.copy() for k, v in model.param_arrays().items()}
    state = AdamState.zeros_like(params)
    history: list[float] = []
    best_loss = np.inf
    best_params = params
    n = len(sset)

    for epoch in range(cfg.max_epochs):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch):
            idx = order[lo:lo + cfg.batch]
            loss, grads = backward(model, inputs[idx], targets[idx])
            if not np.isfinite(loss):
                raise DivergenceError(f"loss became non-finite at epoch {epoch}")
            try:
                params, state = adam_step(params, grads, state, cfg)
            except DivergenceError as exc:
                raise DivergenceError(f"epoch {epoch}: {exc}") from None
            model = model.replace_params(params)
        epoch_loss = full_set_loss(model, inputs, targets)
        if not np.isfinite(epoch_loss):
            raise DivergenceError(f"loss became non-finite at epoch {epoch}")
        history.append(epoch_loss)
        if epoch_loss < best_loss:
            best_loss = epoch_loss
            best_params = params
        if cfg.early_stop_rmse is not None and np.sqrt(epoch_loss) <= cfg.early_stop_rmse:
            break

    return model.replace_params(best_params), history


def save_history_csv(history, path) -> None:
    lines = ["epoch,loss"]
    lines += [f"{i},{loss!r}" for i, loss in enumerate(history)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
