"""Dev probe: does the GRU converge below MLP-Seq/TCN given many epochs?"""
import sys
import numpy as np

from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models import init_params, backward, forward_train_norm
from driftcomp.training import TrainConfig, AdamState, adam_step

def run(variant, epochs=2000, seed=1):
    periods = (400, 800, 400, 400)
    spec = ProfileSpec.defaults("chamber_cycle", seed=seed,
                                duration_s=float(sum(periods)), periods=periods)
    s = gen_scenario(spec)
    n = len(s); split = int(n * 0.8)
    tset = windows_from_scenario(s.slice(0, split), 10, 12)
    vset = windows_from_scenario(s.slice(split, n), 10, 4)
    scale = tset.axis_scale
    Xt, Yt = tset.inputs, tset.targets / scale
    Xv, Yv = vset.inputs, vset.targets / scale

    hidden = 16 if variant == "h16" else 32
    model = init_params("gru", seed=seed, hidden=hidden, window=10).with_axis_scale(scale)
    params = {k: v.copy() for k, v in model.param_arrays().items()}
    if variant == "ortho":
        rng0 = np.random.default_rng(999)
        for name in ("w_hr", "w_hz", "w_hg"):
            a = rng0.standard_normal(params[name].shape)
            u, _, vt = np.linalg.svd(a)
            params[name] = (u @ vt) * 0.9
        model = model.replace_params(params)
    cfg = TrainConfig(seed=seed)
    rng = np.random.default_rng(cfg.seed)
    st = AdamState.zeros_like(params)
    N = len(tset)
    for ep in range(1, epochs + 1):
        order = rng.permutation(N)
        for lo in range(0, N, cfg.batch):
            idx = order[lo:lo + cfg.batch]
            loss, grads = backward(model, Xt[idx], Yt[idx])
            params, st = adam_step(params, grads, st, cfg)
            model = model.replace_params(params)
        if ep % 100 == 0:
            pred = forward_train_norm(model, Xv)
            r = float(np.sqrt(np.mean((pred - Yv) ** 2)))
            print(f"{variant} ep {ep}: heldout {r:.5f}", flush=True)

if __name__ == "__main__":
    run(sys.argv[1] if len(sys.argv) > 1 else "base")
