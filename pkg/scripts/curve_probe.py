"""Dev probe: held-out nrmse vs epoch for each family, custom schedules."""
import sys, time
import numpy as np

from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models import init_params, backward, forward_train_norm
from driftcomp.models.lsm import lsm_fit
from driftcomp.training import TrainConfig, AdamState, adam_step, full_set_loss

def heldout(model, Xv, Yv_n):
    pred = forward_train_norm(model, Xv)
    return float(np.sqrt(np.mean((pred - Yv_n) ** 2)))

def run(periods, seed, epochs, stride, fams, eval_every=20):
    spec = ProfileSpec.defaults("chamber_cycle", seed=seed,
                                duration_s=float(sum(periods)), periods=tuple(periods))
    s = gen_scenario(spec)
    n = len(s); split = int(n * 0.8)
    tset = windows_from_scenario(s.slice(0, split), 10, stride)
    vset = windows_from_scenario(s.slice(split, n), 10, 4)
    scale = tset.axis_scale
    Xt, Yt = tset.inputs, tset.targets / scale
    Xv, Yv = vset.inputs, vset.targets / scale
    print(f"periods={periods} seed={seed}: {len(tset)} train w, {len(vset)} test w")
    lsm = lsm_fit(tset)
    lsm_r = float(np.sqrt(np.mean(((lsm.predict_norm_batch(Xv) - vset.targets) / scale) ** 2)))
    print(f"  lsm heldout {lsm_r:.5f}")
    for fam in fams:
        t0 = time.perf_counter()
        model = init_params(fam, seed=seed, window=10).with_axis_scale(scale)
        cfg = TrainConfig(seed=seed)
        rng = np.random.default_rng(seed)
        params = {k: v.copy() for k, v in model.param_arrays().items()}
        st = AdamState.zeros_like(params)
        N = len(tset)
        curve = []
        for ep in range(1, epochs + 1):
            order = rng.permutation(N)
            for lo in range(0, N, cfg.batch):
                idx = order[lo:lo + cfg.batch]
                loss, grads = backward(model, Xt[idx], Yt[idx])
                params, st = adam_step(params, grads, st, cfg)
                model = model.replace_params(params)
            if ep % eval_every == 0 or ep == epochs:
                curve.append((ep, heldout(model, Xv, Yv)))
        dt = time.perf_counter() - t0
        pts = " ".join(f"{ep}:{r:.5f}" for ep, r in curve)
        print(f"  {fam:8s} ({dt:.0f}s): {pts}")

if __name__ == "__main__":
    which = sys.argv[1] if len(sys.argv) > 1 else "fast"
    periods = {"fast": (400, 800, 400, 400), "mid": (800, 1600, 800, 800)}[which]
    run(periods, seed=1, epochs=int(sys.argv[2]) if len(sys.argv) > 2 else 300,
        stride=int(sys.argv[3]) if len(sys.argv) > 3 else 12,
        fams=("mlp", "mlp_seq", "gru", "tcn"), eval_every=25)
