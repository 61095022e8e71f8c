"""Converged-floor probe on the xfast schedule: who wins at convergence?"""
import sys
import numpy as np
from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models import init_params, backward, forward_train_norm
from driftcomp.training import TrainConfig, AdamState, adam_step

fam = sys.argv[1]; epochs = int(sys.argv[2]); hidden = int(sys.argv[3]) if len(sys.argv) > 3 else 0
periods = (200.0, 400.0, 400.0, 200.0, 400.0, 400.0)
spec = ProfileSpec.defaults("chamber_cycle", seed=1, duration_s=float(sum(periods)), periods=periods)
s = gen_scenario(spec)
n = len(s); split = int(n * 0.8)
tset = windows_from_scenario(s.slice(0, split), 10, 12)
vset = windows_from_scenario(s.slice(split, n), 10, 4)
scale = tset.axis_scale
Xt, Yt = tset.inputs, tset.targets / scale
Xv, Yv = vset.inputs, vset.targets / scale
print(f"{len(tset)} train w, {len(vset)} test w", flush=True)

from driftcomp.models.lsm import lsm_fit
lsm = lsm_fit(tset)
print("lsm:", float(np.sqrt(np.mean(((lsm.predict_norm_batch(Xv) - vset.targets) / scale) ** 2))), flush=True)

model = init_params(fam, seed=1, hidden=hidden or None, window=10).with_axis_scale(scale)
cfg = TrainConfig(seed=1)
rng = np.random.default_rng(cfg.seed)
params = {k: v.copy() for k, v in model.param_arrays().items()}
st = AdamState.zeros_like(params)
N = len(tset)
best = 9e9
for ep in range(1, epochs + 1):
    order = rng.permutation(N)
    for lo in range(0, N, cfg.batch):
        idx = order[lo:lo + cfg.batch]
        loss, grads = backward(model, Xt[idx], Yt[idx])
        params, st = adam_step(params, grads, st, cfg)
        model = model.replace_params(params)
    if ep % 50 == 0:
        pred = forward_train_norm(model, Xv)
        r = float(np.sqrt(np.mean((pred - Yv) ** 2)))
        best = min(best, r)
        print(f"{fam} h={hidden} ep {ep}: {r:.5f} (best {best:.5f})", flush=True)
