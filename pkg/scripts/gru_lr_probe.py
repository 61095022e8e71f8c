import sys
import numpy as np
from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models import init_params, backward, forward_train_norm
from driftcomp.training import TrainConfig, AdamState, adam_step

lr = float(sys.argv[1]); epochs = int(sys.argv[2]); seed = 1
periods = (400, 800, 400, 400)
spec = ProfileSpec.defaults("chamber_cycle", seed=seed, duration_s=float(sum(periods)), periods=periods)
s = gen_scenario(spec)
n = len(s); split = int(n * 0.8)
tset = windows_from_scenario(s.slice(0, split), 10, 12)
vset = windows_from_scenario(s.slice(split, n), 10, 4)
scale = tset.axis_scale
Xt, Yt = tset.inputs, tset.targets / scale
Xv, Yv = vset.inputs, vset.targets / scale
model = init_params("gru", seed=seed, window=10).with_axis_scale(scale)
cfg = TrainConfig(seed=seed, lr=lr)
rng = np.random.default_rng(cfg.seed)
params = {k: v.copy() for k, v in model.param_arrays().items()}
st = AdamState.zeros_like(params)
N = len(tset)
for ep in range(1, epochs + 1):
    order = rng.permutation(N)
    for lo in range(0, N, cfg.batch):
        idx = order[lo:lo + cfg.batch]
        loss, grads = backward(model, Xt[idx], Yt[idx])
        params, st = adam_step(params, grads, st, cfg)
        model = model.replace_params(params)
    if ep % 50 == 0:
        pred = forward_train_norm(model, Xv)
        print(f"lr={lr} ep {ep}: {float(np.sqrt(np.mean((pred - Yv) ** 2))):.5f}", flush=True)
