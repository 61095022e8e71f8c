"""Probe: does a standard gate-biased GRU unlock convergence?"""
import sys
import numpy as np
from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models.base import sigmoid, uniform_init
from driftcomp.training import TrainConfig, AdamState, adam_step

zarg = sys.argv[1] if len(sys.argv) > 1 else "0.0"
epochs = int(sys.argv[2]) if len(sys.argv) > 2 else 800
H = 32

periods = (200.0, 400.0, 400.0, 200.0, 400.0, 400.0)
spec = ProfileSpec.defaults("chamber_cycle", seed=1, duration_s=float(sum(periods)), periods=periods)
s = gen_scenario(spec)
n = len(s); split = int(n * 0.8)
tset = windows_from_scenario(s.slice(0, split), 10, 12)
vset = windows_from_scenario(s.slice(split, n), 10, 4)
scale = tset.axis_scale
Xt, Yt = tset.inputs, tset.targets / scale
Xv, Yv = vset.inputs, vset.targets / scale

rng0 = np.random.default_rng(1)
params = {
    "w_xr": uniform_init(rng0, (H, 1), 1), "w_hr": uniform_init(rng0, (H, H), H),
    "w_xz": uniform_init(rng0, (H, 1), 1), "w_hz": uniform_init(rng0, (H, H), H),
    "w_xg": uniform_init(rng0, (H, 1), 1), "w_hg": uniform_init(rng0, (H, H), H),
    "head_w": uniform_init(rng0, (6, H), H), "head_b": np.zeros(6),
    "b_r": np.zeros(H), "b_z": (np.log(np.linspace(1.0, 9.0, H)) if zarg == "chrono" else np.full(H, float(zarg))), "b_g": np.zeros(H),
}

def fwd(p, X):
    B, T = X.shape
    xn = (X - 20.0) / 40.0
    h = np.zeros((B, H))
    caches = []
    for t in range(T):
        x = xn[:, t:t+1]
        ar = x * p["w_xr"].ravel()[None, :] + h @ p["w_hr"].T + p["b_r"][None, :]
        az = x * p["w_xz"].ravel()[None, :] + h @ p["w_hz"].T + p["b_z"][None, :]
        r = sigmoid(ar); z = sigmoid(az)
        ag = x * p["w_xg"].ravel()[None, :] + (r * h) @ p["w_hg"].T + p["b_g"][None, :]
        g = np.tanh(ag)
        hn = (1 - z) * g + z * h
        caches.append((h, r, z, g, x))
        h = hn
    y = h @ p["head_w"].T + p["head_b"][None, :]
    return y, caches, h

def bwd(p, X, Yn):
    y, caches, hT = fwd(p, X)
    B = y.shape[0]
    diff = y - Yn
    loss = float(np.mean(diff ** 2))
    dy = 2.0 / (B * 6) * diff
    g_ = {k: np.zeros_like(v) for k, v in p.items()}
    g_["head_w"] = dy.T @ hT; g_["head_b"] = dy.sum(0)
    dh = dy @ p["head_w"]
    for t in range(len(caches) - 1, -1, -1):
        h_prev, r, z, g, x = caches[t]
        dz = dh * (h_prev - g); daz = dz * z * (1 - z)
        dg = dh * (1 - z); dag = dg * (1 - g * g)
        g_["w_xg"] += ((dag * x).sum(0))[:, None]; g_["b_g"] += dag.sum(0)
        g_["w_hg"] += dag.T @ (r * h_prev)
        drh = dag @ p["w_hg"]
        dr = drh * h_prev; dar = dr * r * (1 - r)
        g_["w_xr"] += ((dar * x).sum(0))[:, None]; g_["b_r"] += dar.sum(0)
        g_["w_hr"] += dar.T @ h_prev
        g_["w_xz"] += ((daz * x).sum(0))[:, None]; g_["b_z"] += daz.sum(0)
        g_["w_hz"] += daz.T @ h_prev
        dh = dh * z + dar @ p["w_hr"] + daz @ p["w_hz"] + drh * r
    return loss, g_

cfg = TrainConfig(seed=1)
rng = np.random.default_rng(1)
st = AdamState.zeros_like(params)
N = len(tset)
best = 9e9
for ep in range(1, epochs + 1):
    order = rng.permutation(N)
    for lo in range(0, N, cfg.batch):
        idx = order[lo:lo + cfg.batch]
        loss, grads = bwd(params, Xt[idx], Yt[idx])
        params, st = adam_step(params, grads, st, cfg)
    if ep % 50 == 0:
        pred, _, _ = fwd(params, Xv)
        r = float(np.sqrt(np.mean((pred - Yv) ** 2)))
        best = min(best, r)
        print(f"zbias={zarg} ep {ep}: {r:.5f} (best {best:.5f})", flush=True)
