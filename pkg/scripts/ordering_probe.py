"""Dev probe: held-out normalized RMSE per family on the default chamber data."""
import sys, time
import numpy as np

from driftcomp.datagen import ProfileSpec, gen_scenario
from driftcomp.datamodel import windows_from_scenario
from driftcomp.models import init_params, forward_train_norm
from driftcomp.models.lsm import lsm_fit
from driftcomp.training import TrainConfig, train

def held_out_rmse(model, test_inputs, test_targets, train_scale):
    if model.family == "lsm":
        pred = model.predict_norm_batch(test_inputs)  # physical (unit scale)
        err = (pred - test_targets) / train_scale
    else:
        pred = forward_train_norm(model, test_inputs)
        err = pred - test_targets / train_scale
    return float(np.sqrt(np.mean(err ** 2)))

def run(seed, epochs, stride, families=("lsm", "mlp", "mlp_seq", "tcn", "gru")):
    spec = ProfileSpec.defaults("chamber_cycle", seed=seed)
    s = gen_scenario(spec)
    n = len(s)
    split = int(n * 0.8)
    train_sc = s.slice(0, split)
    test_sc = s.slice(split, n)
    tset = windows_from_scenario(train_sc, window=10, stride=stride)
    vset = windows_from_scenario(test_sc, window=10, stride=4)
    print(f"seed {seed}: {len(tset)} train windows, {len(vset)} test windows")
    out = {}
    for fam in families:
        t0 = time.perf_counter()
        m0 = init_params(fam, seed=seed, window=10)
        cfg = TrainConfig(seed=seed, max_epochs=epochs)
        m, hist = train(m0, tset, cfg)
        r = held_out_rmse(m, vset.inputs, vset.targets, tset.axis_scale)
        out[fam] = r
        dt = time.perf_counter() - t0
        last = hist[-1] if hist else float("nan")
        print(f"  {fam:8s}: heldout_nrmse={r:.5f} final_train_loss={last:.3e} ({dt:.1f}s)")
    order = ["gru", "tcn", "mlp_seq", "mlp", "lsm"]
    vals = [out[f] for f in order if f in out]
    ok = all(vals[i] < vals[i+1] or (order[i], order[i+1]) == ("mlp_seq", "mlp") and vals[i] <= vals[i+1]
             for i in range(len(vals)-1))
    ratio = out.get("gru", 9e9) / out.get("lsm", 1)
    print(f"  ordering GRU<TCN<MLPseq<=MLP<LSM: {ok}   gru/lsm = {ratio:.4f}")
    return out

if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    epochs = int(sys.argv[2]) if len(sys.argv) > 2 else 60
    stride = int(sys.argv[3]) if len(sys.argv) > 3 else 24
    run(seed, epochs, stride)
