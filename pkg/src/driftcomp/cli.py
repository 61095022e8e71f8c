"""Command-line interface: generate | train | evaluate | compensate | report.

Every command writes a manifest (resolved flags, seeds, input/output
paths) next to its primary output; re-running the recorded argv
reproduces the outputs bit-identically. Exit codes: 0 success, 2 usage,
3 data/validation problems, 4 numerical divergence.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import __version__
from .datamodel import AXES, Scenario, load_scenario_csv, save_scenario_csv, windows_from_scenario
from .datagen import (PROFILE_KINDS, ProfileSpec, ThermalModel, default_calibration,
                      gen_scenario)
from .errors import DivergenceError, DriftcompError
from .evaluate import (chronological_split, compare_methods, held_out_normalized_rmse,
                       longform_rows, report_csv, report_table, METHOD_LABELS)
from .models import MODEL_FAMILIES, init_params, load_model, save_model
from .pipeline import (CalibrationMatrix, CompensatorState, load_calibration,
                       push_frame, save_calibration)
from .training import TrainConfig, save_history_csv, train

_FAMILY_FLAG = {"lsm": "lsm", "mlp": "mlp", "mlp-seq": "mlp_seq", "tcn": "tcn", "gru": "gru"}
_PROFILE_FLAG = {"chamber": "chamber_cycle", "heater": "heater", "ice": "ice",
                 "walking": "walking", "constant": "constant"}


def _write_manifest(path, command: str, flags: dict, seeds: list, inputs: list, outputs: list):
    doc = {
        "artifact_version": __version__,
        "command": command,
        "argv": ["driftcomp", command] + _flags_to_argv(flags),
        "flags": {k: v for k, v in sorted(flags.items())},
        "seeds": seeds,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _flags_to_argv(flags: dict) -> list:
    argv = []
    for key, value in sorted(flags.items()):
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, (list, tuple)):
            for v in value:
                argv += [flag, str(v)]
        else:
            argv += [flag, str(value)]
    return argv


@click.group()
@click.version_option(version=__version__, prog_name="driftcomp")
def cli():
    """Temperature-drift compensation toolkit for a six-axis F/T sensor."""


@cli.command()
@click.option("--profile", type=click.Choice(sorted(_PROFILE_FLAG)), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--duration", type=float, default=None, help="Scenario length in seconds.")
@click.option("--rate-hz", type=float, default=10.0, show_default=True)
@click.option("--period", type=float, default=None,
              help="Fixed chamber cycle period in seconds (default: mixed-rate schedule).")
@click.option("--periods", type=str, default=None,
              help="Comma-separated chamber cycle periods in seconds.")
@click.option("--compress", type=float, default=60.0, show_default=True,
              help="Walking-scenario time compression factor.")
@click.option("--noise-sigma", type=float, default=None,
              help="Measured-temperature noise sigma in °C.")
@click.option("--tau", type=float, default=30.0, show_default=True,
              help="Internal-temperature lag time constant in seconds.")
def generate(profile, seed, out, duration, rate_hz, period, periods, compress, noise_sigma, tau):
    """Generate a synthetic scenario CSV (plus its calibration file)."""
    kind = _PROFILE_FLAG[profile]
    kwargs = {}
    if kind == "walking":
        kwargs["compress"] = compress
    if period is not None:
        kwargs["periods"] = (period,)
        if duration is None:
            duration = period
    if periods is not None:
        kwargs["periods"] = tuple(float(p) for p in periods.split(","))
        if duration is None:
            duration = sum(kwargs["periods"])
    if noise_sigma is not None:
        kwargs["noise_sigma_c"] = noise_sigma
    spec = ProfileSpec.defaults(kind, seed=seed, duration_s=duration, **kwargs)
    tm = ThermalModel(tau_s=tau)
    calib = default_calibration()
    scenario = gen_scenario(spec, tm, rate_hz=rate_hz, calib=calib)
    save_scenario_csv(scenario, out)
    stem = os.path.splitext(out)[0]
    calib_path = stem + ".calib.json"
    save_calibration(calib, calib_path)
    flags = {"profile": profile, "seed": seed, "out": out, "duration": spec.duration_s,
             "rate-hz": rate_hz, "period": period, "periods": periods, "compress": compress,
             "noise-sigma": noise_sigma, "tau": tau}
    _write_manifest(out + ".manifest.json", "generate", flags, [seed], [], [out, calib_path])
    click.echo(f"wrote {out} ({len(scenario)} frames) and {calib_path}")


@cli.command()
@click.option("--model", "family", type=click.Choice(sorted(_FAMILY_FLAG)), required=True)
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--window", type=int, default=10, show_default=True)
@click.option("--hidden", type=int, default=None,
              help="Hidden width (GRU) / channels (TCN) / layer width (MLP).")
@click.option("--lr", type=float, default=0.001, show_default=True)
@click.option("--batch", type=int, default=128, show_default=True)
@click.option("--epochs", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--stride", type=int, default=1, show_default=True)
@click.option("--split", type=float, default=0.8, show_default=True,
              help="Chronological train fraction; 1.0 trains on every frame.")
@click.option("--early-stop-rmse", type=float, default=None)
def train_cmd(family, data, out, window, hidden, lr, batch, epochs, seed, stride, split,
              early_stop_rmse):
    """Train one drift-model family on a labeled scenario CSV."""
    fam = _FAMILY_FLAG[family]
    scenario = load_scenario_csv(data)
    if split < 1.0:
        train_part, test_part = chronological_split(scenario, split)
    else:
        train_part, test_part = scenario, None
    tset = windows_from_scenario(train_part, window=window, stride=stride)
    cfg = TrainConfig(lr=lr, batch=batch, max_epochs=epochs, seed=seed,
                      early_stop_rmse=early_stop_rmse)
    model = init_params(fam, seed=seed, hidden=hidden, window=window)
    model, history = train(model, tset, cfg)
    save_model(model, out)
    stem = os.path.splitext(out)[0]
    hist_path = stem + ".history.csv"
    save_history_csv(history, hist_path)
    in_rmse = held_out_normalized_rmse(model, tset.inputs, tset.targets, tset.axis_scale)
    click.echo(f"{fam}: trained {len(history)} epochs on {len(tset)} windows; "
               f"in-sample normalized RMSE {in_rmse:.6f}")
    if test_part is not None and len(test_part.frames) >= window:
        vset = windows_from_scenario(test_part, window=window, stride=1)
        out_rmse = held_out_normalized_rmse(model, vset.inputs, vset.targets, tset.axis_scale)
        click.echo(f"{fam}: held-out normalized RMSE {out_rmse:.6f} ({len(vset)} windows)")
    flags = {"model": family, "data": data, "out": out, "window": window, "hidden": hidden,
             "lr": lr, "batch": batch, "epochs": epochs, "seed": seed, "stride": stride,
             "split": split, "early-stop-rmse": early_stop_rmse}
    _write_manifest(out + ".manifest.json", "train", flags, [seed], [data], [out, hist_path])


@cli.command()
@click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--model", "model_paths", type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True)
@click.option("--calib", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Calibration file (default: identity).")
@click.option("--out-prefix", type=str, required=True)
def evaluate(data, model_paths, calib, out_prefix):
    """Compare compensation methods on a labeled scenario."""
    scenario = load_scenario_csv(data)
    calibration = load_calibration(calib) if calib else CalibrationMatrix.identity()
    models = {}
    for path in model_paths:
        m = load_model(path)
        models[m.family] = m
    rep = compare_methods(scenario, models, calibration)
    csv_path = out_prefix + ".report.csv"
    txt_path = out_prefix + ".report.txt"
    plot_path = out_prefix + ".plot.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(report_csv(rep))
    table = report_table(rep)
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(table)
    applied = scenario.applied_array()
    truth = np.zeros((len(scenario), 6)) if applied is None else applied
    raw = scenario.adc_array() @ calibration.c.data.T + calibration.o.data[None, :]
    series = {"truth": truth, "raw": raw}
    from .pipeline import run_scenario
    for name, m in models.items():
        state = CompensatorState(model=m, calib=calibration)
        _, _, comps = run_scenario(scenario, state)
        series[METHOD_LABELS.get(name, name)] = np.array([w.as_array() for w in comps])
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(longform_rows(scenario, series))
    flags = {"data": data, "model": list(model_paths), "calib": calib, "out-prefix": out_prefix}
    _write_manifest(out_prefix + ".manifest.json", "evaluate", flags, [],
                    [data] + list(model_paths), [csv_path, txt_path, plot_path])
    click.echo(table, nl=False)


@cli.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--calib", type=click.Path(exists=True, dir_okay=False), default=None)
def compensate(model_path, calib):
    """Stream compensation: scenario CSV rows on stdin -> compensated rows on stdout."""
    model = load_model(model_path)
    calibration = load_calibration(calib) if calib else CalibrationMatrix.identity()
    state = CompensatorState(model=model, calib=calibration)
    out = sys.stdout
    out.write("time_s," + ",".join(AXES) + "," + ",".join("d" + a for a in AXES) + "\n")
    out.flush()
    header_cols = None
    skipped = 0
    lineno = 0
    from .datamodel import SensorFrame
    for raw_line in sys.stdin:
        lineno += 1
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if header_cols is None and line.startswith("time_s"):
            header_cols = line.split(",")
            continue
        parts = line.split(",")
        try:
            t = float(parts[0])
            adc = tuple(int(v) for v in parts[1:7])
            temp = float(parts[7])
            frame = SensorFrame(time_s=t, adc=adc, temp_c=temp)
        except (ValueError, IndexError, DriftcompError) as exc:
            skipped += 1
            sys.stderr.write(f"line {lineno}: skipped ({exc})\n")
            continue
        state, comp, drift = push_frame(state, frame)
        vals = [repr(t)]
        vals += [repr(getattr(comp, a)) for a in AXES]
        vals += [repr(getattr(drift, a)) for a in AXES]
        out.write(",".join(vals) + "\n")
        out.flush()
    if skipped:
        sys.stderr.write(f"{skipped} malformed row(s) skipped\n")
        sys.exit(3)


@cli.command()
@click.option("--paper-suite", is_flag=True, required=True,
              help="Run the full desk-scale reproduction.")
@click.option("--outdir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--epochs", type=int, default=None,
              help="Override per-family convergence epoch budgets.")
@click.option("--rate-hz", type=float, default=10.0, show_default=True)
def report(paper_suite, outdir, seed, epochs, rate_hz):
    """Generate data, train all five methods, and emit the comparison set."""
    from .suite import run_paper_suite
    paths = run_paper_suite(outdir, seed=seed, epochs=epochs, rate_hz=rate_hz,
                            echo=click.echo)
    flags = {"paper-suite": True, "outdir": outdir, "seed": seed, "epochs": epochs,
             "rate-hz": rate_hz}
    _write_manifest(os.path.join(outdir, "suite.manifest.json"), "report", flags,
                    [seed], [], paths)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 2
    except click.ClickException as exc:
        exc.show()
        return 2
    except DivergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except DriftcompError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 0
        return code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
