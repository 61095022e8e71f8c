"""Synthetic drift-scenario generator with a lagged thermal ground truth.

The sensor's internal temperature follows the measured case temperature
through a first-order lag (time constant ``tau_s``), and the true drift
is a per-axis cubic polynomial in (T_internal - 20 °C). Because of the
lag, frames with equal measured temperature can carry very different
drift (hysteresis loops), so no memoryless function of the instantaneous
temperature can fit the data - the property that separates sequence
models from pointwise ones.

Profiles:
  constant       flat hold at ``level_c``
  chamber_cycle  triangular sweeps 20 -> 60 -> -20 -> 20 °C; successive
                 cycles take their period from ``periods`` (the default
                 schedule mixes ramp rates from 0.2 down to 0.025 °C/s
                 so the training data covers the validation ramps)
  heater         +``rise_c`` over the scenario duration (default +10 °C)
  ice            -``drop_c`` over the scenario duration (default -5 °C)
  walking        plate contacts (-20, 70, -20 °C held ``contact_s`` each,
                 time-compressed); the case temperature relaxes toward
                 the plate with time constant ``case_tau_s / compress``,
                 and a square-wave stance/swing load rides on top

Measured temperatures get seeded Gaussian noise and are quantized to
the 7.8125 m°C sensor resolution. ADC counts are synthesized by
inverting a realistic diagonal-plus-coupling calibration and adding
seeded integer noise of +-2 counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datamodel import FULL_SCALE, Scenario, quantize_temperature
from .errors import ValidationError
from .linalg import Matrix, Vector
from .pipeline import CalibrationMatrix

__all__ = ["ThermalModel", "ProfileSpec", "gen_profile", "internal_temperature",
           "gen_scenario", "default_calibration", "PROFILE_KINDS"]

PROFILE_KINDS = ("chamber_cycle", "heater", "ice", "walking", "constant")

REFERENCE_C = 20.0

# Per-axis cubic drift coefficients in (N or N*m) per °C^k of internal
# temperature above 20 °C. Sized so a full chamber sweep produces peak
# drift of order 100 N on the z force and tens of N on x/y, with the
# negative cubic term bending the curve over at the hot end.
DEFAULT_DRIFT_COEFFS = (
    (1.2, 0.010, -6.0e-4),     # fx
    (-1.0, 0.008, -5.0e-4),    # fy
    (4.0, 0.050, -2.2e-3),     # fz
    (0.030, 3.0e-4, -1.6e-5),  # mx
    (-0.027, 2.5e-4, -1.4e-5),  # my
    (0.014, 1.2e-4, -0.7e-5),  # mz
)

# Default chamber schedule: one cycle each at 0.1, 0.05, 0.025 and
# 0.2 °C/s, then two more 0.1 °C/s cycles so a chronological 80/20
# split leaves a fully-covered ramp rate in the held-out tail.
DEFAULT_CHAMBER_PERIODS = (1600.0, 3200.0, 6400.0, 800.0, 1600.0, 1600.0)

ADC_NOISE_COUNTS = 2
TEMP_NOISE_SIGMA_C = 0.005


@dataclass(frozen=True)
class ThermalModel:
    """First-order internal-temperature lag plus per-axis drift polynomials."""

    tau_s: float = 30.0
    t_int_0: float = REFERENCE_C
    drift_coeffs: tuple = DEFAULT_DRIFT_COEFFS
    axis_gain: tuple = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.tau_s <= 0:
            raise ValidationError("tau_s must be positive")
        if len(self.drift_coeffs) != 6 or any(len(c) != 3 for c in self.drift_coeffs):
            raise ValidationError("drift_coeffs must be 6 axes x 3 polynomial coefficients")
        if len(self.axis_gain) != 6:
            raise ValidationError("axis_gain must have 6 entries")

    def drift_from_internal(self, t_int: np.ndarray) -> np.ndarray:
        """(N, 6) drift; exactly zero at the 20 °C reference."""
        x = np.asarray(t_int, dtype=np.float64) - REFERENCE_C
        coeffs = np.asarray(self.drift_coeffs)
        gain = np.asarray(self.axis_gain)
        out = (coeffs[:, 0] * x[:, None]
               + coeffs[:, 1] * (x * x)[:, None]
               + coeffs[:, 2] * (x * x * x)[:, None])
        return out * gain[None, :]


@dataclass(frozen=True)
class ProfileSpec:
    kind: str
    duration_s: float
    seed: int = 0
    level_c: float = REFERENCE_C            # constant
    periods: tuple = DEFAULT_CHAMBER_PERIODS  # chamber_cycle
    t_min_c: float = -20.0
    t_max_c: float = 60.0
    t_start_c: float = REFERENCE_C
    rise_c: float = 10.0                    # heater
    drop_c: float = 5.0                     # ice
    plate_temps_c: tuple = (-20.0, 70.0, -20.0)  # walking
    contact_s: float = 1200.0
    compress: float = 60.0
    case_tau_s: float = 9000.0
    noise_sigma_c: float = TEMP_NOISE_SIGMA_C

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValidationError(f"unknown profile kind {self.kind!r}")
        if self.duration_s <= 0:
            raise ValidationError("duration_s must be positive")
        if self.kind == "walking" and self.compress <= 0:
            raise ValidationError("compress must be positive")

    @classmethod
    def defaults(cls, kind: str, seed: int = 0, duration_s: float | None = None,
                 **kwargs) -> "ProfileSpec":
        if duration_s is None:
            duration_s = {
                "chamber_cycle": float(sum(DEFAULT_CHAMBER_PERIODS)),
                "heater": 200.0,
                "ice": 300.0,
                "walking": 3 * 1200.0 / kwargs.get("compress", 60.0),
                "constant": 60.0,
            }[kind]
        return cls(kind=kind, duration_s=duration_s, seed=seed, **kwargs)


def _chamber_base(spec: ProfileSpec, times: np.ndarray) -> np.ndarray:
    """Triangular sweeps; each cycle runs start -> max -> min -> start."""
    up1 = spec.t_max_c - spec.t_start_c
    down = spec.t_max_c - spec.t_min_c
    up2 = spec.t_start_c - spec.t_min_c
    travel = up1 + down + up2
    out = np.empty_like(times)
    cycle_start = 0.0
    i = 0
    k = 0
    while cycle_start < times[-1] + 1e-9 and i < times.size:
        period = float(spec.periods[k % len(spec.periods)])
        rate = travel / period
        knots_t = np.array([0.0, up1 / rate, (up1 + down) / rate, period])
        knots_v = np.array([spec.t_start_c, spec.t_max_c, spec.t_min_c, spec.t_start_c])
        j = i
        while j < times.size and times[j] < cycle_start + period - 1e-9:
            j += 1
        local = times[i:j] - cycle_start
        out[i:j] = np.interp(local, knots_t, knots_v)
        i = j
        cycle_start += period
        k += 1
    if i < times.size:
        out[i:] = spec.t_start_c
    return out


def _walking_base(spec: ProfileSpec, times: np.ndarray, dt: float) -> np.ndarray:
    """Case temperature relaxing toward the active plate, time-compressed."""
    contact = spec.contact_s / spec.compress
    tau_c = spec.case_tau_s / spec.compress
    plates = spec.plate_temps_c
    idx = np.minimum((times / contact).astype(int), len(plates) - 1)
    env = np.asarray(plates, dtype=np.float64)[idx]
    out = np.empty_like(times)
    t = spec.t_start_c
    a = dt / tau_c
    for i in range(times.size):
        out[i] = t
        t = t + a * (env[i] - t)
    return out


def gen_profile(spec: ProfileSpec, rate_hz: float = 10.0) -> np.ndarray:
    """Measured temperatures: base curve + seeded noise, then quantization."""
    n = int(round(spec.duration_s * rate_hz))
    if n < 1:
        raise ValidationError("profile would be empty")
    dt = 1.0 / rate_hz
    times = np.arange(n) * dt
    if spec.kind == "constant":
        base = np.full(n, spec.level_c)
    elif spec.kind == "chamber_cycle":
        base = _chamber_base(spec, times)
    elif spec.kind == "heater":
        base = spec.t_start_c + spec.rise_c * (times / spec.duration_s)
    elif spec.kind == "ice":
        base = spec.t_start_c - spec.drop_c * (times / spec.duration_s)
    else:  # walking
        base = _walking_base(spec, times, dt)
    rng = np.random.default_rng(spec.seed)
    noisy = base + rng.normal(0.0, spec.noise_sigma_c, size=n)
    # quantize on the 2^-7 grid (exact in float64)
    return np.rint(noisy * 128.0) / 128.0


def internal_temperature(measured: np.ndarray, tm: ThermalModel, dt_s: float) -> np.ndarray:
    """First-order lag: T[k+1] = T[k] + (dt/tau) * (measured[k] - T[k])."""
    if dt_s <= 0:
        raise ValidationError("dt_s must be positive")
    measured = np.asarray(measured, dtype=np.float64)
    out = np.empty_like(measured)
    a = dt_s / tm.tau_s
    t = float(tm.t_int_0)
    for k in range(measured.size):
        out[k] = t
        t = t + a * (measured[k] - t)
    return out


def default_calibration() -> CalibrationMatrix:
    """Synthetic factory calibration: per-axis gain = full scale / 2^13
    counts, with 3 % cross-axis coupling; zero offset."""
    gains = np.asarray(FULL_SCALE) / 8192.0
    coupling = np.array([
        [1.00, 0.03, -0.02, 0.01, 0.00, 0.01],
        [-0.03, 1.00, 0.02, 0.00, 0.01, -0.01],
        [0.02, -0.02, 1.00, 0.01, -0.01, 0.00],
        [0.01, 0.00, -0.01, 1.00, 0.03, -0.02],
        [0.00, 0.01, 0.01, -0.03, 1.00, 0.02],
        [-0.01, 0.01, 0.00, 0.02, -0.02, 1.00],
    ])
    c = gains[:, None] * coupling
    return CalibrationMatrix(c=Matrix(c), o=Vector(np.zeros(6)))


def _walking_load(n: int, rate_hz: float) -> np.ndarray:
    """Square-wave stance/swing ground-reaction load (1 s stance, 1 s swing)."""
    times = np.arange(n) / rate_hz
    stance = (times % 2.0) < 1.0
    load = np.zeros((n, 6))
    load[stance, 0] = 3.0    # fx, N
    load[stance, 2] = 60.0   # fz, N
    load[stance, 4] = 0.5    # my, N*m
    return load


def gen_scenario(spec: ProfileSpec, tm: ThermalModel | None = None,
                 rate_hz: float = 10.0, load: np.ndarray | None = None,
                 calib: CalibrationMatrix | None = None) -> Scenario:
    """Full synthetic scenario with ground-truth drift and ADC counts."""
    tm = tm or ThermalModel()
    calib = calib or default_calibration()
    temps = gen_profile(spec, rate_hz)
    n = temps.size
    t_int = internal_temperature(temps, tm, dt_s=1.0 / rate_hz)
    drift = tm.drift_from_internal(t_int)

    if load is None and spec.kind == "walking":
        load = _walking_load(n, rate_hz)
    if load is not None:
        load = np.asarray(load, dtype=np.float64)
        if load.shape != (n, 6):
            raise ValidationError(f"load schedule must be ({n}, 6), got {load.shape}")
        total = drift + load
    else:
        total = drift

    c_inv = np.linalg.inv(calib.c.data)
    ideal_counts = (total - calib.o.data[None, :]) @ c_inv.T
    rng = np.random.default_rng(spec.seed + 1)
    counts = np.rint(ideal_counts).astype(np.int64) + rng.integers(
        -ADC_NOISE_COUNTS, ADC_NOISE_COUNTS + 1, size=(n, 6))

    times = np.arange(n) / rate_hz
    meta = {
        "profile": spec.kind,
        "seed": str(spec.seed),
        "tau_s": repr(tm.tau_s),
        "noise_sigma_c": repr(spec.noise_sigma_c),
        "rate_hz": repr(rate_hz),
    }
    if spec.kind == "walking":
        meta["compress"] = repr(spec.compress)
        meta["contact_s"] = repr(spec.contact_s)
    if spec.kind == "chamber_cycle":
        meta["periods"] = ",".join(repr(p) for p in spec.periods)
    return Scenario.from_arrays(
        name=f"{spec.kind}-seed{spec.seed}",
        sample_rate_hz=rate_hz,
        times=times,
        adc=counts,
        temps=temps,
        drift=drift,
        applied=load,
        meta=meta,
    )
