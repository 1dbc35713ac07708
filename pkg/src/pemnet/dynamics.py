"""Simulation of the stochastic delay-difference dynamics and measurement noise.

The model iterates, with z = dt / tau,

    x_t = (1 - z) x_{t-dt} + z * eps * sum_k A_k x_{t-k*dt} + sigma * dw_t,

where A_k couples inputs with transmission lag k - 1 and each component of dw_t
is Gaussian with variance dt / n. The recurrence runs in a compiled kernel when
the extension built; set PEMNET_PURE_PYTHON=1 to force the numpy fallback.
Results are bit-reproducible for a fixed backend; the two backends agree to
floating-point accumulation order.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ConfigurationError,
    DataError,
    FileFormatError,
    NumericalError,
    StabilityError,
)
from .numerics import spectral_radius

if os.environ.get("PEMNET_PURE_PYTHON"):
    from ._sdd_py import sdd_recurrence

    BACKEND = "python"
else:
    try:
        from ._sdd_core import sdd_recurrence

        BACKEND = "cython"
    except ImportError:
        from ._sdd_py import sdd_recurrence

        BACKEND = "python"


@dataclass(frozen=True)
class SDDParams:
    """Dynamical parameters; defaults follow the benchmark configuration."""

    eps: float = 0.9
    tau: float = 1.0
    dt: float = 0.5
    sigma: float = 0.2
    eta: float = 0.0
    delta: int = 0
    n_obs: int = 1000
    burn_in: float | None = None  # time units; None means 20 * tau
    seed: int = 0

    def __post_init__(self):
        if self.eps < 0:
            raise ConfigurationError(f"coupling strength must be >= 0, got {self.eps}")
        if self.tau <= 0 or self.dt <= 0:
            raise ConfigurationError("tau and dt must be positive")
        if self.sigma < 0 or self.eta < 0:
            raise ConfigurationError("noise strengths must be >= 0")
        if self.delta < 0:
            raise ConfigurationError(f"max lag must be >= 0, got {self.delta}")
        if self.n_obs < 2:
            raise ConfigurationError(f"need at least 2 observations, got {self.n_obs}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ConfigurationError("burn-in time must be >= 0")

    @property
    def dt_tau(self) -> float:
        return self.dt / self.tau

    @property
    def burn_in_time(self) -> float:
        return 20.0 * self.tau if self.burn_in is None else self.burn_in

    def with_(self, **kwargs) -> "SDDParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class TimeSeries:
    """N observations of n nodes at uniform sampling period dt."""

    values: np.ndarray  # shape (N, n)
    dt: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 2:
            raise DataError(f"time series needs shape (N >= 2, n), got {values.shape}")
        if not np.isfinite(values).all():
            raise DataError("time series contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]


def step_matrices(lag_mats: list[np.ndarray], params: SDDParams) -> np.ndarray:
    """Stack of per-lag update matrices W_k, padded to order params.delta + 1."""
    if not lag_mats:
        raise ConfigurationError("need at least one coupling matrix")
    n = lag_mats[0].shape[0]
    if len(lag_mats) - 1 > params.delta:
        raise ConfigurationError(
            f"graph has lags up to {len(lag_mats) - 1} but params.delta={params.delta}"
        )
    z = params.dt_tau
    p = params.delta + 1
    w = np.zeros((p, n, n))
    w[0] = (1.0 - z) * np.eye(n) + z * params.eps * lag_mats[0]
    for k in range(1, len(lag_mats)):
        w[k] = z * params.eps * lag_mats[k]
    return w


def _companion_radius(w: np.ndarray) -> float:
    p, n, _ = w.shape
    if p == 1:
        return spectral_radius(w[0])
    comp = np.zeros((p * n, p * n))
    comp[:n] = np.hstack(list(w))
    comp[n:, : (p - 1) * n] = np.eye((p - 1) * n)
    return spectral_radius(comp)


def simulate_sdd(
    lag_mats: list[np.ndarray],
    params: SDDParams,
    rng: np.random.Generator | None = None,
) -> TimeSeries:
    """Simulate the delay-difference model on normalized per-lag coupling matrices.

    lag_mats[k] couples inputs with transmission lag k (usually the output of
    normalize_adjacency). Starts from zero history, discards
    ceil(burn_in_time / dt) steps and returns the next n_obs states.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if params.dt_tau > 1.0:
        warnings.warn(
            f"dt/tau = {params.dt_tau:.3g} > 1 is outside the studied regime",
            stacklevel=2,
        )
    w = step_matrices(lag_mats, params)
    rho = _companion_radius(w)
    if rho >= 1.0:
        raise StabilityError(f"update rule is unstable (spectral radius {rho:.6g})")
    n = w.shape[1]
    burn_steps = math.ceil(params.burn_in_time / params.dt)
    t_total = burn_steps + params.n_obs
    scale = params.sigma * math.sqrt(params.dt / n)
    noise = rng.standard_normal((t_total, n)) * scale
    x = sdd_recurrence(w, noise)
    if not np.isfinite(x).all():
        raise NumericalError("simulation produced non-finite values")
    return TimeSeries(values=x[burn_steps:], dt=params.dt)


def add_measurement_noise(
    ts: TimeSeries, eta: float, rng: np.random.Generator
) -> TimeSeries:
    """Add per-entry Gaussian noise with variance eta^2 * dt / n.

    The variance matches the per-step system-noise scaling, so eta equal to the
    system noise strength is the comparable regime.
    """
    if eta < 0:
        raise ConfigurationError(f"measurement noise strength must be >= 0, got {eta}")
    if eta == 0.0:
        return ts
    scale = eta * math.sqrt(ts.dt / ts.n)
    return TimeSeries(values=ts.values + rng.standard_normal(ts.values.shape) * scale,
                      dt=ts.dt)


def save_time_series(ts: TimeSeries, path: str) -> None:
    """Write 'n N dt' then one row of %.17g values per observation."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{ts.n} {ts.n_obs} {ts.dt:.17g}\n")
        for row in ts.values:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_time_series(path: str) -> TimeSeries:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FileFormatError(f"{path}: empty time-series file")
    header = lines[0].split()
    try:
        n, n_obs, dt = int(header[0]), int(header[1]), float(header[2])
    except (IndexError, ValueError) as exc:
        raise FileFormatError(f"{path}:1: bad header {lines[0]!r}") from exc
    if len(lines) - 1 != n_obs:
        raise FileFormatError(f"{path}: header claims {n_obs} rows, found {len(lines) - 1}")
    values = np.empty((n_obs, n))
    for t, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != n:
            raise FileFormatError(f"{path}:{t + 2}: expected {n} values, got {len(parts)}")
        try:
            values[t] = [float(tok) for tok in parts]
        except ValueError as exc:
            raise FileFormatError(f"{path}:{t + 2}: bad float in {line!r}") from exc
    return TimeSeries(values=values, dt=dt)
