"""Thresholding, accuracy scoring, seeded trials, parameter sweeps, and timing.

A trial samples a ground-truth graph (resampling nilpotent draws), simulates the
dynamics, computes each requested edge measure, thresholds it with the true edge
count, and scores the fraction of correctly classified ordered node pairs. Sweep
seeds derive from (master seed, cell index, trial index) through SplitMix64, so
results are independent of execution order and of the number of worker processes.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SDDParams, add_measurement_noise, simulate_sdd
from .errors import ConfigurationError, DataError, PemnetError
from .graphs import (
    DirectedGraph,
    GraphConfig,
    assign_lags,
    gen_graph_non_nilpotent,
    normalize_adjacency,
)
from .pem import AUTO, PEMMatrix, compute_pem

SWEEP_CSV_HEADER = (
    "model,n,d_e,r_e,delta,delta_hat,eps,tau,dt,sigma,eta,N,"
    "pem,trial,seed,accuracy,wall_time_s,error"
)

_GRID_KEYS = ("model", "n", "d_e", "r_e", "delta", "delta_hat",
              "eps", "tau", "dt", "sigma", "eta", "N")

_MASK64 = (1 << 64) - 1


def derive_seed(*parts: int) -> int:
    """Mix integers into one 64-bit seed with SplitMix64 finalization steps.

    Feeding (master, cell, trial) gives every trial an order-independent,
    platform-independent stream.
    """
    x = 0
    for part in parts:
        x = (x + (int(part) & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
        x ^= x >> 31
    return x


def threshold_pem(pem: PEMMatrix, m: int) -> DirectedGraph:
    """Keep the m largest off-diagonal scores as edges.

    Ties break deterministically by ascending (row, column) position. Entry
    (i, j) becomes the edge j -> i.
    """
    n = pem.n
    if not 1 <= m <= n * (n - 1):
        raise ConfigurationError(f"edge count {m} outside [1, {n * (n - 1)}]")
    ranked = sorted(
        (-pem.values[i, j], i, j)
        for i in range(n) for j in range(n) if i != j
    )
    edges = tuple((j, i) for _, i, j in ranked[:m])
    return DirectedGraph(n, edges)


def accuracy(inferred: DirectedGraph, truth: DirectedGraph) -> float:
    """Fraction of ordered node pairs classified identically in both graphs."""
    if inferred.n != truth.n:
        raise ConfigurationError(
            f"size mismatch: inferred n={inferred.n}, truth n={truth.n}"
        )
    n = truth.n
    a, b = set(inferred.edges), set(truth.edges)
    mismatched = len(a.symmetric_difference(b))
    return 1.0 - mismatched / (n * (n - 1))


def baseline_accuracy(n: int, m: int) -> float:
    """Expected accuracy of guessing m edge positions uniformly at random.

    With density d = m / (n(n-1)), the expectation is 1 - 2d(1-d): false
    positives and false negatives come in pairs under the known-m protocol.
    """
    if not 1 <= m <= n * (n - 1):
        raise ConfigurationError(f"edge count {m} outside [1, {n * (n - 1)}]")
    d = m / (n * (n - 1))
    return 1.0 - 2.0 * d * (1.0 - d)


def spearman(xs, ys) -> float:
    """Spearman rank correlation; ties receive their mean rank."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 3:
        raise ConfigurationError("need two equal-length lists of at least 3 values")
    rx, ry = _mean_ranks(xs), _mean_ranks(ys)
    if rx.std() == 0.0 or ry.std() == 0.0:
        raise DataError("rank correlation undefined for a constant input")
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    return float(rx @ ry / np.sqrt((rx @ rx) * (ry @ ry)))


def _mean_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one (graph sample, simulation, edge measure) trial."""

    config: GraphConfig
    params: SDDParams
    pem_kind: str
    delta_hat: int
    trial: int
    seed: int
    accuracy: float = float("nan")
    wall_time_s: float = float("nan")
    flags: tuple[str, ...] = ()
    error: str = ""


def run_trial(
    config: GraphConfig,
    params: SDDParams,
    pems: list[str],
    seed: int,
    delta_hat: int | None = None,
    dt_tau=None,
    trial: int = 0,
) -> list[TrialRecord]:
    """One seeded trial: sample, simulate, score each requested edge measure.

    delta_hat defaults to the true max lag; dt_tau defaults to the true dt/tau
    (pass AUTO to estimate it from the data). Deterministic given the seed,
    except for the wall-time fields, which cover the measure computation only.
    """
    if config.delta != params.delta:
        raise ConfigurationError(
            f"graph max lag {config.delta} != dynamics max lag {params.delta}"
        )
    d_hat = config.delta if delta_hat is None else delta_hat
    z = params.dt_tau if dt_tau is None else dt_tau
    rng = np.random.default_rng(seed)

    def fail(stage, exc):
        return [
            TrialRecord(config, params, kind, d_hat, trial, seed,
                        error=f"{stage}: {exc}")
            for kind in pems
        ]

    try:
        graph = gen_graph_non_nilpotent(config, rng)
        graph = assign_lags(graph, config.delta, rng)
        _, lag_mats = normalize_adjacency(graph)
    except PemnetError as exc:
        return fail("graph", exc)
    try:
        ts = simulate_sdd(lag_mats, params, rng)
        ts = add_measurement_noise(ts, params.eta, rng)
    except PemnetError as exc:
        return fail("simulate", exc)
    records = []
    for kind in pems:
        try:
            t0 = time.perf_counter()
            pem = compute_pem(ts, kind, dt_tau=z, delta_hat=d_hat)
            wall = time.perf_counter() - t0
            inferred = threshold_pem(pem, graph.m)
            phi = accuracy(inferred, graph)
            records.append(
                TrialRecord(config, params, kind, d_hat, trial, seed,
                            phi, wall, pem.flags)
            )
        except PemnetError as exc:
            records.append(
                TrialRecord(config, params, kind, d_hat, trial, seed,
                            error=f"pem[{kind}]: {exc}")
            )
    return records


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian parameter grid with per-cell trial count and a master seed.

    grid maps any of model, n, d_e, r_e, delta, delta_hat, eps, tau, dt,
    sigma, eta, N to a list of values; unlisted parameters stay at their
    defaults. dt_tau is "true" or "auto".
    """

    grid: dict = field(default_factory=dict)
    trials: int = 1
    seed: int = 0
    pems: tuple[str, ...] = ("lcrc",)
    dt_tau: str = "true"
    jobs: int = 1

    def __post_init__(self):
        for key in self.grid:
            if key not in _GRID_KEYS:
                raise ConfigurationError(f"unknown sweep parameter {key!r}")
        if any(len(v) == 0 for v in self.grid.values()):
            raise ConfigurationError("sweep grid has an empty value list")
        if self.trials < 1:
            raise ConfigurationError(f"need trials >= 1, got {self.trials}")
        if not self.pems:
            raise ConfigurationError("no edge measures requested")

    def cells(self) -> list[dict]:
        keys = [k for k in _GRID_KEYS if k in self.grid]
        out = [{}]
        for key in keys:
            out = [dict(cell, **{key: v}) for cell in out for v in self.grid[key]]
        return out


def _cell_setup(cell: dict):
    config = GraphConfig(
        model=cell.get("model", "gnm"),
        n=int(cell.get("n", 10)),
        d_e=float(cell.get("d_e", 0.5)),
        r_e=float(cell.get("r_e", 0.5)),
        delta=int(cell.get("delta", 0)),
    )
    params = SDDParams(
        eps=float(cell.get("eps", 0.9)),
        tau=float(cell.get("tau", 1.0)),
        dt=float(cell.get("dt", 0.5)),
        sigma=float(cell.get("sigma", 0.2)),
        eta=float(cell.get("eta", 0.0)),
        delta=int(cell.get("delta", 0)),
        n_obs=int(cell.get("N", 1000)),
    )
    delta_hat = cell.get("delta_hat")
    return config, params, None if delta_hat is None else int(delta_hat)


def _sweep_task(args):
    spec, cell_index, cell, trial = args
    config, params, delta_hat = _cell_setup(cell)
    seed = derive_seed(spec.seed, cell_index, trial)
    dt_tau = AUTO if spec.dt_tau == "auto" else None
    try:
        return run_trial(config, params, list(spec.pems), seed,
                         delta_hat=delta_hat, dt_tau=dt_tau, trial=trial)
    except PemnetError as exc:
        d_hat = config.delta if delta_hat is None else delta_hat
        return [
            TrialRecord(config, params, kind, d_hat, trial, seed, error=str(exc))
            for kind in spec.pems
        ]


def sweep(spec: SweepSpec) -> list[TrialRecord]:
    """Run the full grid; failures become records with a non-empty error field.

    Output ordering and content are independent of spec.jobs.
    """
    tasks = [
        (spec, cell_index, cell, trial)
        for cell_index, cell in enumerate(spec.cells())
        for trial in range(spec.trials)
    ]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(_sweep_task, tasks, chunksize=4))
    else:
        chunks = [_sweep_task(t) for t in tasks]
    return [record for chunk in chunks for record in chunk]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def sweep_rows(records: list[TrialRecord]) -> list[str]:
    rows = []
    for r in records:
        fields = [
            r.config.model, r.config.n, r.config.d_e, r.config.r_e,
            r.config.delta, r.delta_hat, r.params.eps, r.params.tau,
            r.params.dt, r.params.sigma, r.params.eta, r.params.n_obs,
            r.pem_kind, r.trial, r.seed, r.accuracy, r.wall_time_s,
            r.error.replace(",", ";").replace("\n", " "),
        ]
        rows.append(",".join(_fmt(f) for f in fields))
    return rows


def write_sweep_csv(records: list[TrialRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for row in sweep_rows(records):
            fh.write(row + "\n")


TIMING_CSV_HEADER = "varied,n,N,delta_hat,pem,trial,seed,wall_time_s"


def run_timing(
    pems: list[str],
    n_values: list[int],
    n_obs_values: list[int],
    delta_hat_values: list[int],
    trials: int = 10,
    seed: int = 0,
) -> list[str]:
    """Time the edge-measure computation along three one-at-a-time grids.

    Returns CSV rows (without header). Each grid varies one of n, N, delta_hat
    from the defaults n=10, N=1000, delta_hat=0; wall time covers the measure
    computation only.
    """
    rows = []
    grids = [
        ("n", [{"n": v} for v in n_values]),
        ("N", [{"N": v} for v in n_obs_values]),
        ("delta_hat", [{"delta_hat": v, "delta": v} for v in delta_hat_values]),
    ]
    cell_index = 0
    for varied, cells in grids:
        for cell in cells:
            config, params, delta_hat = _cell_setup(cell)
            for trial in range(trials):
                trial_seed = derive_seed(seed, cell_index, trial)
                for rec in run_trial(config, params, pems, trial_seed,
                                     delta_hat=delta_hat, trial=trial):
                    rows.append(",".join(_fmt(f) for f in (
                        varied, rec.config.n, rec.params.n_obs, rec.delta_hat,
                        rec.pem_kind, trial, trial_seed, rec.wall_time_s,
                    )))
            cell_index += 1
    return rows
