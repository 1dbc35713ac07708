"""Command-line front end: generate, simulate, infer, sweep, motif-table, bench-time.

Every run echoes its fully resolved configuration to stdout and is reproducible
from --seed. Exit codes: 0 success, 2 configuration error, 3 data or numerical
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import bench, motifs
from .dynamics import (
    SDDParams,
    add_measurement_noise,
    load_time_series,
    save_time_series,
    simulate_sdd,
)
from .errors import (
    ConfigurationError,
    FileFormatError,
    PemnetError,
)
from .graphs import (
    GraphConfig,
    assign_lags,
    gen_graph_non_nilpotent,
    graph_metrics,
    load_edge_list,
    normalize_adjacency,
    save_edge_list,
)
from .pem import AUTO, PEM_KINDS, compute_pem, save_pem

_DEFAULTS_HELP = "(default: %(default)s)"


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", default="gnm", choices=["gnm", "er", "ba", "rr", "sw"],
                   help="graph model " + _DEFAULTS_HELP)
    p.add_argument("--n", type=int, default=10, help="node count " + _DEFAULTS_HELP)
    p.add_argument("--d-e", type=float, default=0.5, help="edge density " + _DEFAULTS_HELP)
    p.add_argument("--r-e", type=float, default=0.5,
                   help="edge reciprocity " + _DEFAULTS_HELP)
    p.add_argument("--delta", type=int, default=0,
                   help="max edge transmission lag " + _DEFAULTS_HELP)
    p.add_argument("--rewire-p", type=float, default=0.1,
                   help="small-world rewiring probability " + _DEFAULTS_HELP)


def _add_dyn_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=0.9,
                   help="coupling strength " + _DEFAULTS_HELP)
    p.add_argument("--tau", type=float, default=1.0,
                   help="characteristic time " + _DEFAULTS_HELP)
    p.add_argument("--dt", type=float, default=0.5,
                   help="sampling period " + _DEFAULTS_HELP)
    p.add_argument("--sigma", type=float, default=0.2,
                   help="system noise strength " + _DEFAULTS_HELP)
    p.add_argument("--eta", type=float, default=0.0,
                   help="measurement noise strength " + _DEFAULTS_HELP)
    p.add_argument("--n-obs", type=int, default=1000,
                   help="number of observations " + _DEFAULTS_HELP)
    p.add_argument("--burn-in", type=float, default=None,
                   help="burn-in time units (default: 20*tau)")


def _echo(args: argparse.Namespace, keys: list[str]) -> None:
    resolved = " ".join(f"{k.replace('_', '-')}={getattr(args, k)}" for k in keys)
    print(f"config: {resolved}")


def _csv_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def cmd_generate(args) -> int:
    config = GraphConfig(model=args.model, n=args.n, d_e=args.d_e, r_e=args.r_e,
                         delta=args.delta, rewire_p=args.rewire_p)
    _echo(args, ["model", "n", "d_e", "r_e", "delta", "rewire_p", "seed", "out"])
    rng = np.random.default_rng(args.seed)
    graph = gen_graph_non_nilpotent(config, rng)
    graph = assign_lags(graph, config.delta, rng)
    save_edge_list(graph, args.out)
    density, reciprocity = graph_metrics(graph)
    print(f"wrote {args.out}: n={graph.n} m={graph.m} "
          f"density={density:.4g} reciprocity={reciprocity:.4g}")
    return 0


def cmd_simulate(args) -> int:
    graph = load_edge_list(args.graph)
    params = SDDParams(eps=args.eps, tau=args.tau, dt=args.dt, sigma=args.sigma,
                       eta=args.eta, delta=graph.delta, n_obs=args.n_obs,
                       burn_in=args.burn_in, seed=args.seed)
    _echo(args, ["graph", "eps", "tau", "dt", "sigma", "eta", "n_obs",
                 "burn_in", "seed", "out"])
    rng = np.random.default_rng(args.seed)
    _, lag_mats = normalize_adjacency(graph)
    ts = simulate_sdd(lag_mats, params, rng)
    ts = add_measurement_noise(ts, args.eta, rng)
    save_time_series(ts, args.out)
    print(f"wrote {args.out}: n={ts.n} N={ts.n_obs} dt={ts.dt}")
    return 0


def cmd_infer(args) -> int:
    _echo(args, ["ts", "pem", "dt_tau", "delta_hat", "out"])
    ts = load_time_series(args.ts)
    dt_tau = AUTO if args.dt_tau == AUTO else float(args.dt_tau)
    t0 = time.perf_counter()
    pem = compute_pem(ts, args.pem, dt_tau=dt_tau, delta_hat=args.delta_hat)
    wall = time.perf_counter() - t0
    save_pem(pem, args.out)
    print(f"wrote {args.out}: pem={pem.kind} n={pem.n} wall_time_s={wall:.6g}")
    m = args.m
    truth = None
    if args.truth:
        truth = load_edge_list(args.truth)
        m = truth.m
    if m is not None:
        inferred = bench.threshold_pem(pem, m)
        if args.edges_out:
            save_edge_list(inferred, args.edges_out)
            print(f"wrote {args.edges_out}: m={inferred.m}")
        if truth is not None:
            phi = bench.accuracy(inferred, truth)
            print(f"accuracy={phi:.10g} baseline={bench.baseline_accuracy(truth.n, m):.10g}")
    return 0


_SWEEP_LIST_FLAGS = [
    # (grid key, flag, dest, converter)
    ("model", "--model-list", "model_list", str),
    ("n", "--n-list", "n_list", int),
    ("d_e", "--d-e-list", "d_e_list", float),
    ("r_e", "--r-e-list", "r_e_list", float),
    ("delta", "--delta-list", "delta_list", int),
    ("delta_hat", "--delta-hat-list", "delta_hat_list", int),
    ("eps", "--eps-list", "eps_list", float),
    ("tau", "--tau-list", "tau_list", float),
    ("dt", "--dt-list", "dt_list", float),
    ("sigma", "--sigma-list", "sigma_list", float),
    ("eta", "--eta-list", "eta_list", float),
    ("N", "--n-obs-list", "n_obs_list", int),
]


def cmd_sweep(args) -> int:
    grid = {}
    for key, _, dest, conv in _SWEEP_LIST_FLAGS:
        raw = getattr(args, dest)
        if raw is not None:
            grid[key] = [conv(tok) for tok in raw.split(",") if tok]
    pems = tuple(tok for tok in args.pems.split(",") if tok)
    spec = bench.SweepSpec(grid=grid, trials=args.trials, seed=args.seed,
                           pems=pems, dt_tau=args.dt_tau_mode, jobs=args.jobs)
    _echo(args, ["trials", "seed", "pems", "dt_tau_mode", "jobs", "out"])
    print(f"grid: {grid or '(single default cell)'}")
    records = bench.sweep(spec)
    bench.write_sweep_csv(records, args.out)
    failures = sum(1 for r in records if r.error)
    print(f"wrote {args.out}: {len(records)} rows, {failures} failures")
    return 0


def cmd_motif_table(args) -> int:
    _echo(args, ["k_list", "lmax", "dt_tau", "eps", "sigma", "tau", "n", "out"])
    rows = motifs.contribution_table(
        _csv_ints(args.k_list), args.lmax,
        eps=args.eps, tau=args.tau, sigma=args.sigma, n=args.n,
        dt_tau=float(args.dt_tau),
    )
    motifs.write_contribution_table(rows, args.out)
    peaks = [(r.k, r.l_b, r.l_f) for r in rows if r.is_argmax]
    print(f"wrote {args.out}: {len(rows)} rows, argmax motifs {peaks}")
    return 0


def cmd_bench_time(args) -> int:
    _echo(args, ["pems", "n_list", "n_obs_list", "delta_hat_list",
                 "trials", "seed", "out"])
    rows = bench.run_timing(
        [tok for tok in args.pems.split(",") if tok],
        _csv_ints(args.n_list), _csv_ints(args.n_obs_list),
        _csv_ints(args.delta_hat_list), trials=args.trials, seed=args.seed,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(bench.TIMING_CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pemnet",
        description="Directed-network inference from time series via corrected "
                    "lagged correlations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a ground-truth graph")
    _add_graph_flags(p)
    p.add_argument("--seed", type=int, default=0, help="rng seed " + _DEFAULTS_HELP)
    p.add_argument("--out", required=True, help="output edge-list path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="simulate dynamics on a graph")
    p.add_argument("--graph", required=True, help="input edge-list path")
    _add_dyn_flags(p)
    p.add_argument("--seed", type=int, default=0, help="rng seed " + _DEFAULTS_HELP)
    p.add_argument("--out", required=True, help="output time-series path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("infer", help="compute an edge measure from a time series")
    p.add_argument("--ts", required=True, help="input time-series path")
    p.add_argument("--pem", default="lcrc", choices=list(PEM_KINDS),
                   help="edge measure " + _DEFAULTS_HELP)
    p.add_argument("--dt-tau", default=AUTO,
                   help="dt/tau value or 'auto' " + _DEFAULTS_HELP)
    p.add_argument("--delta-hat", type=int, default=0,
                   help="assumed max edge lag " + _DEFAULTS_HELP)
    p.add_argument("--m", type=int, default=None,
                   help="edge count for thresholding (default: taken from --truth)")
    p.add_argument("--truth", default=None, help="ground-truth edge list for scoring")
    p.add_argument("--edges-out", default=None, help="write thresholded edge list here")
    p.add_argument("--out", required=True, help="output score-matrix path")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("sweep", help="run a seeded parameter sweep to CSV")
    for key, flag, dest, _ in _SWEEP_LIST_FLAGS:
        p.add_argument(flag, dest=dest, default=None,
                       help=f"comma-separated values for {key}")
    p.add_argument("--pems", default="lcrc",
                   help="comma-separated edge measures " + _DEFAULTS_HELP)
    p.add_argument("--trials", type=int, default=100,
                   help="trials per grid cell " + _DEFAULTS_HELP)
    p.add_argument("--dt-tau-mode", default="true", choices=["true", "auto"],
                   help="use the true dt/tau or estimate it " + _DEFAULTS_HELP)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker processes " + _DEFAULTS_HELP)
    p.add_argument("--seed", type=int, default=0, help="master seed " + _DEFAULTS_HELP)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("motif-table", help="tabulate analytical motif contributions")
    p.add_argument("--k-list", default="0", help="comma-separated lags " + _DEFAULTS_HELP)
    p.add_argument("--lmax", type=int, default=3,
                   help="max walk length per side " + _DEFAULTS_HELP)
    p.add_argument("--dt-tau", default="0.5", help="dt/tau " + _DEFAULTS_HELP)
    p.add_argument("--eps", type=float, default=0.9, help="coupling " + _DEFAULTS_HELP)
    p.add_argument("--sigma", type=float, default=1.0, help="noise " + _DEFAULTS_HELP)
    p.add_argument("--tau", type=float, default=1.0,
                   help="characteristic time " + _DEFAULTS_HELP)
    p.add_argument("--n", type=int, default=10, help="node count " + _DEFAULTS_HELP)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_motif_table)

    p = sub.add_parser("bench-time", help="time edge measures over size grids")
    p.add_argument("--pems", default="lcrc,lccf,lc,gc",
                   help="comma-separated edge measures " + _DEFAULTS_HELP)
    p.add_argument("--n-list", default="10", help="node counts " + _DEFAULTS_HELP)
    p.add_argument("--n-obs-list", default="1000",
                   help="observation counts " + _DEFAULTS_HELP)
    p.add_argument("--delta-hat-list", default="0",
                   help="assumed max lags " + _DEFAULTS_HELP)
    p.add_argument("--trials", type=int, default=10,
                   help="trials per grid point " + _DEFAULTS_HELP)
    p.add_argument("--seed", type=int, default=0, help="master seed " + _DEFAULTS_HELP)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_bench_time)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except PemnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
