import numpy as np
import pytest
import scipy.stats

from pemnet.bench import (
    SWEEP_CSV_HEADER,
    SweepSpec,
    accuracy,
    baseline_accuracy,
    derive_seed,
    run_timing,
    run_trial,
    spearman,
    sweep,
    sweep_rows,
    threshold_pem,
    write_sweep_csv,
)
from pemnet.dynamics import SDDParams
from pemnet.errors import ConfigurationError, DataError
from pemnet.graphs import DirectedGraph, GraphConfig
from pemnet.pem import PEMMatrix


def pem_from(values):
    values = np.asarray(values, dtype=float)
    out = values.copy()
    np.fill_diagonal(out, np.nan)
    return PEMMatrix(out, "lc")


class TestThreshold:
    def test_full_edge_budget_gives_complete_graph(self):
        rng = np.random.default_rng(0)
        pem = pem_from(rng.standard_normal((4, 4)))
        g = threshold_pem(pem, 12)
        assert g.m == 12

    def test_top_m_matches_sort_oracle(self):
        rng = np.random.default_rng(1)
        values = rng.standard_normal((6, 6))
        pem = pem_from(values)
        m = 7
        g = threshold_pem(pem, m)
        flat = [
            (values[i, j], (j, i))
            for i in range(6) for j in range(6) if i != j
        ]
        expected = {e for _, e in sorted(flat, key=lambda t: -t[0])[:m]}
        assert set(g.edges) == expected

    def test_tie_break_by_ascending_position(self):
        # equal scores: positions (0,1), (0,2), (1,0) win, i.e. edges
        # 1->0, 2->0, 0->1
        g = threshold_pem(pem_from(np.ones((3, 3))), 3)
        assert set(g.edges) == {(1, 0), (2, 0), (0, 1)}

    def test_m_out_of_range(self):
        pem = pem_from(np.ones((3, 3)))
        with pytest.raises(ConfigurationError):
            threshold_pem(pem, 0)
        with pytest.raises(ConfigurationError):
            threshold_pem(pem, 7)


class TestAccuracy:
    def test_perfect_match(self):
        g = DirectedGraph(4, ((0, 1), (1, 2)))
        assert accuracy(g, g) == 1.0

    def test_disjoint_support(self):
        truth = DirectedGraph(4, ((0, 1), (1, 2)))
        inferred = DirectedGraph(4, ((2, 3), (3, 0)))
        assert accuracy(inferred, truth) == 1.0 - 2 * 2 / 12

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        pairs = [(i, j) for i in range(5) for j in range(5) if i != j]
        for _ in range(20):
            e1 = {pairs[t] for t in rng.choice(20, size=6, replace=False)}
            e2 = {pairs[t] for t in rng.choice(20, size=6, replace=False)}
            a = DirectedGraph(5, tuple(e1))
            b = DirectedGraph(5, tuple(e2))
            assert accuracy(a, b) == accuracy(b, a)

    def test_equal_m_quantization(self):
        # with matching edge counts, errors come in FP/FN pairs
        rng = np.random.default_rng(3)
        pairs = [(i, j) for i in range(5) for j in range(5) if i != j]
        allowed = {1.0 - 2 * j / 20 for j in range(7)}
        for _ in range(50):
            e1 = {pairs[t] for t in rng.choice(20, size=6, replace=False)}
            e2 = {pairs[t] for t in rng.choice(20, size=6, replace=False)}
            phi = accuracy(DirectedGraph(5, tuple(e1)), DirectedGraph(5, tuple(e2)))
            assert phi in allowed

    def test_size_mismatch(self):
        with pytest.raises(ConfigurationError):
            accuracy(DirectedGraph(3, ((0, 1),)), DirectedGraph(4, ((0, 1),)))

    def test_random_guess_mean_matches_baseline(self):
        rng = np.random.default_rng(4)
        truth = DirectedGraph(
            10,
            tuple(
                (i, j)
                for t in rng.choice(90, size=45, replace=False)
                for i, j in [divmod(t, 9)]
                for j in [j if j < i else j + 1]
            ),
        )
        pairs = [(i, j) for i in range(10) for j in range(10) if i != j]
        draws = 10_000
        phis = np.empty(draws)
        for d in range(draws):
            guess = {pairs[t] for t in rng.choice(90, size=45, replace=False)}
            phis[d] = accuracy(DirectedGraph(10, tuple(guess)), truth)
        se = phis.std(ddof=1) / np.sqrt(draws)
        assert abs(phis.mean() - baseline_accuracy(10, 45)) < max(3 * se, 0.01)


class TestBaseline:
    def test_half_density(self):
        assert baseline_accuracy(10, 45) == 0.5

    def test_extremes_approach_one(self):
        assert baseline_accuracy(10, 90) == 1.0
        assert baseline_accuracy(10, 1) > 0.97

    def test_sparse_value(self):
        assert baseline_accuracy(10, 9) == pytest.approx(0.82)


class TestSpearman:
    def test_monotone(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0

    def test_reversed(self):
        assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0

    def test_matches_scipy_with_ties(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            xs = rng.integers(0, 5, size=12).astype(float)
            ys = rng.integers(0, 5, size=12).astype(float)
            if xs.std() == 0 or ys.std() == 0:
                continue
            want = scipy.stats.spearmanr(xs, ys).statistic
            assert spearman(xs, ys) == pytest.approx(want, rel=1e-12)

    def test_constant_input_raises(self):
        with pytest.raises(DataError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


class TestDeriveSeed:
    def test_deterministic_and_order_sensitive(self):
        assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
        assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
        assert derive_seed(1) != derive_seed(2)

    def test_spread(self):
        seeds = {derive_seed(0, cell, trial) for cell in range(50)
                 for trial in range(50)}
        assert len(seeds) == 2500


class TestRunTrial:
    def test_deterministic_accuracy(self):
        config = GraphConfig()
        params = SDDParams()
        a = run_trial(config, params, ["lcrc", "lc"], seed=42)
        b = run_trial(config, params, ["lcrc", "lc"], seed=42)
        assert [r.accuracy for r in a] == [r.accuracy for r in b]
        assert all(not r.error for r in a)
        assert all(0.0 <= r.accuracy <= 1.0 for r in a)

    def test_zero_signal_records_error(self):
        config = GraphConfig()
        params = SDDParams(sigma=0.0)
        records = run_trial(config, params, ["lc"], seed=0)
        assert records[0].error
        assert "variance" in records[0].error

    def test_delta_mismatch_raises(self):
        with pytest.raises(ConfigurationError):
            run_trial(GraphConfig(delta=2), SDDParams(delta=0), ["lc"], seed=0)

    def test_wall_time_measured(self):
        records = run_trial(GraphConfig(), SDDParams(), ["gc"], seed=1)
        assert records[0].wall_time_s > 0.0


class TestSweep:
    def test_single_cell_matches_run_trial(self):
        spec = SweepSpec(trials=1, seed=7, pems=("lcrc",))
        records = sweep(spec)
        direct = run_trial(GraphConfig(), SDDParams(), ["lcrc"],
                           seed=derive_seed(7, 0, 0))
        assert len(records) == 1
        assert records[0].accuracy == direct[0].accuracy

    def test_determinism_across_runs(self):
        spec = SweepSpec(grid={"dt": [0.5, 1.0]}, trials=3, seed=1,
                         pems=("lcrc", "lc"))
        a = [r.accuracy for r in sweep(spec)]
        b = [r.accuracy for r in sweep(spec)]
        assert a == b

    def test_jobs_do_not_change_content(self):
        spec1 = SweepSpec(grid={"n": [5, 10]}, trials=2, seed=3, pems=("lcrc",))
        spec2 = SweepSpec(grid={"n": [5, 10]}, trials=2, seed=3, pems=("lcrc",),
                          jobs=2)
        a = sweep(spec1)
        b = sweep(spec2)
        assert [r.accuracy for r in a] == [r.accuracy for r in b]
        assert [r.seed for r in a] == [r.seed for r in b]

    def test_failures_recorded_and_sweep_continues(self):
        spec = SweepSpec(grid={"sigma": [0.0, 0.2]}, trials=2, seed=5,
                         pems=("lc",))
        records = sweep(spec)
        assert len(records) == 4
        failed = [r for r in records if r.error]
        good = [r for r in records if not r.error]
        assert len(failed) == 2 and len(good) == 2
        assert all(np.isnan(r.accuracy) for r in failed)

    def test_csv_format(self, tmp_path):
        spec = SweepSpec(trials=1, seed=0, pems=("lcrc",))
        records = sweep(spec)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(records, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == SWEEP_CSV_HEADER
        fields = lines[1].split(",")
        assert len(fields) == len(SWEEP_CSV_HEADER.split(","))
        assert fields[0] == "gnm"
        assert fields[-1] == ""  # empty error column on success

    def test_rejects_unknown_grid_key(self):
        with pytest.raises(ConfigurationError):
            SweepSpec(grid={"bogus": [1]})

    def test_row_format_ten_significant_digits(self):
        records = sweep(SweepSpec(trials=1, seed=0, pems=("lcrc",)))
        row = sweep_rows(records)[0]
        accuracy_field = row.split(",")[15]
        assert len(accuracy_field.replace(".", "").replace("-", "")) <= 11


class TestRunTiming:
    def test_rows_cover_grids(self):
        rows = run_timing(["lcrc", "gc"], [5], [500], [0], trials=2, seed=0)
        assert len(rows) == 3 * 2 * 2  # three grids x trials x pems
        assert all(len(r.split(",")) == 8 for r in rows)

    def test_gc_slower_than_lcrc(self):
        rows = run_timing(["lcrc", "gc"], [10], [1000], [0], trials=5, seed=1)
        times = {"lcrc": [], "gc": []}
        for row in rows:
            parts = row.split(",")
            times[parts[4]].append(float(parts[7]))
        assert np.median(times["gc"]) > np.median(times["lcrc"])
