import numpy as np
import pytest

from ccorder.config import BASELINES, MAXMIN, scenario
from ccorder.datagen import SpatialMA, UlaSteering, White
from ccorder.detectors import DetectorConfig, Method
from ccorder.errors import ConfigError
from ccorder.harness import (
    REPORT_COLUMNS,
    ExperimentSpec,
    PointResult,
    Sweep,
    apply_sweep,
    emit_csv,
    emit_histogram_csv,
    read_csv,
    read_histogram_csv,
    run_experiment,
    run_statistic_histogram,
    run_trial,
)

SMALL = scenario(8, 8, 40, (0.9, 0.8), 5.0, 1, 1, indep_var=2.0, noise=White(0.5))


def small_spec(trials=12, seed=5, sweep=Sweep("M", (30, 60))):
    return ExperimentSpec(SMALL, MAXMIN + BASELINES, trials=trials, seed=seed, sweep=sweep)


def test_single_trial_report():
    rep = run_experiment(ExperimentSpec(SMALL, MAXMIN, trials=1, seed=1))
    assert len(rep.rows) == 3
    for row in rep.rows:
        assert row.sweep_value is None
        assert sum(row.d_hat_counts.values()) + row.err_trials == 1
        assert row.p_d in (0.0, 1.0)


def test_counts_and_errors_are_accounted():
    rep = run_experiment(small_spec())
    assert len(rep.rows) == 12
    for row in rep.rows:
        assert sum(row.d_hat_counts.values()) + row.err_trials == row.trials == 12
        assert sum(row.rank_counts.values()) == 12 - row.err_trials
        assert sum(row.error_counts.values()) == row.err_trials
        assert 0.0 <= row.p_d <= 1.0
    # M = 30 < n + m: the full-dimension baselines still run, M = 30 > n = 8
    vals, pd = rep.curve("MaxMinMdlThreshold")
    np.testing.assert_array_equal(vals, [30, 60])
    assert rep.sweep_param == "M"


def test_full_dim_errors_are_counted_not_dropped():
    cfg = scenario(20, 20, 15, (0.9,), 5.0, 0, 0)
    rep = run_experiment(ExperimentSpec(cfg, (DetectorConfig(Method.FULLDIM_MDL),), trials=3))
    row = rep.rows[0]
    assert row.err_trials == 3 and row.error_counts == {"SingularCovarianceError": 3}
    assert row.p_d == 0.0 and row.d_hat_mode is None


def test_trial_is_pure():
    a = run_trial(SMALL, MAXMIN, 3, 0, 7)
    b = run_trial(SMALL, MAXMIN, 3, 0, 7)
    assert a == b


def test_deterministic_across_workers(tmp_path):
    spec = small_spec(trials=30)
    p1 = emit_csv(run_experiment(spec, workers=1), tmp_path / "a.csv")
    p3 = emit_csv(run_experiment(spec, workers=3, chunk_size=7), tmp_path / "b.csv")
    assert p1.read_bytes() == p3.read_bytes()


def test_seed_changes_results(tmp_path):
    a = run_experiment(small_spec(trials=30, seed=1))
    b = run_experiment(small_spec(trials=30, seed=2))
    assert [r.d_hat_counts for r in a.rows] != [r.d_hat_counts for r in b.rows]


def test_csv_round_trip(tmp_path):
    rep = run_experiment(small_spec())
    path = emit_csv(rep, tmp_path / "r.csv")
    header = path.read_text().splitlines()[0]
    assert header == ",".join(REPORT_COLUMNS)
    rows = read_csv(path)
    assert len(rows) == len(rep.rows)
    for parsed, row in zip(rows, rep.rows):
        assert parsed["detector"] == row.detector
        assert parsed["p_d"] == row.p_d
        assert parsed["sweep_value"] == row.sweep_value
        assert parsed["d_hat_mode"] == row.d_hat_mode


def test_csv_header_only_for_empty_report(tmp_path):
    from ccorder.harness import MonteCarloReport
    path = emit_csv(MonteCarloReport(()), tmp_path / "e.csv")
    assert path.read_text() == ",".join(REPORT_COLUMNS) + "\n"
    assert read_csv(path) == []


def test_csv_unwritable_path(tmp_path):
    with pytest.raises(OSError, match="cannot write"):
        emit_csv(run_experiment(small_spec(trials=1, sweep=None)), tmp_path / "no" / "x.csv")


def test_read_csv_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        read_csv(p)


def test_mode_tie_breaks():
    row = PointResult(None, "x", 2, 4, 0, {1: 2, 3: 2}, {(2, 3): 2, (2, 2): 2})
    assert row.d_hat_mode == 1 and row.rank_mode == (2, 2)
    assert row.csv_row()["rx_mode"] == "2"
    assert row.p_d == 0.0


def test_sweeps_apply():
    assert apply_sweep(SMALL, "dim", 12).n == 12
    s = apply_sweep(SMALL, "indep_var", 9.0)
    assert s.sigma_x[2] == 3.0 and s.sigma_x[0] == SMALL.sigma_x[0]
    assert apply_sweep(SMALL, "rho_mean", 0.5).rho == (0.5, 0.5)
    with pytest.raises(ConfigError):
        apply_sweep(SMALL, "M", 40.5)
    with pytest.raises(ConfigError):
        apply_sweep(SMALL, "delta_deg", 2.0)
    ula = SMALL.replace(mixing=UlaSteering((10, 20, 30), (40, 50, 60)), noise=SpatialMA())
    assert apply_sweep(ula, "delta_deg", 2.0).mixing.angles_y_deg == (40.0, 42.0, 44.0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        Sweep("M", (60, 30))
    with pytest.raises(ConfigError):
        Sweep("noise", (1, 2))
    with pytest.raises(ConfigError):
        ExperimentSpec(SMALL, MAXMIN, trials=0)
    with pytest.raises(ConfigError):
        ExperimentSpec(SMALL, MAXMIN + MAXMIN[:1])
    with pytest.raises(ConfigError):
        ExperimentSpec(SMALL, ())


def test_histogram(tmp_path):
    h = run_statistic_histogram(SMALL, 3, 3, 2, trials=40, seed=1, p_fa=0.05)
    assert h.statistic.size + h.n_degenerate == 40
    assert h.dof == 2 and h.threshold == pytest.approx(-2 * np.log(0.05))
    h2 = run_statistic_histogram(SMALL, 3, 3, 2, trials=40, seed=1, p_fa=0.05, workers=2, chunk_size=9)
    np.testing.assert_array_equal(h.statistic, h2.statistic)
    path = emit_histogram_csv(h, tmp_path / "h.csv")
    t, c = read_histogram_csv(path)
    np.testing.assert_array_equal(t, h.trial)
    np.testing.assert_array_equal(c, h.statistic)
    with pytest.raises(ConfigError):
        run_statistic_histogram(SMALL, 3, 3, 3, trials=5)
