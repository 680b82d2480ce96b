import math

import numpy as np
import pytest

from projsolve.bench import (
    CSV_COLUMNS,
    BenchConfig,
    BenchReport,
    complexity_audit,
    cost_ratio_report,
    csv_without_time,
    read_csv,
    render_table,
    run_sweep,
    run_trial,
    write_csv,
)
from projsolve.errors import SingularPivot, UnknownMethod
from projsolve.mimo import build_problem


def test_run_trial_proposed_exact():
    r = run_trial(20, "proposed", 5)
    inst = build_problem(20, 20, 5)
    assert r.ok
    assert r.residual_norm <= 1e-8 * np.linalg.norm(inst.b)
    assert r.pivot_dot_mults == 20 * 20 * 19 // 2
    assert r.backsub_mults == 20 * 19 // 2
    assert r.wall_time_seconds >= 0


def test_run_trial_kaczmarz_inexact():
    r = run_trial(20, "kaczmarz", 5)
    assert r.residual_norm > 1e-3 * np.linalg.norm(build_problem(20, 20, 5).b)


def test_run_trial_deterministic():
    a, b = run_trial(30, "proposed", 8), run_trial(30, "proposed", 8)
    for f in ("residual_norm", "error_norm", "pivot_dot_mults", "update_mults", "total_mults"):
        assert getattr(a, f) == getattr(b, f)


def test_run_trial_unknown_method():
    with pytest.raises(UnknownMethod):
        run_trial(5, "bogus", 0)


def test_error_rows_do_not_abort(monkeypatch):
    from projsolve import bench, mimo

    def broken(A, b, opts):
        raise SingularPivot(0)
    monkeypatch.setitem(mimo.METHODS, "proposed", broken)
    report = bench.run_sweep(BenchConfig(sizes=(4, 6), methods=("proposed", "householder_qr")))
    assert [t.status for t in report.trials] == ["SingularPivot", "ok"] * 2
    assert math.isnan(report.trials[0].residual_norm)
    assert report.aggregates()[(4, "proposed")]["ok"] == 0


def test_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(sizes=(20, 20))
    with pytest.raises(ValueError):
        BenchConfig(methods=())
    with pytest.raises(UnknownMethod):
        BenchConfig(methods=("proposed", "cholesky"))
    with pytest.raises(ValueError):
        BenchConfig(ratio_mode="max")


def test_sweep_shape_and_fairness():
    cfg = BenchConfig(sizes=(8, 12, 16), trials_per_size=2,
                      methods=("proposed", "householder_qr", "lsqr"))
    report = run_sweep(cfg)
    assert len(report.trials) == 3 * 2 * 3
    # every method in a cell sees the same seed, hence the same instance
    cells = {}
    for t in report.trials:
        cells.setdefault((t.n, t.trial), set()).add(t.seed)
    assert all(len(s) == 1 for s in cells.values())
    assert len({next(iter(s)) for s in cells.values()}) == len(cells)


def test_default_config_grid():
    cfg = BenchConfig()
    assert cfg.sizes == tuple(range(20, 201, 20))
    assert cfg.kaczmarz_sweeps == 100


def test_csv_header_and_rows(tmp_path):
    empty = BenchReport(config=BenchConfig(sizes=(4,)))
    write_csv(empty, tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"

    one = run_sweep(BenchConfig(sizes=(4,), methods=("proposed",)))
    write_csv(one, tmp_path / "one.csv")
    lines = (tmp_path / "one.csv").read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ("size,method,trial,seed,time_s,res_norm,err_norm,pivot_dot_mults,"
                        "update_mults,backsub_mults,total_mults,status")


def test_csv_round_trip(tmp_path):
    report = run_sweep(BenchConfig(sizes=(5, 9), trials_per_size=2,
                                   methods=("proposed", "kaczmarz", "lsmr")))
    write_csv(report, tmp_path / "r.csv")
    back = read_csv(tmp_path / "r.csv")
    assert len(back) == len(report.trials)
    for a, b in zip(report.trials, back):
        for f in ("n", "method", "trial", "seed", "residual_norm", "error_norm",
                  "pivot_dot_mults", "update_mults", "backsub_mults", "total_mults", "status"):
            assert getattr(a, f) == getattr(b, f), f


def test_csv_norm_precision(tmp_path):
    report = run_sweep(BenchConfig(sizes=(6,), methods=("kaczmarz",)))
    write_csv(report, tmp_path / "r.csv")
    row = (tmp_path / "r.csv").read_text().splitlines()[1].split(",")
    res = row[CSV_COLUMNS.index("res_norm")]
    assert len(res.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) >= 6


def test_reproducible_csv(tmp_path):
    cfg = BenchConfig(sizes=(6, 10), trials_per_size=2, base_seed=3,
                      methods=("proposed", "householder_qr", "kaczmarz", "lsqr", "lsmr"))
    write_csv(run_sweep(cfg), tmp_path / "a.csv")
    write_csv(run_sweep(cfg), tmp_path / "b.csv")
    assert csv_without_time(tmp_path / "a.csv") == csv_without_time(tmp_path / "b.csv")
    other = BenchConfig(sizes=(6, 10), trials_per_size=2, base_seed=4, methods=cfg.methods)
    write_csv(run_sweep(other), tmp_path / "c.csv")
    assert csv_without_time(tmp_path / "a.csv") != csv_without_time(tmp_path / "c.csv")


def test_render_table_groups_by_size():
    report = run_sweep(BenchConfig(sizes=(4, 8), methods=("proposed", "lsqr")))
    text = render_table(report)
    assert text.index("M = N = 4") < text.index("M = N = 8")
    block = text.split("M = N = 8")[1]
    assert "proposed" in block and "lsqr" in block


@pytest.mark.parametrize("n, m, expected", [(3, 3, 9), (10, 10, 450), (1, 1, 0), (4, 14, 84)])
def test_complexity_audit(n, m, expected):
    rec = complexity_audit(n, m)
    assert rec.expected_pivot_dot_mults == expected
    assert rec.pivot_dot_mults == expected
    assert rec.backsub_mults == n * (n - 1) // 2


def test_audit_failure_is_raised(monkeypatch):
    from projsolve import bench
    from projsolve.errors import AuditFailure

    real = bench.reduce

    def miscounting(A, b, k, counter):
        out = real(A, b, k, counter)
        counter.add("pivot_dot_mults", 1)
        return out
    monkeypatch.setattr(bench, "reduce", miscounting)
    with pytest.raises(AuditFailure) as info:
        complexity_audit(5)
    assert info.value.expected == 50 and info.value.observed == 51


def test_cost_ratio_report_deterministic():
    a = cost_ratio_report((20, 40))
    assert a == cost_ratio_report((20, 40))
    assert len(a.splitlines()) == 3
