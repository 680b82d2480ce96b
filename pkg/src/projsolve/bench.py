"""Seeded solver comparisons on square IID Gaussian channels.

Every (size, trial) cell gets its own seed ``derive_seed(base_seed, size,
trial)``; all methods in that cell solve the same instance. Only the solve
call is timed. Failures are recorded in ``status`` instead of aborting.
"""
from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .baselines import IterativeConfig, householder_qr_solve
from .errors import AuditFailure, ProjsolveError, UnknownMethod
from .linalg import OpCounter
from .mimo import METHODS, ChannelInstance, build_problem, gen_channel, gen_input, zf_estimate
from .rng import derive_seed
from .solver import RATIO_MODES, reduce, solve_all

DEFAULT_SIZES = tuple(range(20, 201, 20))
DEFAULT_METHODS = ("proposed", "householder_qr", "lsmr", "lsqr", "kaczmarz")

CSV_COLUMNS = ("size", "method", "trial", "seed", "time_s", "res_norm", "err_norm",
               "pivot_dot_mults", "update_mults", "backsub_mults", "total_mults", "status")


@dataclass
class BenchConfig:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    trials_per_size: int = 1
    base_seed: int = 0
    methods: tuple[str, ...] = DEFAULT_METHODS
    ratio_mode: str = "dot"
    noise_sigma: float = 0.0
    kaczmarz_sweeps: int = 100

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        self.methods = tuple(self.methods)
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be a non-empty list of positive integers")
        if any(a >= b for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError(f"sizes must be strictly increasing, got {self.sizes}")
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise UnknownMethod(m, tuple(METHODS))
        if self.trials_per_size < 1:
            raise ValueError("trials_per_size must be >= 1")
        if self.ratio_mode not in RATIO_MODES:
            raise ValueError(f"ratio_mode must be one of {RATIO_MODES}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.kaczmarz_sweeps < 1:
            raise ValueError("kaczmarz_sweeps must be >= 1")

    def cell_seed(self, size, trial):
        return derive_seed(self.base_seed, size, trial)


@dataclass
class TrialResult:
    n: int
    m: int
    method: str
    trial: int
    seed: int
    wall_time_seconds: float
    residual_norm: float
    error_norm: float
    pivot_dot_mults: int = 0
    update_mults: int = 0
    backsub_mults: int = 0
    total_mults: int = 0
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"

    def csv_row(self):
        return {
            "size": str(self.n),
            "method": self.method,
            "trial": str(self.trial),
            "seed": str(self.seed),
            "time_s": f"{self.wall_time_seconds:.6e}",
            "res_norm": repr(float(self.residual_norm)),
            "err_norm": repr(float(self.error_norm)),
            "pivot_dot_mults": str(self.pivot_dot_mults),
            "update_mults": str(self.update_mults),
            "backsub_mults": str(self.backsub_mults),
            "total_mults": str(self.total_mults),
            "status": self.status,
        }


@dataclass
class BenchReport:
    config: BenchConfig
    trials: list[TrialResult] = field(default_factory=list)

    def aggregates(self):
        """Medians per ``(size, method)`` over successful trials."""
        groups = {}
        for t in self.trials:
            groups.setdefault((t.n, t.method), []).append(t)
        out = {}
        for key, ts in groups.items():
            good = [t for t in ts if t.ok]
            med = (lambda xs: statistics.median(xs)) if good else (lambda xs: math.nan)
            out[key] = {
                "time": med([t.wall_time_seconds for t in good]),
                "res_norm": med([t.residual_norm for t in good]),
                "err_norm": med([t.error_norm for t in good]),
                "ok": len(good),
                "count": len(ts),
            }
        return out


def _run_on_instance(inst: ChannelInstance, method, trial, config: BenchConfig) -> TrialResult:
    opts = {"ratio_mode": config.ratio_mode,
            "config": IterativeConfig(max_sweeps=config.kaczmarz_sweeps, seed=inst.seed)}
    t0 = time.perf_counter()
    try:
        sol = zf_estimate(inst, method, **opts)
    except ProjsolveError as exc:
        return TrialResult(n=inst.n, m=inst.m, method=method, trial=trial, seed=inst.seed,
                           wall_time_seconds=time.perf_counter() - t0,
                           residual_norm=math.nan, error_norm=math.nan,
                           status=getattr(exc, "code", type(exc).__name__))
    elapsed = time.perf_counter() - t0
    c = sol.counter
    return TrialResult(n=inst.n, m=inst.m, method=method, trial=trial, seed=inst.seed,
                       wall_time_seconds=elapsed, residual_norm=sol.residual_norm,
                       error_norm=sol.error_norm, pivot_dot_mults=c.pivot_dot_mults,
                       update_mults=c.update_mults, backsub_mults=c.backsub_mults,
                       total_mults=c.total_mults)


def run_trial(n, method, seed, config: BenchConfig | None = None, trial=0) -> TrialResult:
    if method not in METHODS:
        raise UnknownMethod(method, tuple(METHODS))
    config = config or BenchConfig()
    inst = build_problem(n, n, seed, config.noise_sigma)
    return _run_on_instance(inst, method, trial, config)


def run_sweep(config: BenchConfig, progress=None) -> BenchReport:
    """Run every (size, trial, method) cell.

    ``progress``, if given, is called with each finished :class:`TrialResult`.
    """
    report = BenchReport(config=config)
    for n in config.sizes:
        for trial in range(config.trials_per_size):
            inst = build_problem(n, n, config.cell_seed(n, trial), config.noise_sigma)
            for method in config.methods:
                res = _run_on_instance(inst, method, trial, config)
                report.trials.append(res)
                if progress is not None:
                    progress(res)
    return report


@dataclass
class AuditRecord:
    n: int
    m: int
    expected_pivot_dot_mults: int
    pivot_dot_mults: int
    update_mults: int
    backsub_mults: int
    proposed_total: int
    householder_total: int
    householder_pivot_dot_mults: int

    @property
    def total_ratio(self):
        """Measured proposed/Householder ratio of all multiplicative operations."""
        return self.proposed_total / self.householder_total

    @property
    def pivot_ratio(self):
        """Pivot inner products against the ``2 n^3 / 3`` Householder model."""
        return self.pivot_dot_mults / (2 * self.n ** 3 / 3)

    def as_text(self):
        return "\n".join([
            f"size n={self.n} m={self.m}",
            f"pivot_dot_mults   {self.pivot_dot_mults} (expected m*n*(n-1)/2 = {self.expected_pivot_dot_mults})",
            f"update_mults      {self.update_mults}",
            f"backsub_mults     {self.backsub_mults}",
            f"proposed total    {self.proposed_total}",
            f"householder total {self.householder_total}",
            f"total ratio       {self.total_ratio:.6f}",
            f"pivot ratio       {self.pivot_ratio:.6f} (vs 2n^3/3)",
        ])


def complexity_audit(n, m=None, seed=0) -> AuditRecord:
    """Count operations on one seeded instance and check the pivot formula.

    Raises :class:`AuditFailure` unless the pivot inner products of a single
    reduction equal ``m n (n - 1) / 2`` exactly.
    """
    m = n if m is None else m
    if n < 1 or m < n:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    A = gen_channel(m, n, seed)
    b = A @ gen_input(n, seed)

    reduce_counter = OpCounter()
    reduce(A, b, 0, reduce_counter)
    expected = m * n * (n - 1) // 2
    if reduce_counter.pivot_dot_mults != expected:
        raise AuditFailure(f"pivot inner products for n={n}, m={m}", expected,
                           reduce_counter.pivot_dot_mults)

    full = solve_all(A, b).counter
    hh = householder_qr_solve(A, b).counter
    return AuditRecord(n=n, m=m, expected_pivot_dot_mults=expected,
                       pivot_dot_mults=reduce_counter.pivot_dot_mults,
                       update_mults=full.update_mults, backsub_mults=full.backsub_mults,
                       proposed_total=full.total_mults, householder_total=hh.total_mults,
                       householder_pivot_dot_mults=hh.pivot_dot_mults)


def cost_ratio_report(sizes=(50, 100, 200), seed=0) -> str:
    lines = ["n      proposed_total  householder_total  total_ratio  pivot_ratio"]
    for n in sizes:
        a = complexity_audit(n, seed=seed)
        lines.append(f"{n:<6d} {a.proposed_total:>15d} {a.householder_total:>18d} "
                     f"{a.total_ratio:>12.6f} {a.pivot_ratio:>12.6f}")
    return "\n".join(lines)


def write_csv(report: BenchReport, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for t in report.trials:
                w.writerow(t.csv_row())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", str(path)) from exc


def read_csv(path) -> list[TrialResult]:
    """Inverse of :func:`write_csv` (``m`` is taken equal to ``size``)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        for row in reader:
            out.append(TrialResult(
                n=int(row["size"]), m=int(row["size"]), method=row["method"],
                trial=int(row["trial"]), seed=int(row["seed"]),
                wall_time_seconds=float(row["time_s"]),
                residual_norm=float(row["res_norm"]), error_norm=float(row["err_norm"]),
                pivot_dot_mults=int(row["pivot_dot_mults"]), update_mults=int(row["update_mults"]),
                backsub_mults=int(row["backsub_mults"]), total_mults=int(row["total_mults"]),
                status=row["status"]))
    return out


def render_table(report: BenchReport) -> str:
    """Median time and norms, one block per size, one line per method."""
    agg = report.aggregates()
    width = max([len(m) for m in report.config.methods] + [6])
    head = f"  {'method':<{width}}  {'time_s':>13}  {'||r||':>13}  {'||e||':>13}  ok"
    lines = []
    for n in report.config.sizes:
        lines.append(f"M = N = {n}")
        lines.append(head)
        for method in report.config.methods:
            a = agg.get((n, method))
            if a is None:
                continue
            lines.append(f"  {method:<{width}}  {a['time']:13.6e}  {a['res_norm']:13.6e}  "
                         f"{a['err_norm']:13.6e}  {a['ok']}/{a['count']}")
        lines.append("")
    return "\n".join(lines)


def csv_without_time(path) -> str:
    """CSV text with the ``time_s`` column blanked, for reproducibility checks."""
    rows = Path(path).read_text().splitlines()
    idx = CSV_COLUMNS.index("time_s")
    out = []
    for line in rows:
        cells = line.split(",")
        cells[idx] = ""
        out.append(",".join(cells))
    return "\n".join(out)
