"""Command-line entry point: ``projsolve {solve,bench,qr,audit}``.

Exit status: 0 on success, 1 on a solver or audit failure, 2 on usage or
input errors. ``bench --seed`` defaults to ``$PROJSOLVE_SEED`` (or 0).
"""
from __future__ import annotations

import argparse
import os
import sys

from . import bench
from .errors import AuditFailure, ParseError, ProjsolveError, SolverError, UnknownMethod
from .fileio import format_vector, parse_matrix_file, parse_vector_file, write_matrix_file
from .linalg import norm2
from .mimo import METHODS, solve_with
from .solver import extract_qr, solve_single

SEED_ENV = "PROJSOLVE_SEED"


class UsageError(Exception):
    pass


def parse_sizes(text):
    """``"20:200:20"`` (inclusive range) or ``"20,40,60"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            if len(parts) != 3 or parts[2] < 1:
                raise ValueError
            start, stop, step = parts
            return tuple(range(start, stop + 1, step))
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}; use START:STOP:STEP or a,b,c") from None


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"${SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="projsolve",
                                description="Least squares by sequential rank-one projections.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve A x = b from files")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--unknown", type=int, help="compute only this unknown (1-based)")
    s.add_argument("--method", default="proposed", choices=sorted(METHODS))
    s.add_argument("--ratio", default="dot", choices=("dot", "sum"))
    s.add_argument("--out", help="write the solution vector here instead of stdout")

    b = sub.add_parser("bench", help="seeded comparison sweep")
    b.add_argument("--sizes", type=parse_sizes, default=bench.DEFAULT_SIZES)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--methods", default=",".join(bench.DEFAULT_METHODS))
    b.add_argument("--csv")
    b.add_argument("--sigma", type=float, default=0.0)
    b.add_argument("--ratio", default="dot", choices=("dot", "sum"))
    b.add_argument("--sweeps", type=int, default=100, help="Kaczmarz sweeps")

    q = sub.add_parser("qr", help="orthogonal factor from one elimination pass")
    q.add_argument("--matrix", required=True)
    q.add_argument("--direction", default="last", choices=("last", "first"))
    q.add_argument("--out-prefix", required=True)

    a = sub.add_parser("audit", help="check the pivot multiplication count")
    a.add_argument("--size", type=int, required=True)
    a.add_argument("--rows", type=int)
    a.add_argument("--seed", type=int, default=0)
    return p


def _solve(args, out):
    A = parse_matrix_file(args.matrix)
    rhs = parse_vector_file(args.rhs)
    if rhs.size != A.shape[0]:
        raise UsageError(f"matrix has {A.shape[0]} rows but rhs has {rhs.size} entries")
    if args.unknown is not None:
        if args.method != "proposed":
            raise UsageError("--unknown is only available with --method proposed")
        if not 1 <= args.unknown <= A.shape[1]:
            raise UsageError(f"--unknown must be in 1..{A.shape[1]}")
        xk, counter = solve_single(A, rhs, args.unknown - 1, args.ratio)
        text = f"{xk!r}\n"
        print(f"x[{args.unknown}] computed with {counter.total_mults} multiplicative ops",
              file=sys.stderr)
    else:
        sol = solve_with(args.method, A, rhs, ratio_mode=args.ratio)
        text = format_vector(sol.x)
        print(f"residual norm {sol.residual_norm:.6e} "
              f"(relative {sol.residual_norm / max(norm2(rhs), 1e-300):.3e})", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def _bench(args, out):
    seed = args.seed if args.seed is not None else _default_seed()
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    try:
        config = bench.BenchConfig(sizes=args.sizes, trials_per_size=args.trials, base_seed=seed,
                                   methods=methods, ratio_mode=args.ratio, noise_sigma=args.sigma,
                                   kaczmarz_sweeps=args.sweeps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = bench.run_sweep(config)
    out.write(bench.render_table(report))
    out.write("\n")
    if args.csv:
        bench.write_csv(report, args.csv)
    return 0


def _qr(args, out):
    A = parse_matrix_file(args.matrix)
    f = extract_qr(A, args.direction)
    for name, M in (("Q", f.Q), ("T", f.T), ("U", f.U), ("D", f.D[None, :])):
        path = f"{args.out_prefix}_{name}.txt"
        write_matrix_file(path, M)
        out.write(f"wrote {path}\n")


def _audit(args, out):
    rec = bench.complexity_audit(args.size, args.rows, seed=args.seed)
    out.write(rec.as_text() + "\n")


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"solve": _solve, "bench": _bench, "qr": _qr, "audit": _audit}[args.command]
    try:
        handler(args, out)
    except (SolverError, AuditFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ParseError, UnknownMethod, ProjsolveError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
