"""Command-line surface: invert, rank, nullspace, betti, group-unit, bench, verify.

Every command emits one machine-readable JSON line of parameters and
operation counters on stdout (suppressed by --quiet) and never mutates
its input files.  Exit codes: 0 success, 1 math-level failure, 2 file or
format problem, 3 violated precondition (field too small).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as bench_mod
from .apps import (
    betti_numbers,
    group_ring_unit,
    load_complex,
    load_group_ring_element,
)
from .costmodel import bundled_table, load_table, solve_crossing
from .errors import (
    FFLinalgError,
    FieldTooSmallError,
    FormatError,
    NotAUnitError,
    PreconditionFailureError,
    RetriesExhaustedError,
    SingularInputError,
    SingularMatrixError,
)
from .field import PrimeField, SeededRng
from .geninv import GeneratorStrategy
from .krylov import matrix_inv
from .matrix import (
    DenseMatrix,
    load_dense_matrix,
    load_sparse_matrix,
    mat_mul,
    save_dense_matrix,
)
from .rank import rank_and_nullspace

EXIT_OK = 0
EXIT_MATH = 1
EXIT_FORMAT = 2
EXIT_PRECONDITION = 3


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    parser.add_argument("--quiet", action="store_true", help="suppress the JSON metrics line")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (kernels are single-threaded; kept for interface stability)")
    parser.add_argument("--retries", type=int, default=8, help="preconditioner retry budget")
    parser.add_argument("--strategy", choices=[s.value for s in GeneratorStrategy],
                        default=GeneratorStrategy.DENSE_ORACLE.value,
                        help="generator computation strategy for structured inversion")


def _emit(args, payload, field=None):
    if args.quiet:
        return
    if field is not None:
        payload["counters"] = field.counter.as_dict()
    payload["seed"] = args.seed
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _validate_common(args):
    if args.threads < 1:
        raise FormatError("--threads must be at least 1")
    if args.retries < 1:
        raise FormatError("--retries must be at least 1")


def cmd_invert(args) -> int:
    a = load_sparse_matrix(args.infile)
    a.field.counter.reset()
    stats = {}
    inverse = matrix_inv(
        a,
        s=args.block_size,
        strategy=GeneratorStrategy.parse(args.strategy),
        rng=SeededRng(args.seed),
        retry_budget=args.retries,
        stats=stats,
    )
    save_dense_matrix(inverse, args.outfile)
    _emit(args, {"command": "invert", "n": a.rows, **stats}, a.field)
    return EXIT_OK


def cmd_rank(args, write_nullspace=False) -> int:
    a = load_sparse_matrix(args.infile)
    a.field.counter.reset()
    cert = rank_and_nullspace(
        a,
        rng=SeededRng(args.seed),
        strategy=GeneratorStrategy.parse(args.strategy),
        retry_budget=args.retries,
    )
    if write_nullspace or args.outfile:
        if not args.outfile:
            raise FormatError("nullspace output requires --out")
        save_dense_matrix(cert.nullspace, args.outfile)
    print(cert.r)
    _emit(
        args,
        {"command": "nullspace" if write_nullspace else "rank",
         "n": a.rows, "rank": cert.r, "attempts": cert.attempts},
        a.field,
    )
    return EXIT_OK


def cmd_betti(args) -> int:
    complex_ = load_complex(args.infile, assume_closed=args.assume_closed)
    field = PrimeField(args.p)
    field.counter.reset()
    betti, _ = betti_numbers(
        complex_,
        field,
        rng=SeededRng(args.seed),
        strategy=GeneratorStrategy.parse(args.strategy),
        retry_budget=args.retries,
    )
    print(" ".join(str(b) for b in betti))
    _emit(args, {"command": "betti", "simplices": complex_.size, "betti": betti}, field)
    return EXIT_OK


def cmd_group_unit(args) -> int:
    group, field, beta = load_group_ring_element(args.infile)
    field.counter.reset()
    beta_inv, orbit = group_ring_unit(group, beta, strategy=GeneratorStrategy.parse(args.strategy))
    if args.outfile:
        with open(args.outfile, "w", encoding="ascii") as fh:
            fh.write(f"{group.m} {group.s} {group.t} {group.u} {field.modulus}\n")
            for i, c in enumerate(beta_inv.coeffs):
                if c:
                    a_exp, b_exp = group.coords(i)
                    fh.write(f"{a_exp} {b_exp} {c}\n")
    if args.orbit_out:
        save_dense_matrix(orbit, args.orbit_out)
    print("unit")
    _emit(args, {"command": "group-unit", "order": group.order, "unit": True}, field)
    return EXIT_OK


def cmd_verify(args) -> int:
    a = load_dense_matrix(args.file_a)
    b = load_dense_matrix(args.file_b)
    if a.field != b.field or a.cols != b.rows or a.rows != b.cols:
        _emit(args, {"command": "verify", "match": False, "reason": "shape/field mismatch"})
        return EXIT_MATH
    product = mat_mul(a, b)
    ok = product == DenseMatrix.identity(a.field, a.rows)
    _emit(args, {"command": "verify", "match": bool(ok)}, a.field)
    return EXIT_OK if ok else EXIT_MATH


def cmd_bench(args) -> int:
    field = PrimeField(args.p)
    sizes = []
    for tok in args.sizes.split(","):
        tok = tok.strip()
        if tok:
            sizes.append(int(tok))
    if not sizes:
        raise FormatError("--sizes must name at least one dimension")
    table = load_table(args.omega_table) if args.omega_table else bundled_table()
    report = solve_crossing(table)
    rows = []
    for n in sizes:
        s = n // args.block_divisor
        if s < 1 or n % args.block_divisor != 0:
            raise FormatError(f"--block-divisor {args.block_divisor} does not split n={n}")
        field.counter.reset()
        row = bench_mod.run_recovery_benchmark(field, n, s, args.seed)
        row["k_star"] = round(report.k_star, 6)
        row["omega_star"] = round(report.omega_star, 6)
        rows.append(row)
    bench_mod.write_benchmark_csv(rows, args.outfile)
    _emit(args, {"command": "bench", "rows": len(rows), "csv": args.outfile}, field)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fflinalg",
        description="Exact sparse and structured linear algebra over GF(p)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inv = sub.add_parser("invert", help="explicit inverse of a sparse matrix")
    p_inv.add_argument("--in", dest="infile", required=True)
    p_inv.add_argument("--out", dest="outfile", required=True)
    p_inv.add_argument("--block-size", type=int, default=None,
                       help="blocking factor s (divisor of n); chosen from the cost model if absent")
    _add_common(p_inv)

    p_rank = sub.add_parser("rank", help="certified rank (and optional nullspace file)")
    p_rank.add_argument("--in", dest="infile", required=True)
    p_rank.add_argument("--out", dest="outfile", default=None, help="write the nullspace basis here")
    _add_common(p_rank)

    p_null = sub.add_parser("nullspace", help="certified nullspace basis")
    p_null.add_argument("--in", dest="infile", required=True)
    p_null.add_argument("--out", dest="outfile", required=True)
    _add_common(p_null)

    p_betti = sub.add_parser("betti", help="Betti numbers of a simplicial complex")
    p_betti.add_argument("--in", dest="infile", required=True)
    p_betti.add_argument("--p", type=int, default=2, help="field characteristic (default 2)")
    p_betti.add_argument("--assume-closed", action="store_true",
                         help="trust the file to be face-closed instead of auto-closing")
    _add_common(p_betti)

    p_unit = sub.add_parser("group-unit", help="test a group-ring element for invertibility")
    p_unit.add_argument("--in", dest="infile", required=True)
    p_unit.add_argument("--out", dest="outfile", default=None, help="write the inverse element here")
    p_unit.add_argument("--orbit-out", dest="orbit_out", default=None,
                        help="write the full inverse-orbit matrix here")
    _add_common(p_unit)

    p_verify = sub.add_parser("verify", help="check that A @ B is the identity")
    p_verify.add_argument("--a", dest="file_a", required=True)
    p_verify.add_argument("--b", dest="file_b", required=True)
    _add_common(p_verify)

    p_bench = sub.add_parser("bench", help="operation-count benchmark of the recovery paths")
    p_bench.add_argument("--sizes", default="128,256", help="comma-separated dimensions")
    p_bench.add_argument("--block-divisor", type=int, default=4, help="use s = n / this")
    p_bench.add_argument("--p", type=int, default=65537)
    p_bench.add_argument("--out", dest="outfile", required=True, help="CSV output path")
    p_bench.add_argument("--omega-table", dest="omega_table", default=None,
                         help="text file of `k omega` lines overriding the bundled table")
    _add_common(p_bench)

    return parser


_HANDLERS = {
    "invert": cmd_invert,
    "rank": cmd_rank,
    "nullspace": lambda args: cmd_rank(args, write_nullspace=True),
    "betti": cmd_betti,
    "group-unit": cmd_group_unit,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_common(args)
        return _HANDLERS[args.command](args)
    except (FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FieldTooSmallError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NotAUnitError:
        print("error: not a unit", file=sys.stderr)
        return EXIT_MATH
    except (SingularInputError, SingularMatrixError, PreconditionFailureError,
            RetriesExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except FFLinalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
