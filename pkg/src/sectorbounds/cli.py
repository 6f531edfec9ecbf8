"""Command-line front end.

Exit codes: 0 when every checked inequality holds, 2 when a violation is
found, 3 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds as bd
from .errors import MethodInapplicable, SectorBoundsError
from .inequalities import im_part_bound, lemma21_check, modulus_bound
from .io import fmt, load_json, parse_matrix_file
from .norms import parse_function_spec, parse_norm_spec
from .sectorial import NotSectorial, minimal_angle, sector_angle
from .sweep import SweepConfig, emit_curve, hunt_sensitivity, log_grid, write_sweep

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _angle_arg(text):
    return None if text in (None, "auto") else float(text)


def cmd_angle(args) -> int:
    A = parse_matrix_file(args.file)
    methods = ["whitened", "bisection", "fov_sampling"] if args.method == "all" else [args.method]
    out = {}
    sectorial = True
    for m in methods:
        try:
            res = sector_angle(A, m)
        except MethodInapplicable as exc:
            out[m] = f"inapplicable: {exc}"
            continue
        if isinstance(res, NotSectorial):
            out[m] = f"not sectorial: {res.reason}"
            sectorial = False
        else:
            out[m] = res.alpha
    print(json.dumps(out, indent=2))
    return EXIT_OK if sectorial else EXIT_VIOLATION


def cmd_verify(args) -> int:
    A = parse_matrix_file(args.file)
    P = bd.PartitionedMatrix(A, args.split)
    f = parse_function_spec(args.f)
    kind = bd.parse_kind(args.kind, args.s)
    ok = True
    for norm in parse_norm_spec(args.norm, P.n):
        rep = bd.verify_bound(P, _angle_arg(args.alpha), f, norm, kind)
        ok &= rep.holds
        print(json.dumps(rep.to_dict()))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_witness(args) -> int:
    A = parse_matrix_file(args.file)
    if args.ineq == "lemma21":
        if A.shape[0] % 2:
            raise bd.InvalidInput("lemma21 expects an even-sized block matrix [[A, X], [X*, B]]")
        m = A.shape[0] // 2
        reports = lemma21_check(A[:m, :m], A[:m, m:], A[m:, m:], args.s)
    else:
        alpha = _angle_arg(args.alpha)
        if alpha is None:
            res = minimal_angle(A)
            if isinstance(res, NotSectorial):
                raise bd.NotInSector(res.reason)
            alpha = res
        check = im_part_bound if args.ineq == "e1" else modulus_bound
        reports = (check(A, alpha, args.s),)
    ok = True
    for rep in reports:
        ok &= rep.holds
        d = {"label": rep.label, "s": rep.s, "residual_min_eig": rep.residual_min_eig,
             "holds": rep.holds, "tolerance": rep.tolerance}
        if args.show_witness:
            d["witnesses"] = {
                name: {"re": [[fmt(v) for v in row] for row in U.real],
                       "im": [[fmt(v) for v in row] for row in U.imag]}
                for name, U in rep.witness_unitaries
            }
        print(json.dumps(d))
    return EXIT_OK if ok else EXIT_VIOLATION


def _config(path, workers=None) -> SweepConfig:
    cfg = SweepConfig.from_obj(load_json(path))
    if workers is not None:
        cfg = SweepConfig.from_obj({**cfg.to_obj(), "parallelism": workers})
    return cfg


def cmd_sweep(args) -> int:
    cfg = _config(args.config, args.workers)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            footer = write_sweep(cfg, fh, timing=args.timing)
        print(json.dumps({"footer": footer}, indent=2))
    else:
        footer = write_sweep(cfg, sys.stdout, timing=args.timing)
    return EXIT_OK if footer["violations"] == 0 else EXIT_VIOLATION


def cmd_hunt(args) -> int:
    report = hunt_sensitivity(_config(args.config))
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def cmd_curve(args) -> int:
    A = parse_matrix_file(args.file)
    P = bd.PartitionedMatrix(A, args.split)
    f = parse_function_spec(args.f)
    norms = parse_norm_spec(args.norm, P.n)
    if len(norms) != 1:
        raise bd.InvalidInput("curve needs a single norm")
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    lo, hi, count = args.s_grid
    rows = emit_curve(P, _angle_arg(args.alpha), f, norms[0], kinds, log_grid(lo, hi, int(count)), args.out)
    print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sectorbounds", description="Rotfel'd-type bounds for sectorial matrices")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("angle", help="minimal sector angle of a matrix")
    a.add_argument("file")
    a.add_argument("--method", default="all", choices=["all", "whitened", "bisection", "fov_sampling"])
    a.set_defaults(func=cmd_angle)

    v = sub.add_parser("verify", help="check one bound on a partitioned matrix")
    v.add_argument("file")
    v.add_argument("--kind", required=True)
    v.add_argument("--s", type=float, default=1.0)
    v.add_argument("--f", default="pow:1")
    v.add_argument("--norm", default="kyfan:all")
    v.add_argument("--split", type=int, required=True)
    v.add_argument("--alpha", default="auto", help="sector angle in radians, or 'auto'")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("witness", help="witness unitaries for the block-lemma inequalities")
    w.add_argument("file")
    w.add_argument("--ineq", required=True, choices=["lemma21", "e1", "e41"])
    w.add_argument("--s", type=float, default=1.0)
    w.add_argument("--alpha", default="auto")
    w.add_argument("--show-witness", action="store_true")
    w.set_defaults(func=cmd_witness)

    s = sub.add_parser("sweep", help="randomized campaign from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.add_argument("--timing", action="store_true", help="keep wall-time in records")
    s.set_defaults(func=cmd_sweep)

    h = sub.add_parser("hunt", help="harness sensitivity self-test")
    h.add_argument("--config", required=True)
    h.set_defaults(func=cmd_hunt)

    c = sub.add_parser("curve", help="bound-vs-s comparison CSV")
    c.add_argument("file")
    c.add_argument("--kinds", default="main,m2,zpt,mao")
    c.add_argument("--f", default="pow:1")
    c.add_argument("--norm", default="trace")
    c.add_argument("--split", type=int, required=True)
    c.add_argument("--alpha", default="auto")
    c.add_argument("--s-grid", type=float, nargs=3, default=(1e-3, 1e3, 64), metavar=("LO", "HI", "COUNT"))
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SectorBoundsError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
