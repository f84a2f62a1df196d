"""Command line front end.

Exit status: 0 on success, 1 when a verification fails (residual above
tolerance, bound violated, system not an ASF), 2 on bad input.

Sweep CSV columns, in order:
  seed, d, n_sys, deficiency_rank, bound, count_added, residual, tight_ok
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import report
from .expansion import (
    ExpansionResult,
    ZeroLambda,
    completion_lower_bound,
    expand_tight,
    expand_variant_a,
    expand_variant_b,
    minimal_tight_completion,
)
from .frames import (
    ExponentMismatch,
    NotAnASF,
    SchemaError,
    classify,
    frame_operator,
    system_from_dict,
    verify_reconstruction,
)
from .linalg import DimensionMismatch, Tolerances, as_exponent
from .sequence_spaces import GENERATORS, deficiency_system, example_one_system, generate, p_asf_expansion

SWEEP_COLUMNS = ["seed", "d", "n_sys", "deficiency_rank", "bound", "count_added", "residual", "tight_ok"]
MAX_SWEEP_RANK = 6


class InputError(Exception):
    pass


def _parse_lambda(text: str):
    try:
        z = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scalar {text!r}") from None
    return z.real if z.imag == 0 else z


def _parse_p(text: str) -> float:
    try:
        return as_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="example1",
                        help="path to a system JSON file, or a generator: " + ", ".join(GENERATORS))
    common.add_argument("--d", type=int, default=4, help="dimension for generators")
    common.add_argument("--n-sys", type=int, default=None, help="number of pairs for the random generator")
    common.add_argument("--rank", type=int, default=None,
                        help="random generator: build a system with rank(I - S) equal to this")
    common.add_argument("--scalar", choices=["real", "complex"], default="real")
    common.add_argument("--p", type=_parse_p, default=2.0, help='exponent in [1, inf] or "inf"')
    common.add_argument("--lambda", dest="lam", type=_parse_lambda, default=1.0,
                        help="tightness constant, e.g. 2, -1 or 0.5+0.5j")
    common.add_argument("--variant", choices=["A", "B", "TIGHT"], default="A")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--rank-tol", type=float, default=None)
    common.add_argument("--invert-tol", type=float, default=None)
    common.add_argument("--residual-tol", type=float, default=None)
    common.add_argument("--output", default=None, help="report path (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--prune", action=argparse.BooleanOptionalAction, default=True,
                        help="drop numerically zero added pairs")
    common.add_argument("--kahan", action="store_true", help="compensated frame operator assembly")

    parser = argparse.ArgumentParser(
        prog="asframe",
        description="Classify, expand and complete approximate Schauder frames on l^p(d).",
        epilog="Sweep CSV columns: " + ",".join(SWEEP_COLUMNS),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="Bessel bound, ASF and tightness")
    p_expand = sub.add_parser("expand", parents=[common], help="expand to an ASF (variant A, B or TIGHT)")
    p_expand.add_argument("--probe", action="store_true",
                          help="run the p-ASF expansion and report whether it certifies")
    sub.add_parser("complete", parents=[common], help="minimal lambda-tight completion")
    sub.add_parser("bound", parents=[common], help="rank(lambda I - S), the least number of added pairs")
    p_verify = sub.add_parser("verify", parents=[common], help="reconstruction check on random vectors")
    p_verify.add_argument("--expanded-by", choices=["A", "B", "TIGHT", "MINIMAL"], default=None,
                          help="expand the input first")
    p_sweep = sub.add_parser("sweep", parents=[common], help="randomized sweep against the counting bound")
    p_sweep.add_argument("--command", dest="sweep_command", choices=["complete", "expand"], default="complete")
    p_sweep.add_argument("--dmax", type=int, default=20)
    sub.add_parser("example", parents=[common], help="the shift-operator example on l^p(d)")
    return parser


def _tolerances(args) -> Tolerances:
    base = Tolerances.from_env()
    return Tolerances(
        rank_tol=base.rank_tol if args.rank_tol is None else args.rank_tol,
        invert_tol=base.invert_tol if args.invert_tol is None else args.invert_tol,
        residual_tol=base.residual_tol if args.residual_tol is None else args.residual_tol,
        compensated=args.kahan,
    )


def _load_system(args):
    if args.input in GENERATORS:
        return generate(args.input, d=args.d, p=args.p, seed=args.seed, n_sys=args.n_sys,
                        rank=args.rank, scalar=args.scalar)
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.input}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return system_from_dict(data)


def _expand(sys_, variant, args, tol) -> ExpansionResult:
    if variant == "A":
        return expand_variant_a(sys_, prune=args.prune, tol=tol)
    if variant == "B":
        return expand_variant_b(sys_, prune=args.prune, tol=tol)
    if variant == "TIGHT":
        return expand_tight(sys_, args.lam, prune=args.prune, tol=tol)
    return minimal_tight_completion(sys_, args.lam, tol)


def _summary(sys_) -> dict:
    return {"dim": sys_.dim, "p": sys_.p, "scalar": sys_.scalar, "n_pairs": len(sys_)}


def cmd_classify(args, tol):
    sys_ = _load_system(args)
    return {"system": _summary(sys_), "classification": classify(sys_, tol, args.seed).to_dict()}, 0


def cmd_expand(args, tol):
    sys_ = _load_system(args)
    if args.probe:
        result = p_asf_expansion(sys_, tol, args.seed)
        ok = result.certificate.certified
    else:
        result = _expand(sys_, args.variant, args, tol)
        ok = result.residual <= tol.residual_tol
    return result.to_dict(), 0 if ok else 1


def cmd_complete(args, tol):
    sys_ = _load_system(args)
    bound = completion_lower_bound(sys_, args.lam, tol)
    result = minimal_tight_completion(sys_, args.lam, tol)
    out = result.to_dict()
    out["bound"] = bound
    ok = result.residual <= tol.residual_tol and result.count_added == bound
    return out, 0 if ok else 1


def cmd_bound(args, tol):
    sys_ = _load_system(args)
    return {"lambda": args.lam, "bound": completion_lower_bound(sys_, args.lam, tol)}, 0


def cmd_verify(args, tol):
    sys_ = _load_system(args)
    if args.expanded_by is not None:
        sys_ = _expand(sys_, args.expanded_by, args, tol).expanded
    try:
        rep = verify_reconstruction(sys_, args.trials, args.seed, tol)
    except NotAnASF as exc:
        return {"system": _summary(sys_), "is_asf": False, "error": str(exc), "passed": False}, 1
    out = {"system": _summary(sys_), "is_asf": True}
    out.update(rep.to_dict())
    return out, 0 if rep.passed else 1


def _trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def sweep_rows(args, tol) -> list[dict]:
    rows = []
    for i in range(args.trials):
        trial_seed = _trial_seed(args.seed, i)
        rng = np.random.Generator(np.random.Philox(trial_seed))
        d = int(rng.integers(1, args.dmax + 1))
        rank = int(rng.integers(0, min(MAX_SWEEP_RANK, d) + 1))
        n_sys = int(rng.integers(d, 2 * d + 1))
        sys_ = deficiency_system(d, n_sys, rank, trial_seed, args.p, args.scalar)
        bound = completion_lower_bound(sys_, args.lam, tol)
        if args.sweep_command == "complete":
            result = minimal_tight_completion(sys_, args.lam, tol)
        else:
            result = _expand(sys_, args.variant, args, tol)
        rows.append({
            "seed": trial_seed,
            "d": d,
            "n_sys": n_sys,
            "deficiency_rank": rank,
            "bound": bound,
            "count_added": result.count_added,
            "residual": result.residual,
            "tight_ok": result.residual <= tol.residual_tol,
        })
    return rows


def _row_ok(row, args) -> bool:
    ok = row["tight_ok"] and row["count_added"] >= row["bound"]
    if args.sweep_command == "complete":
        ok = ok and row["count_added"] == row["bound"]
    if args.lam == 1:
        ok = ok and row["bound"] == row["deficiency_rank"]
    return ok


def cmd_sweep(args, tol):
    if args.dmax < 1:
        raise InputError("--dmax must be >= 1")
    rows = sweep_rows(args, tol)
    residuals = [r["residual"] for r in rows]
    failed = sum(not _row_ok(r, args) for r in rows)
    out = {
        "config": {
            "command": args.sweep_command,
            "variant": args.variant if args.sweep_command == "expand" else "TIGHT",
            "lambda": args.lam,
            "p": args.p,
            "scalar": args.scalar,
            "seed": args.seed,
            "trials": args.trials,
            "dmax": args.dmax,
        },
        "rows": rows,
        "aggregate": {
            "min_residual": min(residuals),
            "max_residual": max(residuals),
            "mean_residual": float(np.mean(residuals)),
            "fraction_count_equals_bound": sum(r["count_added"] == r["bound"] for r in rows) / len(rows),
            "failed_rows": failed,
        },
    }
    return out, 0 if failed == 0 else 1


def cmd_example(args, tol):
    d, p = args.d, args.p
    sys_ = example_one_system(d, p)
    S = frame_operator(sys_, tol.compensated).entries
    deficiency_images = (np.eye(d) - S).T  # row n is (I - S) e_n
    expected_S = np.diag([0.0] + [1.0] * (d - 1))
    e1 = np.eye(d)[0]
    result = minimal_tight_completion(sys_, 1.0, tol)
    cls_before = classify(sys_, tol, args.seed)
    cls_after = classify(result.expanded, tol, args.seed)
    checks = {
        "frame_operator_is_RL": bool(np.array_equal(S, expected_S)),
        "deficiency_e1_is_e1": bool(np.array_equal(deficiency_images[0], e1)),
        "deficiency_en_is_zero": bool(np.all(deficiency_images[1:] == 0)),
        "original_not_asf": not cls_before.is_asf,
        "one_pair_added": result.count_added == 1,
        "expanded_is_1_tight": cls_after.tight_lambda == 1.0,
        "residual_ok": result.residual <= 1e-10,
    }
    out = {
        "dim": d,
        "p": p,
        "frame_operator_diagonal": np.diag(S).real.tolist(),
        "classification": cls_before.to_dict(),
        "completion": result.to_dict(),
        "expanded_classification": cls_after.to_dict(),
        "checks": checks,
    }
    return out, 0 if all(checks.values()) else 1


COMMANDS = {
    "classify": cmd_classify,
    "expand": cmd_expand,
    "complete": cmd_complete,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "example": cmd_example,
}


def _csv(out: dict, command: str) -> str:
    if command == "sweep":
        return report.write_csv(SWEEP_COLUMNS, out["rows"])
    flat = {}
    for key, value in out.items():
        if isinstance(value, dict):
            for k, v in value.items():
                if not isinstance(v, (dict, list)):
                    flat[f"{key}.{k}"] = v
        elif not isinstance(value, list):
            flat[key] = value
    return report.write_csv(list(flat), [flat])


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.trials < 1:
            raise InputError("--trials must be >= 1")
        tol = _tolerances(args)
        out, status = COMMANDS[args.command](args, tol)
    except (InputError, SchemaError, DimensionMismatch, ExponentMismatch, ZeroLambda, ValueError) as exc:
        print(f"asframe: error: {exc}", file=sys.stderr)
        return 2
    text = _csv(out, args.command) if args.format == "csv" else report.dumps(out)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
