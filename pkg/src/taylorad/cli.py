"""Command-line front end: check, transform, eval, jet and selftest."""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from .corpus import open_function
from .evaluator import EvalError, eval_jet_program, evaluate, type_of_json, value_from_json, value_to_json
from .jetalgebra import JetShape, seed_affine
from .macro import FULL, RESTRICTED22, MacroConfig, d_context, d_term, d_type, normalize
from .primops import RegistryError, builtin_registry, load_op_file
from .selftest import N_POINTS, SEED, run_selftest
from .syntax import ast as A
from .syntax import ParseError, parse, parse_type, pretty, pretty_type
from .typecheck import TypeCheckError, infer

EXIT_TYPE_ERROR = 1
EXIT_PARSE_ERROR = 2
EXIT_ORACLE_FAILURE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_context(spec: Optional[str]) -> dict[str, A.Type]:
    """``"x: real, y: (real * real)"`` -> {x: real, y: real * real}."""
    ctx: dict[str, A.Type] = {}
    if not spec:
        return ctx
    for item in spec.split(","):
        if not item.strip():
            continue
        name, sep, ty = item.partition(":")
        if not sep:
            raise UsageError(f"context entry {item.strip()!r} must look like 'name: type'")
        ctx[name.strip()] = parse_type(ty)
    return ctx


def parse_vector(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"not a list of numbers: {spec!r}") from None


def parse_matrix(spec: str) -> list[list[float]]:
    """Rows separated by ';', entries by ',' or spaces."""
    return [parse_vector(row) for row in spec.split(";") if row.strip()]


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def _dump(obj) -> str:
    return json.dumps(_json_safe(obj))


def _registry(args):
    reg = builtin_registry()
    for path in args.ops or ():
        reg = load_op_file(_read(path), reg)
    return reg


def _load(args):
    registry = _registry(args)
    term = parse(_read(args.file), registry)
    return registry, term


def _macro_config(args, registry) -> MacroConfig:
    if args.k < 1 or args.r < 1:
        raise UsageError("--k and --r must be at least 1")
    if args.mode == RESTRICTED22 and (args.k, args.r) != (2, 2):
        raise UsageError("--mode restricted22 needs --k 2 --r 2")
    if args.r > registry.r_max:
        raise UsageError(f"operations have derivatives up to order {registry.r_max} only")
    return MacroConfig(args.k, args.r, args.mode, registry)


# -- subcommands ------------------------------------------------------------


def cmd_check(args, out) -> int:
    registry, term = _load(args)
    ctx = parse_context(args.context)
    print(pretty_type(infer(ctx, term, registry)), file=out)
    return 0


def cmd_transform(args, out) -> int:
    registry, term = _load(args)
    ctx = parse_context(args.context)
    ty = infer(ctx, term, registry)
    cfg = _macro_config(args, registry)
    dt = d_term(cfg, term)
    if args.normalize:
        dt = normalize(dt)
    # the output must be a well-typed program of the transformed type
    assert infer(d_context(cfg, ctx), dt, registry) == d_type(cfg, ty)
    print(pretty(dt), file=out)
    return 0


def cmd_eval(args, out) -> int:
    registry, term = _load(args)
    inputs = json.loads(_read(args.inputs)) if args.inputs else {}
    if not isinstance(inputs, dict):
        raise UsageError("--inputs must hold a JSON object mapping variables to values")
    ctx = parse_context(args.context)
    env = {}
    for name, obj in inputs.items():
        try:
            env[name] = value_from_json(obj)
            if name not in ctx:
                ctx[name] = type_of_json(obj)
        except ValueError as exc:
            raise UsageError(f"input {name!r}: {exc}") from None
    infer(ctx, term, registry)
    print(_dump(value_to_json(evaluate(env, term, registry))), file=out)
    return 0


def cmd_jet(args, out) -> int:
    registry, term = _load(args)
    ty = None
    if args.vars:
        names = [v.strip() for v in args.vars.split(",") if v.strip()]
        ctx = [(x, A.REAL) for x in names]
    else:
        fvs = sorted(A.free_vars(term))
        if not fvs:
            ty = infer({}, term, registry)
        if isinstance(ty, A.Fun):
            ctx, term = open_function(term, ty.dom)
        else:
            ctx = [(x, A.REAL) for x in fvs]
    result = infer(ctx, term, registry)
    if result != A.REAL:
        raise UsageError(f"jet needs a real-valued program, got {pretty_type(result)}")
    cfg = _macro_config(args, registry)
    point = parse_vector(args.point)
    if args.directions is None:
        directions = [[float(i == c) for i in range(len(ctx))] for c in range(cfg.k)]
    else:
        directions = parse_matrix(args.directions)
    if len(point) != len(ctx):
        raise UsageError(f"--point has {len(point)} entries for {len(ctx)} variables "
                         f"({', '.join(x for x, _ in ctx)})")
    if len(directions) != cfg.k or any(len(row) != len(ctx) for row in directions):
        raise UsageError(f"--directions must be {cfg.k} row(s) of {len(ctx)} entries")
    seeds = seed_affine(point, directions, JetShape(cfg.k, cfg.r))
    jet = eval_jet_program(cfg, term, ctx, seeds)
    print(_dump(jet.to_json()), file=out)
    return 0


def cmd_selftest(args, out) -> int:
    report = run_selftest(args.seed, args.points)
    if args.report == "json":
        print(json.dumps(report.to_json(), indent=2), file=out)
    else:
        for r in report.results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.check:<24} {r.program:<16} {r.config:<7} "
                  f"max rel err {r.max_rel_err:.3g}", file=out)
        n_failed = sum(not r.passed for r in report.results)
        print(f"{len(report.results) - n_failed}/{len(report.results)} passed", file=out)
    return 0 if report.passed else EXIT_ORACLE_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="taylorad", description="Taylor-mode forward AD for a small typed language.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_file(sp):
        sp.add_argument("file", help="program source ('-' for stdin)")
        sp.add_argument("--ops", action="append", help="extra operation declarations")

    def with_macro(sp):
        sp.add_argument("--k", type=int, default=1, help="Taylor domain dimension")
        sp.add_argument("--r", type=int, default=1, help="derivative order")
        sp.add_argument("--mode", choices=(FULL, RESTRICTED22), default=FULL)

    sp = sub.add_parser("check", help="print the type of a program")
    with_file(sp)
    sp.add_argument("--context", help="free variables, e.g. 'x: real, y: real'")
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("transform", help="print the derivative program")
    with_file(sp)
    with_macro(sp)
    sp.add_argument("--context", help="free variables, e.g. 'x: real, y: real'")
    sp.add_argument("--normalize", action="store_true", help="contract beta-redexes")
    sp.set_defaults(run=cmd_transform)

    sp = sub.add_parser("eval", help="evaluate a program")
    with_file(sp)
    sp.add_argument("--inputs", help="JSON file binding free variables to values")
    sp.add_argument("--context", help="types of inputs that JSON cannot determine")
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("jet", help="evaluate the derivative program on affine seeds")
    with_file(sp)
    with_macro(sp)
    sp.add_argument("--point", required=True, help="base point, e.g. '3,5'")
    sp.add_argument("--directions", help="k rows separated by ';' (default: unit axes)")
    sp.add_argument("--vars", help="variable order (default: sorted free variables)")
    sp.set_defaults(run=cmd_jet)

    sp = sub.add_parser("selftest", help="run the oracle corpus")
    sp.add_argument("--report", choices=("text", "json"), default="text")
    sp.add_argument("--seed", type=int, default=SEED)
    sp.add_argument("--points", type=int, default=N_POINTS)
    sp.set_defaults(run=cmd_selftest)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except TypeCheckError as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return EXIT_TYPE_ERROR
    except (UsageError, RegistryError, json.JSONDecodeError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
