"""Command-line front end: ``htk check|saturate|prove|truth|encode|diag``.

Exit codes: 0 success, 1 rejected script / unmet expectation / nothing
found, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import BUNDLED_SCRIPTS, BUNDLED_UNIVERSES
from .diagonal import DiagonalError, Template, diagonalize, load_defenv
from .formula import DecodeError, DefEnv, ParseError, UnboundNameError, decode, encode, parse_formula, print_formula
from .kernel import HT, check_script
from .scriptfile import format_script, load_config, load_script, parse_bool
from .search import SearchBounds, build_universe, saturate, script_for
from .truth import UniverseError, load_universe, truth_report

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def resolve(path: str, bundled: Path) -> Path:
    """Find ``path`` as given, else by file name under $HT_EXAMPLES_DIR or the bundled data."""
    p = Path(path)
    if p.exists():
        return p
    dirs = []
    if os.environ.get("HT_EXAMPLES_DIR"):
        dirs.append(Path(os.environ["HT_EXAMPLES_DIR"]))
    dirs.append(bundled)
    for d in dirs:
        if (d / p.name).exists():
            return d / p.name
    raise UsageError(f"{path}: no such file")


def _bool(text):
    try:
        return parse_bool(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("logic configuration (overrides the script header)")
    g.add_argument("--config", metavar="FILE", help="config file with a 'config ...' line")
    for flag in ("ex_falso", "excluded_middle", "reflection", "prov_axioms"):
        g.add_argument(f"--{flag.replace('_', '-')}", f"--{flag}", dest=flag, type=_bool,
                       metavar="BOOL", default=None)


def _bounds_flags(p: argparse.ArgumentParser) -> None:
    d = SearchBounds()
    g = p.add_argument_group("search bounds")
    g.add_argument("--quote-depth", type=int, default=d.quote_depth)
    g.add_argument("--size", type=int, default=d.formula_size, help="max formula node count")
    g.add_argument("--iterations", type=int, default=d.iterations)
    g.add_argument("--hyp-levels", type=int, default=d.hyp_levels)


def _overrides(args) -> dict:
    return {f: getattr(args, f) for f in ("ex_falso", "excluded_middle", "reflection", "prov_axioms")}


def _config(args, base):
    if args.config:
        base = load_config(resolve(args.config, BUNDLED_SCRIPTS))
    return base.replace(**_overrides(args))


def _bounds(args) -> SearchBounds:
    try:
        return SearchBounds(args.quote_depth, args.size, args.iterations, args.hyp_levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit a JSON report")
    common.add_argument("--trace", action="store_true", default=argparse.SUPPRESS,
                        help="print per-step detail")

    parser = argparse.ArgumentParser(prog="htk", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check proof scripts")
    p.add_argument("scripts", nargs="+", metavar="SCRIPT")
    _config_flags(p)

    p = sub.add_parser("saturate", parents=[common], help="bounded forward saturation")
    p.add_argument("defenv", metavar="DEFENV")
    p.add_argument("--seed", action="append", default=[], metavar="FORMULA")
    p.add_argument("--query", action="append", default=[], metavar="FORMULA")
    p.add_argument("--expect", action="append", default=[], choices=["present", "absent"],
                   help="expected membership of the query in the same position")
    _bounds_flags(p)
    _config_flags(p)

    p = sub.add_parser("prove", parents=[common], help="search for a proof of GOAL")
    p.add_argument("defenv", metavar="DEFENV")
    p.add_argument("goal", metavar="GOAL")
    p.add_argument("--seed", action="append", default=[], metavar="FORMULA")
    _bounds_flags(p)
    _config_flags(p)

    p = sub.add_parser("truth", parents=[common], help="evaluate a sentence universe")
    p.add_argument("universe", metavar="UNIVERSE")
    p.add_argument("--mode", choices=["kripke", "tarski"], default="kripke")

    p = sub.add_parser("encode", parents=[common], help="Goedel code of a formula")
    p.add_argument("formula", nargs="?", metavar="FORMULA")
    p.add_argument("--env", metavar="DEFENV")
    p.add_argument("--decode", type=int, metavar="CODE")

    p = sub.add_parser("diag", parents=[common], help="fixed-point definition from a template")
    p.add_argument("name", metavar="NAME")
    p.add_argument("template", metavar="TEMPLATE", help="formula with @ marking the self-reference")
    p.add_argument("--env", metavar="DEFENV")
    return parser


# ------------------------------------------------------------------ commands

def cmd_check(args, out):
    def run(path):
        sf = load_script(resolve(path, BUNDLED_SCRIPTS))
        script = sf.script.with_config(_config(args, sf.script.config))
        return path, script, check_script(script)

    paths = args.scripts
    loaded = [run(paths[0])] if len(paths) == 1 else list(ThreadPoolExecutor().map(run, paths))
    outcome = []
    for path, script, result in loaded:
        entry = {"path": path, "config": script.config.to_dict(), **result.to_dict()}
        outcome.append(entry)
        if args.json:
            continue
        if args.trace:
            for index, rule, seq in result.sequents:
                out.write(f"  {index:>3}. {rule:<7} {seq}\n")
        if result.ok:
            out.write(f"{path}: OK  {result.goal}\n")
        else:
            e = result.error
            out.write(f"{path}: Rejected at step {e.step}: {e.kind}: {e.message}\n")
            if e.expected is not None:
                out.write(f"  expected: {e.expected}\n  actual:   {e.actual}\n")
    code = OK if all(r.ok for _, _, r in loaded) else FAIL
    return {"command": "check", "inputs": {"scripts": paths}, "outcome": outcome}, code


def _formulas(texts, env):
    return [parse_formula(t, env) for t in texts]


def cmd_saturate(args, out):
    if args.expect and len(args.expect) != len(args.query):
        raise UsageError("give one --expect per --query")
    env = load_defenv(resolve(args.defenv, BUNDLED_SCRIPTS))
    config = _config(args, HT)
    bounds = _bounds(args)
    seeds = _formulas(args.seed, env)
    queries = _formulas(args.query, env)
    universe = build_universe(seeds + queries, env, bounds)
    result = saturate(universe, config, env, bounds, witnesses=False)

    outcome = result.to_dict(queries)
    outcome["universe_size"] = len(universe)
    code = OK
    for q, want in zip(queries, args.expect):
        if (q in result.derived) != (want == "present"):
            code = FAIL
    if not args.json:
        state = "saturated" if result.saturated else "iteration bound reached"
        out.write(f"{state} after {result.rounds_used} rounds; "
                  f"{len(result.derived)} theorems in a universe of {len(universe)}\n")
        if args.trace:
            for f in result.sorted_derived():
                out.write(f"  |- {f}\n")
        for i, q in enumerate(queries):
            found = q in result.derived
            status = "derived" if found else "not derivable within bounds"
            mark = ""
            if i < len(args.expect):
                mark = "  [as expected]" if found == (args.expect[i] == "present") else "  [UNEXPECTED]"
            out.write(f"{q}: {status}{mark}\n")
    inputs = {"defenv": args.defenv, "config": config.to_dict(), "seeds": args.seed,
              "queries": args.query, "expect": args.expect,
              "bounds": {"quote_depth": bounds.quote_depth, "formula_size": bounds.formula_size,
                         "iterations": bounds.iterations, "hyp_levels": bounds.hyp_levels}}
    return {"command": "saturate", "inputs": inputs, "outcome": outcome}, code


def cmd_prove(args, out):
    env_path = resolve(args.defenv, BUNDLED_SCRIPTS)
    env = load_defenv(env_path)
    config = _config(args, HT)
    bounds = _bounds(args)
    goal = parse_formula(args.goal, env)
    universe = build_universe(_formulas(args.seed, env) + [goal], env, bounds)
    result = saturate(universe, config, env, bounds, witnesses=False)
    script = script_for(result, goal)
    outcome = {"goal": str(goal), "found": script is not None, "script": None}
    if script is None:
        if not args.json:
            out.write(f"{goal}: not derivable within bounds\n")
        code = FAIL
    else:
        check = check_script(script)
        assert check.ok, check.error
        text = format_script(script, use=env_path.name)
        outcome["script"] = text
        if not args.json:
            out.write(text)
        code = OK
    inputs = {"defenv": args.defenv, "config": config.to_dict(), "goal": args.goal}
    return {"command": "prove", "inputs": inputs, "outcome": outcome}, code


def cmd_truth(args, out):
    u = load_universe(resolve(args.universe, BUNDLED_UNIVERSES))
    report = truth_report(u, args.mode)
    if not args.json:
        for name, r in report.items():
            if args.mode == "kripke":
                how = f"grounded at stage {r['stage']}" if r["grounded"] else "ungrounded"
            else:
                lvl = r["tarski_level"]
                how = f"level {lvl}" if lvl is not None else "no level"
            out.write(f"{name}: {r['value']}  ({how})\n")
    return {"command": "truth", "inputs": {"universe": args.universe, "mode": args.mode},
            "outcome": report}, OK


def cmd_encode(args, out):
    env = load_defenv(resolve(args.env, BUNDLED_SCRIPTS)) if args.env else DefEnv()
    if args.decode is not None:
        f = decode(args.decode)
        outcome = {"code": str(args.decode), "formula": print_formula(f)}
    elif args.formula is not None:
        f = parse_formula(args.formula, env)
        outcome = {"code": str(encode(f)), "formula": print_formula(f)}
    else:
        raise UsageError("give a FORMULA or --decode CODE")
    if not args.json:
        out.write(f"{outcome['formula']}\t{outcome['code']}\n")
    return {"command": "encode", "inputs": {"formula": args.formula, "decode": args.decode},
            "outcome": outcome}, OK


def cmd_diag(args, out):
    env = load_defenv(resolve(args.env, BUNDLED_SCRIPTS)) if args.env else DefEnv()
    body = parse_formula(args.template, set(env) | {args.name}, holes=True)
    env2 = diagonalize(args.name, Template(body), env)
    line = f"def {args.name} := {print_formula(env2[args.name])}"
    if not args.json:
        out.write(line + "\n")
    return {"command": "diag", "inputs": {"name": args.name, "template": args.template},
            "outcome": {"name": args.name, "body": print_formula(env2[args.name])}}, OK


COMMANDS = {
    "check": cmd_check,
    "saturate": cmd_saturate,
    "prove": cmd_prove,
    "truth": cmd_truth,
    "encode": cmd_encode,
    "diag": cmd_diag,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    # the global flags are accepted before or after the subcommand
    for flag in ("json", "trace"):
        if not hasattr(args, flag):
            setattr(args, flag, False)
    try:
        report, code = COMMANDS[args.command](args, out)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return USAGE
    except (UsageError, UniverseError, UnboundNameError, DiagonalError, DecodeError,
            OSError) as exc:
        err.write(f"error: {exc}\n")
        return USAGE
    if args.json:
        report["exit_code"] = code
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
