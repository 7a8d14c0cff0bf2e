"""Command-line front end.

    odometer padic add int:-1 int:1 --p 2 --precision 4
    odometer orbit -1 000 --p 2
    odometer phi int:-1 --p 2 --depth 4 --output dot
    odometer a-power 11 --p 3 --depth 3 --output json
    odometer recognize portrait.json
    odometer verify all --p 2 --depth 10 --cases 500 --seed 7

Exit codes: 0 success (including a "not in closure" verdict), 1 a
verification suite failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import machine, padic, portrait, verify
from .tree import format_word, parse_word

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_VERIFY_DEPTH = 8
DEFAULT_CASES = 100


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    p: int
    depth: int | None
    allow_composite: bool
    output: str
    seed: int
    cases: int

    def __post_init__(self) -> None:
        if self.depth is not None and self.depth < 1:
            raise UsageError("--precision/--depth must be >= 1")
        if self.cases < 1:
            raise UsageError("--cases must be >= 1")
        if self.output not in ("text", "json", "dot"):
            raise UsageError(f"unknown output format {self.output!r}")


def _seed_from_env() -> int:
    raw = os.environ.get("ODOMETER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ODOMETER_SEED={raw!r} is not an integer") from None


def config_from_args(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        p=args.p,
        depth=args.depth,
        allow_composite=args.allow_composite,
        output=args.output,
        seed=args.seed if args.seed is not None else _seed_from_env(),
        cases=args.cases,
    )


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _no_dot(cfg: CliConfig, what: str) -> None:
    if cfg.output == "dot":
        raise UsageError(f"{what} has no DOT rendering")


def _render_portrait(g: portrait.Portrait, cfg: CliConfig) -> str:
    if cfg.output == "json":
        return _dump(portrait.portrait_to_json(g))
    if cfg.output == "dot":
        return portrait.portrait_to_dot(g)
    return portrait.portrait_to_text(g)


def _render_padic(a: padic.PAdicApprox, cfg: CliConfig) -> str:
    if cfg.output == "json":
        return _dump(padic.padic_to_json(a))
    return padic.format_digits(a) + "\n"


def _operand(text: str, cfg: CliConfig) -> padic.PAdicApprox:
    return padic.parse_padic(text, cfg.p, cfg.depth, cfg.allow_composite)


# -- subcommands -------------------------------------------------------------------


def cmd_padic(args: argparse.Namespace, cfg: CliConfig) -> str:
    _no_dot(cfg, "p-adic output")
    arity = 1 if args.op in ("neg", "order") else 2
    if len(args.operands) != arity:
        raise UsageError(f"padic {args.op} takes {arity} operand(s)")
    xs = [_operand(t, cfg) for t in args.operands]
    if args.op == "add":
        return _render_padic(padic.padic_add(*xs), cfg)
    if args.op == "sub":
        return _render_padic(padic.padic_sub(*xs), cfg)
    if args.op == "neg":
        return _render_padic(padic.padic_neg(xs[0]), cfg)
    if args.op == "order":
        k = padic.padic_order(xs[0])
        if cfg.output == "json":
            return _dump({"p": cfg.p, "order": None if k is padic.BEYOND_PRECISION else k})
        return f"{k.value if k is padic.BEYOND_PRECISION else k}\n"
    d = padic.padic_distance(*xs)
    if cfg.output == "json":
        return _dump({"p": cfg.p, "distance": padic.dist_to_json(d)})
    return f"{d}\n"


def cmd_orbit(args: argparse.Namespace, cfg: CliConfig) -> str:
    _no_dot(cfg, "orbit output")
    w = parse_word(args.word, cfg.p)
    padic.check_base(cfg.p, cfg.allow_composite)
    image = machine.adding_apply(args.n, w)
    if cfg.output == "json":
        return _dump({"p": cfg.p, "n": args.n, "word": format_word(w), "image": format_word(image)})
    return format_word(image) + "\n"


def cmd_phi(args: argparse.Namespace, cfg: CliConfig) -> str:
    alpha = _operand(args.alpha, cfg)
    return _render_portrait(machine.phi(alpha).portrait, cfg)


def cmd_a_power(args: argparse.Namespace, cfg: CliConfig) -> str:
    if cfg.depth is None:
        raise UsageError("a-power needs --depth")
    g = machine.a_power_portrait(args.n, cfg.p, cfg.depth, cfg.allow_composite)
    return _render_portrait(g, cfg)


def cmd_recognize(args: argparse.Namespace, cfg: CliConfig) -> str:
    _no_dot(cfg, "recognition output")
    if args.path == "-":
        raw = sys.stdin.read()
    else:
        with open(args.path, encoding="utf-8") as fh:
            raw = fh.read()
    g = portrait.portrait_from_json(raw, cfg.allow_composite)
    if g.depth < 1:
        raise UsageError("recognition needs a portrait of depth >= 1")
    result = machine.recognize(g)
    if result is machine.NOT_IN_CLOSURE:
        if cfg.output == "json":
            return _dump({"in_closure": False, "p": g.p, "depth": g.depth})
        return "not in closure\n"
    if cfg.output == "json":
        return _dump({"in_closure": True, **padic.padic_to_json(result)})
    return padic.format_digits(result) + "\n"


def cmd_verify(args: argparse.Namespace, cfg: CliConfig) -> tuple[str, int]:
    _no_dot(cfg, "verification report")
    padic.check_base(cfg.p, cfg.allow_composite)
    depth = cfg.depth if cfg.depth is not None else DEFAULT_VERIFY_DEPTH
    results = verify.run_suites(args.suites, cfg.p, depth, cfg.cases, cfg.seed)
    code = EXIT_OK if all(r.ok for r in results) else EXIT_SUITE_FAILURE
    if cfg.output == "json":
        return _dump(verify.report_json(results, cfg.p, depth, cfg.cases, cfg.seed)), code
    return verify.report_text(results), code


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="alphabet size / p-adic base (default 2)")
    common.add_argument("--precision", "--depth", dest="depth", type=int, default=None,
                        help="digits of precision, equivalently tree depth")
    common.add_argument("--allow-composite", action="store_true",
                        help="accept a composite base")
    common.add_argument("--output", choices=("text", "json", "dot"), default="text")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized suites (fallback: $ODOMETER_SEED, then 0)")
    common.add_argument("--cases", type=int, default=DEFAULT_CASES,
                        help="random cases per suite")

    parser = argparse.ArgumentParser(
        prog="odometer",
        description="p-adic integers and the adding machine on the p-ary rooted tree",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("padic", parents=[common], help="truncated p-adic arithmetic")
    sp.add_argument("op", choices=("add", "neg", "sub", "dist", "order"))
    sp.add_argument("operands", nargs="+", help="int:<n> or d0,d1,... [(base p)]")
    sp.set_defaults(func=cmd_padic)

    sp = sub.add_parser("orbit", parents=[common], help="apply a^n to a word")
    sp.add_argument("n", type=int)
    sp.add_argument("word")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("phi", parents=[common], help="portrait of phi(alpha)")
    sp.add_argument("alpha", help="int:<n> or d0,d1,...")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("a-power", parents=[common], help="portrait of a^n")
    sp.add_argument("n", type=int)
    sp.set_defaults(func=cmd_a_power)

    sp = sub.add_parser("recognize", parents=[common],
                        help="decide membership of a portrait in the closure of <a>")
    sp.add_argument("path", help="portrait JSON file, or - for stdin")
    sp.set_defaults(func=cmd_recognize)

    sp = sub.add_parser("verify", parents=[common], help="run property suites")
    sp.add_argument("suites", nargs="+", choices=("all", *verify.SUITES))
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        out = args.func(args, cfg)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"odometer: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    code = EXIT_OK
    if isinstance(out, tuple):
        out, code = out
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
