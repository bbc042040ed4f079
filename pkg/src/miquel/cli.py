"""Command-line front end.

Exit codes: 0 success, 1 I/O, 2 invalid input, 3 degenerate mathematics,
4 solver or quadrature failure (including a failed verification).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import files
from .errors import InvalidInput, MiquelError, NotNondegenerate, SolverError
from .geometry import DEFAULT_TOL
from .measure import orbit_measure_report
from .orbit import run_orbit
from .pattern import Color, classify, from_hyperbola, from_trapezoid, mutate, mutate_renormalized, random_generic, random_trapezoidal
from .quartic import quartic_of_pattern
from .render import LAYERS, RenderOptions, render_svg
from .verify import verify_pattern


class VerificationFailed(SolverError):
    pass


def _default_tol() -> float:
    raw = os.environ.get("MIQUEL_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InvalidInput(f"MIQUEL_TOL is not a number: {raw!r}") from None
    if not tol > 0.0:
        raise InvalidInput("MIQUEL_TOL must be positive")
    return tol


def _numbers(text: str, count: int, what: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",")]
    except ValueError:
        raise InvalidInput(f"{what} must be comma-separated numbers") from None
    if len(values) != count:
        raise InvalidInput(f"{what} needs {count} values, got {len(values)}")
    return values


def _emit(args, text: str) -> None:
    """Write the primary product to --output, or to stdout."""
    if args.output:
        files.write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _say(args, summary: dict, human: str) -> None:
    """Secondary summary: only when the product went to a file, or --json forces it."""
    if args.json:
        if args.output:
            sys.stdout.write(files.dumps(summary))
    elif args.output:
        print(human)


def _steps(args, default: int | None = None) -> int:
    steps = args.steps if args.steps is not None else default
    if steps is None or steps <= 0:
        raise InvalidInput("steps must be positive")
    return steps


def _input(args):
    if not args.input:
        raise InvalidInput("--input is required")
    return files.read_pattern(args.input, args.tol)


def _pattern_summary(S) -> dict:
    out = {"class": classify(S, DEFAULT_TOL).value}
    try:
        out["quartic"] = files.quartic_to_dict(quartic_of_pattern(S))
    except MiquelError as exc:
        out["quartic_error"] = {"error": type(exc).__name__, "message": str(exc)}
    return out


# -- commands --------------------------------------------------------------------------


def cmd_generate(args) -> int:
    chosen = [x for x in (args.abscissas, args.trapezoid, args.random or None) if x]
    if len(chosen) != 1:
        raise InvalidInput("give exactly one of --abscissas, --trapezoid, --random")
    if args.abscissas:
        S = from_hyperbola(_numbers(args.abscissas, 5, "--abscissas"))
    elif args.trapezoid:
        S = from_trapezoid(*_numbers(args.trapezoid, 5, "--trapezoid"), vertical=args.vertical)
    else:
        rng = np.random.default_rng(args.seed)
        if args.kind == "generic":
            S = random_generic(rng)
        else:
            S = random_trapezoidal(rng, vertical=args.vertical)
    _emit(args, files.dumps(files.pattern_to_dict(S)))
    summary = _pattern_summary(S)
    q = summary.get("quartic")
    human = f"class: {summary['class']}" + (f"\nquartic: a={q['a']!r} b={q['b']!r} c={q['c']!r}" if q else "")
    _say(args, summary, human)
    return 0


def cmd_mutate(args) -> int:
    S = _input(args)
    color = Color.WHITE if args.color == "white" else Color.BLACK
    T = mutate(S, color, args.tol) if args.raw else mutate_renormalized(S, color, args.tol)
    _emit(args, files.dumps(files.pattern_to_dict(T)))
    _say(args, {"color": args.color, "renormalized": not args.raw}, f"{args.color} mutation written")
    return 0


def cmd_orbit(args) -> int:
    steps = _steps(args)
    S = _input(args)
    record = run_orbit(S, steps, args.tol)
    _emit(args, files.dumps(record.to_dict()))
    s = record.summary
    human = (
        f"steps: {s['steps_completed']}\n"
        f"max conserved drift: {s['max_conserved_drift']:.3e}\n"
        f"max coefficient drift: {s['max_coefficient_drift']:.3e}\n"
        f"max prediction error: {s['max_prediction_error']}"
    )
    _say(args, {"summary": s, "error": record.error}, human)
    if record.error is not None:
        raise _RECORDED.get(record.error["error"], SolverError)(record.error["message"])
    return 0


def cmd_quartic(args) -> int:
    S = _input(args)
    _emit(args, files.dumps(files.quartic_to_dict(quartic_of_pattern(S, args.tol))))
    return 0


def cmd_verify(args) -> int:
    S = _input(args)
    report = verify_pattern(S, np.random.default_rng(args.seed), trials=args.trials, tol=args.tol)
    _emit(args, files.dumps(report))
    if not report["passed"]:
        raise VerificationFailed("a residual exceeds its threshold")
    return 0


def cmd_measure(args) -> int:
    S = _input(args)
    steps = _steps(args, default=10)
    report = orbit_measure_report(S, steps, reverse=args.reverse)
    entries = [{k: e[k] for k in ("from_step", "to_step", "branch", "measure")} for e in report]
    _emit(args, files.dumps(entries))
    return 0


def cmd_render(args) -> int:
    if not args.input:
        raise InvalidInput("--input is required")
    S, orbit = files.read_pattern_or_orbit(args.input, args.tol)
    if not orbit and args.steps is not None:
        orbit = run_orbit(S, _steps(args), args.tol).patterns
    layers = tuple(t for t in args.layers.split(",") if t) if args.layers else LAYERS
    unknown = set(layers) - set(LAYERS)
    if unknown:
        raise InvalidInput(f"unknown layers: {', '.join(sorted(unknown))}")
    if args.size <= 0 or args.stroke_width <= 0:
        raise InvalidInput("size and stroke width must be positive")
    opts = RenderOptions(size=args.size, stroke=args.stroke_width, layers=layers)
    _emit(args, render_svg(S, orbit, opts))
    return 0


def _recorded_errors() -> dict:
    from . import errors

    return {name: cls for name, cls in vars(errors).items() if isinstance(cls, type) and issubclass(cls, MiquelError)}


_RECORDED = _recorded_errors()


# -- argument parsing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="input pattern file (JSON)")
    common.add_argument("-o", "--output", help="output file; stdout when omitted")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="geometric tolerance (default 1e-9 or $MIQUEL_TOL)")
    common.add_argument("--steps", type=int, default=None, help="orbit length")
    common.add_argument("--json", action="store_true", help="machine-readable stdout")

    parser = argparse.ArgumentParser(prog="miquel", description="Miquel dynamics on (2,2)-biperiodic circle patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="build a pattern")
    p.add_argument("--abscissas", help="b,d,e,f,h on the hyperbola xy = 1")
    p.add_argument("--trapezoid", help="dx,ex,fx,by,hy for D, E, F on y = 0 and B, H on x = 0")
    p.add_argument("--random", action="store_true", help="random pattern from --seed")
    p.add_argument("--kind", choices=("generic", "trapezoidal"), default="generic")
    p.add_argument("--vertical", action="store_true", help="vertical trapezoidal pattern")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mutate", parents=[common], help="apply one mutation")
    p.add_argument("--color", choices=("white", "black"), default="white")
    p.add_argument("--raw", action="store_true", help="skip the renormalizing translation")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("orbit", parents=[common], help="iterate white-then-black steps")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("quartic", parents=[common], help="report the invariant quartic")
    p.set_defaults(func=cmd_quartic)

    p = sub.add_parser("verify", parents=[common], help="cross-check dynamics against the group law")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("measure", parents=[common], help="invariant measure of orbit steps")
    p.add_argument("--reverse", action="store_true", help="black-then-white steps")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("render", parents=[common], help="draw a pattern or orbit as SVG")
    p.add_argument("--size", type=int, default=800, help="longest side in pixels")
    p.add_argument("--stroke-width", type=float, default=1.0)
    p.add_argument("--layers", help=f"comma-separated subset of {','.join(LAYERS)}")
    p.set_defaults(func=cmd_render)
    return parser


def _report_error(args_json: bool, exc: MiquelError) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    if isinstance(exc, NotNondegenerate) and exc.details:
        payload["details"] = exc.details
    text = json.dumps(payload)
    print(text, file=sys.stderr)
    if args_json:
        print(text)
    return exc.exit_code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.tol is None:
            args.tol = _default_tol()
        elif not args.tol > 0.0:
            raise InvalidInput("--tol must be positive")
        return args.func(args)
    except MiquelError as exc:
        return _report_error(args.json, exc)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
