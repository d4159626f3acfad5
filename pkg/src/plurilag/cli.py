"""Command-line entry point: run suites, propagate fields, evaluate actions."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import PluriLagError, SingularDataError
from .forms import CubeFields, ZeroForm, action, cube_action, fields_from_dict, fields_to_dict
from .lattice import flip, flip_sign, flippable_cubes, surface_from_dict
from .models import LAGRANGIAN_MODELS, MODEL_NAMES, get_model
from .solve import propagate_box
from .verify import DEFAULT_TOL, SUITES, SuiteReport, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

DEFAULT_ALPHA = (1.0, 2.0, 3.0)
DEFAULT_TRIALS = {"flip": 1}


class UsageError(Exception):
    """Bad command-line input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument parsing -------------------------------------------------------------------

def _floats(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _box(text: str) -> tuple:
    try:
        box = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three integers like 3,3,3, got {text!r}") from None
    if len(box) != 3 or min(box) < 1:
        raise argparse.ArgumentTypeError("box needs three positive integers")
    return box


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _tol(text: str):
    """``1e-9`` (every check) or ``corner=1e-9,rank=0``."""
    try:
        if "=" not in text:
            return float(text)
        out = {}
        for part in text.split(","):
            key, value = part.split("=")
            out[key.strip()] = float(value)
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed tolerance {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plurilag", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--model", default="q1d0", help=f"one of {', '.join(MODEL_NAMES)}")
    common.add_argument("--alpha", type=_floats, help="lattice parameters, e.g. 1,2,3")
    common.add_argument("--gamma", type=float, help="deformation parameter of exp-gamma")
    common.add_argument("--delta", type=float, help="parameter of h3")
    common.add_argument("--seed", type=_seed, help="base seed (default: $PLURILAG_SEED or 0)")
    common.add_argument("--tol", type=_tol, help="tolerance override: a number or check=value pairs")
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--out", help="write the report here instead of stdout")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--trials", type=_positive)
    v.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    v.add_argument("--box", type=_box, default=(3, 3, 3), help="box for the flip suite")
    v.add_argument("--flips", type=_positive, default=10, help="flips per trial (flip suite)")
    v.add_argument("--form", choices=("model", "zero", "perturbed"), default="model",
                   help="2-form under test (flip, flower, closedness)")
    v.add_argument("--perturb", type=float, default=1e-3, help="size of the perturbation of Lam")
    v.add_argument("--gammas", type=_floats, default=(1e-2, 1e-3, 1e-4), help="gamma suite values")
    v.add_argument("--no-runtime", action="store_true", help="omit runtime_ms from JSON")

    p = sub.add_parser("propagate", parents=[common], help="fill a box from axis data")
    p.add_argument("--box", type=_box, default=(1, 1, 1))
    p.add_argument("--data", help="JSON file with axis values {fields: [{vertex, value}]}")

    a = sub.add_parser("action", parents=[common], help="action of a surface, optionally under flips")
    a.add_argument("--surface", required=True, help="JSON surface file")
    a.add_argument("--fields", required=True, help="JSON field file")
    a.add_argument("--form", choices=("model", "zero"), default="model")
    a.add_argument("--flip", action="store_true", help="apply random flips and report each change")
    a.add_argument("--flips", type=_positive, default=10, help="number of flips with --flip")
    return parser


# -- helpers -----------------------------------------------------------------------------

def _resolve_seed(seed) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("PLURILAG_SEED")
    if env is None:
        return 0
    try:
        return _seed(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"PLURILAG_SEED: {exc}") from None


def _model_params(args) -> dict:
    return {k: v for k, v in (("gamma", args.gamma), ("delta", args.delta)) if v is not None}


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _fmt(v) -> str:
    return f"{v:.3e}" if isinstance(v, float) else str(v)


# -- verify ------------------------------------------------------------------------------

def format_report(report: SuiteReport, fmt: str, runtime: bool = True) -> str:
    if fmt == "json":
        return report.to_json(runtime)
    if fmt == "csv":
        keys = sorted({k for row in report.rows for k in row if k not in ("trial", "failed")})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", *keys, "failed"])
        for row in report.rows:
            w.writerow([row["trial"], *(repr(row.get(k, "")) for k in keys), int(row["failed"])])
        return buf.getvalue()
    lines = [
        f"suite {report.suite}  model {report.model}  trials {report.trials}  seed {report.seed}",
        f"{'check':<20} {'max':>12} {'tol':>12}  status",
    ]
    for key in sorted(report.max_residuals):
        value = report.max_residuals[key]
        tol = report.tolerances.get(key)
        status = "-" if tol is None else ("ok" if value <= tol else "FAIL")
        lines.append(f"{key:<20} {value:>12.3e} {_fmt(tol) if tol is not None else '-':>12}  {status}")
    lines.append(f"failures {len(report.failures)}  resamples {report.resamples}  runtime {report.runtime_ms:.0f} ms")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    seed = _resolve_seed(args.seed)
    trials = args.trials or DEFAULT_TRIALS.get(args.suite, 100)
    tol = args.tol
    if isinstance(tol, float):
        tol = {}
        scalar = args.tol
    else:
        scalar = None
    options = {}
    if args.suite == "flip":
        options.update(box=args.box, flips=args.flips, form=args.form)
        if args.form == "perturbed":
            options["perturb"] = args.perturb
    elif args.suite == "flower" and args.form != "model":
        if args.form != "zero":
            raise UsageError("the flower suite supports --form model or zero")
        options["form"] = "zero"
    elif args.suite == "closedness" and args.form != "model":
        if args.form != "perturbed":
            raise UsageError("the closedness suite supports --form model or perturbed")
        options["perturb"] = args.perturb
    elif args.suite == "gamma":
        options["gammas"] = args.gammas
    model = args.model if args.suite != "gamma" else "exp-gamma"
    if scalar is not None:
        tol = {k: scalar for k in DEFAULT_TOL[args.suite]}
    report = run_suite(args.suite, model, trials, seed, alpha=args.alpha, params=_model_params(args),
                       tol=tol, jobs=args.jobs, **options)
    _emit(format_report(report, args.format, runtime=not args.no_runtime), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


# -- propagate ---------------------------------------------------------------------------

def _axis_points(box):
    pts = []
    for d in range(3):
        for t in range(box[d] + 1):
            v = [0, 0, 0]
            v[d] = t
            if tuple(v) not in pts:
                pts.append(tuple(v))
    return pts


def cmd_propagate(args) -> int:
    model = get_model(args.model, **_model_params(args))
    if not model.has_quad:
        raise UsageError(f"model {args.model} has no quad-equation layer")
    alpha = tuple(args.alpha) if args.alpha else DEFAULT_ALPHA
    if len(alpha) != 3:
        raise UsageError("propagate needs three alpha values")
    box = args.box
    if args.data:
        doc = _read_json(args.data)
        try:
            axes = fields_from_dict(doc)
        except PluriLagError as exc:
            raise UsageError(f"{args.data}: {exc}") from None
        if isinstance(doc, dict) and "alpha" in doc and args.alpha is None:
            alpha = tuple(float(a) for a in doc["alpha"])
    else:
        rng = np.random.default_rng(np.random.SeedSequence([_resolve_seed(args.seed)]))
        lo, hi = model.field_box
        axes = {v: float(rng.uniform(lo, hi)) for v in _axis_points(box)}
    tol = args.tol if isinstance(args.tol, float) else (args.tol or {}).get("spread", 1e-10)
    try:
        f, spread = propagate_box(model, box, axes, alpha)
    except SingularDataError as exc:
        print(f"singular propagation {exc}", file=sys.stderr)
        return EXIT_FAILED
    ok = spread <= tol
    if args.format == "json":
        doc = {"model": model.name, "params": model.params, "alpha": list(alpha), "box": list(box),
               "max_rel_spread": spread, "tolerance": tol, "passed": ok, **fields_to_dict(f)}
        text = json.dumps(doc, indent=2, sort_keys=True)
    elif args.format == "csv":
        text = "p,q,r,value\n" + "".join(f"{p},{q},{r},{v!r}\n" for (p, q, r), v in sorted(f.items()))
    else:
        text = "\n".join([
            f"model {model.name}  box {'x'.join(map(str, box))}  alpha {','.join(map(str, alpha))}",
            f"vertices {len(f)}  max relative spread {spread:.3e}  tol {tol:g}",
            "PASS" if ok else "FAIL",
        ])
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAILED


# -- action ------------------------------------------------------------------------------

def cmd_action(args) -> int:
    try:
        surface = surface_from_dict(_read_json(args.surface))
    except PluriLagError as exc:
        raise UsageError(f"{args.surface}: {exc}") from None
    try:
        f = fields_from_dict(_read_json(args.fields))
    except PluriLagError as exc:
        raise UsageError(f"{args.fields}: {exc}") from None
    alpha = tuple(args.alpha) if args.alpha else DEFAULT_ALPHA[: max(surface.m, 1)]
    if len(alpha) < surface.m:
        raise UsageError(f"surface lives in Z^{surface.m}; give {surface.m} alpha values")
    if args.form == "zero":
        form = ZeroForm(alpha)
    else:
        if args.model not in LAGRANGIAN_MODELS:
            raise UsageError(f"model {args.model} has no Lagrangian 2-form; choose from {', '.join(LAGRANGIAN_MODELS)}")
        form = get_model(args.model, **_model_params(args)).form(alpha)
    s = action(surface, f, form)
    changes = []
    if args.flip:
        rng = np.random.default_rng(np.random.SeedSequence([_resolve_seed(args.seed)]))
        bounds = tuple(max(v[d] for v in f) for d in range(surface.m))
        current, s_old = surface, s
        for _ in range(args.flips):
            cubes = [c for c in flippable_cubes(current, bounds) if all(v in f for v in c.vertices().values())]
            if not cubes:
                print("no flippable cube with complete field data; stopping", file=sys.stderr)
                break
            c = cubes[rng.integers(len(cubes))]
            sign = flip_sign(current, c)
            current = flip(current, c)
            s_new = action(current, f, form)
            changes.append({"cube": {"base": list(c.base), "dirs": list(c.dirs)}, "sign": sign,
                            "delta": s_new - s_old, "cube_action": cube_action(CubeFields.from_map(c, f), c.dirs, form)})
            s_old = s_new
    tol = args.tol if isinstance(args.tol, float) else (args.tol or {}).get("action_change", 1e-8)
    ok = all(abs(ch["delta"]) <= tol for ch in changes) if args.form == "model" else True
    if args.format == "json":
        text = json.dumps({"action": s, "alpha": list(alpha), "flips": changes, "passed": ok}, indent=2, sort_keys=True)
    elif args.format == "csv":
        text = "step,delta,cube_action\n" + "".join(
            f"{n},{ch['delta']!r},{ch['cube_action']!r}\n" for n, ch in enumerate(changes, 1))
    else:
        lines = [f"action {s:.12g}"]
        lines += [f"flip {n}: cube {tuple(ch['cube']['base'])} dirs {tuple(ch['cube']['dirs'])}  "
                  f"delta {ch['delta']:.3e}" for n, ch in enumerate(changes, 1)]
        text = "\n".join(lines)
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {"verify": cmd_verify, "propagate": cmd_propagate, "action": cmd_action}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, PluriLagError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"plurilag {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
