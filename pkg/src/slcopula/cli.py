"""Command-line front end.

Every subcommand reads its JSON input from ``--spec`` (inline, or ``@path``)
and writes a JSON report or a CSV grid to ``--out`` (default stdout).
Exit codes: 0 success, 2 validation/spec failure (report still written),
1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import asymmetry, association, choquet, diagonal, extremity, semilinear
from .errors import PreconditionError, SemilinearError, SpecError
from .numerics import GridMap, Tolerance, format_number

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2

SUBCOMMANDS = ("validate", "classify", "eval", "grid", "volume-check", "measures",
               "asymmetry", "mix", "recover", "sample")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--spec", "-s", required=True,
                        help="input JSON, inline or @file")
    common.add_argument("--out", "-o", default="-", help="output path (default stdout)")
    common.add_argument("--n", type=int, default=200, help="grid resolution")
    common.add_argument("--tol-measure", type=float, default=1e-3,
                        help="threshold for a null set in the extremity tests")
    common.add_argument("--panels", type=int, default=2048, help="Simpson panel count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=1000, help="sample size")

    parser = _Parser(prog="slcopula", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="class membership of a diagonal")
    sub.add_parser("classify", parents=[common], help="extremity in each applicable class")
    p = sub.add_parser("eval", parents=[common], help="evaluate C(u, v) and delta(t)")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p = sub.add_parser("grid", parents=[common], help="CSV surface or cell volumes")
    p.add_argument("--kind", choices=("surface", "cell_volume"), default="surface")
    sub.add_parser("volume-check", parents=[common], help="2-increasingness oracle")
    p = sub.add_parser("measures", parents=[common], help="rho, gamma, footrule")
    p.add_argument("--method", choices=("closed", "numeric", "both"), default="both")
    p = sub.add_parser("asymmetry", parents=[common],
                       help="asymmetry map CSV, or point report with --u/--v")
    p.add_argument("--functional", choices=asymmetry.FUNCTIONALS, default="chi")
    p.add_argument("--bounds", action="store_true", help="add bound columns to the CSV")
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    sub.add_parser("mix", parents=[common], help="measure JSON -> mixture diagonal")
    sub.add_parser("recover", parents=[common], help="piecewise JSON -> measure")
    sub.add_parser("sample", parents=[common], help="CSV sample of (u, v) pairs")
    return parser


def _load_input(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _tolerance(args) -> Tolerance:
    return Tolerance().with_overrides(eps_measure=args.tol_measure, quad_n=args.panels)


def _dump_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _spec_and_report(args):
    spec = diagonal.spec_from_json(args.input)
    return spec, diagonal.validate(spec, _tolerance(args))


def _object(spec, report) -> semilinear.SemilinearObject:
    cls = report.declared_class
    if cls is None:
        raise PreconditionError("spec does not generate a semilinear semi-copula")
    return semilinear.SemilinearObject(spec, cls)


def cmd_validate(args):
    spec, report = _spec_and_report(args)
    ok = report.is_diagonal or report.in_semicopula_class
    return report.to_json(), (EXIT_OK if ok else EXIT_INVALID)


def cmd_classify(args):
    spec, report = _spec_and_report(args)
    tol = _tolerance(args)
    out = {"membership": report.to_json(), "extremity": {}}
    if report.in_copula_class:
        out["extremity"]["copula"] = extremity.classify_copula(spec, tol).to_json()
    if report.in_quasicopula_class:
        out["extremity"]["quasicopula"] = extremity.classify_quasicopula(spec, tol).to_json()
    if report.in_semicopula_class:
        out["extremity"]["semicopula"] = extremity.classify_semicopula(spec, tol).to_json()
    return out, (EXIT_OK if out["extremity"] else EXIT_INVALID)


def cmd_eval(args):
    spec, report = _spec_and_report(args)
    obj = semilinear.SemilinearObject(spec, report.declared_class or "semicopula")
    out = {"u": args.u, "v": args.v,
           "value": semilinear.evaluate(obj, args.u, args.v),
           "survival": semilinear.survival(obj, args.u, args.v),
           "delta_u": spec(args.u), "delta_v": spec(args.v),
           "declared_class": report.declared_class}
    return out, (EXIT_OK if report.declared_class else EXIT_INVALID)


def cmd_grid(args):
    spec, report = _spec_and_report(args)
    obj = _object(spec, report)
    if args.kind == "surface":
        return semilinear.surface_grid(obj, args.n), EXIT_OK
    return semilinear.positivity_oracle(obj, args.n).volumes, EXIT_OK


def cmd_volume_check(args):
    spec, report = _spec_and_report(args)
    res = semilinear.positivity_oracle(_object(spec, report), args.n)
    out = res.to_json()
    out["declared_class"] = report.declared_class
    return out, (EXIT_OK if res.min_volume >= -1e-12 else EXIT_INVALID)


def _measure_of(spec):
    if isinstance(spec, diagonal.FamilyM):
        return choquet.DiscreteMeasure.point_mass(spec.m)
    if isinstance(spec, diagonal.Mixture):
        return spec.measure
    return None


def cmd_measures(args):
    spec, report = _spec_and_report(args)
    if not report.in_copula_class:
        raise PreconditionError("association measures need a copula-class diagonal")
    out = {}
    if args.method in ("closed", "both"):
        mu = _measure_of(spec)
        if mu is None:
            if args.method == "closed":
                raise SpecError("closed forms exist only for the m family and its mixtures")
        else:
            out["closed_form"] = association.closed_form_mixture(mu).to_json("closed_form")
    if args.method in ("numeric", "both"):
        obj = semilinear.SemilinearObject(spec, "copula")
        out["numeric"] = association.numeric_measures(obj, _tolerance(args)).to_json("numeric")
    if "closed_form" in out and "numeric" in out:
        out["max_abs_difference"] = max(abs(out["closed_form"][k] - out["numeric"][k])
                                        for k in ("rho", "gamma", "footrule"))
    return out, EXIT_OK


def cmd_asymmetry(args):
    spec, report = _spec_and_report(args)
    obj = _object(spec, report)
    if (args.u is None) != (args.v is None):
        raise UsageError("--u and --v go together")
    if args.u is None:
        return asymmetry.map_grid(obj, args.functional, args.n, with_bounds=args.bounds), EXIT_OK
    u, v = args.u, args.v
    b = asymmetry.bounds(u, v)
    out = {"u": u, "v": v, "chi": asymmetry.chi(obj, u, v),
           "varrho": asymmetry.varrho(obj, u, v), "xi": asymmetry.xi(obj, u, v),
           "bounds": {"lower": b.lower, "upper": b.upper, "radial_upper": b.radial_upper}}
    if 0 < u < 1 and 0 < v < 1:
        att = asymmetry.attain_bounds(u, v)
        out["attainment"] = {k: a.to_json() for k, a in att.items()}
    return out, EXIT_OK


def cmd_mix(args):
    mu = choquet.DiscreteMeasure.from_json(args.input)
    spec = diagonal.Mixture(mu)
    return {"measure": mu.to_json(), "diagonal": spec.to_json(),
            "piecewise": choquet.to_piecewise(mu).to_json(),
            "closed_form_measures": association.closed_form_mixture(mu).to_json("closed_form")
            }, EXIT_OK


def cmd_recover(args):
    pw = choquet.PiecewiseQuadratic.from_json(args.input)
    return {"measure": choquet.recover_measure(pw).to_json()}, EXIT_OK


def cmd_sample(args):
    spec, report = _spec_and_report(args)
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    obj = _object(spec, report)
    return semilinear.sample(obj, args.count, args.seed), EXIT_OK


HANDLERS = {
    "validate": cmd_validate, "classify": cmd_classify, "eval": cmd_eval,
    "grid": cmd_grid, "volume-check": cmd_volume_check, "measures": cmd_measures,
    "asymmetry": cmd_asymmetry, "mix": cmd_mix, "recover": cmd_recover,
    "sample": cmd_sample,
}


def _render(result, args) -> str:
    header = json.dumps({"command": args.command, "input": args.input}, sort_keys=True)
    if isinstance(result, GridMap):
        return result.to_csv(header_comment=header)
    if isinstance(result, np.ndarray):
        lines = [f"# {header}", "u,v"]
        lines += [f"{format_number(a)},{format_number(b)}" for a, b in result]
        return "\n".join(lines) + "\n"
    return _dump_json({"command": args.command, "input": args.input, "report": result})


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"slcopula: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.input = _load_input(args.spec)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"slcopula: cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result, code = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"slcopula: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SemilinearError, ValueError) as exc:
        _write(_dump_json({"command": args.command, "input": args.input,
                           "error": f"{type(exc).__name__}: {exc}"}), args.out)
        return EXIT_INVALID
    try:
        _write(_render(result, args), args.out)
    except OSError as exc:
        print(f"slcopula: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


def main() -> None:
    sys.exit(run())
