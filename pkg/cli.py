"""
Command-line front end for the heat-content library.

Exit codes: 0 success, 1 verification failure or failed certificate,
2 domain or configuration error.
"""

import argparse
import os
import sys

# Prefect reads its logging level at import time
os.environ.setdefault("PREFECT_LOGGING_LEVEL", "INFO" if "--verbose" in sys.argv[1:] else "WARNING")

from typing import Callable, Dict, List, Optional  # noqa: E402

import orjson  # noqa: E402

from heat_content.asymptotics import series_thm31, verify_recursion  # noqa: E402
from heat_content.boundary import heat_content_bc  # noqa: E402
from heat_content.coefficients import (c_boundary, c_n, classify_region, log_coefficient,  # noqa: E402
                                       log_plane_index)
from heat_content.errors import (CertificationError, HeatContentError, LogPlaneError,  # noqa: E402
                                 MaxRefinementError)
from heat_content.ladder import MAX_K, build_ladder, extract_sigma  # noqa: E402
from heat_content.models import BCSpec, CutoffSpec, ParamPair, PowerProfile, RunConfig  # noqa: E402
from heat_content.quadrature import heat_content_interval  # noqa: E402
from heat_content.spectral import circle_line_gap, fourier_coefficients, heat_content_circle  # noqa: E402
from main_flow import run_acceptance_suite, run_grid_verification  # noqa: E402
from tasks.reporting import dumps, emit, render_report  # noqa: E402
from utils.helpers import format_number, load_run_config, parse_real_or_complex, resolve_tol  # noqa: E402

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _fail(message: str, code: int) -> int:
    sys.stderr.write(f"error: {message}\n")
    return code


def _pair(args: argparse.Namespace) -> ParamPair:
    return ParamPair.of(parse_real_or_complex(args.a), parse_real_or_complex(args.b))


def _real_pair(args: argparse.Namespace) -> ParamPair:
    p = _pair(args)
    p.real()
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "t_min": args.t_min, "t_max": args.t_max, "points": args.points,
        "tol": args.tol,
        "N": args.N, "slope_tol": args.slope_tol, "log_coeff_tol": args.log_coeff_tol,
        "output_format": args.format, "seed": args.seed,
        "threads": args.threads,
    }
    return load_run_config(args.config, overrides)


# --- Subcommands ---

def cmd_coeff(args: argparse.Namespace) -> int:
    p = _pair(args)
    region = classify_region(p)
    print(f"a\t{format_number(p.a)}")
    print(f"b\t{format_number(p.b)}")
    print(f"region\t{region.describe()}")
    k = log_plane_index(p.s)
    if k is not None:
        if p.is_real:
            print(f"log_coefficient\t{format_number(log_coefficient(p.a.real, k))}")
        raise LogPlaneError(k)

    series = series_thm31(p, args.N)
    print("power\tcoefficient")
    for term in series.terms:
        print(f"{format_number(term.power)}\t{format_number(term.coeff)}")
    print(f"c(a,b)\t{format_number(c_boundary(p))}")
    for n in range(args.N + 1):
        print(f"c_{n}\t{format_number(c_n(n, p))}")
    return EXIT_OK


def cmd_heat(args: argparse.Namespace) -> int:
    p = _real_pair(args)
    tol = resolve_tol(args.tol) or 1e-11
    if args.bc:
        result = heat_content_bc(p, args.t, BCSpec.from_code(args.bc), tol=tol)
    else:
        cutoffs = (CutoffSpec(), CutoffSpec()) if args.cutoff else None
        result = heat_content_interval(p, args.t, cutoffs=cutoffs, tol=tol)
    print("t,value,error_estimate,nodes_used")
    print(f"{format_number(args.t)},{format_number(result.value)},"
          f"{format_number(result.error_estimate)},{result.nodes_used}")
    return EXIT_OK


def _grid_command(kind: str, params: Dict, args: argparse.Namespace) -> int:
    config = _config(args)
    report = run_grid_verification(kind, params, config)
    emit(render_report(report, config.output_format), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify(args: argparse.Namespace) -> int:
    a, b = _real_pair(args).real()
    params = {"a": a, "b": b, "include_boundary_term": not args.no_boundary_term}
    return _grid_command("cutoff" if args.cutoff else "expansion", params, args)


def cmd_logverify(args: argparse.Namespace) -> int:
    a = parse_real_or_complex(args.a)
    if isinstance(a, complex):
        return _fail("log-plane verification needs real a", EXIT_INVALID)
    return _grid_command("logplane", {"a": a, "k": args.k}, args)


def cmd_bc(args: argparse.Namespace) -> int:
    a, b = _real_pair(args).real()
    return _grid_command("bc", {"a": a, "b": b, "bc": BCSpec.from_code(args.bc).code}, args)


def cmd_recursion(args: argparse.Namespace) -> int:
    p = _real_pair(args)
    print("t,residual")
    passed = True
    for t in args.t:
        check = verify_recursion(p, t, N=args.N)
        passed = passed and check.passed and check.max_deviation < args.threshold
        print(f"{format_number(t)},{format_number(check.max_deviation)}")
    print(f"pass,{str(passed).lower()}")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_ladder(args: argparse.Namespace) -> int:
    if not 0 <= args.k <= MAX_K:
        return _fail(f"k must lie in [0, {MAX_K}], got {args.k}", EXIT_INVALID)
    table = build_ladder()
    print(f"certified\t{len(table.certified_steps)} chain steps")
    records: List[Dict] = []
    for k in range(args.k + 1):
        sigma = extract_sigma(k)
        print(f"sigma k={k}\t{len(sigma.entries)} entries, denominator factors {sigma.denominator_factors()}")
        if k == args.k:
            records = sigma.to_records()
    if args.dump:
        with open(args.dump, "wb") as f:
            f.write(orjson.dumps(records, option=orjson.OPT_INDENT_2))
    return EXIT_OK


def cmd_spectral(args: argparse.Namespace) -> int:
    a, b = _real_pair(args).real()
    phi, rho = PowerProfile.power(a), PowerProfile.power(b)
    f_phi = fourier_coefficients(phi, args.n_max)
    f_rho = f_phi if a == b else fourier_coefficients(rho, args.n_max)
    print("t,circle,line,log_gap")
    for t in args.t:
        circle = heat_content_circle(f_phi, f_rho, t)
        line = heat_content_interval(ParamPair.of(a, b), t).value
        gap = circle_line_gap(phi, rho, t)
        print(f"{format_number(t)},{format_number(circle)},{format_number(line)},{format_number(gap)}")
    return EXIT_OK


def cmd_suite(args: argparse.Namespace) -> int:
    result = run_acceptance_suite(seed=args.seed, only=args.only, threads=args.threads,
                                  summary_dir=args.summary_dir)
    emit(dumps(result).decode() + "\n", args.out)
    return EXIT_OK if result.get("status") == "COMPLETED" else EXIT_FAILED


# --- Parser ---

def _add_pair(p: argparse.ArgumentParser) -> None:
    p.add_argument("-a", required=True, help="exponent of the initial temperature x^{-a}, re[+imi]")
    p.add_argument("-b", required=True, help="exponent of the specific heat x^{-b}, re[+imi]")


def _add_run_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--tol", type=float, help="quadrature tolerance (env HEATCONTENT_TOL)")
    p.add_argument("-N", type=int, help="series truncation order")
    p.add_argument("--slope-tol", dest="slope_tol", type=float)
    p.add_argument("--log-coeff-tol", dest="log_coeff_tol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="concurrent quadratures (env HEATCONTENT_THREADS)")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heat-content", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", help="series coefficients and region of (a, b)")
    _add_pair(p)
    p.add_argument("-N", type=int, default=3)
    p.set_defaults(handler=cmd_coeff)

    p = sub.add_parser("heat", help="one quadrature of the heat content")
    _add_pair(p)
    p.add_argument("-t", type=float, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--bc", help="boundary conditions, e.g. DD, NN, DN")
    p.add_argument("--cutoff", action="store_true", help="multiply both data by the default cutoff")
    p.set_defaults(handler=cmd_heat)

    p = sub.add_parser("verify", help="series against quadrature on a t-grid")
    _add_pair(p)
    _add_run_config(p)
    p.add_argument("--no-boundary-term", action="store_true", help="drop c(a,b) t^{(1-a-b)/2} from the series")
    p.add_argument("--cutoff", action="store_true", help="fit the cutoff-data expansion instead")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("logverify", help="log term on the plane a+b = 1-2k")
    p.add_argument("-a", required=True)
    p.add_argument("-k", type=int, required=True)
    _add_run_config(p)
    p.set_defaults(handler=cmd_logverify)

    p = sub.add_parser("recursion", help="three-term recursion residuals")
    _add_pair(p)
    p.add_argument("-t", type=float, action="append", required=True)
    p.add_argument("-N", type=int, default=8)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.set_defaults(handler=cmd_recursion)

    p = sub.add_parser("ladder", help="certify the regularization ladder and dump sigma")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--dump", help="write sigma_{k,l} records as JSON")
    p.set_defaults(handler=cmd_ladder)

    p = sub.add_parser("spectral", help="circle heat content against the interval")
    _add_pair(p)
    p.add_argument("-t", type=float, action="append", required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=512)
    p.set_defaults(handler=cmd_spectral)

    p = sub.add_parser("bc", help="boundary-condition series against quadrature")
    _add_pair(p)
    p.add_argument("--bc", default="NN", help="DD, NN, DN or ND")
    _add_run_config(p)
    p.set_defaults(handler=cmd_bc)

    p = sub.add_parser("suite", help="run the acceptance rules")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", action="append", help="rule name; repeatable")
    p.add_argument("--threads", type=int)
    p.add_argument("--summary-dir", dest="summary_dir")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_suite)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except CertificationError as e:
        return _fail(str(e), EXIT_FAILED)
    except MaxRefinementError as e:
        return _fail(f"{e} (estimate {e.error_estimate:.3g})", EXIT_FAILED)
    except (HeatContentError, ValueError) as e:
        return _fail(str(e), EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
