"""
Command-line interface for the edge-triangle toolkit

Usage:
    python main.py classify --direction 1,-1/2
    python main.py classify --direction 1,-3/4 --beta 20,-80
    python main.py classify --line -1,0 --limit +inf
    python main.py boundary --resolution 200 --out boundary.csv --svg boundary.svg
    python main.py cones --k-max 8 --svg cones.svg
    python main.py enumerate --n 6 --out support6.csv
    python main.py family --kind closure --n 6 --k 1 --beta 1,1
    python main.py sample --preset fig4 --steps 1000000 --init turan:4
    python main.py mode-check --n 30 --beta 60,-110
    python main.py figure --preset fig3_1 --pdf fig3_1.pdf
    python main.py verify --suite geometry

Results are printed as JSON on stdout; logs go to stderr.
"""
import argparse
import logging
import re
import shlex
import sys
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import get_settings, load_presets
from errors import ConfigError, TuranError
from exact_family import (
    closure_convergence_check,
    closure_two_point,
    convex_support,
    edge_complete_family,
    enumerate_support,
    exact_family,
    non_turan_mass,
    ratio_trend,
    triangle_free_census,
    triangle_free_family,
    turan_vertices,
)
from export_utils import (
    boundary_frame,
    dumps_json,
    export_report_excel,
    export_report_pdf,
    plot_adjacency_svg,
    plot_boundary_svg,
    plot_cones_svg,
    trajectory_frame,
    write_csv,
    write_json,
    write_support_csv,
)
from geometry import Direction, boundary_samples, cone_complex, o_k
from graph_core import Graph, partition_recovery, turan_densities
from mcmc import FIGURE_PRESETS, figure_harness, make_config, run, turan_mode_check
from support_store import SupportStore, cached_support
from variational import Line, line_report, predict_direction
from verify import SUITES, verify

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_IO = 3

# commands whose --preset is expanded from the preset file
FILE_PRESET_COMMANDS = ("sample", "mode-check")

_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d|inf\b)")


def parse_number(token: str) -> Number:
    """'3/4' -> Fraction, '2' -> int, anything else -> float"""
    token = token.strip()
    try:
        if "/" in token:
            return Fraction(token)
        if re.fullmatch(r"[+-]?\d+", token):
            return int(token)
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None


def parse_pair(text: str) -> Tuple[Number, Number]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return parse_number(parts[0]), parse_number(parts[1])


def parse_number_list(text: str) -> List[Number]:
    return [parse_number(part) for part in text.split(",") if part.strip()]


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_limit(text: str) -> int:
    value = text.strip().lower()
    if value in ("+inf", "inf", "+1", "1"):
        return 1
    if value in ("-inf", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"limit must be +inf or -inf, got {text!r}")


def _float_pair(pair: Sequence[Number]) -> Tuple[float, float]:
    return float(pair[0]), float(pair[1])


def normalize_argv(argv: Sequence[str]) -> List[str]:
    """Join '--flag -1,0' into '--flag=-1,0' so negative values are not read as options"""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (token.startswith("--") and "=" not in token and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def expand_presets(argv: List[str], presets_path: str) -> List[str]:
    """
    Replace '--preset NAME' on sample / mode-check by the flags stored for NAME

    The preset flags are inserted right after the command, so flags given
    explicitly on the command line take precedence.
    """
    if not argv or argv[0] not in FILE_PRESET_COMMANDS:
        return argv
    rest = list(argv[1:])
    name = None
    for i, token in enumerate(rest):
        if token == "--preset" and i + 1 < len(rest):
            name = rest[i + 1]
            del rest[i:i + 2]
            break
        if token.startswith("--preset="):
            name = token.split("=", 1)[1]
            del rest[i]
            break
    if name is None:
        return argv
    presets = load_presets(presets_path)
    if name.lower() not in presets:
        raise ConfigError(f"unknown preset {name!r} in {presets_path}; available: {', '.join(sorted(presets))}")
    return [argv[0]] + normalize_argv(shlex.split(presets[name.lower()])) + rest


def emit(payload) -> None:
    sys.stdout.write(dumps_json(payload))


# --- commands ---------------------------------------------------------------

def cmd_classify(args, parser: argparse.ArgumentParser) -> int:
    if args.line is not None:
        if args.limit is None:
            parser.error("--line needs --limit +inf|-inf")
        emit(line_report(Line(args.line[0], args.line[1], args.limit)))
        return 0
    x, y = args.direction
    if x == 0 and y == 0:
        parser.error("--direction must be a nonzero vector")
    prediction = predict_direction(Direction(x, y), args.beta)
    result = {"input": {"direction": [str(x), str(y)]}}
    if args.beta is not None:
        result["input"]["beta"] = [str(b) for b in args.beta]
    result.update(prediction.to_dict())
    emit(result)
    return 0


def cmd_boundary(args, parser) -> int:
    rows = boundary_samples(args.resolution)
    frame = boundary_frame(rows)
    if args.out:
        write_csv(frame, args.out)
        logger.info("Wrote %d boundary rows to %s", len(frame), args.out)
    else:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
    if args.svg:
        plot_boundary_svg(rows, args.svg)
    return 0


def cmd_cones(args, parser) -> int:
    cones = cone_complex(args.k_max)
    if args.out:
        write_json(cones, args.out)
    else:
        emit(cones)
    if args.svg:
        plot_cones_svg(cones, args.svg)
    return 0


def _support_table(args):
    if args.cache:
        return cached_support(args.n, SupportStore(get_settings().store_path), args.allow_long, args.workers)
    return enumerate_support(args.n, allow_long=args.allow_long, workers=args.workers)


def cmd_enumerate(args, parser) -> int:
    table = _support_table(args)
    if args.out:
        write_support_csv(table, args.out)
        logger.info("Wrote %d support points to %s", len(table.counts), args.out)
    emit({
        "n": table.n,
        "total": table.total(),
        "support_size": len(table.counts),
        "hull": [[str(p.e), str(p.t)] for p in convex_support(table)],
        "turan_vertices": [[str(p.e), str(p.t)] for p in turan_vertices(table.n)],
    })
    return 0


def cmd_family(args, parser) -> int:
    kind = args.kind
    beta = args.beta
    if kind == "ratio-trend":
        points = ratio_trend(args.k, beta, args.ns)
        emit([
            {"n": p.n, "log_ratio": p.log_ratio, "stirling_log_ratio": p.stirling_log_ratio,
             "exact_ratio": None if p.exact_ratio is None else str(p.exact_ratio)}
            for p in points
        ])
        return 0
    if args.n is None:
        parser.error(f"--kind {kind} needs --n")
    if kind == "two-point":
        fam = closure_two_point(args.n, args.k, beta)
        emit({"n": fam.n, "k": fam.k, "reduced": str(fam.reduced), "log_ratio": fam.log_ratio,
              "distribution": fam.to_records()})
    elif kind == "edge-complete":
        emit({"n": args.n, "distribution": edge_complete_family(args.n, _float_pair(beta)).to_records()})
    elif kind == "census":
        census = triangle_free_census(args.n)
        emit({
            "n": census.n,
            "by_edges": [{"E": e, "triangle_free": total, "inside_turan": fits}
                         for e, (total, fits) in census.by_edges.items()],
            "non_turan_mass": non_turan_mass(census, float(beta[0])),
        })
    else:
        table = _support_table(args)
        if kind == "exact":
            fam = exact_family(table, _float_pair(beta))
        elif kind == "triangle-free":
            fam = triangle_free_family(table, float(beta[0]))
        else:
            o = Direction(*args.direction) if args.direction is not None else o_k(args.k)
            check = closure_convergence_check(table, args.k, _float_pair(beta), o, args.r_schedule)
            emit(check.to_dict())
            return 0
        emit({"n": fam.n, "beta": list(fam.beta), "psi": fam.psi, "mean": list(fam.mean()),
              "distribution": fam.to_records()})
    return 0


def cmd_sample(args, parser) -> int:
    settings = get_settings()
    config = make_config(
        n=args.n, beta=_float_pair(args.beta), steps=args.steps,
        seed=settings.seed if args.seed is None else args.seed,
        init=args.init, thin=args.thin,
    )
    trajectory = run(config)
    end = trajectory.densities()[-1]
    partition = partition_recovery(trajectory.final_graph)
    distances = {
        r: float(np.linalg.norm(end - np.asarray(turan_densities(config.n, r).as_floats())))
        for r in range(1, config.n + 1)
    }
    if args.out:
        write_csv(trajectory_frame(trajectory), args.out)
    if args.svg:
        plot_adjacency_svg(trajectory.final_graph, partition, args.svg)
    emit({
        "n": config.n,
        "beta": list(config.beta),
        "steps": config.steps,
        "metadata": trajectory.metadata,
        "acceptance_rate": trajectory.acceptance_rate,
        "terminal": [float(end[0]), float(end[1])],
        "nearest_turan_r": min(distances, key=distances.get),
        "partition": {"classes": partition.num_classes, "violations": partition.violations,
                      "misfit": float(partition.misfit)},
        "final_graph_hex": trajectory.final_graph.to_hex(),
    })
    return 0


def cmd_mode_check(args, parser) -> int:
    emit(turan_mode_check(args.n, _float_pair(args.beta)).to_dict())
    return 0


def cmd_figure(args, parser) -> int:
    report = figure_harness(args.preset, steps=args.steps, seed=args.seed, workers=args.workers, thin=args.thin)
    payload = report.to_dict()
    store = SupportStore(get_settings().store_path)
    run_id = store.save_run("figure", {"preset": args.preset, "steps": args.steps, "seed": args.seed}, payload)
    payload["run_id"] = run_id
    if args.pdf:
        with open(args.pdf, "wb") as handle:
            handle.write(export_report_pdf(payload).getvalue())
    if args.excel:
        with open(args.excel, "wb") as handle:
            handle.write(export_report_excel(payload).getvalue())
    if args.svg:
        stable = report.stable_chain()
        if stable is not None:
            g = Graph.from_hex(stable.final_hex)
            plot_adjacency_svg(g, partition_recovery(g), args.svg)
    emit(payload)
    return 0


def cmd_verify(args, parser) -> int:
    report = verify(args.suite, mcmc_steps=args.mcmc_steps)
    payload = report.to_dict()
    store = SupportStore(get_settings().store_path)
    payload["run_id"] = store.save_run("verify", {"suite": args.suite, "mcmc_steps": args.mcmc_steps}, report.to_dict())
    emit(payload)
    return 0 if report.passed else EXIT_VERIFY_FAILED


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turan", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--log-level", default=None, type=str.upper,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], help="overrides TURAN_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a direction ray or a line of parameters")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--direction", type=parse_pair, help="X,Y (fractions such as 1,-3/4 stay exact)")
    target.add_argument("--line", type=parse_pair, help="a,b for beta1 = a*beta2 + b")
    p.add_argument("--beta", type=parse_pair, help="base parameter resolving critical rays")
    p.add_argument("--limit", type=parse_limit, help="+inf or -inf (with --line)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("boundary", help="samples of the lower and upper boundary of the density region")
    p.add_argument("--resolution", type=int, default=201)
    p.add_argument("--out", help="CSV file (stdout when omitted)")
    p.add_argument("--svg", help="plot of the region")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("cones", help="normal-cone complex as JSON")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--out", help="JSON file (stdout when omitted)")
    p.add_argument("--svg", help="plot of the cones")
    p.set_defaults(func=cmd_cones)

    def add_enumeration_flags(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--n", type=int, required=required)
        p.add_argument("--allow-long", action="store_true", help="permit n=8")
        p.add_argument("--workers", type=int, default=None, help="overrides TURAN_ENUM_WORKERS")
        p.add_argument("--cache", action="store_true", help="read/write the support table in the result store")

    p = sub.add_parser("enumerate", help="exact (E, T) histogram over all graphs on n nodes")
    add_enumeration_flags(p, required=True)
    p.add_argument("--out", help="support table CSV")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("family", help="exact finite-n families and closure checks")
    p.add_argument("--kind", required=True,
                   choices=["exact", "two-point", "edge-complete", "triangle-free", "closure", "ratio-trend", "census"])
    add_enumeration_flags(p, required=False)
    p.add_argument("--beta", type=parse_pair, default=(0, 0))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--direction", type=parse_pair, help="ray direction for --kind closure (default o_k)")
    p.add_argument("--r-schedule", type=parse_number_list, default=[5, 10, 20, 40])
    p.add_argument("--ns", type=parse_int_list, default=list(range(6, 61, 6)), help="n values for ratio-trend")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("sample", help="run one Metropolis chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=parse_pair, required=True)
    p.add_argument("--steps", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=None, help="overrides TURAN_SEED")
    p.add_argument("--init", default="empty", help="empty, complete, turan:<r> or random:<p>")
    p.add_argument("--thin", type=int, default=100)
    p.add_argument("--out", help="trajectory CSV")
    p.add_argument("--svg", help="adjacency matrix of the final graph")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("mode-check", help="which Turan graph carries the most mass")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=parse_pair, required=True)
    p.set_defaults(func=cmd_mode_check)

    p = sub.add_parser("figure", help="mode check plus multi-start chains for a simulation preset")
    p.add_argument("--preset", required=True, choices=sorted(FIGURE_PRESETS))
    p.add_argument("--steps", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="overrides TURAN_CHAIN_WORKERS")
    p.add_argument("--thin", type=int, default=1000)
    p.add_argument("--pdf", help="PDF report")
    p.add_argument("--excel", help="Excel report")
    p.add_argument("--svg", help="adjacency matrix of the Turan-initialised chain's final graph")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", choices=list(SUITES) + ["all"])
    p.add_argument("--mcmc-steps", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        settings = get_settings()
        # global flags precede the command
        split = next((i for i, tok in enumerate(argv) if not tok.startswith("-")
                      and (i == 0 or argv[i - 1] != "--log-level")), len(argv))
        argv = argv[:split] + expand_presets(argv[split:], settings.presets_path)
    except TuranError as exc:
        emit({"error": str(exc)})
        return EXIT_INVALID

    parser = build_parser()
    args = parser.parse_args(normalize_argv(argv))
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    handler: Callable = args.func
    try:
        return handler(args, parser)
    except TuranError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        emit({"error": str(exc), "type": type(exc).__name__})
        return EXIT_INVALID
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        emit({"error": str(exc), "type": "OSError"})
        return EXIT_IO
