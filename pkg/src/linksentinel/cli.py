"""Command-line front end: sensor placement, simulation, prediction
verification, and trace analysis, with file-based artifacts.

Exit codes: 0 success, 2 unusable input, 3 no isolating sensor set,
4 inadmissible failure scenario, 5 prediction verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigError, NoIsolatingSetError, load_config
from .dynamics import AdmissibilityError, random_distinct_state, simulate, trace_to_csv, read_trace_csv
from .fdi import AMBIGUOUS, analyze_trace, scan_candidate
from .graph import ParseError, load_digraph
from .jumps import check_all_predictions
from .placement import (
    default_max_order,
    greedy_detection_placement,
    greedy_isolation_placement,
    relation_matrix,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NO_ISOLATING_SET = 3
EXIT_INADMISSIBLE = 4
EXIT_VERIFY_FAILED = 5

VERIFY_SIZE_GUARD = 64
DEFAULT_VERIFY_SEED = 1729
SEED_ENV_VAR = "LINK_SENTINEL_SEED"


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigError, ValueError) as exc:
        if isinstance(exc, NoIsolatingSetError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NO_ISOLATING_SET
        if isinstance(exc, AdmissibilityError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INADMISSIBLE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linksentinel",
        description="Detect and isolate single link failures in consensus "
        "networks from derivative jumps at sensor nodes.",
    )
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("place", help="choose sensor vertices greedily")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--mode", choices=["detection", "isolation"], default="detection")
    p.add_argument("--z", type=int, default=None, help="highest observed derivative order")
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("simulate", help="sample a scenario to a trace CSV")
    p.add_argument("--config", required=True, help="scenario JSON")
    p.add_argument("--out", default=None, help="trace CSV path (default: stdout)")
    p.add_argument("--no-plot", action="store_true", help="skip the figure next to --out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check jump predictions for every edge/observer pair")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--z", type=int, default=None, help="cap on checked derivative orders")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="detection/isolation verdict for a trace")
    p.add_argument("--config", required=True, help="scenario JSON")
    p.add_argument("--trace", required=True, help="trace CSV from simulate")
    p.add_argument("--out", default=None, help="also write the report here")
    p.add_argument("--no-plot", action="store_true", help="skip the figure next to --out")
    p.set_defaults(func=cmd_analyze)
    return parser


def cmd_place(args) -> int:
    g = load_digraph(args.graph)
    z = default_max_order(g) if args.z is None else args.z
    if args.mode == "detection":
        result = greedy_detection_placement(g, z)
    else:
        result = greedy_isolation_placement(g, z)
        if result is None:
            print("error: no isolating sensor set exists", file=sys.stderr)
            return EXIT_NO_ISOLATING_SET
    payload = {
        "mode": args.mode,
        "sensors": list(result.sensors),
        "z": z,
        "deficit_trace": list(result.deficits),
        "relation_matrix": relation_matrix(g, z).tolist(),
        "edges": [list(e) for e in g.canonical_edges()],
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        _write(args.out, text + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    trace = simulate(cfg.scenario)
    if args.out:
        trace_to_csv(trace, args.out)
        if not args.no_plot:
            from .figures import save_trace_figure

            save_trace_figure(trace, _fig_path(args.out), sensors=cfg.sensors)
    else:
        sys.stdout.write(trace_to_csv(trace))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = load_digraph(args.graph)
    if g.n > VERIFY_SIZE_GUARD:
        print(
            f"error: graph has {g.n} vertices, verify is capped at "
            f"{VERIFY_SIZE_GUARD}",
            file=sys.stderr,
        )
        return EXIT_BAD_INPUT
    seed = int(os.environ.get(SEED_ENV_VAR, DEFAULT_VERIFY_SEED))
    x0 = random_distinct_state(g.n, seed)
    checks = check_all_predictions(g, x0, max_order=args.z)
    failures = [c for c in checks if not c.passed]
    finite = sum(
        1 for c in checks if c.prediction.order not in (0, float("inf"))
    )
    print(
        f"checked {len(checks)} edge/observer pairs "
        f"({finite} with a finite reacting order), seed {seed}"
    )
    for c in failures:
        p = c.prediction
        print(
            f"FAIL edge {tuple(p.edge)} observer {p.observer}: "
            f"order {c.failed_order} gap {c.actual!r} expected {c.expected!r}"
        )
    print("FAIL" if failures else "PASS")
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    trace = read_trace_csv(args.trace, t_fail=cfg.scenario.t_f)
    if trace.n != cfg.graph.n:
        raise ConfigError(
            f"trace has {trace.n} state columns but the graph has "
            f"{cfg.graph.n} vertices"
        )
    kwargs = {"abs_floor": cfg.abs_floor, "rel": cfg.rel}
    t_star = cfg.scenario.t_f
    if t_star is None:
        t_star = scan_candidate(trace, cfg.sensors, cfg.z, **kwargs)
    report = None
    if t_star is not None:
        try:
            report = analyze_trace(
                cfg.graph, cfg.sensors, trace, t_star, cfg.z, **kwargs
            )
        except ValueError:
            # Candidate instant outside the sampled window (or too close to
            # its ends for a stencil): nothing observable inside the trace.
            report = None
    if report is None:
        payload = {
            "detected": False,
            "edge": None,
            "t_star": None,
            "evidence": [],
            "params": cfg.params(),
        }
    else:
        edge = report.isolated_edge
        payload = {
            "detected": report.detected,
            "edge": "ambiguous"
            if edge is AMBIGUOUS
            else (list(edge) if edge is not None else None),
            "t_star": report.t_star,
            "evidence": [
                {
                    "sensor": ob.sensor,
                    "order": ob.order,
                    "left": ob.left_estimate,
                    "right": ob.right_estimate,
                    "jump": ob.jump,
                    "threshold": ob.threshold,
                    "significant": ob.significant,
                }
                for ob in report.evidence
            ],
            "params": cfg.params(),
        }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        _write(args.out, text + "\n")
        if not args.no_plot and report is not None:
            from .figures import save_derivative_figure

            orders = tuple(range(1, min(cfg.z, 2) + 1))
            save_derivative_figure(
                trace, cfg.sensors, _fig_path(args.out), orders=orders,
                t_star=report.t_star,
            )
    return EXIT_OK


def _fig_path(out_path: str) -> str:
    stem, _ = os.path.splitext(out_path)
    return stem + ".png"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


if __name__ == "__main__":
    sys.exit(main())
