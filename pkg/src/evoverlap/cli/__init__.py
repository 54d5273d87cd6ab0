"""Command line entry point: ``evoverlap <command> ...``.

Exit codes: 0 success or decision, 2 input error, 3 inconclusive,
4 protocol violation (input after a terminal decision).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .._validation import as_bounds
from ..bounds import error_bounds
from ..evalue import EProcessState
from ..intervals import confidence_interval
from ..overlap import Decision, Outcome, OverlapEngine, TestConfig, fixed_time_decision
from ..sim import SETTINGS, monte_carlo_table
from ..weights import SCHEDULES, make_schedule
from . import _io
from ._io import (
    EXIT_INCONCLUSIVE,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PROTOCOL,
    CliError,
    check_records,
    group_series,
    read_records,
)
from ._render import render_ascii, render_svg

__all__ = ["main"]


def _bounds_arg(text):
    try:
        return as_bounds(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _interval_of(values, bounds, args, horizon=None):
    sched = make_schedule(
        args.schedule, alpha=args.alpha, bounds=bounds,
        n=horizon or max(len(values), 1), c=args.c, t0=args.t0,
    )
    state = EProcessState(sched).extend(values)
    return confidence_interval(state, args.alpha, args.method)


def _emit(text, out=None):
    stream = sys.stdout if out is None else out
    stream.write(text)
    stream.flush()


# -- ci ----------------------------------------------------------------------


def cmd_ci(args) -> int:
    records = read_records(args.input)
    check_records(records, args.bounds, args.input)
    series = group_series(records, Path(args.input).stem) or {Path(args.input).stem: []}
    out = []
    for label, rows in series.items():
        ci = _interval_of([r.value for r in rows], args.bounds, args)
        out.append({"label": label, **ci.as_dict()})
    doc = _io.report("ci", {
        "config": {
            "alpha": args.alpha,
            "bounds": list(args.bounds.as_tuple()),
            "schedule": args.schedule,
            "c": args.c,
            "t0": args.t0,
            "method": args.method,
        },
        "intervals": out,
    })
    if args.json:
        _emit(_io.dumps(doc))
    else:
        for s in out:
            _emit(
                f"{s['label']}: [{s['lo']:.6f}, {s['hi']:.6f}]  mean {s['mu_hat']:.6f}  "
                f"n {s['n']}\n"
            )
    return EXIT_OK


# -- compare -----------------------------------------------------------------


def _config_from(args, mode, n=None, m=None) -> TestConfig:
    return TestConfig(
        alpha=args.alpha, delta=args.delta, t0=args.t0, c=args.c,
        bounds_p=args.bounds_x, bounds_q=args.bounds_y, mode=mode, n=n, m=m,
        stride=getattr(args, "stride", 1), method=args.method,
    )


def interleave(xs, ys, seed=None):
    """Arrival order of two record lists as ``(arm, record)`` pairs.

    An order column (on every row of both files) wins; otherwise rows
    alternate X, Y, X, ... or, with ``seed``, follow a seeded random
    interleaving that keeps each file's own order.
    """
    has_order = [r.order is not None for r in xs + ys]
    if any(has_order):
        if not all(has_order):
            raise CliError("either every row or no row may carry an order column")
        tagged = [(r.order, 0, i, "P", r) for i, r in enumerate(xs)]
        tagged += [(r.order, 1, i, "Q", r) for i, r in enumerate(ys)]
        return [(arm, r) for *_, arm, r in sorted(tagged, key=lambda t: t[:3])]
    if seed is None:
        out = []
        for i in range(max(len(xs), len(ys))):
            if i < len(xs):
                out.append(("P", xs[i]))
            if i < len(ys):
                out.append(("Q", ys[i]))
        return out
    arms = np.array(["P"] * len(xs) + ["Q"] * len(ys))
    np.random.default_rng(seed).shuffle(arms)
    it = {"P": iter(xs), "Q": iter(ys)}
    return [(str(a), next(it[str(a)])) for a in arms]


def _decision_body(config, decision, extra=None):
    body = {"config": config.as_dict()}
    body.update(decision.as_dict())
    if extra:
        body.update(extra)
    body["bounds"] = error_bounds(config).as_dict()
    return body


def cmd_compare(args) -> int:
    xs = read_records(args.x)
    ys = read_records(args.y)
    check_records(xs, args.bounds_x, args.x)
    check_records(ys, args.bounds_y, args.y)
    if args.mode == "fixed":
        if not xs or not ys:
            raise CliError("fixed mode needs at least one row in each file")
        config = _config_from(args, "fixed", len(xs), len(ys))
        d = fixed_time_decision([r.value for r in xs], [r.value for r in ys], config)
        doc = _io.report("compare", _decision_body(config, d))
        code = EXIT_OK
    else:
        config = _config_from(args, "anytime")
        engine = OverlapEngine(config)
        d = None
        if len(xs) >= config.t0 and len(ys) >= config.t0:
            for arm, r in interleave(xs, ys, args.seed_order):
                d = engine.observe(arm, r.value)
                if d.terminal:
                    break
        if d is None or not d.terminal:
            ci_x, ci_y = engine.intervals()
            d = Decision(Outcome.CONTINUE, engine.n, engine.m, ci_x, ci_y)
        extra = {"stopping": {"n": d.n, "m": d.m, "total": d.n + d.m},
                 "rows": {"x": len(xs), "y": len(ys)}}
        doc = _io.report("compare", _decision_body(config, d, extra))
        code = EXIT_OK if d.terminal else EXIT_INCONCLUSIVE
    _render_decision(doc, args.json)
    return code


def _render_decision(doc, as_json):
    if as_json:
        _emit(_io.dumps(doc))
        return
    lines = [f"decision: {doc['decision']} ({doc['relation']})  n={doc['n']} m={doc['m']}"]
    for key in ("interval_x", "interval_y"):
        ci = doc.get(key)
        if ci is not None:
            lines.append(f"{key}: [{ci['lo']:.6f}, {ci['hi']:.6f}]  mean {ci['mu_hat']:.6f}")
    lines.extend(_bounds_lines(doc["bounds"]))
    _emit("\n".join(lines) + "\n")


def _bounds_lines(b):
    t2 = b["type2"]
    return [
        f"C_t0: {b['c_t0']:.6f}",
        f"type I  <= {b['type1_per_side']:.4f} per side, {b['type1_two_sided']:.4f} two-sided",
        "type II <= " + ("1 (no guarantee)" if t2 is None else f"{t2:.4f}"),
        f"type III <= {b['type3_per_direction']:.4f} per direction, "
        f"{b['type3_two_sided']:.4f} both directions",
    ]


# -- monitor -----------------------------------------------------------------


_CONFIG_KEYS = {"alpha", "delta", "t0", "c", "bounds_p", "bounds_q", "stride", "method"}


def load_monitor_config(path) -> TestConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = {"alpha", "delta", "t0", "bounds_p", "bounds_q"} - set(raw)
    if missing:
        raise CliError(f"config lacks: {', '.join(sorted(missing))}")
    try:
        return TestConfig(mode="anytime", **raw)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid config: {exc}") from None


def _parse_stream_line(text, lineno):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or parts[0].upper() not in ("P", "Q"):
        raise CliError(f"stdin line {lineno}: expected 'P,<value>' or 'Q,<value>'")
    value = _io._parse_float(parts[1], lineno, "value")
    return parts[0].upper(), value


def cmd_monitor(args, stdin=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    config = load_monitor_config(args.config)
    engine = OverlapEngine(config)
    final = None
    lineno = 0
    for raw in stdin:
        lineno += 1
        text = raw.strip()
        if not text:
            continue
        if final is not None:
            # the engine is frozen; everything observed must be part of the test
            _emit(_io.dumps(_io.report("monitor", {
                "error": "protocol violation: input after the terminal decision",
                "line": lineno,
            })))
            return EXIT_PROTOCOL
        arm, value = _parse_stream_line(text, lineno)
        bounds = config.bounds_p if arm == "P" else config.bounds_q
        if not bounds.contains(value):
            raise CliError(
                f"stdin line {lineno}: value {value!r} outside the declared bounds "
                f"[{bounds.a}, {bounds.b}]"
            )
        d = engine.observe(arm, value)
        lo_x, hi_x, _, _ = engine.endpoints("P")
        lo_y, hi_y, _, _ = engine.endpoints("Q")
        status = {
            "line": lineno, "arm": arm, "n": engine.n, "m": engine.m,
            "interval_x": [lo_x, hi_x], "interval_y": [lo_y, hi_y],
            "decision": d.outcome.value,
        }
        _emit(json.dumps(status) + "\n")
        if d.terminal:
            final = d
            extra = {"stopping": {"n": d.n, "m": d.m, "total": d.n + d.m}}
            _emit(_io.dumps(_io.report("monitor", _decision_body(config, d, extra))))
    if final is not None:
        return EXIT_OK
    ci_x, ci_y = engine.intervals()
    d = Decision(Outcome.CONTINUE, engine.n, engine.m, ci_x, ci_y)
    extra = {"stopping": None}
    _emit(_io.dumps(_io.report("monitor", _decision_body(config, d, extra))))
    return EXIT_INCONCLUSIVE


# -- simulate ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    names = list(SETTINGS) if "all" in args.setting else args.setting
    for name in names:
        if name not in SETTINGS:
            raise CliError(
                f"unknown setting {name!r}; built-ins: {', '.join(SETTINGS)}"
            )
    config = TestConfig(
        alpha=args.alpha, delta=args.delta, t0=args.t0, c=args.c, mode=args.mode,
        n=args.n if args.mode == "fixed" else None,
        m=args.m if args.mode == "fixed" else None,
    )
    reports = monte_carlo_table(
        names, config, args.reps, seed=args.seed, n_jobs=args.threads,
        batch_size=args.batch_size, max_samples=args.max_samples,
    )
    if args.json:
        doc = _io.report("simulate", {"reports": [r.as_dict() for r in reports]})
        _emit(_io.dumps(doc))
        return EXIT_OK
    head = f"{'setting':<20}{'lower':>9}{'equal':>9}{'larger':>9}{'undec.':>9}"
    if args.mode == "anytime":
        head += f"{'n samples':>20}"
    lines = [head]
    for r in reports:
        f = r.frequencies
        row = f"{r.setting:<20}" + "".join(
            f"{f[k]:>9.4f}" for k in ("lower", "equal", "larger", "undecided")
        )
        if args.mode == "anytime":
            row += f"{f'{r.stop_mean:.0f} ({r.stop_std:.0f})':>20}"
        lines.append(row)
    b = reports[0].bounds
    t2 = "1 (no guarantee)" if b.type2 is None else f"{b.type2:.3f}"
    lines.append(
        f"{args.reps} reps, seed {args.seed}.  type I <= {b.type1_per_side:.3f} per side "
        f"({b.type1_two_sided:.3f} two-sided), type II <= {t2}, "
        f"type III <= {b.type3_per_direction:.3f}"
    )
    lines.append("(bounds for unit-range arms; see --json for every setting)")
    _emit("\n".join(lines) + "\n")
    return EXIT_OK


# -- bounds ------------------------------------------------------------------


def cmd_bounds(args) -> int:
    config = TestConfig(
        alpha=args.alpha, delta=args.delta, t0=args.t0, c=args.c,
        bounds_p=args.bounds_p, bounds_q=args.bounds_q, mode=args.mode,
        n=args.n, m=args.m,
    )
    if args.mode == "fixed" and (args.n is None or args.m is None):
        raise CliError("fixed mode needs --n and --m")
    b = error_bounds(config, c_t0_override=args.c_t0)
    doc = _io.report("bounds", {"config": config.as_dict(), "c_t0_override": args.c_t0,
                                "bounds": b.as_dict()})
    if args.json:
        _emit(_io.dumps(doc))
    else:
        lines = _bounds_lines(b.as_dict())
        if b.l_h_p is not None or b.l_h_q is not None:
            lines.append(f"L_H(P) = {b.l_h_p}, L_H(Q) = {b.l_h_q}")
        _emit("\n".join(lines) + "\n")
    return EXIT_OK


# -- plot --------------------------------------------------------------------


def cmd_plot(args) -> int:
    rows = []
    for path in args.inputs:
        records = read_records(path)
        check_records(records, args.bounds, path)
        stem = Path(path).stem
        for label, recs in (group_series(records, stem) or {stem: []}).items():
            ci = _interval_of([r.value for r in recs], args.bounds, args)
            values = [r.value for r in recs]
            mean = float(np.mean(values)) if values else 0.5 * (ci.lo + ci.hi)
            rows.append({"label": label, "lo": ci.lo, "hi": ci.hi, "mean": mean})
    if not rows:
        raise CliError("no series to plot")
    axis = args.bounds.as_tuple()
    if args.format == "svg":
        text = render_svg(rows, axis, title=args.title)
    else:
        text = render_ascii(rows, axis)
    if args.out:
        Path(args.out).write_bytes(text.encode("utf-8"))
    else:
        _emit(text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_common(p, *, schedule=False):
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--t0", type=int, default=1)
    p.add_argument("--method", choices=("newton", "bisection"), default="newton")
    if schedule:
        p.add_argument("--schedule", choices=sorted(SCHEDULES), default="anytime")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoverlap",
        description="Betting confidence intervals and overlap tests for bounded means.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", help="confidence interval of each series in a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--bounds", type=_bounds_arg, required=True, help="support as a,b")
    _add_common(p, schedule=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("compare", help="overlap test between two CSV files")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--mode", choices=("fixed", "anytime"), default="fixed")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--bounds-x", type=_bounds_arg, required=True)
    p.add_argument("--bounds-y", type=_bounds_arg, required=True)
    p.add_argument("--seed-order", type=int, default=None,
                   help="seeded random interleaving instead of alternation")
    p.add_argument("--stride", type=int, default=1)
    _add_common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("monitor", help="sequential test on 'P,<value>' lines from stdin")
    p.add_argument("--config", required=True, help="JSON file with the test parameters")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("simulate", help="Monte Carlo decision frequencies")
    p.add_argument("--setting", action="append", required=True,
                   help=f"one of {', '.join(SETTINGS)} or 'all' (repeatable)")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("fixed", "anytime"), default="anytime")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--max-samples", type=int, default=200_000)
    _add_common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="theoretical error bounds")
    p.add_argument("--mode", choices=("fixed", "anytime"), default="anytime")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--bounds-p", type=_bounds_arg, default=as_bounds((0.0, 1.0)))
    p.add_argument("--bounds-q", type=_bounds_arg, default=as_bounds((0.0, 1.0)))
    p.add_argument("--c-t0", type=float, default=None,
                   help="use this C_t0 instead of the one implied by the weights")
    _add_common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("plot", help="interval chart of one or more series")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--bounds", type=_bounds_arg, required=True)
    p.add_argument("--format", choices=("svg", "ascii"), default="svg")
    p.add_argument("--out", default=None)
    p.add_argument("--title", default=None)
    _add_common(p, schedule=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"evoverlap {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"evoverlap {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
