"""Command-line front end: ``discord-dyn sweep|predict|curve|verify``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dynamics as dy
from . import verify as vf
from .bellstate import BellDiagonalState
from .channels import ChannelKind, check_pair
from .errors import DiscordDynError, OrderingViolation, UnsupportedPair
from .measures import TDD
from .output import fmt, line_plot, render_csv, write_atomic

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_PAIR, EXIT_ORDER = 0, 1, 2, 3, 4
DEFAULT_D = "0.3,-0.4,0.56"
CHANNELS = [k.value for k in ChannelKind]
SCP_HEADER = ["kind", "measure", "index", "predicted", "detected", "abs_diff",
              "p_start", "p_end", "duration", "predicted_duration"]
PREDICTION_COLUMNS = ("predicted", "abs_diff", "predicted_duration")


class ConfigError(DiscordDynError, ValueError):
    pass


def _triple(text: str) -> BellDiagonalState:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--d expects three comma-separated numbers, got {text!r}") from None
    if len(vals) != 3:
        raise ConfigError(f"--d expects three comma-separated numbers, got {text!r}")
    return BellDiagonalState(*vals)


def _rounds(text: str) -> list[int]:
    try:
        ns = [int(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--n expects positive integers, got {text!r}") from None
    if not ns or min(ns) < 1:
        raise ConfigError(f"--n expects positive integers, got {text!r}")
    return ns


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discord-dyn",
        description="Quantum discord, Bures and trace distance discord of Bell-diagonal states under decoherence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_channel=True):
        if need_channel:
            p.add_argument("--channel-a", required=True, choices=CHANNELS)
            p.add_argument("--channel-b", choices=CHANNELS)
            p.add_argument("--d", default=DEFAULT_D, help="initial correlations d1,d2,d3 (default %(default)s)")
            p.add_argument("--gamma", type=float, default=1.0, help="decoherence rate on A (default 1)")
        p.add_argument("--out", help="output path prefix (default: the command name)")

    sp = sub.add_parser("sweep", help="evaluate the measures over p (or p x q)")
    common(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--gamma-b", type=float)
    sp.add_argument("--format", choices=["csv", "svg", "both"], default="csv")

    pp = sub.add_parser("predict", help="closed-form sudden-change points and freezing times")
    common(pp)
    pp.add_argument("--n", default="1", help="round count or comma list")

    cp = sub.add_parser("curve", help="two-sided sudden-change curves on the p-q plane")
    common(cp)
    cp.add_argument("--n", default="1", help="round count or comma list")
    cp.add_argument("--samples", type=int, default=101)
    cp.add_argument("--format", choices=["csv", "svg", "both"], default="csv")

    vp = sub.add_parser("verify", help="run the closed-form, oracle and axiom checks")
    common(vp, need_channel=False)
    vp.add_argument("--seed", type=int, default=42)
    vp.add_argument("--states", type=int, default=50)
    vp.add_argument("--samples", type=int, default=10_000)
    return parser


def _out(args) -> Path:
    return Path(args.out or args.command)


def _meta(args, d0) -> list[str]:
    meta = [f"command={args.command}", f"channel_a={args.channel_a}"]
    if args.channel_b:
        meta.append(f"channel_b={args.channel_b}")
    meta.append("d0=" + ",".join(fmt(v) for v in d0.as_array()))
    return meta


# --------------------------------------------------------------------------
# sweep


def _sweep_rows_1d(r):
    for k in range(len(r.p)):
        row = [r.p[k]] + [r.values[m][k] for m in dy.ALL_MEASURES]
        row += [r.branches[m][k] for m in dy.ALL_MEASURES] + list(r.coefficients[k])
        yield row


def _sweep_rows_2d(r):
    for i in range(len(r.p)):
        for j in range(len(r.q)):
            row = [r.p[i], r.q[j]] + [r.values[m][i, j] for m in dy.ALL_MEASURES]
            row += [r.branches[m][i, j] for m in dy.ALL_MEASURES] + list(r.coefficients[i, j])
            yield row


def _report_rows_1d(r, gamma):
    cfg = r.config
    reps = dy.scp_reports(r, gamma)
    have_pred = all(rep.predicted is not None for rep in reps)
    rows = []
    for rep in reps:
        pred = rep.predicted or []
        for k in range(max(len(pred), len(rep.detected))):
            p_ = pred[k] if k < len(pred) else None
            d_ = rep.detected[k] if k < len(rep.detected) else None
            diff = abs(p_ - d_) if p_ is not None and d_ is not None else None
            rows.append(["scp", rep.measure.value, k + 1, p_, d_, diff, None, None, None, None])
        if rep.measure is TDD:
            for k, ((lo, hi), dur) in enumerate(zip(rep.freeze, rep.freeze_durations)):
                want = None
                if have_pred and cfg.channel_a in (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP):
                    want = dy.freeze_interval(cfg.channel_a, cfg.d0, cfg.n, gamma)
                rows.append(["freeze", "tdd", k + 1, None, None, None, lo, hi, dur, want])
            if cfg.channel_a is ChannelKind.GADC and len(rep.detected) == 2:
                lo, hi = rep.detected
                gap = float(dy.time_at(hi, gamma) - dy.time_at(lo, gamma))
                want = dy.scp_gap_gadc(cfg.d0, cfg.n, gamma) if have_pred else None
                rows.append(["scp_gap", "tdd", 1, None, None, None, lo, hi, gap, want])
    for k, p_ in enumerate(reps[0].revivals):
        rows.append(["revival", "all", k + 1, None, p_, None, None, None, None, None])
    return have_pred, rows


def run_sweep(args) -> int:
    d0 = _triple(args.d)
    kind_a = ChannelKind(args.channel_a)
    kind_b = ChannelKind(args.channel_b) if args.channel_b else None
    cfg = dy.SweepConfig(kind_a, d0, args.n, args.grid, kind_b, args.gamma,
                         args.gamma_b if args.gamma_b is not None else (args.gamma if kind_b else None))
    out = _out(args)
    meta = _meta(args, d0) + [f"n={cfg.n}", f"grid={cfg.points()}", f"gamma={fmt(args.gamma)}"]
    cols = ["qd", "bdd", "tdd", "branch_qd", "branch_bdd", "branch_tdd", "d1p", "d2p", "d3p"]
    files = {}
    if cfg.two_sided:
        r = dy.sweep_two_sided(cfg)
        if args.format in ("csv", "both"):
            files[out.with_name(out.name + ".csv")] = render_csv(["p", "q"] + cols, _sweep_rows_2d(r), meta)
            rows = []
            for m in dy.ALL_MEASURES:
                edges = dy.detect_branch_changes_2d(r, m)
                rows.append(["branch_edges", m.value, len(edges)])
            files[out.with_name(out.name + ".scp.csv")] = render_csv(["kind", "measure", "count"], rows, meta)
        series = [(m.value + " (q=0)", r.p, r.values[m][:, 0]) for m in dy.ALL_MEASURES]
    else:
        r = dy.sweep_one_sided(cfg)
        if args.format in ("csv", "both"):
            files[out.with_name(out.name + ".csv")] = render_csv(["p"] + cols, _sweep_rows_1d(r), meta)
            have_pred, rows = _report_rows_1d(r, args.gamma)
            header = SCP_HEADER
            if not have_pred:
                print("warning: initial state violates |d1| < |d2| < |d3|; "
                      "prediction columns omitted", file=sys.stderr)
                keep = [k for k, h in enumerate(SCP_HEADER) if h not in PREDICTION_COLUMNS]
                header = [SCP_HEADER[k] for k in keep]
                rows = [[row[k] for k in keep] for row in rows]
            files[out.with_name(out.name + ".scp.csv")] = render_csv(header, rows, meta)
        series = [(m.value, r.p, r.values[m]) for m in dy.ALL_MEASURES]
    if args.format in ("svg", "both"):
        title = f"{kind_a.value}" + (f" / {kind_b.value}" if kind_b else "") + f", n={cfg.n}"
        files[out.with_name(out.name + ".svg")] = line_plot(series, "p", "measure", title)
    write_atomic(files)
    return EXIT_OK


# --------------------------------------------------------------------------
# predict


def run_predict(args) -> int:
    d0 = _triple(args.d)
    kind = ChannelKind(args.channel_a)
    if args.channel_b:
        raise ConfigError("predict covers one-sided channels; use curve for pairs")
    dy.check_ordering(d0)
    rows = []
    for n in _rounds(args.n):
        for m in dy.ALL_MEASURES:
            for k, p in enumerate(dy.predict_scp_one_sided(kind, m, d0, n)):
                rows.append(["scp", m.value, n, k + 1, p, float(dy.time_at(p, args.gamma))])
        if kind in (ChannelKind.BIT_FLIP, ChannelKind.BIT_PHASE_FLIP):
            rows.append(["freeze_duration", "tdd", n, 1, None, dy.freeze_interval(kind, d0, n, args.gamma)])
        if kind is ChannelKind.GADC:
            rows.append(["scp_gap", "tdd", n, 1, None, dy.scp_gap_gadc(d0, n, args.gamma)])
    out = _out(args)
    meta = _meta(args, d0) + [f"gamma={fmt(args.gamma)}"]
    write_atomic({out.with_name(out.name + ".csv"):
                  render_csv(["quantity", "measure", "n", "index", "p", "time"], rows, meta)})
    return EXIT_OK


# --------------------------------------------------------------------------
# curve


def run_curve(args) -> int:
    d0 = _triple(args.d)
    kind_a = ChannelKind(args.channel_a)
    if not args.channel_b:
        raise ConfigError("curve needs --channel-b")
    kind_b = ChannelKind(args.channel_b)
    check_pair(kind_a, kind_b)
    ns = _rounds(args.n)
    dy.check_ordering(d0)
    rows, meta, series = [], _meta(args, d0), []
    for n in ns:
        q0 = dy.branch_split_q0(kind_a, kind_b, d0, n)
        if q0 is not None:
            meta.append(f"q0 n={n} value={fmt(q0)}")
        for m in dy.ALL_MEASURES:
            for c in dy.constraint_curve_two_sided(kind_a, kind_b, m, d0, n, args.samples):
                if c.split is not None:
                    meta.append(f"split {c.name} n={n} value={fmt(c.split)}")
                for (p, q), ok in zip(c.points, c.verified):
                    rows.append([c.name, m.value, n, f"d{c.crossing[0]}=d{c.crossing[1]}",
                                 c.exponent_p, c.exponent_q, c.rhs, c.free, p, q,
                                 "skipped" if ok is None else ok])
                series.append((f"{c.name} n={n}", c.points[:, 0], c.points[:, 1]))
    if not rows:
        meta.append(f"no sudden-change curves: no two components cross for {kind_a.value}-{kind_b.value}")
    header = ["curve", "measure", "n", "crossing", "exponent_p", "exponent_q", "rhs", "free", "p", "q", "verified"]
    out = _out(args)
    files = {}
    if args.format in ("csv", "both"):
        files[out.with_name(out.name + ".csv")] = render_csv(header, rows, meta)
    if args.format in ("svg", "both"):
        files[out.with_name(out.name + ".svg")] = line_plot(
            series, "p", "q", f"{kind_a.value} / {kind_b.value}", ylim=(0.0, 1.0))
    write_atomic(files)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def run_verify(args) -> int:
    if args.states < 1 or args.samples < 1:
        raise ConfigError("--states and --samples must be positive")
    checks = vf.run_all(args.seed, args.states, args.samples)
    rows = [[c.name, c.max_deviation, c.tolerance, "pass" if c.passed else "fail"] for c in checks]
    meta = ["command=verify", f"seed={args.seed}", f"states={args.states}", f"samples={args.samples}"]
    out = _out(args)
    write_atomic({out.with_name(out.name + ".csv"):
                  render_csv(["check", "max_deviation", "tolerance", "result"], rows, meta)})
    failed = [c.name for c in checks if not c.passed]
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"sweep": run_sweep, "predict": run_predict, "curve": run_curve, "verify": run_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UnsupportedPair as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PAIR
    except OrderingViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ORDER
    except (DiscordDynError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
