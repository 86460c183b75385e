"""Command-line surface.

Subcommands: select, cascade, costmodel, synth, report.
Exit codes: 0 success, 2 usage error, 3 data/format error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .cascade import run_cascade
from .errors import FormatError, RepselError, ZeroNormRow
from .metrics import CostModelInput, scaling_table, selection_flops
from .report import build_report, render_text, validate_report
from .selector import ComparisonMode, SelectionConfig, select_independent
from .synth import SynthConfig, SynthMode, generate_trace
from .trace import read_trace, write_trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

TABLE8_DEFAULT_ROWS = "512:240,1024:280,2048:320,4096:380,8192:450"


def _add_common(p):
    p.add_argument("--tau", type=float, default=0.30, help="Gram threshold (default 0.30)")
    p.add_argument(
        "--mode",
        choices=[m.value for m in ComparisonMode],
        default=ComparisonMode.EARLIER_REPS_ONLY.value,
        help="comparison set for the sequential scan (default reps-only)",
    )
    p.add_argument("--json", dest="json_path", default=None, help="also write JSON here")


def _selection_config(args) -> SelectionConfig:
    return SelectionConfig(tau=args.tau, comparison_mode=ComparisonMode(args.mode))


def cmd_select(args) -> int:
    trace = read_trace(args.trace)
    cfg = _selection_config(args)
    if not (0 <= args.layer < trace.num_layers):
        print(f"error: layer {args.layer} outside 0..{trace.num_layers - 1}", file=sys.stderr)
        return EXIT_USAGE
    reps, _ = select_independent(trace.layers[args.layer], cfg)
    T = trace.seq_len
    r = reps.size
    print(
        f"layer {args.layer}: r={r}  r/T={r / T:.3f}  compression={T / r:.1f}x  "
        f"(T={T}, tau={cfg.tau:.2f}, mode={cfg.comparison_mode.value})"
    )
    if args.json_path:
        doc = {
            "tau": cfg.tau,
            "mode": cfg.comparison_mode.value,
            "layer": args.layer,
            "T": T,
            "r": r,
            "ratio": r / T,
            "compression": T / r,
            "indices": reps.indices.tolist(),
            "gammas": reps.gammas.tolist(),
        }
        with open(args.json_path, "w") as fh:
            json.dump(doc, fh, indent=2)
    return EXIT_OK


def cmd_cascade(args) -> int:
    trace = read_trace(args.trace)
    cfg = _selection_config(args)
    record = run_cascade(trace, cfg)
    report = build_report(trace, cfg, record, d_h=args.d_h, heads=args.heads)
    sys.stdout.write(render_text(report))
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(report, fh, indent=2)
    return EXIT_OK


def cmd_costmodel(args) -> int:
    inp = CostModelInput(
        L=args.L, T=args.T, d=args.d, d_h=args.d_h, h=args.heads, r_bar=args.r_bar
    )
    flops = selection_flops(inp)
    print(
        f"selection FLOPs (L={inp.L}, T={inp.T}, d={inp.d}, r_bar={inp.r_bar:g}):"
    )
    print(f"  independent: {flops.independent}  ({flops.independent / 1e9:.1f} GFLOP)")
    print(f"  cascade:     {flops.cascade}  ({flops.cascade / 1e9:.1f} GFLOP)")
    print(
        f"  compressed attention (d_h={inp.d_h}, h={inp.h}): "
        f"{flops.attention_compressed}  ({flops.attention_compressed / 1e9:.1f} GFLOP)"
    )

    rows = []
    for part in args.scaling_rows.split(","):
        t_str, r_str = part.split(":")
        rows.append((int(t_str), float(r_str)))
    table = scaling_table(args.L, rows)
    print(f"\nscaling projection (L={args.L}):")
    print(
        f"{'T':>7} {'r_bar':>7} {'T/r':>6} {'speedup':>8} "
        f"{'savings(asym)':>14} {'savings(exact)':>15}"
    )
    for row in table:
        print(
            f"{row.T:>7} {row.r_bar_estimate:>7g} {row.ratio_T_over_r:>6.1f} "
            f"{row.selection_speedup:>7.1f}x {100 * row.savings_asymptotic:>13.1f}% "
            f"{100 * row.savings_exact:>14.1f}%"
        )
    if args.json_path:
        doc = {
            "input": {"L": inp.L, "T": inp.T, "d": inp.d, "d_h": inp.d_h,
                      "h": inp.h, "r_bar": inp.r_bar},
            "flops": {
                "independent": flops.independent,
                "cascade": flops.cascade,
                "attention_compressed": flops.attention_compressed,
            },
            "scaling": [
                {
                    "T": row.T,
                    "r_bar_estimate": row.r_bar_estimate,
                    "ratio_T_over_r": row.ratio_T_over_r,
                    "savings_asymptotic": row.savings_asymptotic,
                    "savings_exact": row.savings_exact,
                    "selection_speedup": row.selection_speedup,
                }
                for row in table
            ],
        }
        with open(args.json_path, "w") as fh:
            json.dump(doc, fh, indent=2)
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        T=args.T,
        d=args.d,
        L=args.L,
        lambda_block=args.lambda_block,
        num_clusters=args.clusters,
        cluster_spread=args.spread,
        renormalize=args.renormalize,
        seed=args.seed,
        mode=SynthMode(args.mode),
    )
    trace = generate_trace(cfg)
    write_trace(trace, args.out)
    print(
        f"wrote {args.out}: mode={cfg.mode.value} T={cfg.T} d={cfg.d} L={cfg.L} "
        f"seed={cfg.seed}"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    with open(args.json_in) as fh:
        report = json.load(fh)
    validate_report(report)
    sys.stdout.write(render_text(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repsel",
        description="Representative-token selection, depth cascade, and cost models",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="independent selection at one layer of a trace")
    p.add_argument("trace", help="trace file")
    p.add_argument("--layer", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("cascade", help="cascade over a trace and report per-layer stats")
    p.add_argument("trace", help="trace file")
    _add_common(p)
    p.add_argument("--d-h", dest="d_h", type=int, default=None,
                   help="head dim for the attention cost line (optional)")
    p.add_argument("--heads", type=int, default=None,
                   help="head count for the attention cost line (optional)")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("costmodel", help="evaluate the selection/attention cost formulas")
    p.add_argument("--L", type=int, default=28)
    p.add_argument("--T", type=int, default=512)
    p.add_argument("--d", type=int, default=4096)
    p.add_argument("--d-h", dest="d_h", type=int, default=256)
    p.add_argument("--heads", type=int, default=16)
    p.add_argument("--r-bar", dest="r_bar", type=float, default=240)
    p.add_argument(
        "--scaling-rows",
        default=TABLE8_DEFAULT_ROWS,
        help='comma list of "T:r_bar" pairs for the scaling projection',
    )
    p.add_argument("--json", dest="json_path", default=None)
    p.set_defaults(func=cmd_costmodel)

    p = sub.add_parser("synth", help="generate a synthetic trace file")
    p.add_argument("--mode", choices=[m.value for m in SynthMode],
                   default=SynthMode.RESIDUAL_SMOOTH.value)
    p.add_argument("--T", type=int, default=64)
    p.add_argument("--d", type=int, default=16)
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--lambda", dest="lambda_block", type=float, default=0.05)
    p.add_argument("--clusters", type=int, default=4)
    p.add_argument("--spread", type=float, default=0.1)
    p.add_argument("--renormalize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render a saved cascade JSON report as text")
    p.add_argument("json_in", help="report JSON written by `cascade --json`")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ZeroNormRow, OSError, json.JSONDecodeError) as exc:
        # zero-norm rows are degenerate input data, same class as a bad file
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RepselError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
