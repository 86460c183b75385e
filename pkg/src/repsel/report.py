"""Cascade run reports: one JSON-serializable record, rendered to text
from that same record so the two views can never drift apart."""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .cascade import CascadeRunRecord
from .metrics import CostModelInput, selection_flops
from .selector import SelectionConfig
from .trace import ActivationTrace


def _schema():
    with resources.files("repsel.schemas").joinpath("cascade_report.schema.json").open() as fh:
        return json.load(fh)


def build_report(
    trace: ActivationTrace,
    cfg: SelectionConfig,
    record: CascadeRunRecord,
    d_h: int | None = None,
    heads: int | None = None,
    attention_error: dict | None = None,
) -> dict:
    """Assemble the report document for one cascade run.

    The cost-model section projects the run's own mean inherited count
    into the FLOP formulas; the attention figure needs head geometry, so
    it is present only when d_h and heads are supplied.
    """
    per_layer = [
        {
            "layer": rec.layer,
            "r_independent": rec.r_independent,
            "r_cascade": rec.r_cascade,
            "jaccard_consecutive": rec.jaccard_consecutive,
            "jaccard_vs_independent": rec.jaccard_vs_independent,
            "adds": rec.adds,
            "removes": rec.removes,
            "turnover": rec.turnover,
            "gram_ops_independent": rec.gram_ops_independent,
            "gram_ops_cascade": rec.gram_ops_cascade,
        }
        for rec in record.per_layer
    ]

    L = len(record.per_layer)
    deep_first = L // 2
    deep = [r.turnover for r in record.per_layer[deep_first:] if r.turnover is not None]
    # r_bar: mean of the counts that actually get inherited (layers 0..L-2).
    inherited_counts = [r.r_cascade for r in record.per_layer[:-1]] or [
        record.per_layer[0].r_cascade
    ]
    r_bar = sum(inherited_counts) / len(inherited_counts)

    cost_inp = CostModelInput(
        L=L,
        T=trace.seq_len,
        d=trace.hidden_dim,
        d_h=d_h if d_h is not None else 1,
        h=heads if heads is not None else 1,
        r_bar=min(r_bar, trace.seq_len),
    )
    flops = selection_flops(cost_inp)
    cost_model = {
        "L": L,
        "T": trace.seq_len,
        "d": trace.hidden_dim,
        "r_bar": r_bar,
        "independent_flops": flops.independent,
        "cascade_flops": flops.cascade,
        "attention_compressed_flops": flops.attention_compressed
        if (d_h is not None and heads is not None)
        else None,
        "d_h": d_h,
        "h": heads,
    }

    report = {
        "config": {
            "tau": cfg.tau,
            "mode": cfg.comparison_mode.value,
            "trace": {
                "model": trace.model_name,
                "L": trace.num_layers,
                "T": trace.seq_len,
                "d": trace.hidden_dim,
            },
        },
        "per_layer": per_layer,
        "summary": {
            "total_gram_ops_independent": record.total_gram_ops_independent,
            "total_gram_ops_cascade": record.total_gram_ops_cascade,
            "savings": record.savings,
            "mean_jaccard_consecutive": (
                None
                if L < 2
                else record.mean_jaccard_consecutive
            ),
            "deep_band": {
                "first_layer": deep_first,
                "mean_turnover": (sum(deep) / len(deep)) if deep else None,
                "min_turnover": min(deep) if deep else None,
                "max_turnover": max(deep) if deep else None,
            },
        },
        "cost_model": cost_model,
        "attention_error": attention_error,
    }
    validate_report(report)
    return report


def validate_report(report: dict) -> None:
    jsonschema.validate(report, _schema())


def _fmt_pct(x, decimals=1):
    return "---" if x is None else f"{100.0 * x:.{decimals}f}%"


def _fmt_flops(x):
    return f"{x / 1e9:.1f} GFLOP" if x >= 5e7 else f"{x / 1e6:.2f} MFLOP"


def _fmt(x, spec=".3f"):
    return "---" if x is None else format(x, spec)


def render_text(report: dict) -> str:
    """Aligned plain-text tables derived from the JSON record."""
    cfg = report["config"]
    tr = cfg["trace"]
    lines = [
        f"trace: {tr['model']} (L={tr['L']}, T={tr['T']}, d={tr['d']})",
        f"tau={cfg['tau']:.2f} mode={cfg['mode']}",
        "",
        f"{'layer':>5} {'r_ind':>6} {'r_casc':>7} {'jaccard':>8} {'j_vs_ind':>9} "
        f"{'adds':>5} {'rem':>5} {'turnover':>9}",
    ]
    for rec in report["per_layer"]:
        lines.append(
            f"{rec['layer']:>5} {rec['r_independent']:>6} {rec['r_cascade']:>7} "
            f"{_fmt(rec['jaccard_consecutive']):>8} {_fmt(rec['jaccard_vs_independent']):>9} "
            f"{_fmt(rec['adds'], 'd'):>5} {_fmt(rec['removes'], 'd'):>5} "
            f"{_fmt_pct(rec['turnover']):>9}"
        )

    s = report["summary"]
    savings = 1.0 - s["total_gram_ops_cascade"] / s["total_gram_ops_independent"]
    band = s["deep_band"]
    lines += [
        "",
        f"gram ops: independent {s['total_gram_ops_independent']} "
        f"cascade {s['total_gram_ops_cascade']}  savings {_fmt_pct(savings)}",
        f"mean consecutive jaccard: {_fmt(s['mean_jaccard_consecutive'])}",
    ]
    if band["mean_turnover"] is not None:
        lines.append(
            f"deep-layer turnover (layers >= {band['first_layer']}): "
            f"mean {_fmt_pct(band['mean_turnover'])}, "
            f"range {_fmt_pct(band['min_turnover'])} to {_fmt_pct(band['max_turnover'])}"
        )
    cm = report["cost_model"]
    lines.append(
        f"selection cost: independent {_fmt_flops(cm['independent_flops'])}, "
        f"cascade {_fmt_flops(cm['cascade_flops'])} (r_bar={cm['r_bar']:.1f})"
    )
    if cm["attention_compressed_flops"] is not None:
        lines.append(
            f"compressed attention: {_fmt_flops(cm['attention_compressed_flops'])} "
            f"(d_h={cm['d_h']}, h={cm['h']})"
        )
    if report.get("attention_error"):
        ae = report["attention_error"]
        lines.append(
            f"attention error (head {ae['head']}): max {ae['max_error']:.3e}, "
            f"bound coverage {_fmt_pct(ae['hypothesis_coverage'])}"
        )
    return "\n".join(lines) + "\n"
