"""Depth cascade: inherit the representative set from the previous layer
and revalidate it with two small Gram products instead of a full T x T one.

Per step: an r x r Gram among inherited representatives decides which of
them stay, then a (T - r) x r_valid cross-Gram decides which non-inherited
tokens have decorrelated enough to join.  Newly added tokens are
deliberately not cross-checked against each other; that conservatism is
what keeps the cascade from missing informative tokens.

Validation compares each inherited rep (in token-index order) against the
earlier reps that themselves survived.  Comparing against all earlier
inherited reps instead (the "all-inherited" rule) lets removals chain:
a rep can be dropped for correlating with a rep that was itself dropped,
leaving it covered by no surviving rep; the sequential rule makes the
coverage guarantee unconditional.  The chained variant is kept behind the
`validation` switch for comparison runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyRepSet
from .selector import RepSet, SelectionConfig, select_independent
from .trace import ActivationTrace, LayerActivation, row_normalize


@dataclass(frozen=True)
class CascadeStepResult:
    kept: np.ndarray
    added: np.ndarray
    removed: np.ndarray
    result: RepSet
    gram_entry_count: int
    turnover: float


@dataclass(frozen=True)
class CascadeLayerRecord:
    layer: int
    r_independent: int
    r_cascade: int
    jaccard_consecutive: float | None
    jaccard_vs_independent: float
    adds: int | None
    removes: int | None
    turnover: float | None
    gram_ops_independent: int
    gram_ops_cascade: int


@dataclass(frozen=True)
class CascadeRunRecord:
    per_layer: list[CascadeLayerRecord]

    @property
    def total_gram_ops_independent(self) -> int:
        return sum(rec.gram_ops_independent for rec in self.per_layer)

    @property
    def total_gram_ops_cascade(self) -> int:
        return sum(rec.gram_ops_cascade for rec in self.per_layer)

    @property
    def savings(self) -> float:
        return 1.0 - self.total_gram_ops_cascade / self.total_gram_ops_independent

    @property
    def mean_jaccard_consecutive(self) -> float:
        vals = [r.jaccard_consecutive for r in self.per_layer if r.jaccard_consecutive is not None]
        return float(np.mean(vals)) if vals else float("nan")


def jaccard(a: RepSet, b: RepSet) -> float:
    """|a n b| / |a u b| between two representative sets over the same T."""
    if a.seq_len != b.seq_len:
        raise DimensionMismatch(
            f"rep sets cover different sequence lengths {a.seq_len} != {b.seq_len}"
        )
    sa, sb = set(a.indices.tolist()), set(b.indices.tolist())
    return len(sa & sb) / len(sa | sb)


def cascade_step(
    x_next: LayerActivation | np.ndarray,
    inherited: RepSet,
    cfg: SelectionConfig,
    dedup_added: bool = False,
    validation: str = "sequential",
) -> CascadeStepResult:
    """Update an inherited representative set against the next layer.

    dedup_added additionally runs a sequential scan over the newly added
    tokens so mutually redundant newcomers collapse to one; off by
    default because the plain update adds them all.

    validation="sequential" (default) compares each inherited rep against
    earlier surviving reps only, so every removal is witnessed by a kept
    rep; "all-inherited" compares against all earlier inherited reps and
    admits chained removals.
    """
    if inherited.size == 0:
        raise EmptyRepSet("cascade requires a nonempty inherited set")
    if validation not in ("sequential", "all-inherited"):
        raise ValueError(f"unknown validation rule {validation!r}")
    xhat = row_normalize(x_next).data
    T = xhat.shape[0]
    if inherited.seq_len != T:
        raise DimensionMismatch(
            f"inherited set is over T={inherited.seq_len}, layer has T={T}"
        )
    thresh = cfg.threshold

    rep_idx = inherited.indices  # increasing token order
    rep_rows = xhat[rep_idx]
    if validation == "sequential":
        gam_rep, valid_mask = kernels.validate_sequential(rep_rows, thresh)
    else:
        gam_rep = kernels.earlier_rep_max(rep_rows)
        valid_mask = gam_rep < thresh
    kept = rep_idx[valid_mask]
    removed = rep_idx[~valid_mask]

    non_mask = np.ones(T, dtype=bool)
    non_mask[rep_idx] = False
    non_idx = np.flatnonzero(non_mask)
    gam_cross = kernels.cross_abs_max(xhat[non_idx], xhat[kept])
    added = non_idx[gam_cross < thresh]

    if dedup_added and added.size > 1:
        sub_reps, _ = kernels.selection_scan(xhat[added], thresh, reps_only=True)
        added = added[sub_reps]

    r = int(rep_idx.size)
    gram_entries = r * r + (T - r) * int(kept.size)

    gammas = np.zeros(T)
    gammas[rep_idx] = gam_rep
    gammas[non_idx] = gam_cross
    indices = np.sort(np.concatenate([kept, added])).astype(np.int64)
    result = RepSet(indices=indices, seq_len=T, gammas=gammas)

    turnover = (int(added.size) + int(removed.size)) / r
    return CascadeStepResult(
        kept=kept,
        added=added,
        removed=removed,
        result=result,
        gram_entry_count=gram_entries,
        turnover=turnover,
    )


def run_cascade(trace: ActivationTrace, cfg: SelectionConfig) -> CascadeRunRecord:
    """Cascade over a whole trace, with an independent selection at every
    layer alongside for comparison (it does not feed the cascade)."""
    trace.validate()
    T = trace.seq_len

    records = []
    indep_prev = None
    current = None
    for layer in trace.layers:
        indep, indep_ops = select_independent(layer, cfg)
        if layer.layer_index == 0:
            current = indep
            records.append(
                CascadeLayerRecord(
                    layer=0,
                    r_independent=indep.size,
                    r_cascade=current.size,
                    jaccard_consecutive=None,
                    jaccard_vs_independent=jaccard(current, indep),
                    adds=None,
                    removes=None,
                    turnover=None,
                    gram_ops_independent=indep_ops,
                    gram_ops_cascade=T * T,
                )
            )
        else:
            step = cascade_step(layer, current, cfg)
            current = step.result
            records.append(
                CascadeLayerRecord(
                    layer=layer.layer_index,
                    r_independent=indep.size,
                    r_cascade=current.size,
                    jaccard_consecutive=jaccard(indep_prev, indep),
                    jaccard_vs_independent=jaccard(current, indep),
                    adds=int(step.added.size),
                    removes=int(step.removed.size),
                    turnover=step.turnover,
                    gram_ops_independent=indep_ops,
                    gram_ops_cascade=step.gram_entry_count,
                )
            )
        indep_prev = indep
    return CascadeRunRecord(per_layer=records)
