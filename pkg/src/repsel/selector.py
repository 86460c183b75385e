"""Per-layer representative selection over the token Gram structure.

A token is redundant when its max |cosine| against the comparison set
reaches 1 - tau^2; otherwise it is declared representative.  The scan
is sequential and token 0 is always representative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyRepSet
from .trace import LayerActivation, UnitRowActivation, row_normalize


class ComparisonMode(enum.Enum):
    """What a token is compared against during the sequential scan.

    ALL_EARLIER follows the selection rule verbatim; EARLIER_REPS_ONLY
    compares only against representatives chosen so far, which is the
    variant that guarantees every redundant token ends up within the
    threshold of some representative (and makes the depth cascade
    idempotent on unchanged activations).  Default is EARLIER_REPS_ONLY.
    """

    ALL_EARLIER = "all-earlier"
    EARLIER_REPS_ONLY = "reps-only"


@dataclass(frozen=True)
class SelectionConfig:
    tau: float = 0.30
    comparison_mode: ComparisonMode = ComparisonMode.EARLIER_REPS_ONLY

    def __post_init__(self):
        if not (0.0 < self.tau < 1.0):
            raise ValueError(f"tau must be in (0,1), got {self.tau}")

    @property
    def threshold(self) -> float:
        """Redundancy cutoff 1 - tau^2 on |cosine|."""
        return 1.0 - self.tau * self.tau


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric T x T cosine-similarity matrix (float64, exact mirror)."""

    data: np.ndarray

    @property
    def size(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class RepSet:
    """Representative token indices for one layer.

    gammas[t] records the max |cosine| token t saw at selection time,
    for every token (0.0 for token 0 by the empty-max convention).
    """

    indices: np.ndarray
    seq_len: int
    gammas: np.ndarray

    @property
    def size(self) -> int:
        return int(self.indices.shape[0])

    def member_mask(self) -> np.ndarray:
        mask = np.zeros(self.seq_len, dtype=bool)
        mask[self.indices] = True
        return mask


@dataclass(frozen=True)
class RepAssignment:
    """nearest[t] is the representative maximizing |G[t][s]|."""

    nearest: np.ndarray
    similarity: np.ndarray


def compute_gram(xhat: UnitRowActivation) -> GramMatrix:
    """Gram matrix of unit rows, computed once and mirrored exactly.

    Checks the structural invariants on construction: a unit diagonal and
    entries inside [-1, 1] (to 1e-6), which fail only if the input rows
    were not actually normalized.
    """
    data = np.asarray(xhat.data, dtype=np.float64)
    g = data @ data.T
    g = np.triu(g) + np.triu(g, 1).T  # exact symmetry, single source per entry
    if np.max(np.abs(np.diag(g) - 1.0)) > 1e-6 or np.max(np.abs(g)) > 1.0 + 1e-6:
        raise ValueError("Gram invariants violated: input rows are not unit-norm")
    return GramMatrix(data=g)


def select_independent(
    x: LayerActivation | np.ndarray, cfg: SelectionConfig
) -> tuple[RepSet, int]:
    """Full-Gram selection at one layer.

    Returns the representative set and the Gram-entry count T^2 charged
    to independent selection (the accounting unit for cost comparisons:
    one entry = d multiply-accumulates).
    """
    xhat = row_normalize(x)
    reps, gammas = kernels.selection_scan(
        xhat.data,
        cfg.threshold,
        reps_only=cfg.comparison_mode is ComparisonMode.EARLIER_REPS_ONLY,
    )
    T = xhat.data.shape[0]
    return RepSet(indices=reps, seq_len=T, gammas=gammas), T * T


def assign_nearest(g: GramMatrix, reps: RepSet) -> RepAssignment:
    """Map every token to its nearest representative by |cosine|.

    Ties break to the smallest representative index so results are
    platform-independent.
    """
    if reps.size == 0:
        raise EmptyRepSet("cannot assign tokens to an empty representative set")
    if reps.seq_len != g.size:
        raise DimensionMismatch(
            f"rep set is over T={reps.seq_len}, Gram is {g.size}x{g.size}"
        )
    cols = np.abs(g.data[:, reps.indices])
    # reps.indices is increasing and argmax takes the first max: smallest index wins.
    pick = np.argmax(cols, axis=1)
    nearest = reps.indices[pick]
    similarity = cols[np.arange(g.size), pick]
    return RepAssignment(nearest=nearest, similarity=similarity)
