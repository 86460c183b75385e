"""Reference attention, compressed attention over a representative set,
and the associated per-head output-error bound.

Unmasked single-layer attention only: the compression story is about the
token axis, so causal masking and KV caching stay out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyRepSet, PowerIterationDivergence
from .selector import RepAssignment, RepSet
from .trace import LayerActivation


@dataclass(frozen=True)
class AttentionWeights:
    """Per-head projection matrices, each of shape (num_heads, d, head_dim)."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray

    @property
    def num_heads(self) -> int:
        return self.w_q.shape[0]

    @property
    def head_dim(self) -> int:
        return self.w_q.shape[2]


@dataclass(frozen=True)
class AttentionOutput:
    data: np.ndarray  # T x head_dim


def softmax_rows(scores: np.ndarray) -> np.ndarray:
    """Row softmax with max subtraction for stability."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _project(x, w: AttentionWeights, head: int):
    data = np.asarray(x.data if isinstance(x, LayerActivation) else x, dtype=np.float64)
    if not 0 <= head < w.num_heads:
        raise DimensionMismatch(f"head {head} outside 0..{w.num_heads - 1}")
    if data.shape[1] != w.w_q.shape[1]:
        raise DimensionMismatch(
            f"activation d={data.shape[1]} vs weights d={w.w_q.shape[1]}"
        )
    q = data @ w.w_q[head]
    k = data @ w.w_k[head]
    v = data @ w.w_v[head]
    return data, q, k, v


def full_attention(x, w: AttentionWeights, head: int) -> AttentionOutput:
    """Exact softmax(QK^T / sqrt(d_h)) V for one head."""
    _, q, k, v = _project(x, w, head)
    probs = softmax_rows(q @ k.T / math.sqrt(w.head_dim))
    return AttentionOutput(data=probs @ v)


def compressed_attention(
    x, w: AttentionWeights, reps: RepSet, assign: RepAssignment, head: int
) -> AttentionOutput:
    """Attention restricted to representative rows; each redundant token
    copies the output row of its nearest representative."""
    if reps.size == 0:
        raise EmptyRepSet("compressed attention needs at least one representative")
    data, q, k, v = _project(x, w, head)
    idx = reps.indices
    probs = softmax_rows(q[idx] @ k[idx].T / math.sqrt(w.head_dim))
    rep_out = probs @ v[idx]

    pos = np.full(data.shape[0], -1, dtype=np.int64)
    pos[idx] = np.arange(idx.size)
    out = rep_out[pos[assign.nearest]]
    return AttentionOutput(data=out)


def spectral_norm(m: np.ndarray, tol: float = 1e-6, max_iter: int = 200) -> float:
    """Largest singular value by power iteration on m^T m.

    Deterministic start vector; converges to relative tolerance `tol`
    or stops at `max_iter`.  Raises PowerIterationDivergence when the
    input (or an iterate) is non-finite.
    """
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise PowerIterationDivergence("weight matrix has non-finite entries")
    v = np.random.default_rng(0).standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    sigma_prev = 0.0
    for _ in range(max_iter):
        u = m @ v
        sigma = np.linalg.norm(u)
        if not np.isfinite(sigma):
            raise PowerIterationDivergence("power iteration produced non-finite values")
        if sigma == 0.0:
            return 0.0
        v = m.T @ u
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return float(sigma)
        v /= nv
        if abs(sigma - sigma_prev) <= tol * sigma:
            return float(sigma)
        sigma_prev = sigma
    return float(sigma_prev)


def attention_error_bound(
    tau: float, w: AttentionWeights, k_frobenius: float, x_norm: float, head: int
) -> float:
    """Per-token output error bound for a redundant token whose normalized
    distance to its nearest representative is at most tau:

        tau * (||W_Q||_2 ||K||_F / sqrt(d_h) + ||W_V||_2) * ||x_t||
    """
    sq = spectral_norm(w.w_q[head])
    sv = spectral_norm(w.w_v[head])
    return tau * (sq * k_frobenius / math.sqrt(w.head_dim) + sv) * x_norm


def empirical_attention_error(
    x, w: AttentionWeights, reps: RepSet, assign: RepAssignment, head: int
) -> np.ndarray:
    """Per-token Euclidean distance between full and compressed outputs."""
    full = full_attention(x, w, head).data
    comp = compressed_attention(x, w, reps, assign, head).data
    return np.linalg.norm(full - comp, axis=1)
