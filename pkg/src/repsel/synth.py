"""Synthetic activation traces with controllable depth coherence, plus the
pairwise persistence oracle used to check that near-duplicate tokens stay
near-duplicates across a layer.

Three generator modes:

* RESIDUAL_SMOOTH: clustered unit rows evolved by x <- x + lambda * F(x),
  where F is a frozen per-layer random linear map of unit spectral norm
  followed by tanh.  F is 1-Lipschitz, so each block expands pairwise
  distances by at most 1 + lambda (before the optional renormalization).
* CONSTANT: every layer equals layer 0.
* OPT_COLLAPSE: layer 0 is T near-orthogonal rows, layer 1 collapses all
  tokens onto one shared direction, and later layers rotate a growing
  subset back out to private directions (the learned-positional-embedding
  collapse shape).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import AllPairsDegenerate, ZeroNormRow
from .trace import ActivationTrace, LayerActivation


class SynthMode(enum.Enum):
    RESIDUAL_SMOOTH = "residual-smooth"
    OPT_COLLAPSE = "opt-collapse"
    CONSTANT = "constant"


@dataclass(frozen=True)
class SynthConfig:
    T: int
    d: int
    L: int
    lambda_block: float = 0.05
    num_clusters: int = 4
    cluster_spread: float = 0.1
    renormalize: bool = True
    seed: int = 0
    mode: SynthMode = SynthMode.RESIDUAL_SMOOTH

    def __post_init__(self):
        if min(self.T, self.d, self.L) < 1:
            raise ValueError("T, d, L must be >= 1")
        if not (1 <= self.num_clusters <= self.T):
            raise ValueError(f"need 1 <= num_clusters <= T, got {self.num_clusters}")
        if self.lambda_block < 0 or not np.isfinite(self.lambda_block):
            raise ValueError("lambda_block must be finite and >= 0")
        if self.cluster_spread < 0:
            raise ValueError("cluster_spread must be >= 0")
        if self.mode is SynthMode.OPT_COLLAPSE and self.T > self.d:
            raise ValueError(
                "opt-collapse needs T <= d to place T near-orthogonal rows"
            )


@dataclass(frozen=True)
class PersistenceCheck:
    pair: tuple[int, int]
    condition_lhs: float
    condition_rhs: float
    condition_holds: bool
    redundant_next: bool


def _unit(v):
    return v / np.linalg.norm(v)


def _tangent_jitter(rng, rows, spread):
    """Perturb unit rows along random tangent directions, staying on the sphere."""
    if spread == 0:
        return rows
    noise = rng.standard_normal(rows.shape)
    noise -= (np.sum(noise * rows, axis=1, keepdims=True)) * rows
    norms = np.linalg.norm(noise, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    out = rows + spread * noise / norms
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def _clustered_layer(rng, cfg: SynthConfig) -> np.ndarray:
    centers = rng.standard_normal((cfg.num_clusters, cfg.d))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    assignment = np.arange(cfg.T) % cfg.num_clusters
    return _tangent_jitter(rng, centers[assignment].copy(), cfg.cluster_spread)


def _residual_smooth(rng, cfg: SynthConfig) -> list[np.ndarray]:
    x = _clustered_layer(rng, cfg)
    layers = [x]
    for _ in range(1, cfg.L):
        a = rng.standard_normal((cfg.d, cfg.d))
        a /= np.linalg.norm(a, ord=2)  # unit spectral norm
        prev = layers[-1]
        nxt = prev + cfg.lambda_block * np.tanh(prev @ a)
        if cfg.renormalize:
            prev_norms = np.linalg.norm(prev, axis=1, keepdims=True)
            nxt = nxt / np.linalg.norm(nxt, axis=1, keepdims=True) * prev_norms
        layers.append(nxt)
    return layers


def _opt_collapse(rng, cfg: SynthConfig) -> list[np.ndarray]:
    # Orthonormal private directions, one per token.
    q, _ = np.linalg.qr(rng.standard_normal((cfg.d, cfg.T)))
    frame = q.T
    shared = _unit(rng.standard_normal(cfg.d))
    # Private directions orthogonal to the shared one for clean rotations.
    v = frame - np.outer(frame @ shared, shared)
    v /= np.linalg.norm(v, axis=1, keepdims=True)

    layers = [_tangent_jitter(rng, frame.copy(), cfg.cluster_spread)]
    for layer in range(1, cfg.L):
        rows = np.tile(shared, (cfg.T, 1))
        if cfg.L > 2:
            n_diverse = int(cfg.T * (layer - 1) / (cfg.L - 1))
        else:
            n_diverse = 0
        if n_diverse:
            rows[:n_diverse] = v[:n_diverse]
        layers.append(_tangent_jitter(rng, rows, cfg.cluster_spread))
    return layers


def generate_trace(cfg: SynthConfig) -> ActivationTrace:
    """Deterministic trace for a given config; same seed, same bits."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.mode is SynthMode.RESIDUAL_SMOOTH:
        raw = _residual_smooth(rng, cfg)
    elif cfg.mode is SynthMode.CONSTANT:
        first = _clustered_layer(rng, cfg)
        raw = [first] + [first.copy() for _ in range(cfg.L - 1)]
    else:
        raw = _opt_collapse(rng, cfg)
    layers = [LayerActivation(layer_index=i, data=x) for i, x in enumerate(raw)]
    return ActivationTrace(
        model_name=f"synth-{cfg.mode.value}-seed{cfg.seed}",
        num_layers=cfg.L,
        seq_len=cfg.T,
        hidden_dim=cfg.d,
        layers=layers,
    ).validate()


def persistence_check(
    x_l: LayerActivation | np.ndarray,
    x_next: LayerActivation | np.ndarray,
    pair: tuple[int, int],
    lipschitz: float,
    tau: float,
) -> PersistenceCheck:
    """Evaluate, for one token pair, whether the layer-l closeness premise
    that guarantees redundancy at layer l+1 holds, and whether the pair
    actually is redundant at layer l+1.

    Premise: lipschitz * ||x_s - x_t|| (at layer l), divided by the
    smaller of the two next-layer norms, falls below sqrt(2) * tau (the
    chord length equivalent to cosine > 1 - tau^2).
    """
    s, t = pair
    if s == t:
        raise ValueError("pair must be two distinct tokens")
    a = np.asarray(x_l.data if isinstance(x_l, LayerActivation) else x_l, dtype=np.float64)
    b = np.asarray(x_next.data if isinstance(x_next, LayerActivation) else x_next, dtype=np.float64)
    norms_next = (np.linalg.norm(b[s]), np.linalg.norm(b[t]))
    if min(norms_next) < 1e-12 or min(np.linalg.norm(a[s]), np.linalg.norm(a[t])) < 1e-12:
        raise ZeroNormRow(s if np.linalg.norm(b[s]) < 1e-12 else t)

    lhs = lipschitz * np.linalg.norm(a[s] - a[t]) / min(norms_next)
    rhs = np.sqrt(2.0) * tau
    cos_next = float(b[s] @ b[t] / (norms_next[0] * norms_next[1]))
    return PersistenceCheck(
        pair=(s, t),
        condition_lhs=float(lhs),
        condition_rhs=float(rhs),
        condition_holds=bool(lhs < rhs),
        redundant_next=bool(cos_next > 1.0 - tau * tau),
    )


def estimate_lipschitz(x_l, x_next) -> float:
    """Max pairwise expansion ratio between consecutive layers.

    This is an empirical lower bound on the true block Lipschitz
    constant, but it is exact as the max over the token set itself,
    which is what the persistence oracle quantifies over.  Pairs with
    layer-l distance below 1e-9 are skipped.
    """
    a = np.asarray(x_l.data if isinstance(x_l, LayerActivation) else x_l, dtype=np.float64)
    b = np.asarray(x_next.data if isinstance(x_next, LayerActivation) else x_next, dtype=np.float64)
    if a.shape[0] < 2:
        raise AllPairsDegenerate("need at least two tokens")
    iu = np.triu_indices(a.shape[0], k=1)
    d_l = np.linalg.norm(a[iu[0]] - a[iu[1]], axis=1)
    d_n = np.linalg.norm(b[iu[0]] - b[iu[1]], axis=1)
    ok = d_l >= 1e-9
    if not np.any(ok):
        raise AllPairsDegenerate("all token pairs coincide at layer l")
    return float(np.max(d_n[ok] / d_l[ok]))
