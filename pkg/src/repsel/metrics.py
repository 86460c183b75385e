"""Cost accounting for selection strategies.

Two units appear and must not be mixed:

* Gram operations: one entry of a Gram or cross-Gram matrix (d
  multiply-accumulates).  Independent selection charges L*T^2 entries.
* FLOPs: Gram entries times d for selection; the compressed-attention
  figure counts both the score and the value matmul at 2 FLOPs per
  multiply-accumulate, i.e. 4 r^2 d_h per head per layer.

All arithmetic stays in exact integers when the inputs are integers.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CostModelInput:
    L: int
    T: int
    d: int
    d_h: int
    h: int
    r_bar: float
    r_sequence: tuple | None = None

    def __post_init__(self):
        if min(self.L, self.T, self.d, self.d_h, self.h) < 1 or self.r_bar <= 0:
            raise ValueError("all cost-model parameters must be positive")
        if self.r_bar > self.T:
            raise ValueError(f"r_bar={self.r_bar} exceeds T={self.T}")
        if self.r_sequence is not None and any(r > self.T for r in self.r_sequence):
            raise ValueError("per-layer representative count exceeds T")


@dataclass(frozen=True)
class SelectionFlops:
    independent: int
    cascade: int
    attention_compressed: int


@dataclass(frozen=True)
class ScalingRow:
    T: int
    r_bar_estimate: float
    ratio_T_over_r: float
    savings_asymptotic: float
    savings_exact: float
    selection_speedup: float


def gram_ops_independent(L: int, T: int) -> int:
    """L full T x T Grams, in matrix entries."""
    return L * T * T


def gram_ops_cascade(T: int, r_sequence, r_valid_sequence) -> int:
    """Entry count for a cascade run: a full Gram at layer 0 plus, per
    later layer, an r x r validation block and a (T - r) x r_valid
    cross block.  r_sequence holds the inherited counts for layers
    1..L-1, aligned with r_valid_sequence."""
    if len(r_sequence) != len(r_valid_sequence):
        raise ValueError("r_sequence and r_valid_sequence must align")
    total = T * T
    for r, rv in zip(r_sequence, r_valid_sequence):
        if not (1 <= rv <= r <= T):
            raise ValueError(f"need 1 <= r_valid <= r <= T, got r={r}, r_valid={rv}")
        total += r * r + (T - r) * rv
    return total


def selection_flops(inp: CostModelInput) -> SelectionFlops:
    independent = inp.L * inp.T * inp.T * inp.d
    cascade = inp.T * inp.d * (inp.T + (inp.L - 1) * inp.r_bar)
    attention = inp.L * inp.h * 4 * inp.r_bar * inp.r_bar * inp.d_h
    return SelectionFlops(
        independent=independent,
        cascade=_as_int_if_exact(cascade),
        attention_compressed=_as_int_if_exact(attention),
    )


def _as_int_if_exact(x):
    if isinstance(x, int):
        return x
    return int(x) if float(x).is_integer() else x


def scaling_table(L: int, rows) -> list[ScalingRow]:
    """Project cascade savings to other sequence lengths.

    Two savings figures per row: the asymptotic 1 - r/T (what the per-layer
    cross-Gram converges to as L grows) and the exact 1 - (T + (L-1)r)/(LT)
    which still carries the layer-0 full-Gram cost.
    """
    out = []
    for T, r_bar in rows:
        if r_bar > T:
            raise ValueError(f"r_bar={r_bar} exceeds T={T}")
        ratio = T / r_bar
        out.append(
            ScalingRow(
                T=T,
                r_bar_estimate=r_bar,
                ratio_T_over_r=ratio,
                savings_asymptotic=1.0 - r_bar / T,
                savings_exact=1.0 - (T + (L - 1) * r_bar) / (L * T),
                selection_speedup=ratio,
            )
        )
    return out


def compression_summary(T: int, r: int) -> dict:
    """Token compression T/r and the resulting attention-cost ratio (T/r)^2."""
    if not (1 <= r <= T):
        raise ValueError(f"need 1 <= r <= T, got r={r}, T={T}")
    linear = T / r
    return {"linear_ratio": linear, "quadratic_ratio": linear * linear}
