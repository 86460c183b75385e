"""Representative-token selection for transformer attention.

Selects the tokens that carry non-redundant information at each layer
via a Gram threshold on hidden-state cosines, inherits that set across
layers with a cheap validation step, computes attention on the
compressed subproblem, and accounts for the cost of all of it.
"""

__version__ = "0.1.0"

from .attention import (
    AttentionOutput,
    AttentionWeights,
    attention_error_bound,
    compressed_attention,
    empirical_attention_error,
    full_attention,
    spectral_norm,
)
from .cascade import (
    CascadeLayerRecord,
    CascadeRunRecord,
    CascadeStepResult,
    cascade_step,
    jaccard,
    run_cascade,
)
from .errors import (
    AllPairsDegenerate,
    DimensionMismatch,
    EmptyRepSet,
    FormatError,
    IoError,
    PowerIterationDivergence,
    RepselError,
    ZeroNormRow,
)
from .metrics import (
    CostModelInput,
    ScalingRow,
    SelectionFlops,
    compression_summary,
    gram_ops_cascade,
    gram_ops_independent,
    scaling_table,
    selection_flops,
)
from .selector import (
    ComparisonMode,
    GramMatrix,
    RepAssignment,
    RepSet,
    SelectionConfig,
    assign_nearest,
    compute_gram,
    select_independent,
)
from .synth import (
    PersistenceCheck,
    SynthConfig,
    SynthMode,
    estimate_lipschitz,
    generate_trace,
    persistence_check,
)
from .trace import (
    ActivationTrace,
    LayerActivation,
    UnitRowActivation,
    read_trace,
    row_normalize,
    write_trace,
)
