"""Translation-invariant visual memory for online interestingness scoring.

A 4-D memory bank of feature cubes with sparsity-promoting writes and
translation-invariant FFT reads, the short-term/online learning loops on top
of it, pluggable feature extraction, the windowed online-precision metric,
and seed-deterministic ablation harnesses.
"""

from .errors import (
    DegenerateNormError,
    EmptySequenceError,
    FormatError,
    ImageTooSmallError,
    IndexOutOfRangeError,
    InvalidCapacityError,
    InvalidRateError,
    LabelMismatchError,
    LengthMismatchError,
    NonFiniteDataError,
    ShapeInconsistentError,
    ShapeMismatchError,
    TivmError,
)
from .tensor import (
    EPS_NORM,
    FeatureCube,
    ShiftIndex,
    channel_confidence,
    circular_translate,
    cosine_similarity,
    frobenius_norm,
    xcorr_oracle,
    xcorr_similarity,
)
from .memory import (
    INIT_NORM,
    WOTI,
    WTI,
    MemoryBank,
    ReadResult,
    WeightVector,
    bank_init,
    load_bank,
    read,
    reading_accuracy,
    save_bank,
    write,
    write_weights,
    write_weights_baseline,
)
from .pipeline import (
    InterestScore,
    OnlineParams,
    ShortTermReport,
    online_run,
    online_step,
    read_scores_csv,
    short_term_train,
    write_scores_csv,
)
from .features import (
    ExtractorSpec,
    SequenceDataset,
    extract_gridpool,
    extract_randproj,
    load_cube,
    load_frames,
    load_sequence,
    parse_pgm,
    read_labels_csv,
    save_cube,
)
from .metrics import (
    OnlinePrecisionCurve,
    auc_op,
    declare_positive,
    metric_oracle,
    online_precision,
    window_interest_count,
    write_curve_csv,
)
from .experiments import (
    ExperimentConfig,
    default_config,
    run_capacity,
    run_decay,
    run_experiment,
    run_invariance,
    run_sparsity,
    write_experiment_csv,
)

__version__ = "0.1.0"
