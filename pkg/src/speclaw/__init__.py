"""speclaw: Monte-Carlo verification toolkit for semicircle-law behaviour
of normalized Laplacians of sparse Erdős–Rényi and Chung–Lu graphs."""

from .models import (
    ChungLuSpec,
    ErSpec,
    GraphSample,
    Provenance,
    Schedule,
    ScheduleRangeError,
    ValidationError,
    eval_schedule,
    replicate_stream,
    sample_chung_lu,
    sample_er,
)
from .matrices import (
    ConfigurationError,
    DenseSymMatrix,
    MatrixKind,
    ScaleShift,
    apply_scale_shift,
    build,
    pseudo_inv_sqrt_degrees,
    trace_of_squared_difference,
)
from .spectra import (
    SpectralMeasure,
    eigvals_sym,
    esd_cdf,
    semicircle_cdf,
    semicircle_pdf,
    semicircle_sample_quantiles,
)
from .metrics import (
    DistanceReport,
    bl_upper_bound,
    ks_distance,
    ks_to_semicircle,
    rank_inequality_check,
    w1_equal_size,
    w1_to_semicircle,
)
from .stats import (
    CellSummary,
    SlopeFit,
    TraceStat,
    aggregate,
    event_counters,
    fit_decay,
    trace_stat_chung_lu,
    trace_stat_er,
)

__version__ = "0.1.0"
