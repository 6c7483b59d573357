"""Event-based signal encoding: send-on-delta and leaky integrate-and-fire
spike coding, Alexiewicz-norm quantization error, and QRS detection on
ECG records."""

from .core import (
    HybridSignal,
    Spike,
    SpikeTrain,
    UniformSignal,
    alexiewicz_distance,
    alexiewicz_norm,
    err_trajectory,
    hybrid_alexiewicz_norm,
    oplus,
    trunc_quantize,
    weyl_discrepancy,
)
from .errors import (
    DegenerateInputError,
    InvalidInputError,
    InvalidParameterError,
    ParseError,
    UnsupportedFormatError,
)
from .harness import (
    ErrorSample,
    ExperimentGrid,
    MatchResult,
    box_stats,
    match_detections,
    quantization_experiment,
    tpr_ppv,
)
from .lif import LifConfig, ResetMode, collapse_to_spikes, lif_encode, lif_encode_train
from .qrs import (
    Detection,
    DiscrepancyDetectorConfig,
    PanTompkinsConfig,
    detect_qrs_discrepancy,
    ecg_to_spikes,
    local_discrepancy_signal,
    moving_average,
    moving_max,
    pan_tompkins,
)
from .sod import SodConfig, normalize, sod_encode, sod_reconstruct, upsample_cubic
from .synth import gen_random_train, gen_synthetic_ecg, gen_wave_with_diracs
from .wfdb import (
    AnnotatedRecord,
    Annotation,
    RecordHeader,
    load_record,
    read_wfdb_212,
    read_wfdb_annotations,
    read_wfdb_header,
)

__version__ = "0.1.0"
