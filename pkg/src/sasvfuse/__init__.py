"""Score-level fusion toolkit for spoofing-aware speaker verification.

Joins per-system scores onto trial keys, trains single- or two-stage fusion
pathways (logistic regression, polynomial-kernel SVM, Gaussian LLR back-end),
and evaluates them with the SASV metric suite (SV/SPF/SASV EERs, agnostic
detection cost, per-attack tables).
"""

__version__ = "0.1.0"

from .errors import DataError, ProtocolError, TrainingError
from .fusion import (
    DEFAULT_SCORE_SETS,
    FUSED_COLUMN,
    ClassifierKind,
    FusionMode,
    PathwaySpec,
    TrainOptions,
    TrainedPipeline,
    apply_pipeline,
    build_stage1_features,
    build_stage2_features,
    enumerate_pathways,
    load_pipeline,
    pipeline_from_doc,
    pipeline_to_doc,
    save_pipeline,
    score_sum,
    train_pipeline,
)
from .metrics import (
    ADCFConfig,
    EvalReport,
    HistogramExport,
    LabeledScores,
    SasvEers,
    compute_a_dcf,
    compute_eer,
    compute_sasv_eers,
    evaluate_scores,
    histogram_export,
    per_attack_eers,
)
from .reports import (
    PathwayResult,
    render_per_attack_csv,
    render_per_attack_text,
    render_summary_csv,
    render_summary_text,
)
from .score_io import (
    KeyFormat,
    LabelKind,
    NormStats,
    Partition,
    ScoreTable,
    TrialLabel,
    TrialRecord,
    apply_znorm,
    attach_scores,
    fit_znorm,
    parse_trial_key,
    read_canonical,
    write_canonical,
)
from .synth import (
    ClassSpec,
    ColumnDist,
    SynthConfig,
    attack_allocation,
    default_sasv_scenario,
    generate_trials,
    synthesize_partitions,
)

__all__ = [
    "__version__",
    "DataError",
    "ProtocolError",
    "TrainingError",
    "DEFAULT_SCORE_SETS",
    "FUSED_COLUMN",
    "ClassifierKind",
    "FusionMode",
    "PathwaySpec",
    "TrainOptions",
    "TrainedPipeline",
    "apply_pipeline",
    "build_stage1_features",
    "build_stage2_features",
    "enumerate_pathways",
    "load_pipeline",
    "pipeline_from_doc",
    "pipeline_to_doc",
    "save_pipeline",
    "score_sum",
    "train_pipeline",
    "ADCFConfig",
    "EvalReport",
    "HistogramExport",
    "LabeledScores",
    "SasvEers",
    "compute_a_dcf",
    "compute_eer",
    "compute_sasv_eers",
    "evaluate_scores",
    "histogram_export",
    "per_attack_eers",
    "PathwayResult",
    "render_per_attack_csv",
    "render_per_attack_text",
    "render_summary_csv",
    "render_summary_text",
    "KeyFormat",
    "LabelKind",
    "NormStats",
    "Partition",
    "ScoreTable",
    "TrialLabel",
    "TrialRecord",
    "apply_znorm",
    "attach_scores",
    "fit_znorm",
    "parse_trial_key",
    "read_canonical",
    "write_canonical",
    "ClassSpec",
    "ColumnDist",
    "SynthConfig",
    "attack_allocation",
    "default_sasv_scenario",
    "generate_trials",
    "synthesize_partitions",
]
