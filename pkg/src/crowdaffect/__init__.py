"""crowdaffect: multi-annotator compound-emotion aggregation.

Estimates per-annotator, per-category reliability with EM over binary vote
matrices, retains high-reliability labels, selects single and compound
expression labels per clip, scores label consistency with Cronbach's
alpha, and reports duration-bucketed distribution tables. A counter-based
synthetic annotator simulator closes the loop for verification.
"""

from .consistency import ConsistencyReport, consistency_report, cronbach_alpha
from .corpus import (
    AnnotationCorpus,
    AnnotationRecord,
    CategoryMatrix,
    binarize,
    binarize_all,
)
from .em import (
    EMConfig,
    EMResult,
    EMState,
    e_step,
    em_objective,
    has_converged,
    initial_prevalence,
    m_step,
    majority_vote,
    observed_log_likelihood,
    run_em,
)
from .errors import (
    CompoundSizeError,
    CrowdAffectError,
    DegenerateDataWarning,
    EmptyCorpusError,
    InputDataError,
    MissingDurationError,
    NeutralInCompoundError,
    NoValidLabelError,
    NumericalFailureError,
    PolicyInfeasibleError,
    UndefinedAlphaError,
    UnknownEmotionError,
    ValidationError,
)
from .estimator import ReliabilityEM, check_vote_matrix
from .policy import (
    ClipDecision,
    CuratedDataset,
    RetentionPolicy,
    RetentionResult,
    assign_single,
    compound_candidate,
    curate,
    retain_labels,
    valid_labels,
)
from .reliability import ReliabilityReport, reliability_report
from .simulate import ConfidenceModel, DurationModel, GroundTruth, SimConfig, simulate
from .stats import (
    DistributionTable,
    distribution,
    multiple_distribution,
    single_distribution,
)
from .taxonomy import (
    ALL_EMOTIONS,
    CompoundEmotion,
    Emotion,
    compound_from_members,
    parse_compound,
    parse_emotion,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_EMOTIONS",
    "AnnotationCorpus",
    "AnnotationRecord",
    "CategoryMatrix",
    "ClipDecision",
    "CompoundEmotion",
    "CompoundSizeError",
    "ConfidenceModel",
    "ConsistencyReport",
    "CrowdAffectError",
    "CuratedDataset",
    "DegenerateDataWarning",
    "DistributionTable",
    "DurationModel",
    "EMConfig",
    "EMResult",
    "EMState",
    "Emotion",
    "EmptyCorpusError",
    "GroundTruth",
    "InputDataError",
    "MissingDurationError",
    "NeutralInCompoundError",
    "NoValidLabelError",
    "NumericalFailureError",
    "PolicyInfeasibleError",
    "ReliabilityEM",
    "ReliabilityReport",
    "RetentionPolicy",
    "RetentionResult",
    "SimConfig",
    "UndefinedAlphaError",
    "UnknownEmotionError",
    "ValidationError",
    "assign_single",
    "binarize",
    "binarize_all",
    "check_vote_matrix",
    "compound_candidate",
    "compound_from_members",
    "consistency_report",
    "cronbach_alpha",
    "curate",
    "distribution",
    "e_step",
    "em_objective",
    "has_converged",
    "initial_prevalence",
    "m_step",
    "majority_vote",
    "multiple_distribution",
    "observed_log_likelihood",
    "parse_compound",
    "parse_emotion",
    "reliability_report",
    "retain_labels",
    "run_em",
    "simulate",
    "single_distribution",
    "valid_labels",
]
