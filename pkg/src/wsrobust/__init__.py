"""Word-substitution robustness auditing for text classifiers.

Brackets the maximum safe substitution radius per input (beam attack for the
upper bound, exhaustive certification for the lower bound) and quantifies
vulnerability outside safe regions with a Hoeffding-guaranteed robustness
score. Classifier-agnostic: plug in the built-in toy linear model or any
external scorer speaking the newline-delimited JSON wire protocol.
"""

from .attack import (
    AttackGoal,
    AttackOutcome,
    AttackParams,
    BeamConfiguration,
    BeamEntry,
    run_greedy,
    run_pdp,
    score_text,
)
from .bracket import RadiusBracket, bracket
from .classifiers import (
    Classifier,
    ExternalClassifier,
    ToyLinearModel,
    connect_external,
    label_of,
    load_toy_model,
    save_toy_model,
)
from .errors import (
    AlreadyMisclassifiedError,
    BackendError,
    CapabilityError,
    InfeasibleError,
    InvalidAssignmentError,
    InvalidInputError,
    PairingError,
)
from .io import DatasetInstance, load_dataset, load_lexicon
from .metric import PrEstimate, default_radius, estimate_pr, exact_pr, required_samples
from .space import (
    DistanceProfile,
    Lexicon,
    PerturbationSpace,
    Sentence,
    SubstitutionSet,
    apply,
    build_space,
    cardinality,
    count_within,
    distance,
    enumerate_within,
    sample_uniform,
)
from .verify import Verdict, certify, certify_presorted, check_proof, proof_log

__version__ = "0.1.0"

__all__ = [
    "AttackGoal",
    "AttackOutcome",
    "AttackParams",
    "AlreadyMisclassifiedError",
    "BackendError",
    "BeamConfiguration",
    "BeamEntry",
    "CapabilityError",
    "Classifier",
    "DatasetInstance",
    "DistanceProfile",
    "ExternalClassifier",
    "InfeasibleError",
    "InvalidAssignmentError",
    "InvalidInputError",
    "Lexicon",
    "PairingError",
    "PerturbationSpace",
    "PrEstimate",
    "RadiusBracket",
    "Sentence",
    "SubstitutionSet",
    "ToyLinearModel",
    "Verdict",
    "apply",
    "bracket",
    "build_space",
    "cardinality",
    "certify",
    "certify_presorted",
    "check_proof",
    "connect_external",
    "count_within",
    "default_radius",
    "distance",
    "enumerate_within",
    "estimate_pr",
    "exact_pr",
    "label_of",
    "load_dataset",
    "load_lexicon",
    "load_toy_model",
    "proof_log",
    "required_samples",
    "run_greedy",
    "run_pdp",
    "sample_uniform",
    "save_toy_model",
    "score_text",
]
