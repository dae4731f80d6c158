"""Probability trends for logical sentences under resource-bounded random
processes: a claim accumulator driven by prefix-decoded random machines, a
bounded consistency gate, exact and Monte Carlo membership estimators, a
truncated extension sampler for cross-validation, and a config-driven
experiment harness."""

__version__ = "0.1.0"

from .consistency import ClaimSet, ConCache, ConParams, consistent_enough
from .estimator import (
    Estimate,
    EstimateMode,
    StageParams,
    accumulate_claims,
    default_schedule,
    extension_probability,
    membership_probability,
    membership_probability_exact,
    membership_trajectory,
    sample_extension,
)
from .logic import Sentence, parse_sentence, render_sentence, sentence_at, sentence_index
from .sequences import builtin_catalog, sequence_by_id

__all__ = [
    "ClaimSet",
    "ConCache",
    "ConParams",
    "Estimate",
    "EstimateMode",
    "Sentence",
    "StageParams",
    "accumulate_claims",
    "builtin_catalog",
    "consistent_enough",
    "default_schedule",
    "extension_probability",
    "membership_probability",
    "membership_probability_exact",
    "membership_trajectory",
    "parse_sentence",
    "render_sentence",
    "sample_extension",
    "sentence_at",
    "sentence_index",
    "sequence_by_id",
    "__version__",
]
