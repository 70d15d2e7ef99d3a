"""votescale: analyze, predict, and improve majority voting over repeated samples.

The core objects are :class:`AnswerDistribution` (one question's answer
probabilities with a marked correct answer) and the estimators in
:mod:`votescale.votemath` that turn it into a vote success probability at
a given sampling time. On top of that sit the difficulty taxonomy
(:mod:`votescale.difficulty`), recorded-log handling
(:mod:`votescale.records`), and dataset-level curves, selection, and
oracle bounds (:mod:`votescale.selection`). The ``votescale`` console
script exposes the lot.
"""
from .distribution import AnswerDistribution, VoteProbability
from .errors import (
    CapExceeded,
    DuplicateKey,
    IdMismatch,
    InvalidDistribution,
    MalformedLine,
    MissingGroundTruth,
    NoFeasibleChoice,
    NotEnoughSamples,
    NoWrongMass,
    VoteScaleError,
    WrongArity,
)
from .difficulty import (
    CrossoverVerdict,
    Difficulty,
    DifficultyLabel,
    classify,
    crossover_condition,
    find_crossover_n,
    kl_to_uniform,
    limit_prob,
)
from .records import (
    CostModel,
    QuestionSamples,
    SampleRecord,
    UNPARSEABLE,
    answer_support,
    cost_of,
    estimate_distribution,
    group_records,
    load_ground_truth,
    mean_replay_accuracy,
    parse_log,
    parse_records,
    replay_majority,
)
from .selection import (
    ExtremePerformance,
    QuestionEntry,
    SelectionResult,
    StrategyDataset,
    accuracy_curve,
    adaptive_curve,
    adaptive_limit,
    best_for_n,
    best_under_cost,
    combined_curve,
    dataset_sample_cost,
    datasets_from_samples,
    dominance_count,
    dynamic_curve,
    extreme_performance,
    load_scenario,
)
from .votemath import (
    ScalingCurve,
    closed_form_majority_prob,
    exact_majority_prob,
    monte_carlo_majority_prob,
    normal_approx_prob,
    scaling_curve,
    simulate_vote,
    simulate_votes,
    standard_normal_cdf,
    vote_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerDistribution",
    "VoteProbability",
    "VoteScaleError",
    "InvalidDistribution",
    "CapExceeded",
    "WrongArity",
    "NoWrongMass",
    "MalformedLine",
    "DuplicateKey",
    "MissingGroundTruth",
    "NotEnoughSamples",
    "NoFeasibleChoice",
    "IdMismatch",
    "Difficulty",
    "DifficultyLabel",
    "CrossoverVerdict",
    "classify",
    "limit_prob",
    "crossover_condition",
    "find_crossover_n",
    "kl_to_uniform",
    "SampleRecord",
    "QuestionSamples",
    "CostModel",
    "UNPARSEABLE",
    "parse_records",
    "parse_log",
    "group_records",
    "load_ground_truth",
    "answer_support",
    "estimate_distribution",
    "replay_majority",
    "mean_replay_accuracy",
    "cost_of",
    "QuestionEntry",
    "StrategyDataset",
    "SelectionResult",
    "ExtremePerformance",
    "accuracy_curve",
    "adaptive_curve",
    "adaptive_limit",
    "best_for_n",
    "best_under_cost",
    "combined_curve",
    "dataset_sample_cost",
    "datasets_from_samples",
    "dominance_count",
    "dynamic_curve",
    "extreme_performance",
    "load_scenario",
    "ScalingCurve",
    "exact_majority_prob",
    "closed_form_majority_prob",
    "monte_carlo_majority_prob",
    "normal_approx_prob",
    "simulate_vote",
    "simulate_votes",
    "standard_normal_cdf",
    "scaling_curve",
    "vote_probability",
]
