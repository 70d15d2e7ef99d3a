"""Dataset-level accuracy curves, strategy selection, and oracle upgrades.

A strategy here is a fixed way of querying the model (a prompt, a
temperature, a pipeline); for analysis purposes it is fully described by
one answer distribution per question plus mean token usage. This module
averages the per-question vote probabilities of :mod:`votescale.votemath`
over a dataset, picks the best strategy under a sampling-time or cost
budget, tabulates extreme performance and pairwise overtake counts, and
computes three oracle curves that bound what smarter sampling could do:

* adaptive  -- stop at one sample on questions where voting hurts;
* dynamic   -- pick the best strategy per question;
* combined  -- both at once.

Monte Carlo evaluations derive one sub-seed per (strategy, question,
effective n), so repeated evaluations of the same cell agree and the
documented dominance relations between curves survive sampling noise.
"""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .distribution import AnswerDistribution, VoteProbability
from .difficulty import Difficulty, classify, crossover_condition, limit_prob
from .errors import (
    DuplicateKey,
    IdMismatch,
    InvalidDistribution,
    MalformedLine,
    NoFeasibleChoice,
)
from .records import CostModel, QuestionSamples, estimate_distribution
from .votemath import ScalingCurve, canonical_method, check_grid, vote_probability

_SCENARIO_FIELDS = frozenset(
    {
        "strategy_id",
        "question_id",
        "probs",
        "correct_index",
        "mean_prompt_tokens",
        "mean_completion_tokens",
    }
)


@dataclass(frozen=True)
class QuestionEntry:
    """One question under one strategy: its distribution and token means."""

    question_id: str
    dist: AnswerDistribution
    mean_prompt_tokens: float = 0.0
    mean_completion_tokens: float = 0.0


@dataclass(frozen=True)
class StrategyDataset:
    strategy_id: str
    questions: tuple[QuestionEntry, ...]

    def __post_init__(self):
        ids = [q.question_id for q in self.questions]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate question_ids in strategy {self.strategy_id!r}")

    @property
    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.question_id for q in self.questions)

    def by_id(self) -> dict[str, QuestionEntry]:
        return {q.question_id: q for q in self.questions}


@dataclass(frozen=True)
class SelectionResult:
    """A chosen (strategy, n) pair under a budget.

    ``budget`` is (kind, value) with kind 'samples' (fixed n) or 'cost'
    (currency ceiling on the dataset total). When kind is 'cost',
    ``chosen_n`` is feasible under the cost model by construction.
    """

    budget: tuple[str, float]
    chosen_strategy: str
    chosen_n: int
    predicted_accuracy: float

    def __post_init__(self):
        kind, _ = self.budget
        if kind not in ("samples", "cost"):
            raise ValueError(f"unknown budget kind {kind!r}")
        if not 0.0 <= self.predicted_accuracy <= 1.0:
            raise ValueError("predicted accuracy must lie in [0, 1]")


class ExtremePerformance(NamedTuple):
    """Difficulty fractions and the implied large-n accuracy limit."""

    easy_frac: float
    moderate_frac: float
    hard_frac: float
    limit_accuracy: float


def _point_seed(seed: int, strategy_id: str, q_index: int, n: int):
    """Stable sub-seed for one Monte Carlo cell.

    Keyed by strategy, question position, and the effective sampling time,
    so the same cell evaluated from different curves (vanilla, adaptive,
    dynamic) sees the same randomness and oracle dominance is preserved
    under Monte Carlo.
    """
    return np.random.SeedSequence(
        [seed, zlib.crc32(strategy_id.encode("utf-8")), q_index, n]
    )


def _evaluate(
    dist: AnswerDistribution,
    n: int,
    method: str,
    *,
    strategy_id: str,
    q_index: int,
    trials: int,
    seed: int,
    fallback: bool,
) -> VoteProbability:
    return vote_probability(
        dist,
        n,
        method,
        trials=trials,
        seed=_point_seed(seed, strategy_id, q_index, n),
        fallback=fallback,
    )


def _mean_point(values: list[VoteProbability], n: int, method: str) -> VoteProbability:
    mean = math.fsum(v.value for v in values) / len(values)
    if method == "monte_carlo":
        stderr = (
            math.sqrt(math.fsum((v.stderr or 0.0) ** 2 for v in values))
            / len(values)
        )
        return VoteProbability(mean, method, n, stderr=stderr)
    return VoteProbability(mean, method, n)


def accuracy_curve(
    ds: StrategyDataset,
    ns,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> ScalingCurve:
    """Dataset accuracy versus sampling time: per-question estimator, averaged.

    Cap overflows in the exact estimator propagate unless ``fallback``
    substitutes the normal approximation for the offending questions.
    """
    grid = check_grid(ns)
    method = canonical_method(method)
    if not ds.questions:
        raise ValueError("dataset has no questions")
    points = []
    for n in grid:
        values = [
            _evaluate(
                q.dist,
                n,
                method,
                strategy_id=ds.strategy_id,
                q_index=qi,
                trials=trials,
                seed=seed,
                fallback=fallback,
            )
            for qi, q in enumerate(ds.questions)
        ]
        points.append(_mean_point(values, n, method))
    return ScalingCurve(tuple(points), method, curve_id=ds.strategy_id)


def adaptive_curve(
    ds: StrategyDataset,
    ns,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> ScalingCurve:
    """Oracle curve that refuses to scale on hard questions.

    Questions classified hard are evaluated at n=1 at every grid point
    (one sample, no vote); the rest scale normally. This needs the true
    difficulty label, hence "oracle". Not pointwise above the vanilla
    curve at small n; its advantage is in the tail, where hard questions
    would otherwise decay toward zero.
    """
    grid = check_grid(ns)
    method = canonical_method(method)
    if not ds.questions:
        raise ValueError("dataset has no questions")
    hard = [classify(q.dist).kind is Difficulty.HARD for q in ds.questions]
    points = []
    for n in grid:
        values = [
            _evaluate(
                q.dist,
                1 if hard[qi] else n,
                method,
                strategy_id=ds.strategy_id,
                q_index=qi,
                trials=trials,
                seed=seed,
                fallback=fallback,
            )
            for qi, q in enumerate(ds.questions)
        ]
        points.append(_mean_point(values, n, method))
    return ScalingCurve(tuple(points), method, curve_id=f"{ds.strategy_id}+adaptive")


def _shared_order(dss: list[StrategyDataset]) -> list[str]:
    if not dss:
        raise ValueError("need at least one strategy dataset")
    first = dss[0].question_ids
    reference = set(first)
    for ds in dss[1:]:
        if set(ds.question_ids) != reference:
            raise IdMismatch(
                f"strategy {ds.strategy_id!r} covers different questions than "
                f"{dss[0].strategy_id!r}"
            )
    return list(first)


def dynamic_curve(
    dss: list[StrategyDataset],
    ns,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> ScalingCurve:
    """Oracle curve that picks the best strategy per question.

    All datasets must cover the same question ids. Per question and grid
    point, the largest per-strategy estimate wins; the mean over questions
    therefore dominates every single strategy's curve pointwise.
    """
    grid = check_grid(ns)
    method = canonical_method(method)
    order = _shared_order(dss)
    maps = [(ds, ds.by_id(), {q: i for i, q in enumerate(ds.question_ids)}) for ds in dss]
    points = []
    for n in grid:
        values = []
        for question_id in order:
            best = None
            for ds, by_id, positions in maps:
                vp = _evaluate(
                    by_id[question_id].dist,
                    n,
                    method,
                    strategy_id=ds.strategy_id,
                    q_index=positions[question_id],
                    trials=trials,
                    seed=seed,
                    fallback=fallback,
                )
                if best is None or vp.value > best.value:
                    best = vp
            values.append(best)
        points.append(_mean_point(values, n, method))
    return ScalingCurve(tuple(points), method, curve_id="dynamic")


def combined_curve(
    dss: list[StrategyDataset],
    ns,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> ScalingCurve:
    """Adaptive and dynamic at once: per strategy, use n=1 where that
    strategy finds the question hard; then take the per-question max."""
    grid = check_grid(ns)
    method = canonical_method(method)
    order = _shared_order(dss)
    maps = []
    for ds in dss:
        by_id = ds.by_id()
        hard = {
            q.question_id: classify(q.dist).kind is Difficulty.HARD
            for q in ds.questions
        }
        positions = {q: i for i, q in enumerate(ds.question_ids)}
        maps.append((ds, by_id, positions, hard))
    points = []
    for n in grid:
        values = []
        for question_id in order:
            best = None
            for ds, by_id, positions, hard in maps:
                vp = _evaluate(
                    by_id[question_id].dist,
                    1 if hard[question_id] else n,
                    method,
                    strategy_id=ds.strategy_id,
                    q_index=positions[question_id],
                    trials=trials,
                    seed=seed,
                    fallback=fallback,
                )
                if best is None or vp.value > best.value:
                    best = vp
            values.append(best)
        points.append(_mean_point(values, n, method))
    return ScalingCurve(tuple(points), method, curve_id="combined")


def extreme_performance(ds: StrategyDataset) -> ExtremePerformance:
    """Difficulty fractions and the accuracy this strategy scales toward."""
    if not ds.questions:
        raise ValueError("dataset has no questions")
    kinds = {Difficulty.EASY: 0, Difficulty.MODERATE: 0, Difficulty.HARD: 0}
    limits = []
    for q in ds.questions:
        kinds[classify(q.dist).kind] += 1
        limits.append(limit_prob(q.dist))
    total = len(ds.questions)
    return ExtremePerformance(
        easy_frac=kinds[Difficulty.EASY] / total,
        moderate_frac=kinds[Difficulty.MODERATE] / total,
        hard_frac=kinds[Difficulty.HARD] / total,
        limit_accuracy=math.fsum(limits) / total,
    )


def adaptive_limit(ds: StrategyDataset) -> float:
    """Large-n limit of the adaptive oracle: hard questions keep their
    single-sample success probability instead of decaying to zero."""
    if not ds.questions:
        raise ValueError("dataset has no questions")
    terms = []
    for q in ds.questions:
        if classify(q.dist).kind is Difficulty.HARD:
            terms.append(q.dist.correct_prob)
        else:
            terms.append(limit_prob(q.dist))
    return math.fsum(terms) / len(ds.questions)


def dominance_count(ds_a: StrategyDataset, ds_b: StrategyDataset) -> int:
    """Number of shared questions where ``ds_a`` is behind at n=1 but
    guaranteed to overtake ``ds_b`` as the sampling time grows.

    Counts over the id intersection; disjoint datasets are an error.
    Identical datasets score 0 (the condition is strict).
    """
    a_by_id = ds_a.by_id()
    b_by_id = ds_b.by_id()
    shared = [q for q in ds_a.question_ids if q in b_by_id]
    if not shared:
        raise IdMismatch(
            f"strategies {ds_a.strategy_id!r} and {ds_b.strategy_id!r} share no questions"
        )
    return sum(
        1 for q in shared if crossover_condition(a_by_id[q].dist, b_by_id[q].dist)
    )


def best_for_n(
    dss: list[StrategyDataset],
    n: int,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> SelectionResult:
    """Best strategy at a fixed sampling time; ties keep the earliest input."""
    if not dss:
        raise ValueError("need at least one strategy dataset")
    best = None
    for ds in dss:
        value = accuracy_curve(
            ds, [n], method, trials=trials, seed=seed, fallback=fallback
        ).points[0].value
        if best is None or value > best.predicted_accuracy:
            best = SelectionResult(
                budget=("samples", float(n)),
                chosen_strategy=ds.strategy_id,
                chosen_n=n,
                predicted_accuracy=value,
            )
    return best


def dataset_sample_cost(ds: StrategyDataset, model: CostModel) -> float:
    """Dataset-total cost of one sample per question under the model."""
    return math.fsum(
        model.sample_cost(q.mean_prompt_tokens, q.mean_completion_tokens)
        for q in ds.questions
    )


def best_under_cost(
    dss: list[StrategyDataset],
    budget: float,
    model: CostModel,
    ns,
    method: str = "exact",
    *,
    trials: int = 10_000,
    seed: int = 0,
    fallback: bool = False,
) -> SelectionResult:
    """Best (strategy, n) whose dataset-total cost fits the budget.

    Maximizes predicted accuracy over all feasible grid points of all
    strategies. Ties keep the earliest strategy in the input and the
    smallest n (which is also the cheapest). Note this maximizes accuracy,
    not n: on declining (hard-dominated) datasets a small n can win even
    under a generous budget. Raises :class:`NoFeasibleChoice` when no
    strategy affords even its smallest grid point.
    """
    grid = check_grid(ns)
    if not dss:
        raise ValueError("need at least one strategy dataset")
    best = None
    for ds in dss:
        per_sample = dataset_sample_cost(ds, model)
        for n in grid:
            if n * per_sample > budget:
                break
            value = accuracy_curve(
                ds, [n], method, trials=trials, seed=seed, fallback=fallback
            ).points[0].value
            if best is None or value > best.predicted_accuracy:
                best = SelectionResult(
                    budget=("cost", float(budget)),
                    chosen_strategy=ds.strategy_id,
                    chosen_n=n,
                    predicted_accuracy=value,
                )
    if best is None:
        raise NoFeasibleChoice(
            f"no strategy fits a dataset-total budget of {budget!r}"
        )
    return best


def load_scenario(lines: Iterable[str]) -> list[StrategyDataset]:
    """Parse an analytic scenario file into strategy datasets.

    Line-delimited JSON objects {strategy_id, question_id, probs,
    correct_index, mean_prompt_tokens, mean_completion_tokens}. Strategies
    and questions keep first-appearance order; a repeated (strategy,
    question) pair is an error.
    """
    by_strategy: dict[str, list[QuestionEntry]] = {}
    seen: set[tuple[str, str]] = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_number, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict) or set(obj) != _SCENARIO_FIELDS:
            raise MalformedLine(
                line_number,
                "expected fields strategy_id, question_id, probs, correct_index, "
                "mean_prompt_tokens, mean_completion_tokens",
            )
        strategy_id = obj["strategy_id"]
        question_id = obj["question_id"]
        if not isinstance(strategy_id, str) or not isinstance(question_id, str):
            raise MalformedLine(line_number, "ids must be strings")
        if not isinstance(obj["probs"], list):
            raise MalformedLine(line_number, "probs must be a list")
        if isinstance(obj["correct_index"], bool) or not isinstance(
            obj["correct_index"], int
        ):
            raise MalformedLine(line_number, "correct_index must be an integer")
        means = []
        for field_name in ("mean_prompt_tokens", "mean_completion_tokens"):
            value = obj[field_name]
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                raise MalformedLine(line_number, f"{field_name} must be a nonnegative number")
            means.append(float(value))
        try:
            dist = AnswerDistribution(tuple(obj["probs"]), obj["correct_index"])
        except (InvalidDistribution, TypeError) as exc:
            raise MalformedLine(line_number, str(exc)) from None
        if (strategy_id, question_id) in seen:
            raise DuplicateKey(
                f"scenario repeats (strategy_id, question_id) = "
                f"({strategy_id!r}, {question_id!r})"
            )
        seen.add((strategy_id, question_id))
        by_strategy.setdefault(strategy_id, []).append(
            QuestionEntry(question_id, dist, means[0], means[1])
        )
    return [
        StrategyDataset(strategy_id, tuple(questions))
        for strategy_id, questions in by_strategy.items()
    ]


def datasets_from_samples(
    groups: dict[tuple[str, str], QuestionSamples], *, smoothing: float = 0.0
) -> list[StrategyDataset]:
    """Turn parsed log groups into strategy datasets via ML estimation.

    Strategy and question order follow first appearance in the log.
    """
    by_strategy: dict[str, list[QuestionEntry]] = {}
    for (question_id, strategy_id), samples in groups.items():
        by_strategy.setdefault(strategy_id, []).append(
            QuestionEntry(
                question_id,
                estimate_distribution(samples, smoothing=smoothing),
                samples.mean_prompt_tokens,
                samples.mean_completion_tokens,
            )
        )
    return [
        StrategyDataset(strategy_id, tuple(questions))
        for strategy_id, questions in by_strategy.items()
    ]
