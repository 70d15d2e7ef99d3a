"""Recorded sample logs: parsing, distribution estimation, replay, cost.

A log is line-delimited UTF-8, one JSON object per line with exactly the
fields of :class:`SampleRecord`. Ground truth lives in a separate
line-delimited file of ``{question_id, correct_answer}`` objects. Answers
arrive already extracted from raw model output; any normalization beyond
that (trimming, case-folding, numeric cleanup) is the caller's business and
can be injected as a ``canonicalize`` hook. Empty or null answers become
the sentinel :data:`UNPARSEABLE`, which never equals a correct answer, so
unparseable outputs count as wrong votes instead of silently inflating
accuracy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .distribution import AnswerDistribution
from .errors import (
    DuplicateKey,
    MalformedLine,
    MissingGroundTruth,
    NotEnoughSamples,
)

#: Sentinel stored for unparseable or empty answers.
UNPARSEABLE = "∅"

_RECORD_FIELDS = frozenset(
    {
        "question_id",
        "strategy_id",
        "sample_index",
        "answer",
        "prompt_tokens",
        "completion_tokens",
    }
)
_TRUTH_FIELDS = frozenset({"question_id", "correct_answer"})

#: Upper bound on cells (rows x pool) materialized per block during replay.
#: Fixed: the block layout is part of the deterministic random stream.
_REPLAY_BLOCK_CELLS = 1 << 24


@dataclass(frozen=True)
class SampleRecord:
    """One recorded sample: an extracted answer plus its token usage."""

    question_id: str
    strategy_id: str
    sample_index: int
    answer: str
    prompt_tokens: int
    completion_tokens: int

    def __post_init__(self):
        if self.sample_index < 0:
            raise ValueError("sample_index must be >= 0")
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be >= 0")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.question_id, self.strategy_id, self.sample_index)


@dataclass(frozen=True)
class QuestionSamples:
    """All recorded answers for one (question, strategy) pair.

    ``answers`` follow sample_index order; token means are per sample and
    feed the cost model.
    """

    question_id: str
    strategy_id: str
    correct_answer: str
    answers: tuple[str, ...]
    mean_prompt_tokens: float
    mean_completion_tokens: float

    @property
    def pool_size(self) -> int:
        return len(self.answers)


@dataclass(frozen=True)
class CostModel:
    """Linear token pricing: currency per prompt token and completion token."""

    prompt_price: float
    completion_price: float

    def __post_init__(self):
        if self.prompt_price < 0 or self.completion_price < 0:
            raise ValueError("prices must be >= 0")

    @classmethod
    def from_per_million(cls, prompt: float, completion: float) -> "CostModel":
        """Build from the usual price quotes (currency per 1M tokens)."""
        return cls(prompt / 1e6, completion / 1e6)

    def sample_cost(self, prompt_tokens: float, completion_tokens: float) -> float:
        return prompt_tokens * self.prompt_price + completion_tokens * self.completion_price


def _parse_json_line(line_number: int, line: str, expected: frozenset) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(line_number, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedLine(line_number, "record must be a JSON object")
    missing = expected - obj.keys()
    extra = obj.keys() - expected
    if missing:
        raise MalformedLine(line_number, f"missing fields: {', '.join(sorted(missing))}")
    if extra:
        raise MalformedLine(line_number, f"unexpected fields: {', '.join(sorted(extra))}")
    return obj


def _require_str(line_number: int, obj: dict, field: str) -> str:
    value = obj[field]
    if not isinstance(value, str):
        raise MalformedLine(line_number, f"{field} must be a string")
    return value


def _require_count(line_number: int, obj: dict, field: str) -> int:
    value = obj[field]
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise MalformedLine(line_number, f"{field} must be a nonnegative integer")
    return value


def parse_records(lines: Iterable[str]) -> list[SampleRecord]:
    """Parse log lines into records; blank lines are skipped.

    Raises :class:`MalformedLine` (with the 1-based line number) on invalid
    JSON, a wrong field set, or wrong field types. Null or empty answers
    become :data:`UNPARSEABLE`.
    """
    records = []
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _parse_json_line(line_number, line, _RECORD_FIELDS)
        answer = obj["answer"]
        if answer is None:
            answer = UNPARSEABLE
        elif not isinstance(answer, str):
            raise MalformedLine(line_number, "answer must be a string or null")
        records.append(
            SampleRecord(
                question_id=_require_str(line_number, obj, "question_id"),
                strategy_id=_require_str(line_number, obj, "strategy_id"),
                sample_index=_require_count(line_number, obj, "sample_index"),
                answer=answer,
                prompt_tokens=_require_count(line_number, obj, "prompt_tokens"),
                completion_tokens=_require_count(line_number, obj, "completion_tokens"),
            )
        )
    return records


def load_ground_truth(lines: Iterable[str]) -> dict[str, str]:
    """Parse a ground-truth file into question_id -> correct_answer.

    A correct answer may not be empty or the sentinel (both would collide
    with the encoding of unparseable samples). Repeated question_ids raise
    :class:`DuplicateKey`.
    """
    truth: dict[str, str] = {}
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _parse_json_line(line_number, line, _TRUTH_FIELDS)
        question_id = _require_str(line_number, obj, "question_id")
        correct = _require_str(line_number, obj, "correct_answer")
        if correct in ("", UNPARSEABLE):
            raise MalformedLine(
                line_number, "correct_answer must be a nonempty non-sentinel string"
            )
        if question_id in truth:
            raise DuplicateKey(f"ground truth repeats question_id {question_id!r}")
        truth[question_id] = correct
    return truth


def group_records(
    records: Iterable[SampleRecord],
    ground_truth: dict[str, str],
    *,
    canonicalize: Callable[[str], str] | None = None,
) -> dict[tuple[str, str], QuestionSamples]:
    """Group records by (question, strategy), ordered by sample_index.

    ``canonicalize`` is applied to recorded and correct answers alike (the
    sentinel passes through untouched); an answer that canonicalizes to the
    empty string becomes the sentinel. Duplicate (question, strategy,
    sample_index) keys and questions without ground truth are errors.
    """

    def canon(answer: str) -> str:
        if canonicalize is None or answer == UNPARSEABLE:
            return answer
        return canonicalize(answer) or UNPARSEABLE

    by_group: dict[tuple[str, str], list[SampleRecord]] = {}
    seen: set[tuple[str, str, int]] = set()
    for record in records:
        if record.key in seen:
            raise DuplicateKey(
                "duplicate (question_id, strategy_id, sample_index): "
                f"{record.key!r}"
            )
        seen.add(record.key)
        by_group.setdefault((record.question_id, record.strategy_id), []).append(record)

    groups: dict[tuple[str, str], QuestionSamples] = {}
    for (question_id, strategy_id), members in by_group.items():
        if question_id not in ground_truth:
            raise MissingGroundTruth(f"no correct answer for question {question_id!r}")
        members.sort(key=lambda r: r.sample_index)
        groups[(question_id, strategy_id)] = QuestionSamples(
            question_id=question_id,
            strategy_id=strategy_id,
            correct_answer=canon(ground_truth[question_id]),
            answers=tuple(canon(r.answer) for r in members),
            mean_prompt_tokens=float(np.mean([r.prompt_tokens for r in members])),
            mean_completion_tokens=float(np.mean([r.completion_tokens for r in members])),
        )
    return groups


def parse_log(
    lines: Iterable[str],
    ground_truth: dict[str, str],
    *,
    canonicalize: Callable[[str], str] | None = None,
) -> dict[tuple[str, str], QuestionSamples]:
    """Parse and group a whole log stream in one pass."""
    return group_records(
        parse_records(lines), ground_truth, canonicalize=canonicalize
    )


def answer_support(samples: QuestionSamples) -> tuple[str, ...]:
    """Distinct answers in first-appearance order, correct answer appended
    at the end when it was never sampled. Index-compatible with
    :func:`estimate_distribution`."""
    support = list(dict.fromkeys(samples.answers))
    if samples.correct_answer not in support:
        support.append(samples.correct_answer)
    return tuple(support)


def estimate_distribution(
    samples: QuestionSamples, *, smoothing: float = 0.0
) -> AnswerDistribution:
    """Maximum-likelihood answer distribution from the recorded pool.

    Each distinct answer gets count/total; the correct answer is appended
    with probability zero when never sampled, so the result always carries
    a valid correct_index. ``smoothing`` adds that many pseudo-counts to
    every answer in the support (add-one smoothing at 1.0); the default is
    the plain empirical estimator.
    """
    if not samples.answers:
        raise ValueError("cannot estimate a distribution from zero samples")
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    support = answer_support(samples)
    counts = {answer: 0 for answer in support}
    for answer in samples.answers:
        counts[answer] += 1
    total = len(samples.answers) + smoothing * len(support)
    probs = tuple((counts[a] + smoothing) / total for a in support)
    return AnswerDistribution(probs, support.index(samples.correct_answer))


def replay_majority(
    samples: QuestionSamples,
    n: int,
    trials: int,
    seed,
    *,
    with_replacement: bool = False,
) -> float:
    """Accuracy of an n-sample majority vote replayed from the recorded pool.

    Each trial subsamples n answers uniformly without replacement (a fresh
    subsample per trial; trials are not disjoint), majority-votes with
    uniform tie-breaking, and scores against the correct answer. Returns
    the success fraction over trials; deterministic for a fixed seed.
    ``with_replacement`` switches to a bootstrap draw instead, which may
    ask for more samples than the pool holds.
    """
    if n < 1:
        raise ValueError("sampling time n must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pool = samples.pool_size
    if pool < 1:
        raise NotEnoughSamples("pool is empty")
    if pool < n and not with_replacement:
        raise NotEnoughSamples(f"pool has {pool} samples, vote needs {n}")

    support = answer_support(samples)
    index = {answer: code for code, answer in enumerate(support)}
    codes = np.array([index[a] for a in samples.answers], dtype=np.int64)
    correct_code = index[samples.correct_answer]
    m = len(support)

    rng = np.random.default_rng(seed)
    block_rows = max(1, _REPLAY_BLOCK_CELLS // pool)
    hits = 0
    done = 0
    while done < trials:
        size = min(block_rows, trials - done)
        if with_replacement:
            picked = codes[rng.integers(0, pool, size=(size, n))]
        else:
            # the n smallest of i.i.d. uniform keys form a uniform n-subset
            keys = rng.random((size, pool))
            picked = codes[np.argpartition(keys, n - 1, axis=1)[:, :n]]
        counts = np.zeros((size, m), dtype=np.int64)
        row = np.arange(size)
        for j in range(n):
            counts[row, picked[:, j]] += 1
        row_max = counts.max(axis=1)
        modal = counts == row_max[:, None]
        scores = np.where(modal, rng.random(counts.shape), -1.0)
        hits += int((scores.argmax(axis=1) == correct_code).sum())
        done += size
    return hits / trials


def cost_of(samples: QuestionSamples, n: int, model: CostModel) -> float:
    """Inference cost of n samples at the recorded mean token usage.

    Linear in n; only valid for strategies whose per-sample context does
    not grow with the round number.
    """
    if n < 1:
        raise ValueError("sampling time n must be >= 1")
    return n * model.sample_cost(
        samples.mean_prompt_tokens, samples.mean_completion_tokens
    )


def mean_replay_accuracy(
    groups: Iterable[QuestionSamples],
    n: int,
    trials: int,
    seed,
    *,
    with_replacement: bool = False,
) -> float:
    """Mean replayed accuracy over a collection of (question, strategy) pools.

    Sub-seeds are derived per pool from ``seed`` and the pool's position,
    so the result does not depend on how callers batch the work.
    """
    groups = list(groups)
    if not groups:
        raise ValueError("no sample pools to replay")
    root = np.random.SeedSequence(seed)
    children = root.spawn(len(groups))
    values = [
        replay_majority(g, n, trials, children[i], with_replacement=with_replacement)
        for i, g in enumerate(groups)
    ]
    return float(math.fsum(values) / len(values))
