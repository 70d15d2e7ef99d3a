"""Answer distributions and vote-probability values.

An AnswerDistribution is a probability vector over a finite answer space
together with the index of the correct answer. It is the single input type
for every estimator in :mod:`votescale.votemath` and for the difficulty
taxonomy in :mod:`votescale.difficulty`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidDistribution

#: Absolute slack allowed on the sum-to-one invariant.
SUM_TOLERANCE = 1e-9

#: Per-vote-probability methods a VoteProbability may be tagged with.
METHODS = ("exact", "closed_form", "monte_carlo", "normal_approx")


@dataclass(frozen=True)
class AnswerDistribution:
    """Probabilities over a finite answer space with a designated correct index.

    Invariants, enforced at construction:

    * every entry is >= 0,
    * the entries sum to 1 within ``SUM_TOLERANCE``,
    * ``correct_index`` addresses a valid entry.
    """

    probs: tuple[float, ...]
    correct_index: int = 0

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise InvalidDistribution("need at least one answer")
        if any(p < 0.0 for p in probs):
            raise InvalidDistribution(f"negative probability in {probs}")
        total = math.fsum(probs)
        if not abs(total - 1.0) <= SUM_TOLERANCE:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        if not 0 <= self.correct_index < len(probs):
            raise InvalidDistribution(
                f"correct_index {self.correct_index} out of range for {len(probs)} answers"
            )

    @property
    def m(self) -> int:
        """Size of the answer space."""
        return len(self.probs)

    @property
    def correct_prob(self) -> float:
        """Probability that a single sample returns the correct answer."""
        return self.probs[self.correct_index]

    @property
    def max_wrong_prob(self) -> float:
        """Largest wrong-answer probability; 0.0 when there is no wrong answer."""
        wrong = [p for j, p in enumerate(self.probs) if j != self.correct_index]
        return max(wrong) if wrong else 0.0

    def correct_first(self) -> tuple[float, ...]:
        """The probabilities reordered so the correct answer comes first."""
        ci = self.correct_index
        return (self.probs[ci],) + tuple(
            p for j, p in enumerate(self.probs) if j != ci
        )


@dataclass(frozen=True)
class VoteProbability:
    """Probability that majority voting over ``n`` samples returns the correct
    answer, tagged with the method that produced it.

    ``stderr`` is present exactly when ``method`` is ``monte_carlo``.
    """

    value: float
    method: str
    n: int
    stderr: float | None = field(default=None)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability {self.value!r} outside [0, 1]")
        if self.n < 1:
            raise ValueError("sampling time n must be >= 1")
        if (self.stderr is not None) != (self.method == "monte_carlo"):
            raise ValueError("stderr is present iff method is monte_carlo")
