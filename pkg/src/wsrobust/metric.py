"""Robustness quantification over a radius slice.

The exact proportion of correctly-classified members is a counting problem,
feasible only on small spaces; elsewhere a sampled estimate carries a
Hoeffding guarantee: with N > ln(2/delta) / (2 epsilon^2) i.i.d. uniform
draws, the estimate deviates from the true proportion by at least epsilon
with probability below delta.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .classifiers import Classifier, ScoringSession, label_of
from .errors import AlreadyMisclassifiedError, InfeasibleError, InvalidInputError
from .space import (
    PerturbationSpace,
    clamp_radius,
    count_within,
    iter_assignment_chunks,
    materialize,
    sample_uniform,
)

DEFAULT_EPSILON = 0.025
DEFAULT_DELTA = 0.005
EXACT_CEILING = 10**6


def required_samples(epsilon: float, delta: float) -> int:
    """Smallest N satisfying N > ln(2/delta) / (2 epsilon^2)."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must lie in (0, 1)")
    bound = math.log(2.0 / delta) / (2.0 * epsilon * epsilon)
    return math.floor(bound) + 1


@dataclass(frozen=True)
class PrEstimate:
    """Estimated fraction of the radius slice classified as the gold label."""

    value: float
    epsilon: float
    delta: float
    samples: int
    successes: int
    radius: int

    def __post_init__(self) -> None:
        if self.samples < 1 or not 0 <= self.successes <= self.samples:
            raise InvalidInputError("successes must lie in [0, samples]")

    def to_record(self, instance_id: int) -> dict:
        return {
            "id": instance_id,
            "radius": self.radius,
            "pr_hat": self.value,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "samples": self.samples,
            "successes": self.successes,
            "exact": False,
        }


def default_radius(length: int) -> int:
    """Reporting convention: a quarter of the sentence length, rounded up."""
    return math.ceil(0.25 * length)


def estimate_pr(
    space: PerturbationSpace,
    handle: Classifier,
    radius: int,
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
    rng: random.Random | None = None,
    samples: int | None = None,
    batch_size: int = 256,
) -> PrEstimate:
    """Sample uniformly from the radius slice (with replacement, X included)
    and report the fraction predicted as the gold label."""
    rng = rng if rng is not None else random.Random(0)
    scorer = ScoringSession(handle)
    gold = space.base.gold_label
    start = scorer([space.base.tokens])[0]
    if label_of(start) != gold:
        raise AlreadyMisclassifiedError(
            "base text is not predicted as its gold label"
        )
    r = clamp_radius(space, radius)
    n = required_samples(epsilon, delta)
    if samples is not None:
        n = max(n, samples)
    draws = sample_uniform(space, r, rng, n)
    successes = 0
    for i in range(0, n, batch_size):
        batch = [s.tokens for s in draws[i : i + batch_size]]
        scores = scorer(batch)
        successes += int((scores.argmax(axis=1) == gold).sum())
    return PrEstimate(successes / n, epsilon, delta, n, successes, r)


def exact_pr(
    space: PerturbationSpace,
    handle: Classifier,
    radius: int,
    ceiling: int = EXACT_CEILING,
    batch_size: int = 256,
) -> Fraction:
    """Exact fraction of the radius slice classified as the gold label, by
    full enumeration; refuses spaces above the ceiling."""
    r = clamp_radius(space, radius)
    total = count_within(space, r).total
    if total > ceiling:
        raise InfeasibleError(
            f"|slice| = {total} exceeds the enumeration ceiling {ceiling}; "
            "use estimate_pr instead"
        )
    gold = space.base.gold_label
    correct = 0
    for block in iter_assignment_chunks(space, r, chunk=batch_size):
        texts = [materialize(space, row) for row in block]
        scores = handle.predict_batch(texts)
        correct += int((scores.argmax(axis=1) == gold).sum())
    return Fraction(correct, total)
