"""Minimal-substitution adversarial search.

The beam attack keeps the highest-scoring substituted texts at each step
(history), picks the next position to touch by a lookahead score over texts
drawn from the beam (future), and stops at the first step whose beam contains
a goal-satisfying text within the modification budget. A one-pass greedy
baseline ranks positions once on the unmodified text and commits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .classifiers import Classifier, ScoringSession, label_of
from .errors import AlreadyMisclassifiedError, InvalidInputError
from .space import PerturbationSpace, Sentence


@dataclass(frozen=True)
class AttackGoal:
    """Untargeted (flip away from gold) or targeted (reach target_label)."""

    gold_label: int
    target_label: int | None = None

    def __post_init__(self) -> None:
        if self.target_label is not None and self.target_label == self.gold_label:
            raise InvalidInputError("target label must differ from the gold label")

    @classmethod
    def untargeted(cls, gold_label: int) -> "AttackGoal":
        return cls(gold_label)

    @classmethod
    def targeted(cls, gold_label: int, target_label: int) -> "AttackGoal":
        return cls(gold_label, target_label)

    def satisfied(self, label: int) -> bool:
        if self.target_label is None:
            return label != self.gold_label
        return label == self.target_label


def score_text(scores: Sequence[float], goal: AttackGoal) -> float:
    """Text importance: 1 - gold confidence (untargeted) or target confidence."""
    if goal.target_label is None:
        return 1.0 - float(scores[goal.gold_label])
    return float(scores[goal.target_label])


@dataclass(frozen=True)
class AttackParams:
    beam_width: int | None = 16  # None: keep everything (exhaustive relaxation)
    max_ratio: float = 0.25  # cap on the fraction of tokens modified
    lookahead_draws: int | None = 8  # None: score the whole beam
    seed: int = 0
    query_budget: int | None = None

    def __post_init__(self) -> None:
        if self.beam_width is not None and self.beam_width < 1:
            raise InvalidInputError("beam width must be >= 1")
        if not 0.0 <= self.max_ratio <= 1.0:
            raise InvalidInputError("max_ratio must lie in [0, 1]")
        if self.lookahead_draws is not None and self.lookahead_draws < 1:
            raise InvalidInputError("lookahead draw count must be >= 1")
        if self.query_budget is not None and self.query_budget < 1:
            raise InvalidInputError("query budget must be >= 1")


@dataclass(frozen=True)
class BeamEntry:
    tokens: tuple[str, ...]
    score: float  # text importance under the goal
    label: int
    distance: int  # substitutions relative to the base text


@dataclass(frozen=True)
class BeamConfiguration:
    """Search state after `step` expansions: the kept texts plus the partition
    of perturbable positions into already-expanded and still-open."""

    step: int
    entries: tuple[BeamEntry, ...]
    expanded: tuple[int, ...]
    remaining: tuple[int, ...]


@dataclass(frozen=True)
class AttackOutcome:
    success: bool
    adversarial: Sentence | None
    substitutions: int | None
    changed_positions: tuple[int, ...] | None
    queries: int

    def to_record(self, instance_id: int, length: int) -> dict:
        return {
            "id": instance_id,
            "success": self.success,
            "substitutions": self.substitutions,
            "ratio": None if self.substitutions is None else self.substitutions / length,
            "queries": self.queries,
            "adversarial_tokens": None
            if self.adversarial is None
            else list(self.adversarial.tokens),
            "changed_positions": None
            if self.changed_positions is None
            else list(self.changed_positions),
        }


def top_k(config: BeamConfiguration, k: int | None) -> BeamConfiguration:
    """Keep the k best entries: highest score, then fewest substitutions, then
    first-seen. Duplicate texts are merged before ranking."""
    seen: set[tuple[str, ...]] = set()
    unique: list[BeamEntry] = []
    for e in config.entries:
        if e.tokens not in seen:
            seen.add(e.tokens)
            unique.append(e)
    ranked = sorted(
        range(len(unique)),
        key=lambda i: (-unique[i].score, unique[i].distance, i),
    )
    if k is not None:
        ranked = ranked[:k]
    return BeamConfiguration(
        config.step, tuple(unique[i] for i in ranked), config.expanded, config.remaining
    )


def _replace(tokens: tuple[str, ...], position: int, word: str) -> tuple[str, ...]:
    if tokens[position] == word:
        return tokens
    out = list(tokens)
    out[position] = word
    return tuple(out)


def _draw_entries(
    entries: Sequence[BeamEntry],
    draws: int | None,
    rng: random.Random,
) -> list[BeamEntry]:
    if draws is None or draws >= len(entries):
        return list(entries)
    weights = [e.score for e in entries]
    if sum(weights) > 0:
        drawn = rng.choices(entries, weights=weights, k=draws)
    else:  # proportional sampling undefined at zero mass
        drawn = [entries[rng.randrange(len(entries))] for _ in range(draws)]
    seen: set[tuple[str, ...]] = set()
    unique = []
    for e in drawn:
        if e.tokens not in seen:
            seen.add(e.tokens)
            unique.append(e)
    return unique


def position_score(
    config: BeamConfiguration,
    position: int,
    space: PerturbationSpace,
    scorer: ScoringSession,
    goal: AttackGoal,
    draws: int | None,
    rng: random.Random,
) -> float:
    """Lookahead importance of an open position: best goal score reachable by
    one substitution there on texts drawn from the beam."""
    chosen = _draw_entries(config.entries, draws, rng)
    sub = space.subs_at(position)
    texts = [
        _replace(e.tokens, position, cand)
        for e in chosen
        for cand in sub.candidates
    ]
    scores = scorer(texts)
    if goal.target_label is None:
        return 1.0 - float(scores[:, goal.gold_label].min())
    return float(scores[:, goal.target_label].max())


def select_position(
    config: BeamConfiguration,
    space: PerturbationSpace,
    scorer: ScoringSession,
    goal: AttackGoal,
    params: AttackParams,
    rng: random.Random,
) -> int:
    """Open position with the highest lookahead score; ties to the lowest index."""
    best_position = -1
    best_value = -math.inf
    for p in config.remaining:
        value = position_score(
            config, p, space, scorer, goal, params.lookahead_draws, rng
        )
        if value > best_value:
            best_value = value
            best_position = p
    return best_position


def expand(
    config: BeamConfiguration,
    position: int,
    space: PerturbationSpace,
    scorer: ScoringSession,
    goal: AttackGoal,
) -> BeamConfiguration:
    """Cross every kept entry with every candidate at `position` (the original
    word included, so declining to substitute stays possible) and score the
    whole product as one batch."""
    sub = space.subs_at(position)
    original = sub.original
    texts: list[tuple[str, ...]] = []
    distances: list[int] = []
    for e in config.entries:
        for cand in sub.candidates:
            texts.append(_replace(e.tokens, position, cand))
            distances.append(e.distance + (cand != original))
    scores = scorer(texts)
    entries = tuple(
        BeamEntry(t, score_text(s, goal), label_of(s), d)
        for t, s, d in zip(texts, scores, distances)
    )
    return BeamConfiguration(
        config.step + 1,
        entries,
        config.expanded + (position,),
        tuple(p for p in config.remaining if p != position),
    )


def _check_start(scorer: ScoringSession, base: Sentence, goal: AttackGoal):
    scores = scorer([base.tokens])[0]
    if label_of(scores) != goal.gold_label:
        raise AlreadyMisclassifiedError(
            "base text is not predicted as its gold label; nothing to attack"
        )
    return scores


def _best_winner(entries: Sequence[BeamEntry]) -> BeamEntry:
    return min(entries, key=lambda e: (e.distance, -e.score))


def _changed(base: Sentence, tokens: tuple[str, ...]) -> tuple[int, ...]:
    return tuple(p for p, (a, b) in enumerate(zip(base.tokens, tokens)) if a != b)


def run_pdp(
    space: PerturbationSpace,
    handle: Classifier,
    goal: AttackGoal,
    params: AttackParams,
) -> AttackOutcome:
    """Beam attack over all perturbable positions.

    On success the substitution count certifies an upper bound on the maximum
    safe radius: R <= substitutions - 1.
    """
    rng = random.Random(params.seed)
    scorer = ScoringSession(handle)
    base = space.base
    start_scores = _check_start(scorer, base, goal)
    max_subs = math.ceil(params.max_ratio * len(base))
    if max_subs < 1:
        return AttackOutcome(False, None, None, None, scorer.queries)

    config = BeamConfiguration(
        step=0,
        entries=(
            BeamEntry(
                base.tokens, score_text(start_scores, goal), goal.gold_label, 0
            ),
        ),
        expanded=(),
        remaining=space.positions,
    )

    def budget_hit() -> bool:
        return (
            params.query_budget is not None and scorer.queries >= params.query_budget
        )

    for _ in range(space.m):
        if budget_hit():
            break
        config = top_k(config, params.beam_width)
        p_star = select_position(config, space, scorer, goal, params, rng)
        if budget_hit():
            break
        config = expand(config, p_star, space, scorer, goal)
        winners = [
            e
            for e in config.entries
            if goal.satisfied(e.label) and e.distance <= max_subs
        ]
        if winners:
            best = _best_winner(winners)
            return AttackOutcome(
                True,
                Sentence(best.tokens, base.gold_label),
                best.distance,
                _changed(base, best.tokens),
                scorer.queries,
            )
    return AttackOutcome(False, None, None, None, scorer.queries)


def run_greedy(
    space: PerturbationSpace,
    handle: Classifier,
    goal: AttackGoal,
    params: AttackParams,
) -> AttackOutcome:
    """Baseline: rank positions once by their single-substitution effect on the
    base text, then substitute the recorded best candidate per position in rank
    order until the goal holds or the modification budget is spent."""
    scorer = ScoringSession(handle)
    base = space.base
    _check_start(scorer, base, goal)
    max_subs = math.ceil(params.max_ratio * len(base))
    if max_subs < 1:
        return AttackOutcome(False, None, None, None, scorer.queries)

    ranking: list[tuple[float, int, str]] = []
    for sub in space.subs:
        texts = [_replace(base.tokens, sub.position, c) for c in sub.candidates]
        scores = scorer(texts)
        if goal.target_label is None:
            confs = scores[:, goal.gold_label]
            j = int(confs.argmin())
            value = 1.0 - float(confs[j])
        else:
            confs = scores[:, goal.target_label]
            j = int(confs.argmax())
            value = float(confs[j])
        ranking.append((value, sub.position, sub.candidates[j]))
    ranking.sort(key=lambda item: (-item[0], item[1]))

    tokens = list(base.tokens)
    changed: list[int] = []
    for _, position, cand in ranking:
        if len(changed) >= max_subs:
            break
        if params.query_budget is not None and scorer.queries >= params.query_budget:
            break
        if cand == base.tokens[position]:
            continue  # original word already scores best here
        tokens[position] = cand
        changed.append(position)
        scores = scorer([tuple(tokens)])[0]
        if goal.satisfied(label_of(scores)):
            return AttackOutcome(
                True,
                Sentence(tuple(tokens), base.gold_label),
                len(changed),
                tuple(sorted(changed)),
                scorer.queries,
            )
    return AttackOutcome(False, None, None, None, scorer.queries)
