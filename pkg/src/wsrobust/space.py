"""Texts, substitution candidates, and the radius-bounded perturbation space.

A `PerturbationSpace` pairs a sentence with per-position candidate sets and
supports exact counting of members by substitution distance (elementary
symmetric polynomial recurrence over per-position alternative counts),
deterministic ordered enumeration, and exact-uniform sampling via backward
traversal of the counting table. All counts are exact big integers; spaces for
long texts overflow 64-bit arithmetic by design.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidAssignmentError, InvalidInputError


@dataclass(frozen=True)
class Sentence:
    """A tokenized text with its gold label."""

    tokens: tuple[str, ...]
    gold_label: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) == 0:
            raise InvalidInputError("a sentence needs at least one token")
        if any(not isinstance(t, str) or not t for t in self.tokens):
            raise InvalidInputError("tokens must be non-empty strings")

    @classmethod
    def from_text(cls, text: str, gold_label: int = 0) -> "Sentence":
        """Whitespace-split pre-tokenized text; no re-tokenization happens."""
        return cls(tuple(text.split()), gold_label)

    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class SubstitutionSet:
    """Candidate words for one position; the original word is candidates[0]."""

    position: int
    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if self.position < 0:
            raise InvalidInputError("position must be non-negative")
        if len(self.candidates) < 1:
            raise InvalidInputError("candidate set cannot be empty")
        if len(set(self.candidates)) != len(self.candidates):
            raise InvalidInputError(
                f"duplicate candidates at position {self.position}"
            )

    @property
    def original(self) -> str:
        return self.candidates[0]

    @property
    def alternatives(self) -> tuple[str, ...]:
        return self.candidates[1:]


@dataclass(frozen=True)
class PerturbationSpace:
    """A sentence plus candidate sets at its perturbable positions."""

    base: Sentence
    subs: tuple[SubstitutionSet, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.subs, key=lambda s: s.position))
        object.__setattr__(self, "subs", ordered)
        seen: set[int] = set()
        for s in ordered:
            if s.position >= len(self.base):
                raise InvalidInputError(
                    f"position {s.position} outside sentence of length {len(self.base)}"
                )
            if s.position in seen:
                raise InvalidInputError(f"duplicate substitution set at {s.position}")
            seen.add(s.position)
            if s.original != self.base.tokens[s.position]:
                raise InvalidInputError(
                    f"candidates[0] at position {s.position} must be the original word"
                )
            if self.base.tokens[s.position] in s.alternatives:
                raise InvalidInputError(
                    f"original word duplicated among alternatives at {s.position}"
                )

    @property
    def positions(self) -> tuple[int, ...]:
        """Perturbable positions, ascending."""
        return tuple(s.position for s in self.subs)

    @property
    def m(self) -> int:
        """Number of perturbable positions."""
        return len(self.subs)

    def alt_counts(self) -> list[int]:
        """Non-original candidate count per perturbable position."""
        return [len(s.alternatives) for s in self.subs]

    def subs_at(self, position: int) -> SubstitutionSet:
        for s in self.subs:
            if s.position == position:
                return s
        raise InvalidInputError(f"position {position} is not perturbable")


@dataclass(frozen=True)
class DistanceProfile:
    """Member counts of a space sliced by exact substitution distance."""

    radius: int
    counts: tuple[int, ...]  # counts[d] = members at exactly distance d

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(self.counts))
        if self.radius != len(self.counts) - 1:
            raise InvalidInputError("profile needs one count per distance 0..radius")
        if self.counts[0] != 1:
            raise InvalidInputError("exactly one member sits at distance 0")
        if any(c < 0 for c in self.counts):
            raise InvalidInputError("counts must be non-negative")

    @property
    def total(self) -> int:
        """|Ω_r(X)|: members within the radius."""
        return sum(self.counts)


@dataclass(frozen=True)
class Lexicon:
    """Word -> ranked candidate words, as loaded from a lexicon file."""

    entries: Mapping[str, tuple[str, ...]]
    lowercase: bool = False

    def lookup(self, word: str) -> tuple[str, ...]:
        key = word.lower() if self.lowercase else word
        return tuple(self.entries.get(key, ()))


def build_space(
    sentence: Sentence,
    lexicon: Lexicon,
    eta: int = 5,
    perturbable_from: int = 0,
) -> PerturbationSpace:
    """Attach to each token its original word plus up to `eta` top-ranked
    lexicon candidates. Tokens without entries (or whose entries add nothing
    beyond the original) are non-perturbable; positions before
    `perturbable_from` are never perturbed (premise tokens).
    """
    if eta < 1:
        raise InvalidInputError("eta must be >= 1")
    subs = []
    for p, token in enumerate(sentence.tokens):
        if p < perturbable_from:
            continue
        ranked = lexicon.lookup(token)
        if not ranked:
            continue
        picked: list[str] = []
        for cand in ranked:
            if cand != token and cand not in picked:
                picked.append(cand)
            if len(picked) == eta:
                break
        if picked:
            subs.append(SubstitutionSet(p, (token, *picked)))
    return PerturbationSpace(sentence, tuple(subs))


def cardinality(space: PerturbationSpace) -> int:
    """|Ω(X)| as an exact big integer: the product of candidate-set sizes."""
    out = 1
    for s in space.subs:
        out *= len(s.candidates)
    return out


def _prefix_table(alt_counts: Sequence[int], radius: int) -> list[list[int]]:
    """Rows E[i][d]: weighted count of size-d subsets among the first i
    positions, weight = product of alternative counts. E[i][d] =
    E[i-1][d] + c_i * E[i-1][d-1]."""
    table = [[1] + [0] * radius]
    for c in alt_counts:
        prev = table[-1]
        row = prev[:]
        for d in range(1, radius + 1):
            row[d] = prev[d] + c * prev[d - 1]
        table.append(row)
    return table


def clamp_radius(space: PerturbationSpace, radius: int) -> int:
    """Radii above m describe the same slice as m; negative radii are invalid."""
    if radius < 0:
        raise InvalidInputError("radius must be non-negative")
    return min(radius, space.m)


def count_within(space: PerturbationSpace, radius: int) -> DistanceProfile:
    """Exact per-distance member counts of Ω_radius(X)."""
    r = clamp_radius(space, radius)
    table = _prefix_table(space.alt_counts(), r)
    return DistanceProfile(r, tuple(table[-1]))


def materialize(space: PerturbationSpace, row: np.ndarray) -> list[str]:
    """Token list for one kernel assignment row."""
    tokens = list(space.base.tokens)
    for col, j in enumerate(row):
        if j:
            s = space.subs[col]
            tokens[s.position] = s.candidates[j]
    return tokens


def iter_assignment_chunks(
    space: PerturbationSpace,
    radius: int,
    chunk: int = 1024,
    column_order: Sequence[int] | None = None,
) -> Iterator[np.ndarray]:
    """Raw kernel stream for Ω_radius(X); columns follow `space.subs` order."""
    r = clamp_radius(space, radius)
    return _kernels.assignment_chunks(space.alt_counts(), r, chunk, column_order)


def enumerate_within(
    space: PerturbationSpace, radius: int, chunk: int = 1024
) -> Iterator[Sentence]:
    """Every member of Ω_radius(X) exactly once, nondecreasing distance,
    starting with the base sentence; deterministic order."""
    gold = space.base.gold_label
    for block in iter_assignment_chunks(space, radius, chunk):
        for row in block:
            yield Sentence(tuple(materialize(space, row)), gold)


def apply(space: PerturbationSpace, assignment: Mapping[int, str]) -> Sentence:
    """Substitute the assigned words; every assigned position must be
    perturbable and every word must belong to its candidate set."""
    tokens = list(space.base.tokens)
    perturbable = {s.position: s for s in space.subs}
    for position, word in assignment.items():
        s = perturbable.get(position)
        if s is None:
            raise InvalidAssignmentError(f"position {position} is not perturbable")
        if word not in s.candidates:
            raise InvalidAssignmentError(
                f"{word!r} is not a candidate at position {position}"
            )
        tokens[position] = word
    return Sentence(tuple(tokens), space.base.gold_label)


def distance(a: Sentence, b: Sentence) -> int:
    """Number of positions whose tokens differ."""
    if len(a) != len(b):
        raise InvalidInputError("distance needs equal-length sentences")
    return sum(x != y for x, y in zip(a.tokens, b.tokens))


def sample_uniform(
    space: PerturbationSpace,
    radius: int,
    rng: random.Random,
    count: int,
) -> list[Sentence]:
    """`count` independent exact-uniform draws (with replacement) from
    Ω_radius(X).

    Each draw picks a distance d proportional to the exact member count at d,
    then walks the counting table backwards to pick the substituted position
    subset with the correct product weights, then picks one alternative per
    chosen position uniformly. Integer arithmetic throughout, so the draw is
    exact even when counts exceed 64 bits.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    r = clamp_radius(space, radius)
    alt_counts = space.alt_counts()
    table = _prefix_table(alt_counts, r)
    totals = table[-1]
    grand = sum(totals)

    gold = space.base.gold_label
    out: list[Sentence] = []
    for _ in range(count):
        u = rng.randrange(grand)
        d = 0
        while u >= totals[d]:
            u -= totals[d]
            d += 1
        chosen: list[int] = []
        remaining = d
        for i in range(space.m, 0, -1):
            if remaining == 0:
                break
            with_i = alt_counts[i - 1] * table[i - 1][remaining - 1]
            if rng.randrange(table[i][remaining]) < with_i:
                chosen.append(i - 1)
                remaining -= 1
        tokens = list(space.base.tokens)
        for col in sorted(chosen):
            s = space.subs[col]
            tokens[s.position] = s.alternatives[rng.randrange(len(s.alternatives))]
        out.append(Sentence(tuple(tokens), gold))
    return out
