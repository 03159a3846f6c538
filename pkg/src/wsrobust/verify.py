"""Exhaustive certification of radius-bounded robustness.

Streams every member of the radius slice through the classifier in batches,
stopping at the first counterexample. A completed stream certifies the radius
as a lower bound on the maximum safe radius; the visit sequence is hashed so a
transcript can be replayed and checked independently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifiers import Classifier, label_of
from .errors import AlreadyMisclassifiedError, InvalidInputError
from .space import (
    PerturbationSpace,
    Sentence,
    clamp_radius,
    count_within,
    iter_assignment_chunks,
    materialize,
)

DEFAULT_BATCH = 256

CERTIFIED = "certified"
FALSIFIED = "falsified"
BUDGET = "budget"


@dataclass(frozen=True)
class Verdict:
    kind: str  # certified | falsified | budget
    radius: int
    texts_checked: int
    texts_total: int
    witness: Sentence | None = None
    witness_distance: int | None = None
    column_order: tuple[int, ...] | None = None
    visit_hash: str | None = None

    def to_record(self, instance_id: int, elapsed_ms: float | None = None) -> dict:
        record = {
            "id": instance_id,
            "radius": self.radius,
            "verdict": self.kind,
            "texts_checked": self.texts_checked,
        }
        if self.witness is not None:
            record["witness_tokens"] = list(self.witness.tokens)
            record["witness_distance"] = self.witness_distance
        if elapsed_ms is not None:
            record["elapsed_ms"] = elapsed_ms
        return record


def _update_hash(digest, tokens: Sequence[str]) -> None:
    digest.update("\x1f".join(tokens).encode("utf-8"))
    digest.update(b"\x1e")


def certify(
    space: PerturbationSpace,
    handle: Classifier,
    radius: int,
    batch_size: int = DEFAULT_BATCH,
    budget: int | None = None,
    column_order: Sequence[int] | None = None,
) -> Verdict:
    """Enumerate the radius slice through the classifier, batched; return
    `falsified` with the first counterexample met, `certified` after a full
    pass, or `budget` when the scored-text budget trips first.

    `budget` counts scored texts, not wall time; it trips between batches, so
    `texts_checked` never exceeds it. The first streamed text is the base text
    itself; if it is already misclassified the precondition is violated and no
    verdict exists. `texts_checked` on a falsified verdict is the witness's
    position in the visit order.
    """
    if batch_size < 1:
        raise InvalidInputError("batch size must be >= 1")
    r = clamp_radius(space, radius)
    total = count_within(space, r).total
    order = tuple(column_order) if column_order is not None else None
    gold = space.base.gold_label
    digest = hashlib.sha256()

    checked = 0
    for block in iter_assignment_chunks(space, r, chunk=batch_size, column_order=order):
        start = 0
        while start < len(block):
            if budget is not None and checked >= budget:
                return Verdict(
                    BUDGET, r, checked, total,
                    column_order=order, visit_hash=digest.hexdigest(),
                )
            take = len(block) - start
            if budget is not None:
                take = min(take, budget - checked)
            rows = block[start : start + take]
            start += take
            texts = [materialize(space, row) for row in rows]
            scores = handle.predict_batch(texts)
            labels = np.argmax(scores, axis=1)
            for i in range(len(rows)):
                _update_hash(digest, texts[i])
                if labels[i] == gold:
                    checked += 1
                    continue
                if checked == 0:  # the first visited text is the base text
                    raise AlreadyMisclassifiedError(
                        "base text is not predicted as its gold label"
                    )
                return Verdict(
                    FALSIFIED,
                    r,
                    checked + 1,
                    total,
                    witness=Sentence(tuple(texts[i]), gold),
                    witness_distance=int(np.count_nonzero(rows[i])),
                    column_order=order,
                    visit_hash=digest.hexdigest(),
                )
    return Verdict(
        CERTIFIED, r, checked, total, column_order=order, visit_hash=digest.hexdigest()
    )


def certify_presorted(
    space: PerturbationSpace,
    handle: Classifier,
    radius: int,
    batch_size: int = DEFAULT_BATCH,
    budget: int | None = None,
) -> Verdict:
    """Same verdict kind as `certify`, but position combinations involving
    high-sensitivity positions are visited first so counterexamples tend to
    surface sooner. Requires a white-box handle."""
    sens = handle.sensitivity(
        space.base.tokens, space.base.gold_label, space.positions
    )
    order = sorted(range(space.m), key=lambda col: (-sens[col], space.positions[col]))
    return certify(
        space, handle, radius, batch_size=batch_size, budget=budget, column_order=order
    )


def _replay_hash(
    space: PerturbationSpace,
    radius: int,
    column_order: Sequence[int] | None,
    prefix: int,
) -> str:
    digest = hashlib.sha256()
    seen = 0
    for block in iter_assignment_chunks(
        space, radius, chunk=DEFAULT_BATCH, column_order=column_order
    ):
        for row in block:
            if seen == prefix:
                return digest.hexdigest()
            _update_hash(digest, materialize(space, row))
            seen += 1
    return digest.hexdigest()


def proof_log(verdict: Verdict, path, space: PerturbationSpace) -> None:
    """Write a replayable transcript: enumeration parameters, visit count, a
    hash of the visit sequence, and the witness when falsified."""
    if verdict.kind == BUDGET:
        raise InvalidInputError("budget-exhausted runs carry no checkable proof")
    transcript = {
        "radius": verdict.radius,
        "gold_label": space.base.gold_label,
        "base_tokens": list(space.base.tokens),
        "candidate_sets": {str(s.position): list(s.candidates) for s in space.subs},
        "column_order": None
        if verdict.column_order is None
        else list(verdict.column_order),
        "verdict": verdict.kind,
        "texts_total": verdict.texts_total,
        "texts_checked": verdict.texts_checked,
        "visit_hash": verdict.visit_hash,
        "witness_tokens": None
        if verdict.witness is None
        else list(verdict.witness.tokens),
        "witness_distance": verdict.witness_distance,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(transcript, fh, sort_keys=True)
        fh.write("\n")


def check_proof(
    path, space: PerturbationSpace, handle: Classifier | None = None
) -> bool:
    """Replay a transcript against the space it claims to describe.

    Recomputes the visited prefix hash and the total count; for a falsified
    transcript additionally rescores the witness (needs `handle`). Returns
    True when everything matches, raises InvalidInputError otherwise.
    """
    with open(path, encoding="utf-8") as fh:
        transcript = json.load(fh)
    radius = transcript["radius"]
    expected_total = count_within(space, radius).total
    if transcript["texts_total"] != expected_total:
        raise InvalidInputError(
            f"transcript total {transcript['texts_total']} != {expected_total}"
        )
    replayed = _replay_hash(
        space, radius, transcript["column_order"], transcript["texts_checked"]
    )
    if replayed != transcript["visit_hash"]:
        raise InvalidInputError("visit hash mismatch; transcript was tampered with")
    if transcript["verdict"] == CERTIFIED:
        if transcript["texts_checked"] != expected_total:
            raise InvalidInputError("certified transcript did not visit everything")
    elif transcript["verdict"] == FALSIFIED:
        if handle is None:
            raise InvalidInputError("rechecking a falsified proof needs a classifier")
        scores = handle.predict_batch([transcript["witness_tokens"]])[0]
        if label_of(scores) == transcript["gold_label"]:
            raise InvalidInputError("witness no longer misclassifies")
    else:
        raise InvalidInputError(f"unknown verdict kind {transcript['verdict']!r}")
    return True
