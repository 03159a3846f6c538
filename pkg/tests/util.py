"""Shared test helpers: independent brute-force oracles and fixture builders.

The oracles deliberately avoid the library's counting/enumeration/search code
paths: histograms come from itertools.product over index ranges, adversarial
minima from scoring the whole product space, and reference scores from a
scalar softmax written with math.exp.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np

from wsrobust import (
    Classifier,
    PerturbationSpace,
    Sentence,
    SubstitutionSet,
    ToyLinearModel,
    label_of,
)


def brute_histogram(sizes: list[int]) -> Counter:
    """Distance histogram of a product space by naive full enumeration;
    index 0 of each factor is 'original'."""
    hist: Counter = Counter()
    for combo in itertools.product(*(range(s) for s in sizes)):
        hist[sum(1 for v in combo if v != 0)] += 1
    return hist


def brute_members(space: PerturbationSpace) -> dict[tuple[str, ...], int]:
    """Every member of the full space mapped to its substitution distance."""
    out: dict[tuple[str, ...], int] = {}
    options = [s.candidates for s in space.subs]
    for pick in itertools.product(*options):
        tokens = list(space.base.tokens)
        dist = 0
        for s, word in zip(space.subs, pick):
            tokens[s.position] = word
            dist += word != s.original
        key = tuple(tokens)
        if key not in out or dist < out[key]:
            out[key] = dist
    return out


def brute_labels(space: PerturbationSpace, handle: Classifier) -> dict[tuple[str, ...], int]:
    members = list(brute_members(space).keys())
    labels = {}
    for i in range(0, len(members), 512):
        batch = members[i : i + 512]
        scores = handle.predict_batch(batch)
        for tokens, row in zip(batch, scores):
            labels[tokens] = label_of(row)
    return labels


def brute_min_adversarial_distance(
    space: PerturbationSpace, handle: Classifier
) -> int | None:
    """Smallest substitution distance of any misclassified member; None if the
    whole space is classified correctly."""
    members = brute_members(space)
    labels = brute_labels(space, handle)
    gold = space.base.gold_label
    dists = [members[t] for t, lab in labels.items() if lab != gold]
    return min(dists) if dists else None


def brute_max_safe_radius(space: PerturbationSpace, handle: Classifier) -> int:
    """Largest radius whose slice contains no misclassified member."""
    d = brute_min_adversarial_distance(space, handle)
    return space.m if d is None else d - 1


def ref_scores(model: ToyLinearModel, tokens) -> list[float]:
    """Scalar re-implementation of the toy model's forward pass."""
    dim = model.dim
    mean = [0.0] * dim
    for t in tokens:
        idx = model.vocab.get(t)
        if idx is not None:
            row = model._emb[idx]
            for j in range(dim):
                mean[j] += float(row[j])
    n = len(tokens)
    mean = [v / n for v in mean]
    logits = []
    for k in range(model.label_count):
        z = float(model.bias[k])
        for j in range(dim):
            z += float(model.weight[k][j]) * mean[j]
        logits.append(z)
    top = max(logits)
    exps = [math.exp(z - top) for z in logits]
    total = sum(exps)
    return [e / total for e in exps]


def finite_diff_sensitivity(
    model: ToyLinearModel, tokens, gold: int, position: int, step: float = 1e-5
) -> float:
    """Central-difference L1 gradient norm of the gold score w.r.t. the
    embedding vector feeding `position`."""
    n = len(tokens)
    base = np.array(
        [model._emb[model.vocab.get(t, model._oov)] for t in tokens], dtype=float
    )

    def gold_score(vectors: np.ndarray) -> float:
        pooled = vectors.mean(axis=0)
        logits = model.weight @ pooled + model.bias
        logits = logits - logits.max()
        exps = np.exp(logits)
        return float(exps[gold] / exps.sum())

    total = 0.0
    for j in range(model.dim):
        bumped = base.copy()
        bumped[position, j] += step
        hi = gold_score(bumped)
        bumped[position, j] -= 2 * step
        lo = gold_score(bumped)
        total += abs((hi - lo) / (2 * step))
    return total


def make_space(sizes: list[int], gold_label: int = 0) -> PerturbationSpace:
    """Synthetic space with |S(p)| = sizes[p]; token at p is 'w{p}o0' and the
    j-th alternative is 'w{p}a{j}'. Always keeps at least one token."""
    tokens = tuple(f"w{p}o0" for p in range(max(len(sizes), 1)))
    subs = tuple(
        SubstitutionSet(
            p, (tokens[p], *(f"w{p}a{j}" for j in range(1, size)))
        )
        for p, size in enumerate(sizes)
        if size >= 1
    )
    return PerturbationSpace(Sentence(tokens, gold_label), subs)


def space_236() -> PerturbationSpace:
    """The (2, 3, 4)-sized space used throughout the worked examples."""
    return make_space([2, 3, 4])


def random_toy_model(
    rng: random.Random, words: list[str], dim: int = 3, labels: int = 2
) -> ToyLinearModel:
    emb = [[rng.gauss(0, 1) for _ in range(dim)] for _ in words]
    weight = [[rng.gauss(0, 1.5) for _ in range(dim)] for _ in range(labels)]
    bias = [rng.gauss(0, 0.2) for _ in range(labels)]
    vocab = {w: i for i, w in enumerate(words)}
    names = [f"label{i}" for i in range(labels)]
    return ToyLinearModel(names, vocab, np.array(emb), np.array(weight), np.array(bias))


def random_instance(
    rng: random.Random,
    max_positions: int = 6,
    max_alternatives: int = 2,
    labels: int = 2,
    dim: int = 3,
):
    """A random (space, model) pair whose base text the model classifies
    correctly; the full space stays small enough to brute-force."""
    while True:
        m = rng.randint(3, max_positions)
        extra = rng.randint(0, 2)
        n = m + extra
        sizes = [rng.randint(2, max_alternatives + 1) for _ in range(m)]
        tokens = [f"t{p}" for p in range(n)]
        subs = []
        words = list(tokens)
        perturbable = sorted(rng.sample(range(n), m))
        for p, size in zip(perturbable, sizes):
            alts = [f"t{p}x{j}" for j in range(1, size)]
            words.extend(alts)
            subs.append(SubstitutionSet(p, (tokens[p], *alts)))
        model = random_toy_model(rng, words, dim=dim, labels=labels)
        scores = model.predict_batch([tuple(tokens)])[0]
        gold = label_of(scores)
        if scores[gold] < 0.55:
            continue
        space = PerturbationSpace(Sentence(tuple(tokens), gold), tuple(subs))
        return space, model


def fixture_15_of_18():
    """Space with |Ω_2| = 18 of which exactly 3 members flip the label
    (the three double substitutions pairing the strong negative words)."""
    vocab = {
        "alpha": 0, "beta": 1, "gamma": 2,
        "dropA": 3, "dropB": 4, "mild": 5, "dipC": 6, "two": 7, "zero": 8,
    }
    emb = np.array(
        [[3.0], [3.0], [3.0], [-2.0], [-2.0], [1.0], [-1.5], [2.0], [0.0]]
    )
    model = ToyLinearModel(
        ["pos", "neg"], vocab, emb, np.array([[1.0], [-1.0]]), np.array([0.0, 0.0])
    )
    base = Sentence(("alpha", "beta", "gamma"), 0)
    space = PerturbationSpace(
        base,
        (
            SubstitutionSet(0, ("alpha", "dropA")),
            SubstitutionSet(1, ("beta", "dropB", "mild")),
            SubstitutionSet(2, ("gamma", "dipC", "two", "zero")),
        ),
    )
    return space, model
