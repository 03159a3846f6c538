#!/usr/bin/env python3
"""Regenerates the shipped fixtures (toy model, lexicon, datasets).

Deterministic given the seed below; rerunning overwrites fixtures/ in place.
The instances are three-class token sequences (two sentiment poles plus an
"odd" register), all classified correctly by the generated model. Three
labels make the score landscape non-additive, so the beam attack's lookahead
has room to beat the greedy baseline, and lexicon entries include cross-class
candidates so most instances fall to a couple of substitutions.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wsrobust import (  # noqa: E402
    Sentence,
    ToyLinearModel,
    build_space,
    label_of,
    load_lexicon,
    save_toy_model,
)

SEED = 5
DIM = 8

POSITIVE = ["good", "great", "fine", "nice", "superb", "happy", "bright", "solid", "charm", "gem"]
NEGATIVE = ["bad", "poor", "awful", "dull", "bland", "sad", "weak", "gray", "flaw", "bore"]
ODD = ["odd", "weird", "quirky", "strange", "offbeat", "uncanny", "surreal", "cryptic", "eerie", "baffling"]
NEUTRAL = ["film", "plot", "actor", "scene", "music", "pace", "tone", "cast",
           "story", "end", "view", "shot", "frame", "cut"]
GROUPS = [POSITIVE, NEGATIVE, ODD]


def build_model(rng: np.random.Generator) -> ToyLinearModel:
    words = POSITIVE + NEGATIVE + ODD + NEUTRAL
    # three class axes ~120 degrees apart in a random 2-plane
    basis = rng.normal(size=(2, DIM))
    q, _ = np.linalg.qr(basis.T)
    plane = q.T[:2]
    theta = [0.0, 2 * np.pi / 3, 4 * np.pi / 3]
    axes = [np.cos(t) * plane[0] + np.sin(t) * plane[1] for t in theta]
    rows = []
    for w in words:
        noise = rng.normal(scale=0.35, size=DIM)
        if w in POSITIVE:
            rows.append(2.0 * axes[0] + noise)
        elif w in NEGATIVE:
            rows.append(2.0 * axes[1] + noise)
        elif w in ODD:
            rows.append(2.0 * axes[2] + noise)
        else:
            rows.append(0.3 * rng.normal(size=DIM))
    weight = np.vstack([3.0 * a + rng.normal(scale=0.15, size=DIM) for a in axes])
    bias = rng.normal(scale=0.05, size=3)
    vocab = {w: i for i, w in enumerate(words)}
    return ToyLinearModel(["positive", "negative", "odd"], vocab, np.array(rows), weight, bias)


def build_lexicon(rng: random.Random) -> dict:
    """Signal words offer same-class synonyms plus cross-class words (the
    attack paths); neutrals swap among themselves."""
    lex: dict[str, list[str]] = {}
    for group in GROUPS:
        others = [g for g in GROUPS if g is not group]
        for w in group:
            same = rng.sample([x for x in group if x != w], 3)
            cross = [rng.choice(others[0]), rng.choice(others[1])]
            neutral = rng.sample(NEUTRAL, 1)
            lex[w] = same[:2] + [cross[0]] + neutral + [same[2], cross[1]]
    for w in NEUTRAL:
        lex[w] = rng.sample([x for x in NEUTRAL if x != w], 3)
    return lex


def build_instances(model, lexicon, rng: random.Random, count: int) -> list[dict]:
    instances = []
    attempts = 0
    while len(instances) < count:
        attempts += 1
        if attempts > 60 * count:
            raise RuntimeError("fixture generation is not converging")
        label = rng.randrange(3)
        pool = GROUPS[label]
        n = rng.randint(8, 12)
        k_signal = rng.randint(3, 4)
        tokens = rng.sample(pool, k_signal) + rng.sample(NEUTRAL, n - k_signal)
        rng.shuffle(tokens)
        sentence = Sentence(tuple(tokens), label)
        scores = model.predict_batch([sentence.tokens])[0]
        if label_of(scores) != label or scores[label] < 0.6:
            continue
        space = build_space(sentence, lexicon, eta=5)
        if space.m < 5:
            continue
        instances.append({"text": " ".join(tokens), "label": label})
    return instances


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "fixtures"
    out_dir.mkdir(exist_ok=True)
    np_rng = np.random.default_rng(SEED)
    rng = random.Random(SEED)

    model = build_model(np_rng)
    save_toy_model(model, out_dir / "toy_model.json")

    lexicon_payload = build_lexicon(rng)
    with open(out_dir / "lexicon.json", "w", encoding="utf-8") as fh:
        json.dump(lexicon_payload, fh, indent=1, sort_keys=True)

    lexicon = load_lexicon(out_dir / "lexicon.json")
    instances = build_instances(model, lexicon, rng, 50)
    with open(out_dir / "dataset.jsonl", "w", encoding="utf-8") as fh:
        for record in instances:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    with open(out_dir / "dataset_small.jsonl", "w", encoding="utf-8") as fh:
        for record in instances[:12]:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    print(f"wrote {len(instances)} instances to {out_dir}")


if __name__ == "__main__":
    main()
