"""Dataset, lexicon, and record-file ingestion/emission.

Datasets are newline-delimited JSON records {"text": "<space-separated
tokens>", "label": <int>} with an optional "perturbable_from" index marking a
non-perturbable prefix (premise tokens). Lexicons are a single JSON object
mapping word -> ranked candidate array; keys starting with "__" are metadata
("__config__": {"lowercase": true} switches lookups to lowercased keys).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidInputError
from .space import Lexicon, Sentence


@dataclass(frozen=True)
class DatasetInstance:
    id: int
    sentence: Sentence
    perturbable_from: int = 0


def load_lexicon(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise InvalidInputError(f"lexicon {path} must be a JSON object")
    config = payload.get("__config__", {})
    lowercase = bool(config.get("lowercase", False))
    entries = {}
    for word, candidates in payload.items():
        if word.startswith("__"):
            continue
        if not isinstance(candidates, list) or not all(
            isinstance(c, str) for c in candidates
        ):
            raise InvalidInputError(f"lexicon entry {word!r} must be a string array")
        key = word.lower() if lowercase else word
        entries[key] = tuple(candidates)
    return Lexicon(entries, lowercase)


def load_dataset(path) -> list[DatasetInstance]:
    instances = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "text" not in record or "label" not in record:
                raise InvalidInputError(f"{path}:{i + 1}: record needs text and label")
            sentence = Sentence.from_text(record["text"], int(record["label"]))
            instances.append(
                DatasetInstance(
                    id=i,
                    sentence=sentence,
                    perturbable_from=int(record.get("perturbable_from", 0)),
                )
            )
    return instances


def dump_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_records(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dump_record(record))
            fh.write("\n")


def read_records(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_csv_column(path, header: str, values: Iterable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for v in values:
            fh.write(f"{v}\n")
