"""Classifier backends behind one batch-scoring contract.

Every backend maps a batch of token sequences to one probability vector per
text (order-preserving, deterministic, rows sum to 1) and keeps a monotone
count of texts scored. The built-in toy linear model adds a white-box
capability: closed-form gradients of the gold-label score with respect to a
position's embedding, used for sensitivity pre-sorting.
"""

from __future__ import annotations

import json
import shlex
import socket
import subprocess
import threading
from typing import Sequence

import numpy as np

from .errors import BackendError, CapabilityError, InvalidInputError

SCORE_TOLERANCE = 1e-6


def label_of(scores: Sequence[float]) -> int:
    """Argmax label index; ties go to the lowest index."""
    return int(np.argmax(np.asarray(scores)))


class Classifier:
    """Base scoring oracle. Subclasses implement `_score_batch`."""

    white_box: bool = False

    def __init__(self, labels: Sequence[str]):
        if not labels:
            raise InvalidInputError("a classifier needs at least one label")
        self.labels = tuple(labels)
        self._queries = 0
        self._lock = threading.Lock()

    @property
    def label_count(self) -> int:
        return len(self.labels)

    @property
    def query_count(self) -> int:
        """Total individual texts scored through this handle."""
        return self._queries

    def predict_batch(self, texts: Sequence[Sequence[str]]) -> np.ndarray:
        """Score a non-empty batch; returns an array of shape (len(texts), c)."""
        if len(texts) == 0:
            raise InvalidInputError("predict_batch requires a non-empty batch")
        scores = self._score_batch([tuple(t) for t in texts])
        with self._lock:
            self._queries += len(texts)
        return scores

    def _score_batch(self, texts: list[tuple[str, ...]]) -> np.ndarray:
        raise NotImplementedError

    def sensitivity(
        self,
        tokens: Sequence[str],
        gold_label: int,
        positions: Sequence[int],
    ) -> list[float]:
        """L1 norm of d(gold score)/d(embedding at position), per position."""
        raise CapabilityError(f"{type(self).__name__} has no white-box capability")

    def close(self) -> None:
        pass


class ScoringSession:
    """Per-run scorer: counts the texts one logical run sends through a shared
    handle, so reported query counts stay exact under concurrent runs."""

    def __init__(self, handle: Classifier):
        self.handle = handle
        self.queries = 0

    def __call__(self, texts: Sequence[Sequence[str]]) -> np.ndarray:
        self.queries += len(texts)
        return self.handle.predict_batch(texts)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


class ToyLinearModel(Classifier):
    """softmax(W @ meanpool(token embeddings) + b); OOV tokens embed to zero.

    Deterministic, stateless, and cheap enough for exhaustive desk-scale
    verification; stands in for real target models behind the same contract.
    """

    white_box = True

    def __init__(
        self,
        labels: Sequence[str],
        vocab: dict[str, int],
        embeddings: np.ndarray,
        weight: np.ndarray,
        bias: np.ndarray,
    ):
        super().__init__(labels)
        self.vocab = dict(vocab)
        emb = np.asarray(embeddings, dtype=np.float64)
        self.weight = np.asarray(weight, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if emb.ndim != 2:
            raise InvalidInputError("embeddings must be a 2-D array")
        if self.weight.shape != (len(self.labels), emb.shape[1]):
            raise InvalidInputError("weight must be (labels, dim)")
        if self.bias.shape != (len(self.labels),):
            raise InvalidInputError("bias must be (labels,)")
        for name, arr in (("embeddings", emb), ("weight", self.weight), ("bias", self.bias)):
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite values")
        if self.vocab and max(self.vocab.values()) >= emb.shape[0]:
            raise InvalidInputError("vocab index outside embedding table")
        # extra zero row = OOV embedding
        self._emb = np.vstack([emb, np.zeros((1, emb.shape[1]))])
        self._oov = emb.shape[0]
        self.dim = emb.shape[1]

    def _indices(self, tokens: Sequence[str]) -> list[int]:
        get = self.vocab.get
        oov = self._oov
        return [get(t, oov) for t in tokens]

    def _pooled(self, texts: list[tuple[str, ...]]) -> np.ndarray:
        flat: list[int] = []
        offsets = [0]
        for t in texts:
            flat.extend(self._indices(t))
            offsets.append(len(flat))
        gathered = self._emb[np.asarray(flat, dtype=np.intp)]
        sums = np.add.reduceat(gathered, np.asarray(offsets[:-1], dtype=np.intp), axis=0)
        lengths = np.diff(offsets).astype(np.float64)
        return sums / lengths[:, None]

    def _score_batch(self, texts: list[tuple[str, ...]]) -> np.ndarray:
        pooled = self._pooled(texts)
        return _softmax(pooled @ self.weight.T + self.bias)

    def sensitivity(
        self,
        tokens: Sequence[str],
        gold_label: int,
        positions: Sequence[int],
    ) -> list[float]:
        if not 0 <= gold_label < self.label_count:
            raise InvalidInputError("gold label outside label range")
        pooled = self._pooled([tuple(tokens)])[0]
        probs = _softmax(pooled @ self.weight.T + self.bias)
        # d p_y / d h = p_y * (W[y] - sum_k p_k W[k]); mean pooling divides by n
        grad_h = probs[gold_label] * (self.weight[gold_label] - probs @ self.weight)
        per_position = float(np.abs(grad_h).sum()) / len(tokens)
        return [per_position for _ in positions]

    def to_payload(self) -> dict:
        return {
            "labels": list(self.labels),
            "dim": self.dim,
            "vocab": self.vocab,
            "embeddings": self._emb[:-1].tolist(),
            "weight": self.weight.tolist(),
            "bias": self.bias.tolist(),
        }


def load_toy_model(path) -> ToyLinearModel:
    """Load a toy model from its JSON file; rejects malformed or non-finite data."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        model = ToyLinearModel(
            labels=payload["labels"],
            vocab=payload["vocab"],
            embeddings=np.asarray(payload["embeddings"], dtype=np.float64),
            weight=np.asarray(payload["weight"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed toy model file {path}: {exc}") from exc
    if "dim" in payload and payload["dim"] != model.dim:
        raise InvalidInputError("declared dim does not match embeddings")
    return model


def save_toy_model(model: ToyLinearModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_payload(), fh)


class ExternalClassifier(Classifier):
    """Client for the newline-delimited JSON wire protocol.

    Handshake: send {"op":"hello"}, receive {"op":"hello","labels":[...]}.
    Scoring: {"op":"predict","id":n,"texts":[[tok,...],...]} answered by
    {"op":"scores","id":n,"scores":[[...],...]}; replies may arrive in any
    order and are matched by id. Wire access is serialized by a lock so the
    handle can be shared across workers.
    """

    white_box = False

    def __init__(self, reader, writer, close_fn=None):
        self._reader = reader
        self._writer = writer
        self._close_fn = close_fn
        self._wire_lock = threading.Lock()
        self._next_id = 0
        self._pending: dict[int, list] = {}
        labels = self._handshake()
        super().__init__(labels)

    @classmethod
    def from_command(cls, command: str | Sequence[str]) -> "ExternalClassifier":
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        try:
            proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise BackendError(f"cannot start backend {argv!r}: {exc}") from exc

        def close():
            proc.stdin.close()
            proc.wait(timeout=10)

        return cls(proc.stdout, proc.stdin, close)

    @classmethod
    def from_address(cls, host: str, port: int) -> "ExternalClassifier":
        try:
            sock = socket.create_connection((host, port), timeout=30)
        except OSError as exc:
            raise BackendError(f"cannot reach backend at {host}:{port}: {exc}") from exc
        fh = sock.makefile("rw", encoding="utf-8", newline="\n")

        def close():
            fh.close()
            sock.close()

        return cls(fh, fh, close)

    def _send(self, message: dict) -> None:
        self._writer.write(json.dumps(message) + "\n")
        self._writer.flush()

    def _read_message(self) -> dict:
        line = self._reader.readline()
        if not line:
            raise BackendError("backend closed the stream")
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BackendError(f"backend sent invalid JSON: {line!r}") from exc
        if not isinstance(message, dict) or "op" not in message:
            raise BackendError(f"backend sent a malformed message: {message!r}")
        return message

    def _handshake(self) -> list[str]:
        with self._wire_lock:
            self._send({"op": "hello"})
            message = self._read_message()
        if message.get("op") != "hello" or not isinstance(message.get("labels"), list):
            raise BackendError(f"handshake failed: {message!r}")
        return message["labels"]

    def _score_batch(self, texts: list[tuple[str, ...]]) -> np.ndarray:
        with self._wire_lock:
            request_id = self._next_id
            self._next_id += 1
            self._send(
                {"op": "predict", "id": request_id, "texts": [list(t) for t in texts]}
            )
            while request_id not in self._pending:
                message = self._read_message()
                op = message.get("op")
                if op == "scores":
                    self._pending[int(message["id"])] = message["scores"]
                elif op == "error":
                    raise BackendError(
                        f"backend error for request {message.get('id')}: "
                        f"{message.get('message')}"
                    )
                else:
                    raise BackendError(f"unexpected reply: {message!r}")
            raw = self._pending.pop(request_id)
        return self._validate(raw, len(texts))

    def _validate(self, raw, batch_size: int) -> np.ndarray:
        scores = np.asarray(raw, dtype=np.float64)
        if scores.shape != (batch_size, self.label_count):
            raise BackendError(
                f"expected {batch_size}x{self.label_count} scores, got {scores.shape}"
            )
        if not np.all(np.isfinite(scores)):
            raise BackendError("backend sent non-finite scores")
        if scores.min() < -SCORE_TOLERANCE or scores.max() > 1 + SCORE_TOLERANCE:
            raise BackendError("backend scores outside [0, 1]")
        if np.abs(scores.sum(axis=1) - 1.0).max() > SCORE_TOLERANCE:
            raise BackendError("backend score rows do not sum to 1")
        return scores

    def close(self) -> None:
        if self._close_fn is not None:
            self._close_fn()
            self._close_fn = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def connect_external(
    command: str | Sequence[str] | None = None,
    address: str | None = None,
) -> ExternalClassifier:
    """Connect to an external backend via subprocess pipes or `host:port`."""
    if (command is None) == (address is None):
        raise InvalidInputError("provide exactly one of command or address")
    if command is not None:
        return ExternalClassifier.from_command(command)
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise InvalidInputError(f"address must be host:port, got {address!r}")
    return ExternalClassifier.from_address(host, int(port))
