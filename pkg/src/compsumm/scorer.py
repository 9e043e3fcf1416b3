"""Sentence and span posteriors from linear-logistic models or score files.

Three independent models are used: extraction, plausibility and salience.
Each is a :class:`LinearScorer` over hand-built features; alternatively
any of them can be replaced by a :class:`ScoreTable` of externally computed
probabilities.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ContractError, TrainingDivergedError, ValidationError
from .rules import RULE_ORDER, CandidateSpan
from .treebank import DocumentRecord, SentenceRecord, height, walk

FEATURE_SCHEMA_VERSION = 1

SPAN_TAGS = ("PRN", "FRAG", "JJ", "ADJP", "RB", "ADVP", "PP", "NP", "VP", "S", "SBAR")
SPAN_FEATURE_NAMES = (
    [f"rule={r.value}" for r in RULE_ORDER]
    + [f"tag={t}" for t in SPAN_TAGS] + ["tag=other"]
    + ["len_ratio", "rel_start", "depth", "touches_edge", "cap_ratio", "bias"]
)
SENTENCE_FEATURE_NAMES = ("position", "len_ratio", "centroid_overlap", "is_first", "bias")
SPAN_DIM = len(SPAN_FEATURE_NAMES)
SENTENCE_DIM = len(SENTENCE_FEATURE_NAMES)

_STOPWORDS = frozenset("""
a an the and or but if of at by for with about to from in on into over under
is are was were be been being has have had do does did will would can could
should may might must this that these those it its he she they them his her
their we our you your i me my as not no so than then there here who which
what when where why how all any some such said says
""".split())
_ALNUM = re.compile(r"[a-z0-9]")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    steps: int = 2000
    batch_size: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.steps < 0 or self.batch_size < 1:
            raise ContractError(f"invalid training config {self}")


@dataclass
class LinearScorer:
    weights: np.ndarray
    bias: float = 0.0
    task: str = ""

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if not (np.all(np.isfinite(self.weights)) and math.isfinite(self.bias)):
            raise ValidationError("model parameters must be finite")

    @classmethod
    def zeros(cls, dim: int, task: str = "") -> LinearScorer:
        return cls(np.zeros(dim), 0.0, task)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def to_json(self) -> dict:
        out = {"dim": self.dim, "weights": self.weights.tolist(), "bias": self.bias,
               "feature_schema_version": FEATURE_SCHEMA_VERSION}
        if self.task:
            out["task"] = self.task
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> LinearScorer:
        if obj.get("feature_schema_version") != FEATURE_SCHEMA_VERSION:
            raise ValidationError(
                f"model feature schema {obj.get('feature_schema_version')!r}, "
                f"expected {FEATURE_SCHEMA_VERSION}")
        weights = obj["weights"]
        if len(weights) != obj["dim"]:
            raise ValidationError("model dim does not match weight count")
        return cls(np.array(weights, dtype=float), float(obj["bias"]), obj.get("task", ""))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path) -> LinearScorer:
        return cls.from_json(json.loads(Path(path).read_text()))


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def predict(model: LinearScorer, x) -> np.ndarray | float:
    """sigma(w.x + b) for one vector or each row of a matrix, strictly inside (0, 1)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.dim:
        raise ContractError(f"feature dim {x.shape[-1]} != model dim {model.dim}")
    # clip keeps the output away from exactly 0.0 / 1.0 in float64
    p = sigmoid(np.clip(x @ model.weights + model.bias, -30.0, 30.0))
    return float(p) if p.ndim == 0 else p


def _content(tokens: Sequence[str]) -> set[str]:
    out = set()
    for t in tokens:
        t = t.lower()
        if t not in _STOPWORDS and _ALNUM.search(t):
            out.add(t)
    return out


def featurize_span(sentence: SentenceRecord, span: CandidateSpan) -> np.ndarray:
    n = len(sentence)
    s, e = span.primary
    x = np.zeros(SPAN_DIM)
    x[RULE_ORDER.index(span.rule)] = 1.0
    tag_slot = SPAN_TAGS.index(span.tag) if span.tag in SPAN_TAGS else len(SPAN_TAGS)
    x[len(RULE_ORDER) + tag_slot] = 1.0
    depth = next((d for c, _, d in walk(sentence.tree) if c.span == span.primary), 0)
    words = sentence.words[s:e]
    base = len(RULE_ORDER) + len(SPAN_TAGS) + 1
    x[base:] = (
        (e - s) / n,
        s / n,
        depth / max(height(sentence.tree), 1),
        float(s == 0 or e == n),
        sum(w[:1].isupper() for w in words) / (e - s),
        1.0,
    )
    return x


def featurize_sentence(doc: DocumentRecord, i: int) -> np.ndarray:
    n = len(doc.sentences)
    if not 0 <= i < n:
        raise ContractError(f"sentence index {i} out of range for {n} sentences")
    lengths = [len(s) for s in doc.sentences]
    content = [_content(s.words) for s in doc.sentences]
    mine = content[i]
    if mine:
        shared = sum(
            1 for w in mine
            if sum(w in content[j] for j in range(n) if j != i) >= 2)
        overlap = shared / len(mine)
    else:
        overlap = 0.0
    return np.array([i / n, lengths[i] / max(lengths), overlap, float(i == 0), 1.0])


def _nll(z, y):
    return np.logaddexp(0.0, z) - y * z


def loss(model: LinearScorer, X, y) -> float:
    X, y = np.asarray(X, float), np.asarray(y, float)
    return float(np.mean(_nll(X @ model.weights + model.bias, y)))


def gradient(model: LinearScorer, X, y) -> np.ndarray:
    """Gradient of the batch-mean NLL; the last entry is the bias partial."""
    X, y = np.atleast_2d(np.asarray(X, float)), np.atleast_1d(np.asarray(y, float))
    if len(y) == 0:
        raise ContractError("empty batch")
    err = sigmoid(X @ model.weights + model.bias) - y
    return np.append(err @ X / len(y), err.mean())


def train(X, y, cfg: TrainConfig = TrainConfig(), task: str = "",
          init: LinearScorer | None = None) -> tuple[LinearScorer, list[float]]:
    """Mini-batch gradient descent on the mean logistic NLL.

    Returns the final model and the full-data loss before training and after
    every step. ``init`` warm-starts from an existing model, otherwise zeros.
    """
    X, y = np.asarray(X, float), np.asarray(y, float)
    if X.ndim != 2 or len(X) != len(y) or len(y) == 0:
        raise ContractError("need a non-empty (n, d) feature matrix with n labels")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    model = init if init is not None else LinearScorer.zeros(X.shape[1], task)
    w, b = model.weights.copy(), float(model.bias)
    rng = np.random.default_rng(cfg.seed)
    n = len(y)
    full_batch = cfg.batch_size >= n
    trace = [loss(LinearScorer(w, b), X, y)]
    order, cursor = np.arange(n), n
    for step in range(1, cfg.steps + 1):
        if full_batch:
            idx = order
        else:
            if cursor + cfg.batch_size > n:
                order, cursor = rng.permutation(n), 0
            idx = order[cursor:cursor + cfg.batch_size]
            cursor += cfg.batch_size
        # overflow is caught below as a non-finite loss
        with np.errstate(over="ignore", invalid="ignore"):
            g = gradient(LinearScorer(w, b), X[idx], y[idx])
            w -= cfg.learning_rate * g[:-1]
            b -= cfg.learning_rate * g[-1]
            current = float(np.mean(_nll(X @ w + b, y)))
        if not math.isfinite(current):
            raise TrainingDivergedError(step)
        trace.append(current)
    return LinearScorer(w, b, task or model.task), trace


# -- externally supplied scores ---------------------------------------------

@dataclass
class ScoreTable:
    """Probabilities keyed by (doc_id, sent_idx) or (doc_id, sent_idx, (start, end))."""
    sentences: dict = field(default_factory=dict)
    spans: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.sentences) + len(self.spans)


def load_external_scores(path) -> ScoreTable:
    table = ScoreTable()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                doc_id, sent_idx, score = str(row["doc_id"]), int(row["sent_idx"]), row["score"]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad score row ({exc})") from None
            if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
                raise ValidationError(f"{path}:{lineno}: score {score!r} outside [0, 1]")
            if row.get("span") is not None:
                key = (doc_id, sent_idx, tuple(row["span"]))
                target = table.spans
            else:
                key = (doc_id, sent_idx)
                target = table.sentences
            if key in target:
                raise ValidationError(f"{path}:{lineno}: duplicate score for {key}")
            target[key] = float(score)
    return table


ScoreSource = Union[LinearScorer, ScoreTable]


def sentence_probabilities(source: ScoreSource, doc: DocumentRecord) -> np.ndarray:
    if isinstance(source, ScoreTable):
        try:
            return np.array([source.sentences[(doc.id, i)] for i in range(len(doc.sentences))])
        except KeyError as exc:
            raise ValidationError(f"no sentence score for {exc.args[0]}") from None
    X = np.stack([featurize_sentence(doc, i) for i in range(len(doc.sentences))])
    return np.atleast_1d(predict(source, X))


def span_probabilities(source: ScoreSource, doc_id: str, sent_idx: int,
                       sentence: SentenceRecord,
                       candidates: Sequence[CandidateSpan]) -> np.ndarray:
    if not candidates:
        return np.zeros(0)
    if isinstance(source, ScoreTable):
        try:
            return np.array([source.spans[(doc_id, sent_idx, c.primary)] for c in candidates])
        except KeyError as exc:
            raise ValidationError(f"no span score for {exc.args[0]}") from None
    X = np.stack([featurize_span(sentence, c) for c in candidates])
    return np.atleast_1d(predict(source, X))
