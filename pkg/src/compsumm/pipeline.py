"""Extract-then-compress inference and its compression analytics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ContractError
from .rules import DEFAULT_MAX_SPANS, CandidateSpan, deletion_indices, propose_spans
from .scorer import ScoreSource, sentence_probabilities, span_probabilities
from .treebank import DocumentRecord

# sentences extracted per dataset
DATASET_K = {"cnndm": 3, "cnn": 3, "nyt": 3, "xsum": 2, "wikihow": 4, "reddit": 2}
# tuned salience thresholds (ELECTRA encoders); plausibility is fixed at 0.6
DATASET_LAMBDA_S = {"cnndm": 0.7, "cnn": 0.5, "wikihow": 0.45, "xsum": 0.6, "reddit": 0.7}
DEFAULT_LAMBDA_P = 0.6


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 3
    lambda_p: float = DEFAULT_LAMBDA_P
    lambda_s: float = 0.6
    token_budget: int = 512
    max_spans: int = DEFAULT_MAX_SPANS

    def __post_init__(self):
        if self.k < 1:
            raise ContractError("k must be >= 1")
        for name in ("lambda_p", "lambda_s"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ContractError(f"{name} must lie in [0, 1)")
        if self.token_budget < 1 or self.max_spans < 1:
            raise ContractError("token_budget and max_spans must be >= 1")

    @classmethod
    def for_dataset(cls, name: str, **overrides) -> PipelineConfig:
        params = {"k": DATASET_K[name], "lambda_s": DATASET_LAMBDA_S.get(name, 0.6)}
        params.update(overrides)
        return cls(**params)


class Licensed(NamedTuple):
    z_p: list[CandidateSpan]
    z_s: list[CandidateSpan]
    chosen: list[CandidateSpan]


@dataclass
class ScoredSentence:
    index: int
    n_tokens: int
    words: list[str]
    candidates: list[CandidateSpan]
    plausibility: np.ndarray
    salience: np.ndarray


@dataclass
class ScoredDocument:
    """A document after extraction and span scoring; thresholds not yet applied."""
    doc_id: str
    sentences: list[ScoredSentence]


@dataclass
class CompressiveSummary:
    doc_id: str
    selected: list[int]
    deleted: list[list[int]]
    text: list[list[str]]
    z_p: list[list[CandidateSpan]] = field(default_factory=list)
    z_s: list[list[CandidateSpan]] = field(default_factory=list)
    chosen: list[list[CandidateSpan]] = field(default_factory=list)
    original_lengths: list[int] = field(default_factory=list)
    # rate read back from a summary file, where the span sets are not stored
    stored_rejection_rate: Optional[float] = None

    @property
    def tokens(self) -> list[str]:
        return [w for sent in self.text for w in sent]

    @property
    def n_deleted(self) -> int:
        return sum(len(d) for d in self.deleted)

    @property
    def compression_ratio(self) -> float:
        return compression_ratio(self)

    @property
    def rejection_rate(self) -> Optional[float]:
        """Mean per-sentence rejection rate over sentences with a non-empty Z_S."""
        if not self.z_s:
            return self.stored_rejection_rate
        rates = [r for zs, zp in zip(self.z_s, self.z_p)
                 if (r := rejection_rate(zs, zp)) is not None]
        return float(np.mean(rates)) if rates else None

    def to_json(self) -> dict:
        out = {"doc_id": self.doc_id, "selected": self.selected,
               "deleted": self.deleted, "text": self.text,
               "compression_ratio": self.compression_ratio}
        rate = self.rejection_rate
        if rate is not None:
            out["rejection_rate"] = rate
        return out

    @classmethod
    def from_json(cls, obj: dict) -> CompressiveSummary:
        text = [list(s) for s in obj["text"]]
        deleted = [list(d) for d in obj["deleted"]]
        return cls(str(obj["doc_id"]), list(obj["selected"]), deleted, text,
                   original_lengths=[len(t) + len(d) for t, d in zip(text, deleted)],
                   stored_rejection_rate=obj.get("rejection_rate"))


def truncate_document(doc: DocumentRecord, token_budget: int) -> DocumentRecord:
    """Longest sentence prefix with fewer than ``token_budget`` tokens (at least one)."""
    if token_budget < 1:
        raise ContractError("token_budget must be >= 1")
    total, keep = 0, 0
    for sent in doc.sentences:
        total += len(sent)
        if total >= token_budget:
            break
        keep += 1
    keep = max(keep, 1)
    if keep == len(doc.sentences):
        return doc
    return DocumentRecord(doc.id, doc.sentences[:keep], doc.reference)


def select_sentences(scores: Sequence[float], k: int) -> list[int]:
    """Top-``k`` indices by score (ties to the lower index), in document order."""
    if k <= 0:
        raise ContractError("k must be >= 1")
    ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return sorted(ranked[:k])


def licensed_spans(candidates: Sequence[CandidateSpan], plaus_scores, sal_scores,
                   lambda_p: float, lambda_s: float) -> Licensed:
    if not len(candidates) == len(plaus_scores) == len(sal_scores):
        raise ContractError("need one plausibility and one salience score per candidate")
    in_p = [p > lambda_p for p in plaus_scores]
    in_s = [s > lambda_s for s in sal_scores]
    return Licensed(
        [c for c, ok in zip(candidates, in_p) if ok],
        [c for c, ok in zip(candidates, in_s) if ok],
        [c for c, a, b in zip(candidates, in_p, in_s) if a and b],
    )


def rejection_rate(z_s: Sequence[CandidateSpan], z_p: Sequence[CandidateSpan]) -> Optional[float]:
    """|Z_S minus Z_P| / |Z_S|; ``None`` when Z_S is empty."""
    if not z_s:
        return None
    plausible = set(z_p)
    return sum(c not in plausible for c in z_s) / len(z_s)


def compression_ratio(summary: CompressiveSummary,
                      original_selected_tokens: Optional[int] = None) -> float:
    total = original_selected_tokens
    if total is None:
        total = sum(summary.original_lengths)
    return summary.n_deleted / total if total else 0.0


def score_document(doc: DocumentRecord, extractor: ScoreSource, plausibility: ScoreSource,
                   salience: ScoreSource, cfg: PipelineConfig = PipelineConfig()) -> ScoredDocument:
    doc = truncate_document(doc, cfg.token_budget)
    picked = select_sentences(sentence_probabilities(extractor, doc), cfg.k)
    out = []
    for i in picked:
        sent = doc.sentences[i]
        cands = propose_spans(sent.tree, cfg.max_spans)
        out.append(ScoredSentence(
            i, len(sent), sent.words, cands,
            span_probabilities(plausibility, doc.id, i, sent, cands),
            span_probabilities(salience, doc.id, i, sent, cands),
        ))
    return ScoredDocument(doc.id, out)


def compress(scored: ScoredDocument, lambda_p: float, lambda_s: float) -> CompressiveSummary:
    summary = CompressiveSummary(scored.doc_id, [], [], [])
    for sent in scored.sentences:
        lic = licensed_spans(sent.candidates, sent.plausibility, sent.salience,
                             lambda_p, lambda_s)
        drop = deletion_indices(sent.n_tokens, lic.chosen)
        summary.selected.append(sent.index)
        summary.deleted.append(sorted(drop))
        summary.text.append([w for t, w in enumerate(sent.words) if t not in drop])
        summary.z_p.append(lic.z_p)
        summary.z_s.append(lic.z_s)
        summary.chosen.append(lic.chosen)
        summary.original_lengths.append(sent.n_tokens)
    return summary


def summarize(doc: DocumentRecord, extractor: ScoreSource, plausibility: ScoreSource,
              salience: ScoreSource, cfg: PipelineConfig = PipelineConfig()) -> CompressiveSummary:
    """Select the top-k sentences, then delete spans licensed by both compression models."""
    scored = score_document(doc, extractor, plausibility, salience, cfg)
    return compress(scored, cfg.lambda_p, cfg.lambda_s)
