"""ROUGE-derived supervision for extraction, plausibility and salience."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import ContractError
from .rouge import RougeConfig, lcs_length, ngram_overlap, normalize
from .rules import DEFAULT_MAX_SPANS, CandidateSpan, deletion_indices, propose_spans
from .treebank import DocumentRecord, SentenceRecord

DELETE, KEEP = "delete", "keep"


# Objectives are exact rationals so that ties (and the strict improvement
# test) do not depend on floating-point rounding.

def _f1(overlap: int, c_total: int, r_total: int) -> Fraction:
    if overlap == 0:
        return Fraction(0)
    return Fraction(2 * overlap, c_total + r_total)


def _rn(cand, ref, n):
    return _f1(*ngram_overlap(cand, ref, n))


def _rl(cand, ref):
    if not cand or not ref:
        return Fraction(0)
    return _f1(lcs_length(cand, ref), len(cand), len(ref))


OBJECTIVES: dict[str, Callable[[Sequence[str], Sequence[str]], Fraction]] = {
    "r1r2": lambda c, r: (_rn(c, r, 1) + _rn(c, r, 2)) / 2,
    "r1": lambda c, r: _rn(c, r, 1),
    "rl": _rl,
}
DEFAULT_OBJECTIVE = "r1r2"


def objective(candidate: Sequence[str], reference: Sequence[str],
              cfg: RougeConfig = RougeConfig(), name: str = DEFAULT_OBJECTIVE) -> float:
    """Oracle score of ``candidate`` against ``reference`` (default mean R1/R2 F1)."""
    return float(OBJECTIVES[name](normalize(candidate, cfg), normalize(reference, cfg)))


def oracle_metadata(name: str = DEFAULT_OBJECTIVE, cfg: RougeConfig = RougeConfig()) -> dict:
    return {
        "objective": name,
        "stemming": cfg.stemming,
        "lowercase": cfg.lowercase,
        "improvement_test": "strict",
        "salience_includes_secondary": True,
    }


@dataclass(frozen=True)
class ExtractionOracle:
    selected: tuple[int, ...]
    objective_value: float
    order: tuple[int, ...] = ()  # insertion order of the greedy steps
    objective_name: str = DEFAULT_OBJECTIVE

    def to_json(self, doc_id: str) -> dict:
        return {"doc_id": doc_id, "selected": list(self.selected),
                "order": list(self.order), "objective": self.objective_value,
                "objective_name": self.objective_name}


@dataclass(frozen=True)
class SpanLabel:
    span: CandidateSpan
    label: str


@dataclass(frozen=True)
class LabeledSpan:
    """One row of a span-label dataset."""
    doc_id: str
    sent_idx: int
    span: CandidateSpan
    label: str

    def to_json(self) -> dict:
        return {"doc_id": self.doc_id, "sent_idx": self.sent_idx,
                "span": self.span.to_json(), "label": self.label}

    @classmethod
    def from_json(cls, obj: dict) -> LabeledSpan:
        if obj["label"] not in (DELETE, KEEP):
            raise ValueError(f"bad label {obj['label']!r}")
        return cls(str(obj["doc_id"]), int(obj["sent_idx"]),
                   CandidateSpan.from_json(obj["span"]), obj["label"])


@dataclass(frozen=True)
class ParallelPair:
    long: SentenceRecord
    short: tuple[str, ...]
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "short", tuple(self.short))
        if not self.short:
            raise ValueError("compressed side of a pair must be non-empty")


def _require_reference(doc: DocumentRecord) -> None:
    if not doc.reference:
        raise ContractError(f"document {doc.id!r} has no reference summary")


def greedy_extraction_oracle(doc: DocumentRecord, k: int, cfg: RougeConfig = RougeConfig(),
                             objective_name: str = DEFAULT_OBJECTIVE) -> ExtractionOracle:
    """Greedily add the sentence that most improves the objective, up to ``k``.

    The selection is scored as the concatenation of its sentences in
    document order. Stops early when no sentence strictly improves.
    """
    _require_reference(doc)
    if k < 1:
        raise ContractError("k must be >= 1")
    score = OBJECTIVES[objective_name]
    ref = normalize(doc.reference_tokens, cfg)
    sents = [normalize(s.words, cfg) for s in doc.sentences]

    chosen: list[int] = []
    order: list[int] = []
    best = Fraction(0)
    while len(chosen) < k:
        step_best, step_idx = best, None
        for i in range(len(sents)):
            if i in chosen:
                continue
            trial = sorted(chosen + [i])
            value = score([w for j in trial for w in sents[j]], ref)
            if value > step_best:
                step_best, step_idx = value, i
        if step_idx is None:
            break
        chosen = sorted(chosen + [step_idx])
        order.append(step_idx)
        best = step_best
    return ExtractionOracle(tuple(chosen), float(best), tuple(order), objective_name)


def compression_oracle(x: SentenceRecord, y: Sequence[str], candidates: Iterable[CandidateSpan],
                       cfg: RougeConfig = RougeConfig(),
                       objective_name: str = DEFAULT_OBJECTIVE) -> list[SpanLabel]:
    """Label each candidate independently: delete iff removing it strictly helps."""
    score = OBJECTIVES[objective_name]
    words = normalize(x.words, cfg)
    ref = normalize(y, cfg)
    base = score(words, ref)
    out = []
    for cand in candidates:
        drop = deletion_indices(len(words), [cand])
        value = score([w for i, w in enumerate(words) if i not in drop], ref)
        out.append(SpanLabel(cand, DELETE if value > base else KEEP))
    return out


def plausibility_labels(pairs: Iterable[ParallelPair], cfg: RougeConfig = RougeConfig(),
                        max_spans: int = DEFAULT_MAX_SPANS,
                        objective_name: str = DEFAULT_OBJECTIVE) -> list[LabeledSpan]:
    out = []
    for n, pair in enumerate(pairs):
        pair_id = pair.id or str(n)
        cands = propose_spans(pair.long.tree, max_spans)
        for lab in compression_oracle(pair.long, pair.short, cands, cfg, objective_name):
            out.append(LabeledSpan(pair_id, 0, lab.span, lab.label))
    return out


def salience_labels(doc: DocumentRecord, extract: ExtractionOracle,
                    cfg: RougeConfig = RougeConfig(), max_spans: int = DEFAULT_MAX_SPANS,
                    objective_name: str = DEFAULT_OBJECTIVE) -> list[LabeledSpan]:
    """Label spans of the extracted sentences against the whole-extract ROUGE.

    A candidate's secondary ranges are removed together with its primary,
    mirroring what happens at inference time.
    """
    _require_reference(doc)
    score = OBJECTIVES[objective_name]
    ref = normalize(doc.reference_tokens, cfg)
    selected = sorted(extract.selected)
    sents = {i: normalize(doc.sentences[i].words, cfg) for i in selected}
    base = score([w for i in selected for w in sents[i]], ref)
    out = []
    for i in selected:
        for cand in propose_spans(doc.sentences[i].tree, max_spans):
            drop = deletion_indices(len(sents[i]), [cand])
            trial = []
            for j in selected:
                if j == i:
                    trial.extend(w for t, w in enumerate(sents[j]) if t not in drop)
                else:
                    trial.extend(sents[j])
            label = DELETE if score(trial, ref) > base else KEEP
            out.append(LabeledSpan(doc.id, i, cand, label))
    return out

