"""JSONL corpora, label files, training datasets, threshold sweeps and evaluation."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import MalformedTreeError, ValidationError
from .oracle import DELETE, LabeledSpan, ParallelPair
from .pipeline import CompressiveSummary, PipelineConfig, compress, score_document
from .rouge import RougeConfig, rouge_suite, scorer_name
from .scorer import ScoreSource, featurize_sentence, featurize_span
from .treebank import DocumentRecord, SentenceRecord, parse_bracketed, render_bracketed

BUNDLED = Path(__file__).parent / "data"


@dataclass
class CorpusFile:
    path: Path
    records: list[DocumentRecord]

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def by_id(self) -> dict[str, DocumentRecord]:
        return {d.id: d for d in self.records}


def _lines(path) -> Iterator[tuple[int, Optional[dict], Optional[str]]]:
    """``(lineno, row, error)`` for each non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                yield lineno, None, f"{path}:{lineno}: malformed JSON ({exc.msg})"
                continue
            if not isinstance(row, dict):
                yield lineno, None, f"{path}:{lineno}: expected a JSON object"
                continue
            yield lineno, row, None


def _jsonl_rows(path) -> Iterator[tuple[int, dict]]:
    for lineno, row, err in _lines(path):
        if err:
            raise ValidationError(err)
        yield lineno, row


def _sentence(obj, where: str) -> SentenceRecord:
    if (not isinstance(obj, dict) or not isinstance(obj.get("parse"), str)
            or not isinstance(obj.get("tokens"), list)):
        raise ValidationError(f"{where}: sentence needs a 'tokens' list and a 'parse' string")
    try:
        tree = parse_bracketed(obj["parse"])
    except MalformedTreeError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    if list(obj["tokens"]) != tree.words:
        raise ValidationError(
            f"{where}: tokens {obj['tokens']} do not match parse leaves {tree.words}")
    return SentenceRecord.from_tree(tree)


def document_from_json(row: dict, where: str = "") -> DocumentRecord:
    doc_id = row.get("id")
    if doc_id is None:
        raise ValidationError(f"{where}: record has no 'id'")
    sents = row.get("sentences")
    if not isinstance(sents, list) or not sents:
        raise ValidationError(f"{where} doc {doc_id!r}: no sentences")
    records = [_sentence(s, f"{where} doc {doc_id!r} sentence {i}") for i, s in enumerate(sents)]
    reference = row.get("reference")
    if reference is not None and not (
            isinstance(reference, list) and all(isinstance(s, list) for s in reference)):
        raise ValidationError(f"{where} doc {doc_id!r}: reference must be a list of token lists")
    return DocumentRecord(str(doc_id), records, reference)


def _iter_documents(path) -> Iterator[tuple[str, Optional[DocumentRecord], Optional[str]]]:
    seen: set[str] = set()
    for lineno, row, err in _lines(path):
        where = f"{path}:{lineno}"
        if err:
            yield where, None, err
            continue
        try:
            doc = document_from_json(row, where)
        except ValidationError as exc:
            yield where, None, str(exc)
            continue
        if doc.id in seen:
            yield where, None, f"{where}: duplicate document id {doc.id!r}"
            continue
        seen.add(doc.id)
        yield where, doc, None


def read_corpus(path) -> CorpusFile:
    """Load and validate a corpus; the first problem raises ``ValidationError``."""
    docs = []
    for _, doc, err in _iter_documents(path):
        if err:
            raise ValidationError(err)
        docs.append(doc)
    return CorpusFile(Path(path), docs)


def validate_corpus(path) -> list[str]:
    """One diagnostic per bad record, without stopping at the first."""
    return [err for _, _, err in _iter_documents(path) if err]


def document_to_json(doc: DocumentRecord) -> dict:
    row = {"id": doc.id,
           "sentences": [{"tokens": s.words, "parse": render_bracketed(s.tree)}
                         for s in doc.sentences]}
    if doc.reference is not None:
        row["reference"] = [list(s) for s in doc.reference]
    return row


def read_pairs(path) -> list[ParallelPair]:
    """Rows ``{id, tokens, parse, short}``: a long sentence and its compression."""
    out = []
    for lineno, row in _jsonl_rows(path):
        where = f"{path}:{lineno}"
        sent = _sentence(row, where)
        short = row.get("short")
        if not short:
            raise ValidationError(f"{where}: pair needs a non-empty 'short' token list")
        out.append(ParallelPair(sent, tuple(short), str(row.get("id", lineno))))
    return out


def pair_to_json(pair: ParallelPair) -> dict:
    return {"id": pair.id, "tokens": pair.long.words,
            "parse": render_bracketed(pair.long.tree), "short": list(pair.short)}


def read_labels(path) -> list[LabeledSpan]:
    out = []
    for lineno, row in _jsonl_rows(path):
        try:
            out.append(LabeledSpan.from_json(row))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"{path}:{lineno}: bad label row ({exc})") from None
    return out


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    return [row for _, row in _jsonl_rows(path)]


def map_docs(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``map`` over documents, optionally in worker processes; input order is kept."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- training data ------------------------------------------------------------

def sentence_dataset(docs: Iterable[DocumentRecord],
                     selected: Mapping[str, Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Extraction features with label 1 for sentences in the oracle selection."""
    X, y = [], []
    for doc in docs:
        if doc.id not in selected:
            continue
        chosen = set(selected[doc.id])
        for i in range(len(doc.sentences)):
            X.append(featurize_sentence(doc, i))
            y.append(float(i in chosen))
    if not X:
        raise ValidationError("no documents matched the extraction labels")
    return np.array(X), np.array(y)


def span_dataset(labels: Iterable[LabeledSpan],
                 sentences: Mapping[tuple[str, int], SentenceRecord]) -> tuple[np.ndarray, np.ndarray]:
    X, y = [], []
    for lab in labels:
        sent = sentences.get((lab.doc_id, lab.sent_idx))
        if sent is None:
            raise ValidationError(f"label refers to unknown sentence {(lab.doc_id, lab.sent_idx)}")
        X.append(featurize_span(sent, lab.span))
        y.append(float(lab.label == DELETE))
    if not X:
        raise ValidationError("empty label set")
    return np.array(X), np.array(y)


def sentence_lookup(docs: Iterable[DocumentRecord]) -> dict[tuple[str, int], SentenceRecord]:
    return {(d.id, i): s for d in docs for i, s in enumerate(d.sentences)}


def pair_lookup(pairs: Iterable[ParallelPair]) -> dict[tuple[str, int], SentenceRecord]:
    return {(p.id, 0): p.long for p in pairs}


# -- sweep & evaluation -------------------------------------------------------

def lambda_grid(lo: float = 0.1, hi: float = 0.9, step: float = 0.05) -> list[float]:
    n = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def _mean_rouge(docs: Mapping[str, DocumentRecord], summaries: Sequence[CompressiveSummary],
                rouge_cfg: RougeConfig) -> dict[str, float]:
    scores = [rouge_suite(s.tokens, docs[s.doc_id].reference_tokens, rouge_cfg)
              for s in summaries]
    return {m: float(np.mean([sc[m].f1 for sc in scores])) for m in ("r1", "r2", "rl")}


@dataclass
class SweepResult:
    grid: list[float]
    rouge_at: list[dict[str, float]]
    best_lambda: float

    def to_json(self) -> dict:
        return {"grid": self.grid, "rouge_at": self.rouge_at, "best_lambda": self.best_lambda}


def sweep_lambda_s(corpus: Iterable[DocumentRecord], extractor: ScoreSource,
                   plausibility: ScoreSource, salience: ScoreSource,
                   cfg: PipelineConfig = PipelineConfig(), grid_lo: float = 0.1,
                   grid_hi: float = 0.9, step: float = 0.05,
                   rouge_cfg: RougeConfig = RougeConfig(), grid: Sequence[float] | None = None,
                   jobs: int = 1) -> SweepResult:
    """Line search over the salience threshold; ties go to the larger threshold."""
    docs = {d.id: d for d in corpus}
    for d in docs.values():
        if not d.reference:
            raise ValidationError(f"document {d.id!r} has no reference")
    grid = list(grid) if grid is not None else lambda_grid(grid_lo, grid_hi, step)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("sweep grid must be strictly increasing")
    scored = map_docs(_Scorer(extractor, plausibility, salience, cfg), list(docs.values()), jobs)
    curve = []
    for lam in grid:
        summaries = [compress(s, cfg.lambda_p, lam) for s in scored]
        curve.append(_mean_rouge(docs, summaries, rouge_cfg))
    means = [np.mean([c["r1"], c["r2"], c["rl"]]) for c in curve]
    best = max(range(len(grid)), key=lambda i: (means[i], i))
    return SweepResult(grid, curve, grid[best])


@dataclass
class _Scorer:
    extractor: ScoreSource
    plausibility: ScoreSource
    salience: ScoreSource
    cfg: PipelineConfig

    def __call__(self, doc):
        return score_document(doc, self.extractor, self.plausibility, self.salience, self.cfg)


@dataclass
class EvalReport:
    r1: float
    r2: float
    rl: float
    compression_ratio: float
    rejection_rate: Optional[float]
    n_docs: int
    scorer: str = ""
    per_doc: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"r1": self.r1, "r2": self.r2, "rl": self.rl,
                "compression_ratio": self.compression_ratio,
                "rejection_rate": self.rejection_rate, "n_docs": self.n_docs,
                "scorer": self.scorer}

    def table(self) -> str:
        rej = "n/a" if self.rejection_rate is None else f"{100 * self.rejection_rate:.2f}"
        rows = [("ROUGE-1 F1", f"{100 * self.r1:.2f}"), ("ROUGE-2 F1", f"{100 * self.r2:.2f}"),
                ("ROUGE-L F1", f"{100 * self.rl:.2f}"),
                ("compression %", f"{100 * self.compression_ratio:.2f}"),
                ("rejection %", rej), ("documents", str(self.n_docs))]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v:>8}" for k, v in rows]
        return "\n".join(lines + [f"scorer: {self.scorer}"])


def evaluate(corpus: Iterable[DocumentRecord], summaries: Sequence[CompressiveSummary],
             rouge_cfg: RougeConfig = RougeConfig()) -> EvalReport:
    """Macro-averaged ROUGE F1 plus compression statistics."""
    if not summaries:
        raise ValidationError("no summaries to evaluate")
    docs = {d.id: d for d in corpus}
    missing = sorted({s.doc_id for s in summaries
                      if s.doc_id not in docs or not docs[s.doc_id].reference})
    if missing:
        raise ValidationError(f"no reference for documents: {', '.join(missing)}")
    per_doc = []
    for s in summaries:
        sc = rouge_suite(s.tokens, docs[s.doc_id].reference_tokens, rouge_cfg)
        per_doc.append({"doc_id": s.doc_id, **{m: sc[m].f1 for m in sc}})
    rates = [r for s in summaries if (r := s.rejection_rate) is not None]
    return EvalReport(
        r1=float(np.mean([d["r1"] for d in per_doc])),
        r2=float(np.mean([d["r2"] for d in per_doc])),
        rl=float(np.mean([d["rl"] for d in per_doc])),
        compression_ratio=float(np.mean([s.compression_ratio for s in summaries])),
        rejection_rate=float(np.mean(rates)) if rates else None,
        n_docs=len(summaries),
        scorer=scorer_name(rouge_cfg),
        per_doc=per_doc,
    )
