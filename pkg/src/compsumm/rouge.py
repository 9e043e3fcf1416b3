"""ROUGE-1/2/L over pre-tokenized text.

Multi-sentence inputs are flattened by the caller; ROUGE-L here is the LCS
of the two flat token sequences.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .porter import porter_stem

SCORER_NAME = "compsumm in-repo ROUGE (flat LCS)"


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> RougeScore:
        f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
        return cls(p, r, f)

    def to_json(self) -> dict:
        return {"p": self.precision, "r": self.recall, "f": self.f1}


ZERO = RougeScore(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RougeConfig:
    stemming: bool = True
    lowercase: bool = True


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def ngram_overlap(candidate: Sequence[str], reference: Sequence[str], n: int) -> tuple[int, int, int]:
    """(clipped overlap, candidate n-gram count, reference n-gram count)."""
    cand, ref = ngrams(candidate, n), ngrams(reference, n)
    return sum((cand & ref).values()), sum(cand.values()), sum(ref.values())


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int,
            cfg: RougeConfig | None = None) -> RougeScore:
    """Clipped n-gram overlap. ``cfg`` (if given) normalizes the tokens first."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if cfg is not None:
        candidate, reference = normalize(candidate, cfg), normalize(reference, cfg)
    overlap, c_total, r_total = ngram_overlap(candidate, reference, n)
    if c_total == 0 or r_total == 0:
        return ZERO
    return RougeScore.from_pr(overlap / c_total, overlap / r_total)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str],
            cfg: RougeConfig | None = None) -> RougeScore:
    if cfg is not None:
        candidate, reference = normalize(candidate, cfg), normalize(reference, cfg)
    if not candidate or not reference:
        return ZERO
    lcs = lcs_length(candidate, reference)
    return RougeScore.from_pr(lcs / len(candidate), lcs / len(reference))


def scorer_name(cfg: RougeConfig) -> str:
    """Label for reports, so numbers from different settings are not confused."""
    opts = [("Porter 1980 stemming" if cfg.stemming else "no stemming"),
            ("lowercased" if cfg.lowercase else "case-sensitive")]
    return f"{SCORER_NAME[:-1]}, {', '.join(opts)})"


def normalize(tokens: Sequence[str], cfg: RougeConfig) -> list[str]:
    out = list(tokens)
    if cfg.lowercase:
        out = [t.lower() for t in out]
    if cfg.stemming:
        out = [porter_stem(t) for t in out]
    return out


def rouge_suite(candidate: Sequence[str], reference: Sequence[str],
                cfg: RougeConfig = RougeConfig()) -> dict[str, RougeScore]:
    cand, ref = normalize(candidate, cfg), normalize(reference, cfg)
    return {
        "r1": rouge_n(cand, ref, 1),
        "r2": rouge_n(cand, ref, 2),
        "rl": rouge_l(cand, ref),
    }
