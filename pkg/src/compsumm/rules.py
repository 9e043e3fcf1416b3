"""Recall-oriented syntactic rules proposing deletable spans.

Each candidate has a *primary* range, which is always exactly a constituent
of the parse, and optional *secondary* ranges (commas, coordinating
conjunctions) that go with it when the primary is deleted.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ContractError
from .treebank import Constituent, ParseTree, SentenceRecord, Token, walk

DEFAULT_MAX_SPANS = 50

Range = tuple[int, int]


class RuleId(str, enum.Enum):
    PRN = "PRN"
    FRAG = "FRAG"
    JJ = "JJ"
    ADJP = "ADJP"
    RB = "RB"
    ADVP = "ADVP"
    PP = "PP"
    APPOS_NP = "APPOS_NP"
    SBAR_REL = "SBAR_REL"
    CONJ_NP = "CONJ_NP"
    CONJ_VP = "CONJ_VP"
    CONJ_S = "CONJ_S"

    def __str__(self):
        return self.value


RULE_ORDER = tuple(RuleId)

# phrase-level matchers keyed by the constituent's own label
_LABEL_RULES = {
    "PRN": RuleId.PRN, "FRAG": RuleId.FRAG,
    "ADJP": RuleId.ADJP, "ADVP": RuleId.ADVP, "PP": RuleId.PP,
}
_WORD_RULES = {"JJ": RuleId.JJ, "RB": RuleId.RB}
_CONJ_RULES = {"NP": RuleId.CONJ_NP, "VP": RuleId.CONJ_VP, "S": RuleId.CONJ_S}
_RELATIVIZERS = {"WDT", "WP", "WP$", "WRB"}
_FINAL_PUNCT = {"."}


@dataclass(frozen=True)
class CandidateSpan:
    rule: RuleId
    primary: Range
    secondary: tuple[Range, ...] = ()
    tag: str = ""

    def indices(self) -> set[int]:
        """Every token index this candidate deletes, secondary included."""
        out = set(range(*self.primary))
        for s, e in self.secondary:
            out.update(range(s, e))
        return out

    def to_json(self) -> dict:
        return {
            "rule": self.rule.value,
            "primary": list(self.primary),
            "secondary": [list(r) for r in self.secondary],
            "tag": self.tag,
        }

    @classmethod
    def from_json(cls, obj: dict) -> CandidateSpan:
        return cls(
            RuleId(obj["rule"]),
            tuple(obj["primary"]),
            tuple(tuple(r) for r in obj.get("secondary", ())),
            obj.get("tag", ""),
        )


def _preterminal_tags(tree: ParseTree) -> list[str]:
    tags = [""] * len(tree)
    for c, _, _ in walk(tree):
        if c.is_preterminal:
            tags[c.start] = c.tag
    return tags


def _first_leaf_tag(c: Constituent) -> str:
    while c.children:
        c = c.children[0]
    return c.tag


def _appositives(parent: Constituent, tags: list[str]):
    kids = parent.children
    n_tokens = len(tags)
    for i in range(len(kids) - 2):
        np1, comma, np2 = kids[i:i + 3]
        if not (np1.tag == "NP" and comma.tag == "," and np2.tag == "NP"):
            continue
        if i + 3 < len(kids) and kids[i + 3].tag == ",":
            yield CandidateSpan(RuleId.APPOS_NP, np2.span,
                                (comma.span, kids[i + 3].span), np2.tag)
        elif (i + 3 == len(kids) and parent.end == n_tokens - 1
              and tags[parent.end] in _FINAL_PUNCT):
            # sentence-final: the full stop closes the appositive and stays
            yield CandidateSpan(RuleId.APPOS_NP, np2.span, (comma.span,), np2.tag)


def _conjuncts(parent: Constituent):
    rule = _CONJ_RULES.get(parent.tag)
    if rule is None:
        return
    kids = parent.children
    for j in range(1, len(kids) - 1):
        if kids[j].tag != "CC" or kids[j + 1].tag != parent.tag:
            continue
        if not any(k.tag == parent.tag for k in kids[:j]):
            continue
        secondary = [kids[j].span]
        if kids[j - 1].tag == ",":
            secondary.insert(0, kids[j - 1].span)
        yield CandidateSpan(rule, kids[j + 1].span, tuple(secondary), parent.tag)


def _relatives(parent: Constituent):
    if parent.tag != "NP":
        return
    kids = parent.children
    for j, sbar in enumerate(kids):
        if sbar.tag != "SBAR":
            continue
        after_comma = j > 0 and kids[j - 1].tag == ","
        if not (after_comma or _first_leaf_tag(sbar) in _RELATIVIZERS):
            continue
        secondary = []
        if after_comma:
            secondary.append(kids[j - 1].span)
            if j + 1 < len(kids) and kids[j + 1].tag == ",":
                secondary.append(kids[j + 1].span)
        yield CandidateSpan(RuleId.SBAR_REL, sbar.span, tuple(secondary), sbar.tag)


def _all_matches(tree: ParseTree) -> Iterable[CandidateSpan]:
    tags = _preterminal_tags(tree)
    structural, simple = [], []
    for c, parent, _ in walk(tree):
        if c.children:
            if c.tag == "NP":
                structural.extend(_appositives(c, tags))
            structural.extend(_conjuncts(c))
            structural.extend(_relatives(c))
        if c.tag in _LABEL_RULES:
            simple.append(CandidateSpan(_LABEL_RULES[c.tag], c.span, (), c.tag))
        elif c.tag in _WORD_RULES:
            if parent is not None and parent.span == c.span:
                continue
            simple.append(CandidateSpan(_WORD_RULES[c.tag], c.span, (), c.tag))
    # structural matches carry secondary ranges, so they win deduplication
    return structural + simple


def propose_spans(tree: ParseTree, max_spans: int = DEFAULT_MAX_SPANS) -> list[CandidateSpan]:
    """Candidate deletions for one tree, ordered by (start, -end), capped."""
    if max_spans < 1:
        raise ContractError("max_spans must be >= 1")
    n = len(tree)
    seen: dict[Range, CandidateSpan] = {}
    for cand in _all_matches(tree):
        if cand.primary == (0, n) or cand.primary in seen:
            continue
        seen[cand.primary] = cand
    ordered = sorted(seen.values(), key=lambda c: (c.primary[0], -c.primary[1]))
    return ordered[:max_spans]


def deletion_indices(n_tokens: int, chosen: Sequence[CandidateSpan]) -> set[int]:
    """Token indices removed by ``chosen``; empty if they would remove everything."""
    out: set[int] = set()
    for cand in chosen:
        for s, e in (cand.primary, *cand.secondary):
            if not 0 <= s < e <= n_tokens:
                raise ContractError(
                    f"span [{s},{e}) outside sentence of {n_tokens} tokens")
        out |= cand.indices()
    if len(out) >= n_tokens:
        return set()
    return out


def apply_deletions(sentence: SentenceRecord, chosen: Sequence[CandidateSpan]) -> list[Token]:
    drop = deletion_indices(len(sentence), chosen)
    return [t for t in sentence.tokens if t.index not in drop]
