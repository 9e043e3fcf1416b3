"""Synthetic parsed documents with planted deletable content.

Sentences are generated together with their parse trees. Optional
decorations (appositives, parentheticals, adjectives, adverbs, relative
clauses, prepositional phrases, second conjuncts) are tracked by token
position so that references and compressions can drop them at controlled
rates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .oracle import ParallelPair
from .treebank import Constituent, DocumentRecord, ParseTree, SentenceRecord, Token

NAMES = """Holmes Crosby Hyla Blanchett Garcia Okafor Lindqvist Moreau Tanaka Novak
Reyes Kowalski Adeyemi Brennan Castillo Dubois Eriksen Fischer Haddad Ivanova
Jensen Kimura Larsen Mendez Nakamura Osei Petrov Quinn Rossi Schmidt""".split()
NOUNS = """court jogger theater gunman winery hospital council budget bridge station
ruling report vaccine factory election harbor museum treaty protest merger
airline village senator reactor festival tribunal pipeline archive satellite orchard
stadium refinery canal library verdict charter drought glacier highway clinic""".split()
VERBS = """approved delayed rejected praised criticized opened closed visited funded
blocked reviewed announced expanded inspected repaired launched suspended
cancelled endorsed challenged""".split()
ADJS = """crowded controversial local federal massive historic remote costly rural
coastal fragile ambitious modest urgent lengthy secret volatile obscure rival
seasonal""".split()
ADVS = """quickly reluctantly quietly openly briefly formally abruptly eventually
repeatedly publicly""".split()
PREPS = "in at near with after during from across".split()
ROLES = """lawyer spokesman mayor engineer student surgeon novelist diplomat
economist farmer""".split()
WH = ["who"]

# how often each decoration is generated
DECOR_RATES = {"APPOS": 0.45, "PRN": 0.35, "SAID": 0.2, "JJ": 0.5, "ADV": 0.35,
               "PP": 0.6, "CONJ": 0.2, "REL": 0.15}
# probability that a reference summary drops the decoration
REFERENCE_DROP = {"APPOS": 0.85, "PRN": 0.85, "SAID": 0.85, "JJ": 0.15, "ADV": 0.15,
                  "PP": 0.0, "CONJ": 0.0, "REL": 0.5}
# probability that a compressed sentence (plausibility data) drops it
COMPRESSION_DROP = {"APPOS": 0.8, "PRN": 0.8, "SAID": 0.8, "JJ": 0.8, "ADV": 0.8,
                    "PP": 0.0, "CONJ": 0.0, "REL": 0.6}


@dataclass
class _Group:
    kind: str
    body: list


@dataclass
class GeneratedSentence:
    record: SentenceRecord
    decorations: list[tuple[str, frozenset[int]]] = field(default_factory=list)

    def drop(self, rng: random.Random, rates: dict[str, float]) -> list[str]:
        gone: set[int] = set()
        for kind, positions in self.decorations:
            if rng.random() < rates.get(kind, 0.0):
                gone |= positions
        if len(gone) >= len(self.record):
            gone = set()
        return [w for i, w in enumerate(self.record.words) if i not in gone]


def _build(spec) -> GeneratedSentence:
    words: list[str] = []
    decorations = []

    def go(node) -> list[Constituent]:
        if isinstance(node, _Group):
            start = len(words)
            out = [c for ch in node.body for c in go(ch)]
            decorations.append((node.kind, frozenset(range(start, len(words)))))
            return out
        tag, body = node
        start = len(words)
        if isinstance(body, str):
            words.append(body)
            return [Constituent(tag, start, start + 1)]
        kids = tuple(c for ch in body for c in go(ch))
        return [Constituent(tag, start, len(words), kids)]

    (root,) = go(spec)
    tree = ParseTree(root, tuple(Token(w, i) for i, w in enumerate(words)))
    return GeneratedSentence(SentenceRecord.from_tree(tree), decorations)


class SentenceGenerator:
    def __init__(self, rng: random.Random, rates: dict[str, float] | None = None):
        self.rng = rng
        self.rates = dict(DECOR_RATES if rates is None else rates)

    def _maybe(self, kind: str) -> bool:
        return self.rng.random() < self.rates.get(kind, 0.0)

    def _pick(self, pool):
        return self.rng.choice(pool)

    def _simple_np(self, nouns) -> tuple:
        kids = [("DT", self._pick(["the", "a"]))]
        if self._maybe("JJ"):
            kids.append(_Group("JJ", [("JJ", self._pick(ADJS))]))
        kids.append(("NN", self._pick(nouns)))
        return ("NP", kids)

    def _subject(self, names, nouns):
        if self.rng.random() < 0.6:
            base = ("NP", [("NNP", self._pick(names))])
        else:
            base = self._simple_np(nouns)
        if self._maybe("APPOS"):
            role = ("NP", [("DT", "a"), ("NN", self._pick(ROLES))])
            return ("NP", [base, _Group("APPOS", [(",", ","), role, (",", ",")])])
        if self._maybe("PRN"):
            inner = ("NP", [("CD", str(self.rng.randint(19, 90)))])
            prn = ("PRN", [("-LRB-", "("), inner, ("-RRB-", ")")])
            return ("NP", [base, _Group("PRN", [prn])])
        if self._maybe("REL"):
            rel = ("SBAR", [("WHNP", [("WP", self._pick(WH))]),
                            ("S", [("VP", [("VBD", self._pick(VERBS)),
                                           self._simple_np(nouns)])])])
            return ("NP", [base, _Group("REL", [rel])])
        return base

    def _object(self, nouns):
        first = self._simple_np(nouns)
        if self._maybe("CONJ"):
            return ("NP", [first, _Group("CONJ", [("CC", "and"), self._simple_np(nouns)])])
        return first

    def sentence(self, names=NAMES, nouns=NOUNS) -> GeneratedSentence:
        vp = [("VBD", self._pick(VERBS)), self._object(nouns)]
        if self._maybe("PP"):
            vp.append(_Group("PP", [("PP", [("IN", self._pick(PREPS)),
                                            ("NP", [("DT", "the"), ("NN", self._pick(nouns))])])]))
        if self._maybe("ADV"):
            vp.append(_Group("ADV", [("ADVP", [("RB", self._pick(ADVS))])]))
        kids = [self._subject(names, nouns)]
        if self._maybe("SAID"):
            said = ("PRN", [(",", ","),
                            ("S", [("NP", [("NNP", self._pick(NAMES))]),
                                   ("VP", [("VBD", "said")])]),
                            (",", ",")])
            kids.append(_Group("SAID", [said]))
        kids += [("VP", vp), (".", ".")]
        return _build(("S", kids))


def make_document(rng: random.Random, doc_id: str, n_sentences: tuple[int, int] = (5, 9),
                  salient: int = 3, reference_drop: dict | None = None) -> DocumentRecord:
    """A document whose first ``salient`` sentences, lightly compressed, form the reference."""
    drop = REFERENCE_DROP if reference_drop is None else reference_drop
    gen = SentenceGenerator(rng)
    names = rng.sample(NAMES, 6)
    nouns = rng.sample(NOUNS, 12)
    n = rng.randint(*n_sentences)
    sents = []
    for i in range(n):
        if i < salient:
            sents.append(gen.sentence(names, nouns))
        else:
            # filler sentences use vocabulary disjoint from the salient ones
            sents.append(gen.sentence([w for w in NAMES if w not in names],
                                      [w for w in NOUNS if w not in nouns]))
    reference = [s.drop(rng, drop) for s in sents[:salient]]
    return DocumentRecord(doc_id, [s.record for s in sents], reference)


def make_corpus(n_docs: int, seed: int, prefix: str = "doc", **kwargs) -> list[DocumentRecord]:
    rng = random.Random(seed)
    return [make_document(rng, f"{prefix}{seed}-{i:04d}", **kwargs) for i in range(n_docs)]


def make_pairs(n_pairs: int, seed: int, prefix: str = "pair",
               compression_drop: dict | None = None) -> list[ParallelPair]:
    """Long/short sentence pairs for plausibility supervision."""
    drop = COMPRESSION_DROP if compression_drop is None else compression_drop
    rng = random.Random(seed)
    gen = SentenceGenerator(rng)
    out = []
    for i in range(n_pairs):
        s = gen.sentence()
        out.append(ParallelPair(s.record, tuple(s.drop(rng, drop)), f"{prefix}{seed}-{i:04d}"))
    return out
