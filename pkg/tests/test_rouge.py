from collections import Counter
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from compsumm.porter import porter_stem
from compsumm.rouge import RougeConfig, lcs_length, rouge_l, rouge_n, rouge_suite

VOCAB = Path(__file__).parent / "data" / "porter_vocab.tsv"
RAW = RougeConfig(stemming=False, lowercase=False)

tokens = st.lists(st.sampled_from("abcd"), max_size=8)


def test_unigram_example():
    s = rouge_n(["the", "cat", "sat"], ["the", "cat"], 1)
    assert s.precision == pytest.approx(2 / 3)
    assert s.recall == 1.0
    assert s.f1 == pytest.approx(0.8)


def test_bigram_example():
    s = rouge_n(list("abc"), list("abd"), 2)
    assert (s.precision, s.recall, s.f1) == (0.5, 0.5, 0.5)


def test_clipped_counts():
    s = rouge_n(["the"] * 4, ["the", "cat"], 1)
    assert s.precision == 0.25 and s.recall == 0.5


def test_identity_and_empty():
    assert rouge_n(list("ab"), list("ab"), 1).f1 == 1.0
    assert rouge_n([], list("ab"), 1).f1 == 0.0
    assert rouge_n(["a"], ["a"], 2).f1 == 0.0  # no bigrams on either side
    with pytest.raises(ValueError):
        rouge_n(["a"], ["a"], 3)


def test_lcs_example():
    s = rouge_l(list("abcd"), list("acbd"))
    assert lcs_length(list("abcd"), list("acbd")) == 3
    assert s.precision == s.recall == s.f1 == 0.75


def test_rouge_l_edges():
    assert rouge_l(list("abc"), list("abc")).f1 == 1.0
    assert rouge_l(list("ab"), list("cd")).f1 == 0.0
    assert rouge_l([], list("cd")).f1 == 0.0


def test_suite_stems_and_lowercases():
    scores = rouge_suite(["Runs"], ["running"])
    assert scores["r1"].f1 == 1.0
    assert rouge_suite(["Runs"], ["running"], RAW)["r1"].f1 == 0.0


def test_suite_empty_and_identity():
    assert all(s.f1 == 0 for s in rouge_suite([], ["a", "b"]).values())
    assert all(s.f1 == 1 for s in rouge_suite(["a", "b"], ["a", "b"]).values())


@pytest.mark.parametrize("word,stem", [
    ("running", "run"), ("cat", "cat"), ("relational", "relat"), ("caresses", "caress"),
    ("ponies", "poni"), ("hopping", "hop"), ("generalizations", "gener"), ("sky", "sky"),
    ("is", "is"), ("café", "café"),
])
def test_porter_examples(word, stem):
    assert porter_stem(word) == stem


def _vocab():
    return [line.split("\t") for line in VOCAB.read_text().splitlines()]


def test_porter_frozen_vocabulary():
    wrong = [(w, s, porter_stem(w)) for w, s in _vocab() if porter_stem(w) != s]
    assert wrong == []


def test_porter_live_reference():
    nltk_porter = pytest.importorskip("nltk.stem.porter")
    ref = nltk_porter.PorterStemmer(mode=nltk_porter.PorterStemmer.ORIGINAL_ALGORITHM)
    words = [w for w, _ in _vocab()] + ["agreed", "feed", "troubled", "sized", "filing"]
    assert [w for w in words if porter_stem(w) != ref.stem(w)] == []


def test_porter_is_not_always_idempotent():
    # the classic algorithm can strip a suffix from its own output
    assert porter_stem("advise") == "advis"
    assert porter_stem("advis") == "advi"


def test_porter_restemming_never_grows():
    for w, s in _vocab():
        assert len(porter_stem(s)) <= len(s)


# -- properties ---------------------------------------------------------------

@given(tokens, tokens, st.sampled_from([1, 2]))
def test_rouge_n_symmetry_and_bounds(a, b, n):
    x, y = rouge_n(a, b, n), rouge_n(b, a, n)
    assert x.f1 == pytest.approx(y.f1)
    assert (x.precision, x.recall) == (y.recall, y.precision)
    for v in (x.precision, x.recall, x.f1):
        assert 0.0 <= v <= 1.0
    assert x.f1 <= max(x.precision, x.recall) + 1e-12


@given(tokens, tokens)
def test_rouge_l_symmetry_and_bounds(a, b):
    x, y = rouge_l(a, b), rouge_l(b, a)
    assert x.f1 == pytest.approx(y.f1)
    assert 0.0 <= x.f1 <= max(x.precision, x.recall) + 1e-12 <= 1.0 + 1e-12


def brute_lcs(a, b):
    subs = {s for r in range(len(a) + 1) for s in combinations(a, r)}
    best = 0
    for r in range(len(b) + 1):
        for s in combinations(b, r):
            if s in subs:
                best = max(best, r)
    return best


@given(tokens, tokens)
def test_lcs_matches_exhaustive_search(a, b):
    assert lcs_length(a, b) == brute_lcs(a, b)


@given(tokens, tokens, st.sampled_from([1, 2]))
def test_rouge_n_matches_hand_counts(a, b, n):
    ca = Counter(tuple(a[i:i + n]) for i in range(len(a) - n + 1))
    cb = Counter(tuple(b[i:i + n]) for i in range(len(b) - n + 1))
    hits = sum(min(c, cb[g]) for g, c in ca.items())
    s = rouge_n(a, b, n)
    if ca and cb:
        assert s.precision == hits / sum(ca.values())
        assert s.recall == hits / sum(cb.values())
    else:
        assert s.f1 == 0.0
