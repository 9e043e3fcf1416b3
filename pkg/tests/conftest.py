import pytest
from hypothesis import strategies as st

from compsumm.corpus import BUNDLED, read_corpus, read_pairs
from compsumm.treebank import DocumentRecord, SentenceRecord, parse_bracketed

COURTS = "(S (NP (PRP She)) (VP (VBD was) (PP (IN at) (NP (DT the) (NN tennis) (NNS courts)))))"

# phrase and POS inventories chosen so that every rule family can fire
PHRASES = ["S", "NP", "VP", "PP", "SBAR", "ADJP", "ADVP", "PRN", "FRAG"]
POS = ["NN", "VBD", "DT", "JJ", "RB", "CC", ",", "WP", "-LRB-", "."]
WORDS = ["dog", "ran", "(", ")", "[", "27", ",", "the", "and", "who", "x-y"]

_criteria: dict[int, tuple[str, list[str]]] = {}


def sentence(text: str) -> SentenceRecord:
    return SentenceRecord.from_tree(parse_bracketed(text))


def flat_sentence(words) -> SentenceRecord:
    """A parse with no phrase structure, so no rule fires."""
    body = " ".join(f"(X {w})" for w in words)
    return sentence(f"(S {body})")


def flat_doc(doc_id, sents, reference) -> DocumentRecord:
    return DocumentRecord(doc_id, [flat_sentence(s) for s in sents], reference)


def tree_specs(max_leaves=20):
    """Nested (tag, children-or-word) tuples for ``build_tree``."""
    leaf = st.tuples(st.sampled_from(POS), st.sampled_from(WORDS))
    return st.recursive(
        leaf,
        lambda kids: st.tuples(st.sampled_from(PHRASES), st.lists(kids, min_size=1, max_size=4)),
        max_leaves=max_leaves,
    )


@pytest.fixture(scope="session")
def toy_corpus():
    return read_corpus(BUNDLED / "toy_corpus.jsonl").records


@pytest.fixture(scope="session")
def toy_pairs():
    return read_pairs(BUNDLED / "toy_pairs.jsonl")


@pytest.fixture(scope="session")
def toy_models(toy_corpus, toy_pairs):
    from compsumm.planted import train_models
    return train_models(toy_corpus, toy_pairs)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, name = mark.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(num, (name, []))[1].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        name, outcomes = _criteria[num]
        status = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {num}: {name}")
