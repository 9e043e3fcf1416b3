"""Tokens, constituency trees and Penn Treebank bracketed I/O.

Trees are immutable. A constituent covers the half-open token range
``[start, end)``; preterminals (POS tags) have no children and cover one
token.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import MalformedTreeError

ESCAPES = {
    "-LRB-": "(", "-RRB-": ")",
    "-LSB-": "[", "-RSB-": "]",
    "-LCB-": "{", "-RCB-": "}",
}
UNESCAPES = {v: k for k, v in ESCAPES.items()}

_LEX = re.compile(r"\(|\)|[^\s()]+")


@dataclass(frozen=True)
class Token:
    surface: str
    index: int

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")


@dataclass(frozen=True)
class Constituent:
    tag: str
    start: int
    end: int
    children: tuple[Constituent, ...] = ()

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_preterminal(self) -> bool:
        return not self.children

    def __len__(self):
        return self.end - self.start


@dataclass(frozen=True)
class ParseTree:
    root: Constituent
    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.root.span != (0, len(self.tokens)):
            raise ValueError(
                f"root spans {self.root.span} but there are {len(self.tokens)} tokens")

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class SentenceRecord:
    tokens: tuple[Token, ...]
    tree: ParseTree

    @classmethod
    def from_tree(cls, tree: ParseTree) -> SentenceRecord:
        return cls(tree.tokens, tree)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.tokens != self.tree.tokens:
            raise ValueError("sentence tokens differ from tree tokens")

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    sentences: tuple[SentenceRecord, ...]
    reference: Optional[tuple[tuple[str, ...], ...]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise ValueError(f"document {self.id!r} has no sentences")
        if self.reference is not None:
            object.__setattr__(
                self, "reference", tuple(tuple(s) for s in self.reference))

    @property
    def reference_tokens(self) -> list[str]:
        """The reference summary flattened into one token list."""
        if self.reference is None:
            return []
        return [w for sent in self.reference for w in sent]


def base_label(label: str) -> str:
    """Strip function tags and coindices: ``NP-SBJ-1`` -> ``NP``."""
    if label.startswith("-"):
        # -LRB-, -NONE- and friends are atomic
        return label
    base = re.split(r"[-=]", label, maxsplit=1)[0]
    return base or label


def parse_bracketed(text: str) -> ParseTree:
    """Parse one bracketed tree such as ``(S (NP (PRP She)) (VP (VBD ran)))``.

    An unlabeled outer wrapper, as in ``( (S ...) )``, is removed. Escaped
    brackets in leaves decode to the literal characters.
    """
    lexemes = [(m.group(), m.start()) for m in _LEX.finditer(text)]
    if not lexemes:
        raise MalformedTreeError("empty input", 0)

    words: list[str] = []
    opened: list[int] = []
    pos = 0

    def node() -> Constituent:
        nonlocal pos
        open_at = lexemes[pos][1]
        opened.append(open_at)
        pos += 1  # '('
        label = None
        if pos < len(lexemes) and lexemes[pos][0] not in "()":
            label = lexemes[pos][0]
            pos += 1
        start = len(words)
        children = []
        leaf = None
        while True:
            if pos >= len(lexemes):
                raise MalformedTreeError("unclosed bracket", opened[0])
            lex, off = lexemes[pos]
            if lex == ")":
                pos += 1
                opened.pop()
                break
            if lex == "(":
                if leaf is not None:
                    raise MalformedTreeError("leaf mixed with subtrees", off)
                children.append(node())
            else:
                if leaf is not None or children:
                    raise MalformedTreeError(f"unexpected token {lex!r}", off)
                leaf = lex
                pos += 1
        if leaf is not None:
            if label is None:
                raise MalformedTreeError("leaf without a POS tag", open_at)
            if label == "-NONE-":
                raise MalformedTreeError("empty element -NONE- not supported", open_at)
            words.append(ESCAPES.get(leaf, leaf))
            return Constituent(label, start, start + 1)
        if not children:
            raise MalformedTreeError("empty constituent", open_at)
        if label is None:
            if len(children) == 1:
                return children[0]
            raise MalformedTreeError("unlabeled constituent", open_at)
        return Constituent(base_label(label), start, len(words), tuple(children))

    if lexemes[0][0] != "(":
        raise MalformedTreeError("tree must start with '('", lexemes[0][1])
    root = node()
    if pos != len(lexemes):
        raise MalformedTreeError("trailing input after tree", lexemes[pos][1])
    tokens = tuple(Token(w, i) for i, w in enumerate(words))
    return ParseTree(root, tokens)


def render_bracketed(tree: ParseTree) -> str:
    def render(c: Constituent) -> str:
        if c.is_preterminal:
            word = tree.tokens[c.start].surface
            return f"({c.tag} {UNESCAPES.get(word, word)})"
        return "(" + c.tag + " " + " ".join(render(ch) for ch in c.children) + ")"
    return render(tree.root)


def walk(tree: ParseTree) -> Iterator[tuple[Constituent, Optional[Constituent], int]]:
    """Pre-order traversal yielding ``(node, parent, depth)``; the root has depth 0."""
    stack: list[tuple[Constituent, Optional[Constituent], int]] = [(tree.root, None, 0)]
    while stack:
        c, parent, depth = stack.pop()
        yield c, parent, depth
        for ch in reversed(c.children):
            stack.append((ch, c, depth + 1))


def constituents_of(tree: ParseTree) -> list[Constituent]:
    return [c for c, _, _ in walk(tree)]


def height(tree: ParseTree) -> int:
    return max(d for _, _, d in walk(tree))


def leaves(tree: ParseTree) -> list[str]:
    """Words read off the preterminals left to right."""
    return [tree.tokens[c.start].surface for c in constituents_of(tree) if c.is_preterminal]


def check_tree(tree: ParseTree) -> None:
    """Raise ``ValueError`` if any structural invariant is broken."""
    for c, _, _ in walk(tree):
        if c.start >= c.end:
            raise ValueError(f"empty span on {c.tag}")
        if c.is_preterminal:
            if c.end - c.start != 1:
                raise ValueError(f"preterminal {c.tag} spans {c.span}")
            continue
        cursor = c.start
        for ch in c.children:
            if ch.start != cursor:
                raise ValueError(f"children of {c.tag} do not partition {c.span}")
            cursor = ch.end
        if cursor != c.end:
            raise ValueError(f"children of {c.tag} do not cover {c.span}")


def build_tree(spec) -> ParseTree:
    """Build a tree from nested ``(tag, children-or-word)`` tuples.

    >>> t = build_tree(("NP", [("DT", "the"), ("NN", "dog")]))
    >>> render_bracketed(t)
    '(NP (DT the) (NN dog))'
    """
    out: list[str] = []

    def go(node) -> Constituent:
        tag, body = node
        start = len(out)
        if isinstance(body, str):
            out.append(body)
            return Constituent(tag, start, start + 1)
        kids = tuple(go(ch) for ch in body)
        return Constituent(tag, start, len(out), kids)

    root = go(spec)
    return ParseTree(root, tuple(Token(w, i) for i, w in enumerate(out)))
