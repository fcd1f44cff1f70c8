"""Tokenization and n-gram helpers shared by every other module.

All keyword matching, retrieval, tagging and metrics go through
:func:`tokenize`, so the rules here define what counts as a "token"
for the whole package.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# punctuation detached as standalone tokens; apostrophes stay inside words
PUNCT = '.,!?;:()"'
_TOKEN_RE = re.compile(r'[.,!?;:()"]|[^\s.,!?;:()"]+')

NGram = tuple  # tuple[str, ...]


@dataclass(frozen=True)
class TokenSequence:
    """Lowercased tokens of ``source`` with their character spans."""

    tokens: tuple[str, ...]
    source: str = ""
    offsets: tuple[tuple[int, int], ...] = field(default=(), compare=False, repr=False)

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def surface(self, start: int, end: int) -> str:
        """Original text covered by tokens ``start:end``."""
        if start >= end:
            return ""
        if not self.offsets:
            return " ".join(self.tokens[start:end])
        return self.source[self.offsets[start][0] : self.offsets[end - 1][1]]

    def text(self) -> str:
        return " ".join(self.tokens)


def tokenize(text: str) -> TokenSequence:
    tokens = []
    offsets = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group().lower())
        offsets.append(m.span())
    return TokenSequence(tuple(tokens), text, tuple(offsets))


def token_tuple(text: str) -> tuple[str, ...]:
    """Just the tokens of :func:`tokenize`, without offsets (faster)."""
    # lowercase per token: str.lower is context-sensitive (Greek final sigma)
    return tuple(t.lower() for t in _TOKEN_RE.findall(text))


def normalize(text: str) -> str:
    """Tokenizer-consistent normal form: lowercased tokens joined by one space."""
    return " ".join(tokenize(text).tokens)


def iter_ngrams(tokens: Sequence[str], n_min: int, n_max: int) -> Iterable[tuple[str, ...]]:
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"invalid n-gram range {n_min}..{n_max}")
    tokens = tuple(tokens)
    for n in range(n_min, n_max + 1):
        for i in range(len(tokens) - n + 1):
            yield tokens[i : i + n]


def ngrams(seq, n_min: int, n_max: int) -> Counter:
    """Multiset of contiguous n-grams with ``n_min <= n <= n_max``."""
    tokens = seq.tokens if isinstance(seq, TokenSequence) else seq
    return Counter(iter_ngrams(tokens, n_min, n_max))


def contains(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    n = len(phrase)
    if n == 0:
        return False
    phrase = tuple(phrase)
    tokens = tuple(tokens)
    return any(tokens[i : i + n] == phrase for i in range(len(tokens) - n + 1))


def find_all(tokens: Sequence[str], phrase: Sequence[str]) -> list[int]:
    """Start positions of every occurrence of ``phrase`` in ``tokens``."""
    n = len(phrase)
    if n == 0:
        return []
    phrase = tuple(phrase)
    tokens = tuple(tokens)
    return [i for i in range(len(tokens) - n + 1) if tokens[i : i + n] == phrase]
