"""TF-IDF keyword extraction.

All in-domain utterances are pooled into one document for term frequency;
each background (open-domain) utterance is its own document for inverse
document frequency::

    tfidf(ph) = log(1 + freq(ph, in_domain)) * log(|D| / df(ph))

Phrases that never occur in the background (``df == 0``) are dropped: they
could not retrieve anything from the same pool.
"""
from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyBackground
from .text import TokenSequence, iter_ngrams, tokenize

DEFAULT_N_MIN = 1
DEFAULT_N_MAX = 3
DEFAULT_MAX_KEYWORDS = 500
DEFAULT_MIN_SCORE = 0.0


@dataclass(frozen=True)
class ScoredKeyword:
    phrase: tuple[str, ...]
    tfidf: float
    freq_in_domain: int

    @property
    def text(self) -> str:
        return " ".join(self.phrase)


@dataclass(frozen=True)
class KeywordSet:
    keywords: tuple[ScoredKeyword, ...] = ()

    def __len__(self):
        return len(self.keywords)

    def __iter__(self):
        return iter(self.keywords)

    def __getitem__(self, i):
        return self.keywords[i]

    @property
    def phrases(self) -> list[tuple[str, ...]]:
        return [k.phrase for k in self.keywords]

    @classmethod
    def from_phrases(cls, phrases: Iterable[Sequence[str] | str]) -> "KeywordSet":
        """Unscored keyword set, e.g. for hand-picked keywords."""
        seen = set()
        out = []
        for p in phrases:
            toks = tokenize(p).tokens if isinstance(p, str) else tuple(p)
            if toks and toks not in seen:
                seen.add(toks)
                out.append(ScoredKeyword(toks, 0.0, 0))
        return cls(tuple(sorted(out, key=_rank_key)))


def _rank_key(k: ScoredKeyword):
    return (-k.tfidf, " ".join(k.phrase))


def _tokens(seq) -> tuple[str, ...]:
    if isinstance(seq, TokenSequence):
        return seq.tokens
    if isinstance(seq, str):
        return tokenize(seq).tokens
    return tuple(seq)


def tfidf(freq: int, n_docs: int, df: int) -> float:
    if freq <= 0 or df <= 0:
        return 0.0
    return math.log(1 + freq) * math.log(n_docs / df)


def score_tfidf(phrase: Sequence[str], in_domain: Sequence, background: Sequence) -> float:
    """TF-IDF of a single phrase by direct scan of both corpora."""
    if len(background) == 0:
        raise EmptyBackground("background corpus is empty")
    phrase = tuple(phrase)
    n = len(phrase)
    freq = 0
    for seq in in_domain:
        toks = _tokens(seq)
        freq += sum(1 for i in range(len(toks) - n + 1) if toks[i : i + n] == phrase)
    df = 0
    for seq in background:
        toks = _tokens(seq)
        if any(toks[i : i + n] == phrase for i in range(len(toks) - n + 1)):
            df += 1
    return tfidf(freq, len(background), df)


def domain_frequencies(in_domain: Iterable, n_min: int, n_max: int) -> Counter:
    freq: Counter = Counter()
    for seq in in_domain:
        freq.update(iter_ngrams(_tokens(seq), n_min, n_max))
    return freq


def document_frequencies(background: Iterable, phrases: set, n_min: int, n_max: int) -> tuple[Counter, int]:
    """df of every phrase in ``phrases`` plus the number of documents seen.

    ``background`` may also be an :class:`~mraug.retrieval.UtterancePool`,
    in which case the postings lengths are used directly.
    """
    postings = getattr(background, "postings", None)
    if postings is not None:
        df = Counter({p: len(postings(p)) for p in phrases})
        return +df, len(background)
    df: Counter = Counter()
    n_docs = 0
    for seq in background:
        n_docs += 1
        present = {g for g in iter_ngrams(_tokens(seq), n_min, n_max) if g in phrases}
        df.update(present)
    return df, n_docs


def extract_keywords(
    in_domain: Sequence,
    background,
    n_min: int = DEFAULT_N_MIN,
    n_max: int = DEFAULT_N_MAX,
    max_keywords: int = DEFAULT_MAX_KEYWORDS,
    min_score: float = DEFAULT_MIN_SCORE,
) -> KeywordSet:
    """Rank every in-domain n-gram by TF-IDF and keep the top ``max_keywords``.

    Phrases scoring ``<= min_score`` are dropped before the cap is applied.
    """
    if len(in_domain) == 0:
        raise ValueError("in-domain corpus is empty")
    freq = domain_frequencies(in_domain, n_min, n_max)
    df, n_docs = document_frequencies(background, set(freq), n_min, n_max)
    if n_docs == 0:
        raise EmptyBackground("background corpus is empty")
    scored = []
    for phrase, f in freq.items():
        s = tfidf(f, n_docs, df.get(phrase, 0))
        if s > min_score:
            scored.append(ScoredKeyword(phrase, s, f))
    scored.sort(key=_rank_key)
    return KeywordSet(tuple(scored[: max(0, max_keywords)]))


def write_keywords(path: str | os.PathLike, keywords: KeywordSet) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for k in keywords:
            f.write(f"{k.text}\t{k.tfidf:.6f}\n")


def read_keywords(path: str | os.PathLike) -> KeywordSet:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            phrase, _, score = line.partition("\t")
            out.append(ScoredKeyword(tuple(phrase.split(" ")), float(score or 0.0), 0))
    # file order is authoritative; rounded scores could tie differently
    return KeywordSet(tuple(out))
