"""Few-shot split construction and corpus statistics.

Pairs are grouped by delexicalized MR; one pair from each of ``k`` randomly
chosen groups forms the training set and everything else is test data.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .errors import EmptyCorpus
from .mr import DelexMR, UtterancePair, delexicalize
from .text import iter_ngrams, tokenize

NOVELTY_ORDERS = (1, 2, 3, 4)


@dataclass
class FewShotSplit:
    train: list[UtterancePair]
    test: list[UtterancePair]
    groups: dict[DelexMR, list[int]] = field(default_factory=dict)
    train_ids: list[int] = field(default_factory=list)


def group_by_delex(corpus: Sequence[UtterancePair]) -> dict[DelexMR, list[int]]:
    groups: dict[DelexMR, list[int]] = {}
    for i, pair in enumerate(corpus):
        groups.setdefault(delexicalize(pair.mr), []).append(i)
    return groups


def make_split(corpus: Sequence[UtterancePair], k_groups: int = 50, seed: int = 0) -> FewShotSplit:
    if not corpus:
        raise EmptyCorpus("cannot split an empty corpus")
    groups = group_by_delex(corpus)
    # groups in first-appearance order, so the draw depends only on the corpus
    keys = list(groups)
    rng = np.random.default_rng(seed)
    k = min(k_groups, len(keys))
    chosen = rng.choice(len(keys), size=k, replace=False)
    train_ids = []
    for g in chosen:
        members = groups[keys[g]]
        train_ids.append(members[int(rng.integers(len(members)))])
    train_ids.sort()
    picked = set(train_ids)
    return FewShotSplit(
        train=[corpus[i] for i in train_ids],
        test=[p for i, p in enumerate(corpus) if i not in picked],
        groups=groups,
        train_ids=train_ids,
    )


def ngram_types(utterances, n: int) -> set[tuple[str, ...]]:
    types = set()
    for u in utterances:
        types.update(iter_ngrams(tokenize(u).tokens, n, n))
    return types


def novelty(reference_utts, test_utts, n: int) -> float:
    """Fraction of test n-gram types absent from the reference n-gram types."""
    test_types = ngram_types(test_utts, n)
    if not test_types:
        return 0.0
    return len(test_types - ngram_types(reference_utts, n)) / len(test_types)


@dataclass
class CorpusStats:
    n_intents: int = 0
    n_slots: int = 0
    n_delex_mrs_train: int = 0
    n_delex_mrs_test: int = 0
    n_train: int = 0
    n_test: int = 0
    novelty_1: float = 0.0
    novelty_2: float = 0.0
    novelty_3: float = 0.0
    novelty_4: float = 0.0

    def lines(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{f.name}\t{v:.4f}" if isinstance(v, float) else f"{f.name}\t{v}")
        return out

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(self.lines()) + "\n")


def compute_stats(split: FewShotSplit) -> CorpusStats:
    pairs = split.train + split.test
    train_utts = [p.utterance for p in split.train]
    test_utts = [p.utterance for p in split.test]
    nov = {n: novelty(train_utts, test_utts, n) for n in NOVELTY_ORDERS}
    return CorpusStats(
        n_intents=len({i for p in pairs for i in p.mr.intents}),
        n_slots=len({s.key for p in pairs for s in p.mr.slots}),
        n_delex_mrs_train=len({delexicalize(p.mr) for p in split.train}),
        n_delex_mrs_test=len({delexicalize(p.mr) for p in split.test}),
        n_train=len(split.train),
        n_test=len(split.test),
        novelty_1=nov[1],
        novelty_2=nov[2],
        novelty_3=nov[3],
        novelty_4=nov[4],
    )
