"""Evaluation metrics for generated text and for augmented data sets."""
from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .dataset import ngram_types
from .errors import EmptyTest, EmptyTraining, LengthMismatch, NoSlots
from .mr import MeaningRepresentation, UtterancePair, delexicalize
from .nlu import SlotLexicon
from .text import find_all, iter_ngrams, normalize, tokenize

BLEU_EPSILON = 1e-9
BOS, EOS, UNK = "<s>", "</s>", "<unk>"


# -- slot error rate -------------------------------------------------------


@dataclass(frozen=True)
class ErrBreakdown:
    total_slots: int
    missing: int
    redundant: int

    @property
    def err(self) -> float:
        return (self.missing + self.redundant) / self.total_slots


def slot_error_rate(
    mr: MeaningRepresentation,
    realization: str,
    domain_lexicon: SlotLexicon | None = None,
) -> ErrBreakdown:
    """Count missing and redundant slots of a realization.

    A slot is missing when its value does not occur as a token subsequence
    of the realization. Tokens covered by the MR's own values are then set
    aside; any remaining lexicon value whose (key, value) is not in the MR
    counts as one redundant slot per occurrence.
    """
    slots = mr.slots
    if not slots:
        raise NoSlots("MR has no slots; slot error rate is undefined")
    toks = tokenize(realization).tokens
    covered = [False] * len(toks)
    missing = 0
    for s in sorted(slots, key=lambda s: -len(tokenize(s.value))):
        val = tokenize(s.value).tokens
        hits = find_all(toks, val)
        if not hits:
            missing += 1
        for h in hits:
            for i in range(h, h + len(val)):
                covered[i] = True

    redundant = 0
    if domain_lexicon is not None and len(domain_lexicon):
        present = {(s.key, normalize(s.value)) for s in slots}
        longest = domain_lexicon.max_len
        i = 0
        while i < len(toks):
            step = 1
            for n in range(min(longest, len(toks) - i), 0, -1):
                cand = toks[i : i + n]
                if any(covered[i : i + n]) or cand not in domain_lexicon.values:
                    continue
                value = " ".join(cand)
                if not any((k, value) in present for k in domain_lexicon.values[cand]):
                    redundant += 1
                step = n
                break
            i += step
    return ErrBreakdown(len(slots), missing, redundant)


def corpus_err(mrs: Sequence[MeaningRepresentation], realizations: Sequence[str], lexicon=None) -> float:
    """Pooled ERR over a corpus, skipping slot-less MRs."""
    if len(mrs) != len(realizations):
        raise LengthMismatch(f"{len(mrs)} MRs vs {len(realizations)} realizations")
    errs = total = 0
    for mr, text in zip(mrs, realizations):
        if not mr.slots:
            continue
        b = slot_error_rate(mr, text, lexicon)
        errs += b.missing + b.redundant
        total += b.total_slots
    return errs / total if total else 0.0


# -- BLEU ------------------------------------------------------------------


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[Sequence[str]], max_n: int = 4) -> float:
    """Corpus BLEU with clipped n-gram precisions and brevity penalty.

    Text is tokenized with :func:`mraug.text.tokenize`. A precision with no
    matches is replaced by a tiny epsilon; an order for which the hypotheses
    contain no n-grams at all carries no evidence and counts as 1.
    """
    if len(hypotheses) != len(references):
        raise LengthMismatch(f"{len(hypotheses)} hypotheses vs {len(references)} reference sets")
    if not hypotheses:
        raise ValueError("no hypotheses given")
    clipped = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, refs in zip(hypotheses, references):
        if isinstance(refs, str):
            refs = [refs]
        h = tokenize(hyp).tokens
        rs = [tokenize(r).tokens for r in refs]
        hyp_len += len(h)
        if rs:
            ref_len += min((abs(len(r) - len(h)), len(r)) for r in rs)[1]
        for n in range(1, max_n + 1):
            counts = Counter(iter_ngrams(h, n, n))
            best: Counter = Counter()
            for r in rs:
                best |= Counter(iter_ngrams(r, n, n))
            clipped[n - 1] += sum(min(c, best[g]) for g, c in counts.items())
            totals[n - 1] += sum(counts.values())
    if hyp_len == 0:
        return 0.0
    log_p = 0.0
    for m, t in zip(clipped, totals):
        if t == 0:
            continue
        log_p += math.log(m / t if m else BLEU_EPSILON)
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(log_p / max_n)


# -- coverage and novelty --------------------------------------------------


def _require_test(test):
    if len(test) == 0:
        raise EmptyTest("test set is empty")


def mr_coverage(augmented: Iterable[UtterancePair], test: Sequence[UtterancePair]) -> float:
    """Share of distinct test delexicalized MRs that also occur in ``augmented``."""
    _require_test(test)
    test_mrs = {delexicalize(p.mr) for p in test}
    aug_mrs = {delexicalize(p.mr) for p in augmented}
    return len(test_mrs & aug_mrs) / len(test_mrs)


def slot_coverage(augmented: Iterable[UtterancePair], test: Sequence[UtterancePair]) -> float:
    """Share of distinct test slot keys that also occur in ``augmented``."""
    _require_test(test)
    test_keys = {s.key for p in test for s in p.mr.slots}
    if not test_keys:
        return 1.0
    aug_keys = {s.key for p in augmented for s in p.mr.slots}
    return len(test_keys & aug_keys) / len(test_keys)


def ngram_novelty(augmented_utts: Sequence[str], test_utts: Sequence[str], n: int) -> float:
    """1 - (test n-gram types also in the augmented set) / (test n-gram types)."""
    _require_test(test_utts)
    if not 1 <= n <= 4:
        raise ValueError(f"n must be within 1..4, got {n}")
    test_types = ngram_types(test_utts, n)
    if not test_types:
        return 0.0
    shared = test_types & ngram_types(augmented_utts, n)
    return 1.0 - len(shared) / len(test_types)


def average_novelty(augmented_utts, test_utts, orders=(1, 2, 3, 4)) -> float:
    return sum(ngram_novelty(augmented_utts, test_utts, n) for n in orders) / len(orders)


# -- n-gram language model -------------------------------------------------


class NgramLm:
    """Add-k smoothed n-gram LM over a closed vocabulary plus ``<unk>``.

    The predicted vocabulary is every training token, ``</s>`` and ``<unk>``;
    ``<s>`` only ever appears as context padding.
    """

    def __init__(self, order: int = 3, k: float = 0.1):
        if order < 1:
            raise ValueError("order must be positive")
        if k <= 0:
            raise ValueError("k must be positive")
        self.order = order
        self.k = k
        self.vocab: set[str] = set()
        self.counts: Counter = Counter()
        self.context_counts: Counter = Counter()

    def _pad(self, tokens):
        return [BOS] * (self.order - 1) + list(tokens) + [EOS]

    def _map(self, tok):
        return tok if tok in self.vocab or tok == BOS else UNK

    def fit(self, sentences: Iterable[Sequence[str]]) -> "NgramLm":
        sentences = [list(s) for s in sentences]
        self.vocab = {t for s in sentences for t in s} | {EOS, UNK}
        self.vocab.discard(BOS)
        for s in sentences:
            padded = self._pad(s)
            for i in range(self.order - 1, len(padded)):
                ctx = tuple(padded[i - self.order + 1 : i])
                self.counts[ctx + (padded[i],)] += 1
                self.context_counts[ctx] += 1
        return self

    def prob(self, word: str, context: Sequence[str]) -> float:
        ctx = tuple(self._map(t) for t in tuple(context)[-(self.order - 1):]) if self.order > 1 else ()
        w = self._map(word)
        num = self.counts.get(ctx + (w,), 0) + self.k
        return num / (self.context_counts.get(ctx, 0) + self.k * len(self.vocab))

    def sentence_logprob(self, tokens: Sequence[str]) -> tuple[float, int]:
        padded = self._pad(tokens)
        total = 0.0
        for i in range(self.order - 1, len(padded)):
            total += math.log(self.prob(padded[i], padded[i - self.order + 1 : i]))
        return total, len(padded) - (self.order - 1)

    def perplexity(self, sentences: Iterable[Sequence[str]]) -> float:
        logp = 0.0
        n_tok = 0
        for s in sentences:
            lp, n = self.sentence_logprob(s)
            logp += lp
            n_tok += n
        if n_tok == 0:
            raise ValueError("no tokens to evaluate")
        return math.exp(-logp / n_tok)


def lm_perplexity(train_utts: Sequence[str], eval_utts: Sequence[str], order: int = 3, k: float = 0.1) -> float:
    """Perplexity of ``eval_utts`` under an add-k LM fitted on ``train_utts``."""
    if len(train_utts) == 0:
        raise EmptyTraining("LM training text is empty")
    lm = NgramLm(order, k).fit(tokenize(u).tokens for u in train_utts)
    return lm.perplexity(tokenize(u).tokens for u in eval_utts)


# -- reports ---------------------------------------------------------------


def format_report(values: Mapping[str, float]) -> str:
    return "".join(f"{k}\t{v:.4f}\n" for k, v in values.items())


def write_report(path: str | os.PathLike, values: Mapping[str, float]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_report(values))


def intrinsic_report(augmented: Sequence[UtterancePair], test: Sequence[UtterancePair], order=3, k=0.1) -> dict[str, float]:
    """MR/slot coverage, per-order and average novelty, and LM perplexity."""
    aug_utts = [p.utterance for p in augmented]
    test_utts = [p.utterance for p in test]
    out = {"mr_cov": mr_coverage(augmented, test), "sl_cov": slot_coverage(augmented, test)}
    for n in (1, 2, 3, 4):
        out[f"novelty_{n}"] = ngram_novelty(aug_utts, test_utts, n)
    out["novelty_avg"] = sum(out[f"novelty_{n}"] for n in (1, 2, 3, 4)) / 4
    if aug_utts:
        out["ppl"] = lm_perplexity(test_utts, aug_utts, order, k)
    return out
