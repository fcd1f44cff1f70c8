"""Self-trained relevance filtering of retrieved candidates.

The loop starts from the in-domain utterances as positives and random
non-candidate pool utterances as negatives, then repeatedly relabels the
candidates with the current classifier: confident positives join the
in-domain set, confident negatives (sub-sampled) replace the negative set,
and training repeats until the positive set stops growing by more than
``delta`` or ``max_iters`` rounds have run. Candidates scoring at least
``sigma`` under the last trained classifier are kept.
"""
from __future__ import annotations

import logging
import math
import os
import shlex
import subprocess
import tempfile
import zlib
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, EmptyClassInput, InsufficientPool
from .retrieval import CandidateSet, UtterancePool
from .text import tokenize

log = logging.getLogger(__name__)

HASH_BITS = 20
N_BUCKETS = 1 << HASH_BITS


@dataclass(frozen=True)
class FilterConfig:
    sigma_plus: float = 0.99
    sigma_minus: float = 0.5
    sigma: float = 0.5
    lambda1: float = 10.0
    lambda2: float = 5.0
    delta: int = 100
    max_iters: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.sigma_plus <= 1.0:
            raise ConfigError(f"sigma_plus must lie in (0, 1], got {self.sigma_plus}")
        if not 0.0 <= self.sigma_minus < 1.0:
            raise ConfigError(f"sigma_minus must lie in [0, 1), got {self.sigma_minus}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ConfigError(f"sigma must lie in [0, 1], got {self.sigma}")
        if not self.sigma_minus <= self.sigma <= self.sigma_plus:
            raise ConfigError("thresholds must satisfy sigma_minus <= sigma <= sigma_plus")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ConfigError("lambda1 and lambda2 must be positive")
        if self.delta < 0:
            raise ConfigError("delta must be non-negative")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")


class FilterModel(Protocol):
    def score(self, utterances: Sequence[str]) -> np.ndarray: ...

    def predict(self, utterance: str) -> float: ...


# model_factory(positives, negatives, seed) -> trained FilterModel
ModelFactory = Callable[[Sequence[str], Sequence[str], int], FilterModel]


# -- built-in classifier ---------------------------------------------------


def _bucket(feature: str) -> int:
    return zlib.crc32(feature.encode("utf-8")) & (N_BUCKETS - 1)


def hashed_features(text: str) -> np.ndarray:
    """Sorted unique hash buckets of the unigrams and bigrams of ``text``."""
    toks = tokenize(text).tokens
    feats = {_bucket("u:" + t) for t in toks}
    feats.update(_bucket("b:" + a + " " + b) for a, b in zip(toks, toks[1:]))
    return np.array(sorted(feats), dtype=np.int64)


def _design(texts: Sequence[str], n_cols: int = N_BUCKETS, remap=None) -> sp.csr_matrix:
    indptr = [0]
    indices = []
    data = []
    for t in texts:
        cols = hashed_features(t)
        if remap is not None:
            cols = remap(cols)
        indices.append(cols)
        # unit L2 norm per row
        data.append(np.full(len(cols), 1.0 / math.sqrt(len(cols)) if len(cols) else 0.0))
        indptr.append(indptr[-1] + len(cols))
    idx = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    val = np.concatenate(data) if data else np.zeros(0)
    return sp.csr_matrix((val, idx, np.array(indptr)), shape=(len(texts), n_cols))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class HashedLogisticModel:
    """Logistic regression over hashed bag-of-words and bag-of-bigrams."""

    weights: np.ndarray = field(repr=False)
    bias: float = 0.0

    def score(self, utterances: Sequence[str]) -> np.ndarray:
        if len(utterances) == 0:
            return np.zeros(0)
        X = _design(list(utterances))
        return _sigmoid(X @ self.weights + self.bias)

    def predict(self, utterance: str) -> float:
        return float(self.score([utterance])[0])


def train_builtin_classifier(
    positives: Sequence[str],
    negatives: Sequence[str],
    seed: int = 0,
    epochs: int = 20,
    learning_rate: float = 8.0,
    l2: float = 1e-5,
    batch_size: int = 16,
    balanced: bool = True,
) -> HashedLogisticModel:
    """Mini-batch SGD on the logistic loss; reproducible for a given seed.

    With ``balanced`` each class contributes equal total weight to the loss,
    so the heavily outnumbered positives are not drowned by negatives.
    """
    if len(positives) == 0 or len(negatives) == 0:
        raise EmptyClassInput("both positive and negative examples are required")
    texts = list(positives) + list(negatives)
    y = np.concatenate([np.ones(len(positives)), np.zeros(len(negatives))])
    if balanced:
        n = len(texts)
        cw = np.concatenate([np.full(len(positives), n / (2 * len(positives))),
                             np.full(len(negatives), n / (2 * len(negatives)))])
    else:
        cw = np.ones(len(texts))

    # train in the compact space of buckets actually used, scatter back afterwards
    rows = [hashed_features(t) for t in texts]
    used = np.unique(np.concatenate(rows))
    X = _design(texts, len(used), remap=lambda cols: np.searchsorted(used, cols))
    w = np.zeros(len(used))
    b = 0.0
    rng = np.random.default_rng(seed)
    n = len(texts)
    for epoch in range(epochs):
        lr = learning_rate
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            Xb = X[batch]
            resid = (_sigmoid(Xb @ w + b) - y[batch]) * cw[batch]
            w -= lr * (Xb.T @ resid / len(batch) + l2 * w)
            b -= lr * float(resid.mean())
    full = np.zeros(N_BUCKETS)
    full[used] = w
    return HashedLogisticModel(full, b)


# -- external scorer -------------------------------------------------------


class ExternalScorer:
    """Delegates training and scoring to a user command via plain text files.

    Before each scoring call the working directory holds ``train_pos.txt``,
    ``train_neg.txt`` and ``predict.txt`` (one utterance per line); the
    command must write ``scores.txt`` with one score in [0, 1] per line of
    ``predict.txt``.
    """

    def __init__(self, command: str, positives, negatives, workdir: str | None = None):
        self.command = command
        self.positives = list(positives)
        self.negatives = list(negatives)
        self.workdir = workdir

    def _write(self, path, lines):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line.replace("\n", " ") + "\n")

    def score(self, utterances: Sequence[str]) -> np.ndarray:
        if len(utterances) == 0:
            return np.zeros(0)
        with tempfile.TemporaryDirectory(dir=self.workdir) as tmp:
            self._write(os.path.join(tmp, "train_pos.txt"), self.positives)
            self._write(os.path.join(tmp, "train_neg.txt"), self.negatives)
            self._write(os.path.join(tmp, "predict.txt"), utterances)
            subprocess.run(shlex.split(self.command), cwd=tmp, check=True)
            with open(os.path.join(tmp, "scores.txt"), encoding="utf-8") as f:
                scores = np.array([float(x) for x in f.read().split()])
        if len(scores) != len(utterances):
            raise RuntimeError(
                f"scorer returned {len(scores)} scores for {len(utterances)} utterances"
            )
        return np.clip(scores, 0.0, 1.0)

    def predict(self, utterance: str) -> float:
        return float(self.score([utterance])[0])


def external_factory(command: str, workdir: str | None = None) -> ModelFactory:
    def factory(positives, negatives, seed):
        if len(positives) == 0 or len(negatives) == 0:
            raise EmptyClassInput("both positive and negative examples are required")
        return ExternalScorer(command, positives, negatives, workdir)

    return factory


# -- the loop --------------------------------------------------------------


@dataclass
class FilterReport:
    iterations_run: int = 0
    trainings: int = 0
    positives_per_iter: list[int] = field(default_factory=list)
    negatives_per_iter: list[int] = field(default_factory=list)
    converged: bool = False
    n_candidates: int = 0
    n_filtered: int = 0
    kept_ids: list[int] = field(default_factory=list, repr=False)

    def lines(self) -> list[str]:
        return [
            f"iterations_run\t{self.iterations_run}",
            f"trainings\t{self.trainings}",
            f"converged\t{str(self.converged).lower()}",
            f"n_candidates\t{self.n_candidates}",
            f"n_filtered\t{self.n_filtered}",
            "positives_per_iter\t" + ",".join(map(str, self.positives_per_iter)),
            "negatives_per_iter\t" + ",".join(map(str, self.negatives_per_iter)),
        ]

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(self.lines()) + "\n")


def sample_initial_negatives(
    pool: UtterancePool,
    candidates: CandidateSet,
    u_plus_size: int,
    lambda1: float,
    seed: int,
) -> list[int]:
    """Pool ids drawn uniformly without replacement from outside the candidates."""
    complement = pool.complement(candidates.ids)
    k = int(math.floor(lambda1 * u_plus_size))
    if k > len(complement):
        raise InsufficientPool(
            f"need {k} negatives but only {len(complement)} non-candidate utterances exist"
        )
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(complement), size=k, replace=False)
    return sorted(complement[i] for i in picked)


def _subsample(items: list[str], limit: int, rng) -> list[str]:
    if len(items) <= limit:
        return items
    picked = rng.choice(len(items), size=limit, replace=False)
    return sorted(items[i] for i in picked)


def run_self_training(
    in_domain: Sequence[str],
    candidates: CandidateSet,
    pool: UtterancePool,
    model_factory: ModelFactory = train_builtin_classifier,
    cfg: FilterConfig = FilterConfig(),
    on_iteration: Callable[[int, set, list], None] | None = None,
):
    """Filter ``candidates`` down to domain-relevant utterances.

    Returns ``(filtered, report)`` where ``filtered`` lists the kept
    candidate utterances in id order. ``on_iteration(l, positives,
    negatives)`` is called once per loop iteration for inspection.
    """
    if len(in_domain) == 0:
        raise ValueError("in-domain utterances are required")
    report = FilterReport(n_candidates=len(candidates))
    if len(candidates) == 0:
        report.iterations_run = 1
        report.converged = True
        return [], report

    cand_ids = list(candidates.ids)
    cand_texts = [pool.sources[i] for i in cand_ids]
    u_plus = set(in_domain)
    # independent streams: [negatives, sub-sampling, c^0, c^1, ...]
    seeds = [int(x) for x in np.random.default_rng(cfg.rng_seed).integers(0, 2**31 - 1, size=cfg.max_iters + 3)]
    sub_rng = np.random.default_rng(seeds[1])

    neg_ids = sample_initial_negatives(pool, candidates, len(in_domain), cfg.lambda1, seeds[0])
    negatives = sorted({pool.sources[i] for i in neg_ids} - u_plus)
    model = model_factory(sorted(u_plus), negatives, seeds[2])
    report.trainings = 1
    prev_size = len(u_plus)

    for it in range(1, cfg.max_iters + 1):
        report.iterations_run = it
        scores = np.asarray(model.score(cand_texts), dtype=float)
        if np.any((scores < 0) | (scores > 1)):
            raise ValueError("classifier scores must lie in [0, 1]")
        positives = {t for t, s in zip(cand_texts, scores) if s >= cfg.sigma_plus} | u_plus
        fresh = sorted({t for t, s in zip(cand_texts, scores) if s <= cfg.sigma_minus} - positives)
        if not fresh:
            # training needs both classes; fall back to the previous negatives
            fresh = [t for t in negatives if t not in positives]
        negatives = _subsample(fresh, int(math.floor(cfg.lambda2 * len(positives))), sub_rng)
        assert u_plus <= positives
        assert len(negatives) <= cfg.lambda2 * len(positives)
        report.positives_per_iter.append(len(positives))
        report.negatives_per_iter.append(len(negatives))
        if on_iteration is not None:
            on_iteration(it, positives, negatives)
        log.info("iteration %d: |E+|=%d |E-|=%d", it, len(positives), len(negatives))
        if len(positives) - prev_size <= cfg.delta:
            report.converged = True
            break
        model = model_factory(sorted(positives), negatives, seeds[2 + it])
        report.trainings += 1
        prev_size = len(positives)

    final = np.asarray(model.score(cand_texts), dtype=float)
    kept = [(uid, t) for uid, t, s in zip(cand_ids, cand_texts, final) if s >= cfg.sigma]
    report.kept_ids = [uid for uid, _ in kept]
    report.n_filtered = len(kept)
    return [t for _, t in kept], report
