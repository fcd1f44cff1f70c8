"""Few-shot NLU used to put synthetic MR labels on filtered utterances.

Slots are tagged by greedy longest-match against a value lexicon built from
the in-domain pairs. Intents come from a nearest-centroid classifier over
term-frequency vectors of the slot-delexicalized utterance.
"""
from __future__ import annotations

import math
import os
import shlex
import subprocess
import tempfile
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .errors import LengthMismatch, UntrainedModel
from .mr import MeaningRepresentation, UtterancePair
from .text import TokenSequence, normalize, tokenize

Span = tuple[int, int]
Tag = tuple[str, str, Span]  # (key, surface value, token span)


@dataclass
class SlotLexicon:
    """Normalized slot value -> keys it was seen under, plus per-key inventories."""

    values: dict[tuple[str, ...], set[str]] = field(default_factory=dict)
    inventory: dict[str, set[tuple[str, ...]]] = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def __contains__(self, value) -> bool:
        return self._key(value) in self.values

    def keys_for(self, value) -> set[str]:
        return self.values.get(self._key(value), set())

    @staticmethod
    def _key(value) -> tuple[str, ...]:
        return tokenize(value).tokens if isinstance(value, str) else tuple(value)

    @property
    def max_len(self) -> int:
        return max((len(v) for v in self.values), default=0)

    def add(self, key: str, value: str) -> None:
        toks = tokenize(value).tokens
        if not toks:
            return
        self.values.setdefault(toks, set()).add(key)
        self.inventory.setdefault(key, set()).add(toks)

    def resolve(self, value_tokens: tuple[str, ...]) -> str:
        """Pick one key for an ambiguous value: largest inventory, then name."""
        keys = self.values[value_tokens]
        return min(keys, key=lambda k: (-len(self.inventory.get(k, ())), k))

    def as_dict(self) -> dict[str, list[str]]:
        return {" ".join(v): sorted(k) for v, k in sorted(self.values.items())}


def build_lexicon(training_pairs: Iterable[UtterancePair]) -> SlotLexicon:
    lex = SlotLexicon()
    for pair in training_pairs:
        for slot in pair.mr.slots:
            lex.add(slot.key, slot.value)
    return lex


def tag_slots(utterance: TokenSequence | str, lexicon: SlotLexicon) -> list[Tag]:
    """Greedy left-to-right longest match of lexicon values over token spans."""
    seq = tokenize(utterance) if isinstance(utterance, str) else utterance
    toks = seq.tokens
    longest = lexicon.max_len
    tags = []
    i = 0
    while i < len(toks):
        for n in range(min(longest, len(toks) - i), 0, -1):
            cand = toks[i : i + n]
            if cand in lexicon.values:
                tags.append((lexicon.resolve(cand), seq.surface(i, i + n), (i, i + n)))
                i += n
                break
        else:
            i += 1
    return tags


def delex_tokens(seq: TokenSequence, tags: Sequence[Tag]) -> list[str]:
    """Tokens with every tagged span collapsed to a ``[key]`` placeholder."""
    out = []
    spans = sorted((span, key) for key, _, span in tags)
    i = 0
    for (start, end), key in spans:
        out.extend(seq.tokens[i:start])
        out.append(f"[{key}]")
        i = end
    out.extend(seq.tokens[i:])
    return out


# -- intent classification -------------------------------------------------


class IntentModel(Protocol):
    intents: list[str]

    def classify(self, utterance: TokenSequence, tags: Sequence[Tag]) -> tuple[str, float]: ...


def _unit(counts: Counter) -> dict[str, float]:
    norm = math.sqrt(sum(c * c for c in counts.values()))
    return {t: c / norm for t, c in counts.items()} if norm else {}


class CentroidIntentModel:
    """Nearest-centroid intent classifier with cosine similarity.

    Confidence is a softmax over negative cosine distances to each centroid.
    """

    def __init__(self):
        self.centroids: dict[str, dict[str, float]] = {}

    @property
    def intents(self) -> list[str]:
        return sorted(self.centroids)

    def fit(self, examples: Iterable[tuple[str, Sequence[str]]]) -> "CentroidIntentModel":
        sums: dict[str, Counter] = defaultdict(Counter)
        counts: Counter = Counter()
        for intent, tokens in examples:
            for t, w in _unit(Counter(tokens)).items():
                sums[intent][t] += w
            counts[intent] += 1
        self.centroids = {
            intent: _unit(Counter({t: w / counts[intent] for t, w in vec.items()}))
            for intent, vec in sums.items()
        }
        # intents whose examples were all empty still need a (zero) centroid
        for intent in counts:
            self.centroids.setdefault(intent, {})
        return self

    def similarities(self, tokens: Sequence[str]) -> dict[str, float]:
        vec = _unit(Counter(tokens))
        return {
            intent: sum(w * c.get(t, 0.0) for t, w in vec.items())
            for intent, c in self.centroids.items()
        }

    def classify(self, utterance: TokenSequence, tags: Sequence[Tag] = ()) -> tuple[str, float]:
        if not self.centroids:
            raise UntrainedModel("intent model has not been trained")
        sims = self.similarities(delex_tokens(utterance, tags))
        best = min(sims, key=lambda k: (-sims[k], k))
        z = {k: math.exp(s - sims[best]) for k, s in sims.items()}
        return best, z[best] / sum(z.values())


def train_intent_model(training_pairs: Sequence[UtterancePair]) -> CentroidIntentModel:
    """Fit the built-in intent model on slot-delexicalized training utterances.

    Each pair's own slot values are masked before vectorizing; multi-act
    pairs are labelled with their first act's intent.
    """
    examples = []
    for pair in training_pairs:
        seq = tokenize(pair.utterance)
        own = build_lexicon([pair])
        examples.append((pair.mr.acts[0].intent, delex_tokens(seq, tag_slots(seq, own))))
    return CentroidIntentModel().fit(examples)


def classify_intent(utterance: TokenSequence | str, model: IntentModel, tags: Sequence[Tag] = ()) -> tuple[str, float]:
    seq = tokenize(utterance) if isinstance(utterance, str) else utterance
    if not getattr(model, "intents", None):
        raise UntrainedModel("intent model has not been trained")
    return model.classify(seq, tags)


class ExternalIntentModel:
    """Intent classification delegated to a command via text files.

    The working directory receives ``train.txt`` (``intent<TAB>utterance``)
    and ``predict.txt`` (one utterance per line); the command writes
    ``scores.txt`` with ``intent<TAB>confidence`` per predicted line.
    """

    def __init__(self, command: str, training_pairs: Sequence[UtterancePair], workdir: str | None = None):
        self.command = command
        self.train = [(p.mr.acts[0].intent, p.utterance) for p in training_pairs]
        self.intents = sorted({i for i, _ in self.train})
        self.workdir = workdir

    def classify_many(self, utterances: Sequence[str]) -> list[tuple[str, float]]:
        with tempfile.TemporaryDirectory(dir=self.workdir) as tmp:
            with open(os.path.join(tmp, "train.txt"), "w", encoding="utf-8") as f:
                f.writelines(f"{i}\t{u}\n" for i, u in self.train)
            with open(os.path.join(tmp, "predict.txt"), "w", encoding="utf-8") as f:
                f.writelines(f"{u}\n" for u in utterances)
            subprocess.run(shlex.split(self.command), cwd=tmp, check=True)
            with open(os.path.join(tmp, "scores.txt"), encoding="utf-8") as f:
                rows = [line.rstrip("\n").split("\t") for line in f if line.strip()]
        if len(rows) != len(utterances):
            raise RuntimeError(f"intent scorer returned {len(rows)} rows for {len(utterances)} utterances")
        out = []
        for row in rows:
            intent = row[0].strip().lower()
            if intent not in self.intents:
                raise RuntimeError(f"intent scorer returned unseen intent {intent!r}")
            out.append((intent, float(row[1]) if len(row) > 1 else 1.0))
        return out

    def classify(self, utterance: TokenSequence, tags: Sequence[Tag] = ()) -> tuple[str, float]:
        return self.classify_many([utterance.source])[0]


# -- annotation ------------------------------------------------------------


@dataclass(frozen=True)
class NluPrediction:
    intent: str
    slots: tuple[Tag, ...] = ()
    confidence: float = 1.0

    def to_mr(self) -> MeaningRepresentation:
        return MeaningRepresentation.single(self.intent, [(k, v) for k, v, _ in self.slots])


def predict(utterance: str, lexicon: SlotLexicon, model: IntentModel) -> NluPrediction:
    seq = tokenize(utterance)
    tags = tag_slots(seq, lexicon)
    intent, conf = model.classify(seq, tags)
    return NluPrediction(intent, tuple(tags), conf)


def annotate(filtered: Sequence[str], lexicon: SlotLexicon, model: IntentModel) -> list[UtterancePair]:
    """One single-act MR-to-text pair per filtered utterance, in input order."""
    if isinstance(model, ExternalIntentModel) and filtered:
        seqs = [tokenize(u) for u in filtered]
        labels = model.classify_many(list(filtered))
        return [
            UtterancePair(NluPrediction(i, tuple(tag_slots(s, lexicon)), c).to_mr(), u)
            for u, s, (i, c) in zip(filtered, seqs, labels)
        ]
    return [UtterancePair(predict(u, lexicon, model).to_mr(), u) for u in filtered]


# -- evaluation ------------------------------------------------------------


def _items(mr, include_intent: bool, include_slots: bool) -> Counter:
    if mr is None:  # nothing predicted
        return Counter()
    if isinstance(mr, NluPrediction):
        intents = [mr.intent]
        slots = [(k, v) for k, v, _ in mr.slots]
    else:
        intents = mr.intents
        slots = [(s.key, s.value) for s in mr.slots]
    items: Counter = Counter()
    if include_intent:
        items.update(("intent", i) for i in intents)
    if include_slots:
        items.update(("slot", k, normalize(v)) for k, v in slots)
    return items


def evaluate_nlu(
    predictions: Sequence,
    gold: Sequence[MeaningRepresentation],
    include_intent: bool = True,
    include_slots: bool = True,
) -> tuple[float, float, float]:
    """Micro precision, recall and F1 over intent and (key, value) items.

    Values are compared after tokenizer normalization, so case and spacing
    differences do not count as errors. A ``None`` prediction contributes no
    items.
    """
    if len(predictions) != len(gold):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(gold)} gold MRs")
    matched = n_pred = n_gold = 0
    for p, g in zip(predictions, gold):
        pi = _items(p, include_intent, include_slots)
        gi = _items(g, include_intent, include_slots)
        matched += sum((pi & gi).values())
        n_pred += sum(pi.values())
        n_gold += sum(gi.values())
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1
