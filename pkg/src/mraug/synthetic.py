"""Planted synthetic domains with known ground truth.

The generated restaurant domain marks every relevant utterance with the
token ``restaurantx`` and realizes a known MR through fixed templates.
Irrelevant candidates reuse domain words (so keyword retrieval finds them)
but never the marker; background utterances use neither.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mr import MeaningRepresentation, UtterancePair

MARKER = "restaurantx"

SLOT_VALUES = {
    "food": ["chinese", "indian", "italian", "thai", "french", "korean", "greek", "turkish"],
    "area": ["north", "south", "east", "west", "centre"],
    "price": ["cheap", "expensive", "moderate"],
    "name": ["golden wok", "curry house", "pasta palace", "bangkok garden", "le bistro",
             "seoul kitchen", "olive tree", "istanbul grill"],
}

TEMPLATES = {
    "inform": [
        ("restaurantx {name} serves {food} food in the {area} of town .", ("name", "food", "area")),
        ("restaurantx {name} is a {price} place serving {food} dishes .", ("name", "price", "food")),
        ("restaurantx {name} is located in the {area} .", ("name", "area")),
        ("restaurantx {name} has {price} prices .", ("name", "price")),
    ],
    "request": [
        ("restaurantx what kind of food would you like ?", ()),
        ("restaurantx which part of town do you prefer ?", ()),
        ("restaurantx what price range are you looking for ?", ()),
    ],
    "confirm": [
        ("restaurantx did you say you want {food} food ?", ("food",)),
        ("restaurantx so you would like a {price} restaurant in the {area} ?", ("price", "area")),
        ("restaurantx just to check , you want {name} ?", ("name",)),
    ],
    "recommend": [
        ("restaurantx i recommend {name} , a {food} restaurant .", ("name", "food")),
        ("restaurantx how about {name} in the {area} ?", ("name", "area")),
    ],
}

FILLER = (
    "the a of and to in is it you that he was for on are as with his they at be this "
    "have from or one had by word but not what all were we when your can said there use "
    "each which she do how their if will up other about out many then them these so some "
    "her would make like him into time has look two more write go see number no way could "
    "people my than first water been call who oil its now find long down day did get come "
    "made may part over new sound take only little work know place year live me back give "
    "most very after thing our just name good sentence man think say great where help "
    "through much before line right too mean old any same tell boy follow came want show "
    "also around form three small set put end does another well large must big even such "
    "because turn here why ask went men read need land different home us move try kind "
    "hand picture again change off play spell air away animal house point page letter "
    "mother answer found study still learn should america world movies game ticket car "
    "song football weather phone music book city movie school kids bus team film"
).split()

# domain words reused by irrelevant candidates
DOMAIN_WORDS = ["food", "chinese", "indian", "cheap", "north", "centre", "price", "dishes",
                "restaurant", "town", "expensive", "thai", "kitchen", "garden"]


@dataclass
class PlantedDomain:
    train_pairs: list[UtterancePair]
    pool_lines: list[str]
    candidate_ids: list[int]
    relevant_ids: set[int]
    gold: dict[int, MeaningRepresentation] = field(default_factory=dict)

    @property
    def in_domain(self) -> list[str]:
        return [p.utterance for p in self.train_pairs]


def _realize(rng, intent, values=None):
    template, keys = TEMPLATES[intent][rng.integers(len(TEMPLATES[intent]))]
    chosen = {}
    for k in keys:
        pool = values[k] if values else SLOT_VALUES[k]
        chosen[k] = pool[rng.integers(len(pool))]
    text = template.format(**chosen)
    mr = MeaningRepresentation.single(intent, [(k, chosen[k]) for k in keys])
    return mr, text


def _filler(rng, n):
    return [FILLER[i] for i in rng.integers(len(FILLER), size=n)]


def make_planted_domain(
    n_train: int = 50,
    n_relevant: int = 1000,
    n_irrelevant: int = 1000,
    n_background: int = 1000,
    seed: int = 0,
) -> PlantedDomain:
    """Training pairs plus a shuffled pool whose relevant members have gold MRs.

    Relevant pool utterances only use slot values that occur in the training
    pairs, so a lexicon built from those pairs can in principle tag them all.
    """
    rng = np.random.default_rng(seed)
    intents = sorted(TEMPLATES)
    train = []
    for i in range(n_train):
        intent = intents[i % len(intents)]
        mr, text = _realize(rng, intent)
        train.append(UtterancePair(mr, text))

    seen: dict[str, list[str]] = {k: [] for k in SLOT_VALUES}
    for p in train:
        for s in p.mr.slots:
            if s.value not in seen[s.key]:
                seen[s.key].append(s.value)
    seen = {k: v or SLOT_VALUES[k] for k, v in seen.items()}

    items: list[tuple[str, str, MeaningRepresentation | None]] = []
    for _ in range(n_relevant):
        mr, text = _realize(rng, intents[rng.integers(len(intents))], seen)
        items.append(("rel", text, mr))
    for _ in range(n_irrelevant):
        words = _filler(rng, int(rng.integers(5, 12)))
        for w in rng.choice(DOMAIN_WORDS, size=int(rng.integers(1, 3)), replace=False):
            words.insert(int(rng.integers(len(words) + 1)), str(w))
        items.append(("irr", " ".join(words), None))
    for _ in range(n_background):
        items.append(("bg", " ".join(_filler(rng, int(rng.integers(3, 15)))), None))

    order = rng.permutation(len(items))
    pool_lines, candidate_ids, relevant, gold = [], [], set(), {}
    for uid, j in enumerate(order):
        kind, text, mr = items[j]
        pool_lines.append(text)
        if kind != "bg":
            candidate_ids.append(uid)
        if kind == "rel":
            relevant.add(uid)
            gold[uid] = mr
    return PlantedDomain(train, pool_lines, candidate_ids, relevant, gold)


def make_mr_corpus(n_pairs: int = 400, n_groups: int = 80, seed: int = 0) -> list[UtterancePair]:
    """MR-to-text corpus with exactly ``min(n_groups, n_pairs)`` delexicalized MRs.

    Group ``g`` uses intent ``intent{g % 8}`` and the slot keys given by the
    binary digits of ``g // 8``; values and wording vary per pair.
    """
    rng = np.random.default_rng(seed)
    n_groups = min(n_groups, n_pairs)
    keys = ["k0", "k1", "k2", "k3", "k4", "k5", "k6", "k7"]
    pairs = []
    for i in range(n_pairs):
        g = i % n_groups
        intent = f"intent{g % 8}"
        slot_keys = [keys[b] for b in range(8) if (g // 8) >> b & 1]
        slots = [(k, f"v{int(rng.integers(20))}") for k in slot_keys]
        words = _filler(rng, int(rng.integers(3, 9)))
        text = " ".join(words + [v for _, v in slots])
        pairs.append(UtterancePair(MeaningRepresentation.single(intent, slots), text))
    return pairs
