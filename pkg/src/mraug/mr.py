"""Meaning representations: parsing, canonical serialization, delexicalization.

Surface grammar::

    mr    := act ("@" act)*
    act   := intent "(" [pairs] ")"
    pairs := pair (";" pair)*
    pair  := key "=" value | "none"

e.g. ``inform(day=sunday;id=tr5413) @ book(none)``. Intents and keys are
lowercased; values keep their case.
"""
from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import MRSyntaxError

NONE = "none"
PAIR_SEP = " & "
_RESERVED_KEY = set("();=@&") | {" ", "\t", "\n"}
_RESERVED_VALUE = set(";()@\n")


@dataclass(frozen=True)
class SlotValuePair:
    key: str
    value: str

    def __post_init__(self):
        if not self.key or any(c in _RESERVED_KEY or c.isspace() for c in self.key):
            raise ValueError(f"invalid slot key {self.key!r}")
        if self.key != self.key.lower():
            raise ValueError(f"slot key must be lowercase: {self.key!r}")
        if not self.value or self.value != self.value.strip():
            raise ValueError(f"slot value must be non-empty and stripped: {self.value!r}")
        if any(c in _RESERVED_VALUE for c in self.value):
            raise ValueError(f"slot value contains a reserved character: {self.value!r}")
        if PAIR_SEP in self.value:
            raise ValueError(f"slot value contains the pair separator: {self.value!r}")


@dataclass(frozen=True)
class DialogAct:
    intent: str
    slots: tuple[SlotValuePair, ...] = ()

    def __post_init__(self):
        if not self.intent or any(c in _RESERVED_KEY or c.isspace() for c in self.intent):
            raise ValueError(f"invalid intent {self.intent!r}")
        if self.intent != self.intent.lower():
            raise ValueError(f"intent must be lowercase: {self.intent!r}")
        object.__setattr__(self, "slots", tuple(self.slots))


@dataclass(frozen=True)
class MeaningRepresentation:
    acts: tuple[DialogAct, ...]

    def __post_init__(self):
        object.__setattr__(self, "acts", tuple(self.acts))
        if not self.acts:
            raise ValueError("a meaning representation needs at least one act")

    @classmethod
    def single(cls, intent: str, slots: Iterable[tuple[str, str]] = ()):
        return cls((DialogAct(intent, tuple(SlotValuePair(k, v) for k, v in slots)),))

    @property
    def slots(self) -> list[SlotValuePair]:
        return [s for act in self.acts for s in act.slots]

    @property
    def intents(self) -> list[str]:
        return [act.intent for act in self.acts]

    def __str__(self):
        return serialize_mr(self)


@dataclass(frozen=True)
class DelexMR:
    """Intents plus slot keys, values erased.

    Keys inside each act are kept sorted so that equality is over key
    multisets per act, independent of the order values were listed in.
    """

    acts: tuple[tuple[str, tuple[str, ...]], ...]

    def __str__(self):
        return " @ ".join(
            f"{intent}({';'.join(keys) if keys else NONE})" for intent, keys in self.acts
        )

    @property
    def keys(self) -> set[str]:
        return {k for _, keys in self.acts for k in keys}

    @classmethod
    def parse(cls, text: str) -> "DelexMR":
        acts = []
        for chunk in text.split("@"):
            m = re.fullmatch(r"\s*([^\s()]+)\s*\((.*)\)\s*", chunk)
            if not m:
                raise MRSyntaxError("malformed delexicalized act", text, 0)
            keys = [k.strip().lower() for k in m.group(2).split(";") if k.strip()]
            if keys == [NONE]:
                keys = []
            acts.append((m.group(1).lower(), tuple(sorted(keys))))
        return cls(tuple(acts))


@dataclass(frozen=True)
class UtterancePair:
    mr: MeaningRepresentation
    utterance: str


# -- parsing ---------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        pos = self.pos if pos is None else pos
        raise MRSyntaxError(message, self.text, len(self.text[:pos].encode("utf-8")))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_until(self, stops: str) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        return self.text[start : self.pos]


def _parse_act(sc: _Scanner) -> DialogAct:
    sc.skip_ws()
    start = sc.pos
    intent = sc.read_until("();=@").strip()
    if not intent:
        sc.error("empty intent", start)
    if any(c.isspace() for c in intent):
        sc.error("whitespace inside intent", start)
    if sc.peek() != "(":
        sc.error("expected '('")
    sc.pos += 1
    slots = []
    saw_none = False
    while True:
        sc.skip_ws()
        pair_start = sc.pos
        raw = sc.read_until(";)@(")
        stop = sc.peek()
        if stop in ("", "@", "("):
            sc.error("unbalanced parentheses")
        raw = raw.strip()
        if raw:
            if "=" in raw:
                key, _, value = raw.partition("=")
                key, value = key.strip().lower(), value.strip()
                if not key:
                    sc.error("empty slot key", pair_start)
                if not value:
                    sc.error("empty slot value", pair_start)
                try:
                    slots.append(SlotValuePair(key, value))
                except ValueError as exc:
                    sc.error(str(exc), pair_start)
            elif raw.lower() == NONE:
                saw_none = True
            else:
                sc.error("missing '=' in slot pair", pair_start)
        elif stop == ";" or slots or saw_none:
            sc.error("empty slot pair", pair_start)
        sc.pos += 1
        if stop == ")":
            break
    try:
        return DialogAct(intent.lower(), tuple(slots))
    except ValueError as exc:
        sc.error(str(exc), start)


def parse_mr(text: str) -> MeaningRepresentation:
    """Parse a surface MR string such as ``inform(food=chinese;price=cheap)``."""
    sc = _Scanner(text)
    sc.skip_ws()
    if not sc.peek():
        sc.error("empty input")
    acts = [_parse_act(sc)]
    while True:
        sc.skip_ws()
        c = sc.peek()
        if not c:
            break
        if c == ")":
            sc.error("unbalanced parentheses")
        if c != "@":
            sc.error("expected '@' between acts")
        sc.pos += 1
        acts.append(_parse_act(sc))
    return MeaningRepresentation(tuple(acts))


def serialize_mr(mr: MeaningRepresentation) -> str:
    parts = []
    for act in mr.acts:
        body = ";".join(f"{s.key}={s.value}" for s in act.slots) or NONE
        parts.append(f"{act.intent}({body})")
    return " @ ".join(parts)


def delexicalize(mr: MeaningRepresentation) -> DelexMR:
    return DelexMR(tuple((a.intent, tuple(sorted(s.key for s in a.slots))) for a in mr.acts))


def _is_word_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def delexicalize_utterance(pair: UtterancePair) -> str:
    """Replace slot values in the utterance with ``[KEY]`` placeholders.

    Matching is case-insensitive, longest value first, non-overlapping.
    An occurrence glued to a neighbouring letter or digit ("north" inside
    "northern") is not a match.
    """
    text = pair.utterance
    lowered = text.lower()
    values = sorted(
        {(s.value.lower(), s.key) for s in pair.mr.slots},
        key=lambda vk: (-len(vk[0]), vk[0], vk[1]),
    )
    claimed: list[tuple[int, int, str]] = []
    taken = [False] * len(text)
    for value, key in values:
        start = lowered.find(value)
        while start != -1:
            end = start + len(value)
            left_ok = start == 0 or not (_is_word_char(text[start - 1]) and _is_word_char(text[start]))
            right_ok = end == len(text) or not (_is_word_char(text[end]) and _is_word_char(text[end - 1]))
            if left_ok and right_ok and not any(taken[start:end]):
                claimed.append((start, end, key))
                for i in range(start, end):
                    taken[i] = True
            start = lowered.find(value, start + 1)
    out = []
    last = 0
    for start, end, key in sorted(claimed):
        out.append(text[last:start])
        out.append(f"[{key.upper()}]")
        last = end
    out.append(text[last:])
    return "".join(out)


# -- pairs files -----------------------------------------------------------


def parse_pair_line(line: str) -> UtterancePair:
    mr_text, sep, utterance = line.partition(PAIR_SEP)
    if not sep:
        raise MRSyntaxError("missing ' & ' separator", line, len(line.encode("utf-8")))
    return UtterancePair(parse_mr(mr_text), utterance.strip())


def format_pair(pair: UtterancePair) -> str:
    mr_text = serialize_mr(pair.mr)
    if PAIR_SEP in mr_text:
        raise ValueError(f"MR contains the pair separator: {mr_text!r}")
    if "\n" in pair.utterance:
        raise ValueError("utterance contains a newline")
    return f"{mr_text}{PAIR_SEP}{pair.utterance}"


def iter_pairs(lines: Iterable[str]) -> Iterator[UtterancePair]:
    for line in lines:
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield parse_pair_line(line)


def read_pairs(path: str | os.PathLike) -> list[UtterancePair]:
    with open(path, encoding="utf-8") as f:
        return list(iter_pairs(f))


def write_pairs(path: str | os.PathLike, pairs: Iterable[UtterancePair]) -> None:
    buf = io.StringIO()
    for pair in pairs:
        buf.write(format_pair(pair))
        buf.write("\n")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(buf.getvalue())
