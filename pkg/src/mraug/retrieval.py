"""Open-domain utterance pool with an inverted n-gram index.

Index file layout (all integers little-endian)::

    magic      9 bytes   b"MRAUGIDX1"
    header     u32 version, u32 n_min, u32 n_max, u32 min_len, u32 max_len,
               u64 n_utterances
    utterance  n_utterances x (u32 byte length, UTF-8 source line)
    n_terms    u64
    term       n_terms x (u32 byte length, UTF-8 tokens joined by " ",
                          u32 posting count, count x u32 utterance id)

Terms are written in sorted order so identical input gives identical bytes.
"""
from __future__ import annotations

import logging
import os
import struct
from array import array
from dataclasses import dataclass, field
from typing import Iterable

from .text import TokenSequence, find_all, token_tuple, tokenize

log = logging.getLogger(__name__)

MAGIC = b"MRAUGIDX1"
VERSION = 1
DEFAULT_MIN_LEN = 2
DEFAULT_MAX_LEN = 40


class UtterancePool:
    """Length-filtered utterances plus postings for every n-gram in range."""

    def __init__(self, n_min=1, n_max=3, min_len=DEFAULT_MIN_LEN, max_len=DEFAULT_MAX_LEN):
        self.n_min = n_min
        self.n_max = n_max
        self.min_len = min_len
        self.max_len = max_len
        self.sources: list[str] = []
        self.tokens: list[tuple[str, ...]] = []
        self.index: dict[tuple[str, ...], array] = {}
        self.skipped_malformed = 0
        self.skipped_length = 0

    def __len__(self):
        return len(self.sources)

    def __iter__(self):
        return iter(self.tokens)

    def add(self, line: str) -> int | None:
        """Tokenize and index one line; returns its id or None if filtered."""
        toks = token_tuple(line)
        if not self.min_len <= len(toks) <= self.max_len:
            self.skipped_length += 1
            return None
        uid = len(self.sources)
        self.sources.append(line)
        self.tokens.append(toks)
        grams = set()
        for n in range(self.n_min, self.n_max + 1):
            grams.update(zip(*(toks[i:] for i in range(n))))
        index = self.index
        for gram in grams:
            plist = index.get(gram)
            if plist is None:
                plist = index[gram] = array("I")
            plist.append(uid)
        return uid

    def postings(self, phrase) -> array:
        return self.index.get(tuple(phrase), array("I"))

    def sequence(self, uid: int) -> TokenSequence:
        return tokenize(self.sources[uid])

    def complement(self, ids: Iterable[int]) -> list[int]:
        excluded = set(ids)
        return [i for i in range(len(self)) if i not in excluded]

    # -- persistence ------------------------------------------------------

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<IIIIIQ", VERSION, self.n_min, self.n_max,
                                self.min_len, self.max_len, len(self.sources)))
            for src in self.sources:
                raw = src.encode("utf-8")
                f.write(struct.pack("<I", len(raw)))
                f.write(raw)
            keys = sorted(self.index, key=lambda g: " ".join(g))
            f.write(struct.pack("<Q", len(keys)))
            for key in keys:
                raw = " ".join(key).encode("utf-8")
                plist = self.index[key]
                f.write(struct.pack("<I", len(raw)))
                f.write(raw)
                f.write(struct.pack(f"<I{len(plist)}I", len(plist), *plist))

    @classmethod
    def load(cls, path: str | os.PathLike) -> "UtterancePool":
        with open(path, "rb") as f:
            data = f.read()
        if not data.startswith(MAGIC):
            raise ValueError(f"{path}: not an index file (bad magic)")
        pos = len(MAGIC)
        version, n_min, n_max, min_len, max_len, n_utts = struct.unpack_from("<IIIIIQ", data, pos)
        if version != VERSION:
            raise ValueError(f"{path}: unsupported index version {version}")
        pos += struct.calcsize("<IIIIIQ")
        pool = cls(n_min, n_max, min_len, max_len)
        for _ in range(n_utts):
            (n,) = struct.unpack_from("<I", data, pos)
            pos += 4
            src = data[pos : pos + n].decode("utf-8")
            pos += n
            pool.sources.append(src)
            pool.tokens.append(tokenize(src).tokens)
        (n_terms,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        for _ in range(n_terms):
            (n,) = struct.unpack_from("<I", data, pos)
            pos += 4
            key = tuple(data[pos : pos + n].decode("utf-8").split(" "))
            pos += n
            (count,) = struct.unpack_from("<I", data, pos)
            pos += 4
            pool.index[key] = array("I", struct.unpack_from(f"<{count}I", data, pos))
            pos += 4 * count
        return pool


def ingest_pool(
    lines: Iterable[str | bytes],
    min_len: int = DEFAULT_MIN_LEN,
    max_len: int = DEFAULT_MAX_LEN,
    n_min: int = 1,
    n_max: int = 3,
) -> UtterancePool:
    """Build a pool from a stream of lines (str, or raw bytes to be decoded).

    A single str or bytes object is split into lines first. Lines outside
    ``[min_len, max_len]`` tokens are dropped. Byte lines that are not valid
    UTF-8 are skipped and counted in ``skipped_malformed``.
    """
    if isinstance(lines, (str, bytes)):
        lines = lines.splitlines()
    pool = UtterancePool(n_min, n_max, min_len, max_len)
    for line in lines:
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError:
                pool.skipped_malformed += 1
                continue
        line = line.rstrip("\r\n")
        pool.add(line)
    if pool.skipped_malformed:
        log.warning("skipped %d malformed UTF-8 lines", pool.skipped_malformed)
    return pool


def ingest_pool_file(path: str | os.PathLike, **kwargs) -> UtterancePool:
    with open(path, "rb") as f:
        return ingest_pool(f, **kwargs)


def load_pool(path: str | os.PathLike, **kwargs) -> UtterancePool:
    """Read either a saved index file or a plain one-utterance-per-line file."""
    with open(path, "rb") as f:
        head = f.read(len(MAGIC))
    if head == MAGIC:
        return UtterancePool.load(path)
    return ingest_pool_file(path, **kwargs)


@dataclass
class CandidateSet:
    ids: tuple[int, ...] = ()
    matched_keywords: dict[int, list[str]] = field(default_factory=dict)

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


def retrieve(pool: UtterancePool, keywords) -> CandidateSet:
    """Every pool utterance containing at least one keyword phrase contiguously."""
    matched: dict[int, list[str]] = {}
    for kw in keywords:
        phrase = tuple(getattr(kw, "phrase", kw))
        if not phrase:
            continue
        text = " ".join(phrase)
        if pool.n_min <= len(phrase) <= pool.n_max:
            hits = pool.postings(phrase)
        elif len(phrase) > pool.n_max:
            # longer than indexed: narrow by the leading indexed n-gram, then verify
            hits = [u for u in pool.postings(phrase[: pool.n_max]) if find_all(pool.tokens[u], phrase)]
        else:
            hits = [u for u, toks in enumerate(pool.tokens) if find_all(toks, phrase)]
        for uid in hits:
            matched.setdefault(uid, []).append(text)
    ids = tuple(sorted(matched))
    return CandidateSet(ids, {i: matched[i] for i in ids})


def write_candidates(path: str | os.PathLike, pool: UtterancePool, candidates: CandidateSet) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for uid in candidates.ids:
            f.write(f"{uid}\t{pool.sources[uid]}\n")


def read_candidates(path: str | os.PathLike) -> CandidateSet:
    ids = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                ids.append(int(line.split("\t", 1)[0]))
    return CandidateSet(tuple(sorted(set(ids))), {})
