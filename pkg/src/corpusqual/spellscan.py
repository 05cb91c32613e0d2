"""Dictionary-based misspelling detection for titles and abstracts.

Full texts are deliberately not scanned.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import AbstractSet, Iterable, Optional, Sequence

from ._data import data_path, read_list
from .model import ArticleRecord

FIELDS = ("title", "abstract")
MIN_LENGTH = 3

_TOKEN = re.compile(r"\S+")
_EDGE = re.compile(r"^[\W_]+|[\W_]+$")
_SPLIT = re.compile(r"[-‐‑–—/]+")
_APOS = re.compile(r"['’]")


@dataclass(frozen=True)
class Flagged:
    token: str
    field: str
    position: int


@dataclass(frozen=True)
class SpellReport:
    flagged: tuple[Flagged, ...]

    @property
    def any_title_error(self) -> bool:
        return any(f.field == "title" for f in self.flagged)

    @property
    def any_abstract_error(self) -> bool:
        return any(f.field == "abstract" for f in self.flagged)


@dataclass(frozen=True)
class Proportion:
    numerator: int
    denominator: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


@lru_cache(maxsize=1)
def default_dictionary() -> frozenset[str]:
    """The bundled en-US + en-GB word list."""
    return load_wordlist(data_path("en_words.txt.gz"))


def load_wordlist(path) -> frozenset[str]:
    return frozenset(w.lower() for w in read_list(path))


def _fold(word: str) -> str:
    return unicodedata.normalize("NFKD", word).encode("ascii", "ignore").decode()


def _candidates(text: str):
    """Yield (token, offset) for every hyphen/slash-separated word piece."""
    for m in _TOKEN.finditer(text):
        raw = m.group()
        stripped = _EDGE.sub("", raw)
        if not stripped:
            continue
        base = m.start() + raw.find(stripped)
        pos = 0
        for piece in _SPLIT.split(stripped):
            idx = stripped.find(piece, pos)
            pos = idx + len(piece)
            if piece:
                yield piece, base + idx


def _is_known(token: str, words: AbstractSet[str]) -> bool:
    low = _APOS.sub("'", token.lower())
    if low in words or _fold(low) in words:
        return True
    stem = low.split("'", 1)[0]
    return "'" in low and (stem in words or _fold(stem) in words)


def _checkable(token: str) -> bool:
    letters = _APOS.sub("", token)
    if len(letters) < MIN_LENGTH or not letters.isalpha():
        return False
    # internal capitals mark acronyms and jargon (tDCS, fMRI, ANOVA)
    return not any(c.isupper() for c in letters[1:])


def scan_misspellings(
    text: str,
    dictionary: Optional[AbstractSet[str]] = None,
    allowlist: AbstractSet[str] = frozenset(),
) -> list[tuple[str, int]]:
    """Return ``(token, char_offset)`` for every token missing from both word sets.

    Tokens shorter than three letters, containing digits or other non-letters,
    or with capitals after the first letter are never flagged.
    """
    words = default_dictionary() if dictionary is None else dictionary
    if not words:
        raise ValueError("dictionary is empty")
    allow = {a.lower() for a in allowlist}
    flagged = []
    for token, pos in _candidates(text):
        if not _checkable(token):
            continue
        if _is_known(token, words) or token.lower() in allow:
            continue
        flagged.append((token, pos))
    return flagged


def spell_report(
    record: ArticleRecord,
    dictionary: Optional[AbstractSet[str]] = None,
    allowlist: AbstractSet[str] = frozenset(),
) -> SpellReport:
    flagged = []
    for field in FIELDS:
        for token, pos in scan_misspellings(getattr(record, field), dictionary, allowlist):
            flagged.append(Flagged(token, field, pos))
    return SpellReport(tuple(flagged))


def spell_error_proportion(
    records: Sequence[ArticleRecord],
    field: str,
    dictionary: Optional[AbstractSet[str]] = None,
    allowlist: Iterable[str] = (),
) -> Proportion:
    """Share of records whose ``field`` contains at least one flagged token."""
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}")
    if not records:
        raise ValueError("proportion undefined for an empty record list")
    allow = frozenset(allowlist)
    hits = sum(1 for r in records if scan_misspellings(getattr(r, field), dictionary, allow))
    return Proportion(hits, len(records))
