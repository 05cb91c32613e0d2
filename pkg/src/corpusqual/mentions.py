"""Keyword detection of participant studies and their ethics/consent statements.

Matching is case-insensitive substring search over the whole document; a
term counts anywhere in the text, with no proximity window and no handling
of negation ("no ethics approval was required" is a mention).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from ._data import data_path, read_list

PARTICIPANT_TERM = "participant"


@dataclass(frozen=True)
class MentionFlags:
    has_participants: bool
    mentions_ethics: bool
    mentions_consent: bool


@lru_cache(maxsize=1)
def default_ethics_terms() -> tuple[str, ...]:
    return tuple(t.lower() for t in read_list(data_path("ethics_terms.txt")))


@lru_cache(maxsize=1)
def default_consent_terms() -> tuple[str, ...]:
    return tuple(t.lower() for t in read_list(data_path("consent_terms.txt")))


def load_terms(path) -> tuple[str, ...]:
    return tuple(t.lower() for t in read_list(path))


def matched_terms(text: str, terms: Sequence[str]) -> list[str]:
    low = text.lower()
    return [t for t in terms if t in low]


def detect_participants(text: str) -> bool:
    return PARTICIPANT_TERM in text.lower()


def detect_ethics(text: str, terms: Optional[Sequence[str]] = None) -> bool:
    terms = default_ethics_terms() if terms is None else terms
    return detect_participants(text) and bool(matched_terms(text, terms))


def detect_consent(text: str, terms: Optional[Sequence[str]] = None) -> bool:
    terms = default_consent_terms() if terms is None else terms
    return detect_participants(text) and bool(matched_terms(text, terms))


def mention_flags(
    text: str,
    ethics_terms: Optional[Sequence[str]] = None,
    consent_terms: Optional[Sequence[str]] = None,
) -> MentionFlags:
    return MentionFlags(
        has_participants=detect_participants(text),
        mentions_ethics=detect_ethics(text, ethics_terms),
        mentions_consent=detect_consent(text, consent_terms),
    )
