"""Word counts, sentence segmentation, syllable counts and Flesch Reading Ease."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from ._data import data_path, read_list

FRE_BASE = 206.835
FRE_SENTENCE_WEIGHT = 1.015
FRE_SYLLABLE_WEIGHT = 84.6

_EDGE_PUNCT = re.compile(r"^[\W_]+|[\W_]+$")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_LETTER_RUN = re.compile(r"[a-z]+")
_TERMINAL = re.compile(r"[.!?]+[\"'”’)\]]*")
_VOICED_E = re.compile(r"[éÉ](?![a-zA-Z])")
_OPENERS = "\"'“‘(["


class ReadabilityError(ValueError):
    """Readability is undefined for text without words."""


@dataclass(frozen=True)
class LengthIndicators:
    abstract_words: int
    fulltext_words: int


@dataclass(frozen=True)
class ReadabilityScore:
    fre: float
    words: int
    sentences: int
    syllables: int


# -- words --------------------------------------------------------------------


def tokenize_words(text: str) -> list[str]:
    """Whitespace tokens with leading/trailing punctuation stripped.

    Hyphenated compounds stay one token; tokens that are all punctuation
    are dropped.
    """
    out = []
    for tok in text.split():
        tok = _EDGE_PUNCT.sub("", tok)
        if tok:
            out.append(tok)
    return out


def count_words(text: str) -> int:
    return len(tokenize_words(text))


def length_indicators(abstract: str, full_text: str) -> LengthIndicators:
    return LengthIndicators(count_words(abstract), count_words(full_text))


# -- sentences ----------------------------------------------------------------


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    return frozenset(a.lower() for a in read_list(data_path("abbreviations.txt")))


def load_abbreviations(path) -> frozenset[str]:
    return frozenset(a.lower() for a in read_list(path))


def _ends_with_abbreviation(prefix: str, abbreviations: Iterable[str]) -> bool:
    low = prefix.lower()
    for abbr in abbreviations:
        if low.endswith(abbr):
            start = len(low) - len(abbr)
            if start == 0 or not low[start - 1].isalnum():
                return True
    return False


def segment_sentences(
    text: str, abbreviations: Optional[Iterable[str]] = None
) -> list[tuple[int, int]]:
    """Split ``text`` into sentence spans ``(start, end)``.

    A run of ``.``, ``!`` or ``?`` (plus closing quotes/brackets) ends a
    sentence when followed by whitespace and a capital letter, or by the end
    of the text.  A period that completes an allowlisted abbreviation never
    ends a sentence.  Trailing text without terminal punctuation forms a
    final sentence.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    spans = []
    start = 0
    n = len(text)
    for m in _TERMINAL.finditer(text):
        end = m.end()
        rest = end
        while rest < n and text[rest].isspace():
            rest += 1
        if rest < n:
            if rest == end:
                continue
            nxt = rest
            while nxt < n and text[nxt] in _OPENERS:
                nxt += 1
            if nxt >= n or not text[nxt].isupper():
                continue
        punct = m.group()
        if punct.startswith(".") and len(punct.rstrip("\"'”’)]")) == 1:
            if _ends_with_abbreviation(text[: m.start() + 1], abbreviations):
                continue
        if text[start:end].strip():
            spans.append(_trim(text, start, end))
        start = end
    if text[start:].strip():
        spans.append(_trim(text, start, n))
    return spans


def _trim(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def count_sentences(text: str, abbreviations: Optional[Iterable[str]] = None) -> int:
    return len(segment_sentences(text, abbreviations))


# -- syllables ----------------------------------------------------------------


def _ascii_fold(word: str) -> str:
    return unicodedata.normalize("NFKD", word).encode("ascii", "ignore").decode().lower()


def _syllables_in_run(w: str) -> int:
    groups = _VOWEL_GROUP.findall(w)
    n = len(groups)
    if n == 0:
        return 1
    if groups[-1] == "e" and len(w) > 2:
        tail = w[-2:]
        if w.endswith("e") and not w.endswith("le"):
            n -= 1
        elif w.endswith("le") and w[-3] in "aeiouy":
            n -= 1
        elif tail == "ed" and w[-3] not in "td":
            n -= 1
        elif tail == "es" and not _keeps_es(w):
            n -= 1
    return max(n, 1)


def _keeps_es(w: str) -> bool:
    # "-es" is voiced after sibilants and in consonant + "les" (samples).
    before = w[-3]
    if before in "sxzcg":
        return True
    if before == "h" and len(w) > 3 and w[-4] in "cs":
        return True
    return before == "l" and len(w) > 3 and w[-4] not in "aeiouy"


@lru_cache(maxsize=1 << 16)
def count_syllables(word: str) -> int:
    """Heuristic syllable count.

    Counts maximal vowel clusters (a, e, i, o, u, y) and drops one for a
    silent ending: a lone final "e" (kept in consonant + "le"), and "-ed" /
    "-es" where they are not pronounced.  Hyphen- or digit-separated letter
    runs are counted separately and summed.  Tokens without letters count
    as one syllable.
    """
    # a final "é" is voiced (café, résumé); keep it from reading as silent "e"
    runs = _LETTER_RUN.findall(_ascii_fold(_VOICED_E.sub("ey", word)))
    if not runs:
        return 1
    return sum(_syllables_in_run(r) for r in runs)


# -- Flesch Reading Ease ------------------------------------------------------


def fre_from_counts(words: int, sentences: int, syllables: int) -> float:
    if words < 1 or sentences < 1:
        raise ReadabilityError("FRE needs at least one word and one sentence")
    return (
        FRE_BASE
        - FRE_SENTENCE_WEIGHT * (words / sentences)
        - FRE_SYLLABLE_WEIGHT * (syllables / words)
    )


def flesch_reading_ease(text: str, abbreviations: Optional[Iterable[str]] = None) -> ReadabilityScore:
    words = tokenize_words(text)
    if not words:
        raise ReadabilityError("text contains no words")
    sentences = count_sentences(text, abbreviations)
    syllables = sum(count_syllables(w) for w in words)
    return ReadabilityScore(
        fre=fre_from_counts(len(words), sentences, syllables),
        words=len(words),
        sentences=sentences,
        syllables=syllables,
    )
