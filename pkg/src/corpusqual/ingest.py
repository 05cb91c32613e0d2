"""Corpus loading (JSON Lines) and non-research title filtering."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

from ._data import read_list
from .model import (
    ArticleRecord,
    AuthorRef,
    CitingWork,
    CorpusSet,
    WorkRef,
    validate_record,
)

logger = logging.getLogger(__name__)

DEFAULT_EXCLUSION_KEYWORDS = (
    "editorial",
    "book review",
    "letter to the editor",
    "letter from the editor",
    "correction",
    "opinion",
)

LANGUAGE_RULE = "non-english title"


@dataclass(frozen=True)
class ExclusionRule:
    keyword: str
    field: str = "title"

    def __post_init__(self):
        if not self.keyword:
            raise ValueError("exclusion keyword must be non-empty")
        if self.field != "title":
            raise ValueError(f"unsupported exclusion field {self.field!r}")
        object.__setattr__(self, "keyword", self.keyword.lower())


DEFAULT_RULES = tuple(ExclusionRule(k) for k in DEFAULT_EXCLUSION_KEYWORDS)


def load_rules(path: str | Path) -> list[ExclusionRule]:
    """One keyword per line; blank lines and ``#`` comments are skipped."""
    return [ExclusionRule(k) for k in read_list(path)]


# -- (de)serialization --------------------------------------------------------


def _str_list(value: Any, what: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise ValueError(f"{what} must be an array")
    return tuple(str(v) for v in value)


def record_from_dict(obj: dict) -> ArticleRecord:
    """Build an ArticleRecord from one parsed corpus line.

    Raises ValueError/KeyError/TypeError on structurally malformed input.
    """
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    year = obj["pub_year"]
    if isinstance(year, bool) or not isinstance(year, int):
        raise ValueError("pub_year must be an integer")
    authors = tuple(
        AuthorRef(str(a["author_id"]), a.get("country") or None) for a in obj.get("authors") or []
    )
    references = tuple(
        WorkRef(str(r["work_id"]), _str_list(r.get("author_ids"), "author_ids"))
        for r in obj.get("references") or []
    )
    citations = tuple(
        CitingWork(str(c["work_id"]), _str_list(c.get("author_ids"), "author_ids"), int(c["year"]))
        for c in obj.get("citations") or []
    )
    return ArticleRecord(
        id=str(obj["id"]),
        doi=obj.get("doi"),
        group=str(obj["group"]),
        title=obj.get("title") or "",
        abstract=obj.get("abstract") or "",
        full_text=obj.get("full_text") or "",
        pub_year=year,
        authors=authors,
        references=references,
        citations=citations,
    )


def record_to_dict(rec: ArticleRecord) -> dict:
    return {
        "id": rec.id,
        "doi": rec.doi,
        "group": rec.group,
        "title": rec.title,
        "abstract": rec.abstract,
        "full_text": rec.full_text,
        "pub_year": rec.pub_year,
        "authors": [{"author_id": a.author_id, "country": a.country} for a in rec.authors],
        "references": [{"work_id": r.work_id, "author_ids": list(r.author_ids)} for r in rec.references],
        "citations": [
            {"work_id": c.work_id, "author_ids": list(c.author_ids), "year": c.year}
            for c in rec.citations
        ],
    }


def write_corpus(records: Iterable[ArticleRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), ensure_ascii=False) + "\n")


# -- loading ------------------------------------------------------------------


@dataclass(frozen=True)
class LineError:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class LoadResult:
    corpus: CorpusSet
    errors: list[LineError] = field(default_factory=list)


def load_corpus(path: str | Path, groups: Sequence[str], current_year: Optional[int] = None) -> LoadResult:
    """Read a JSON Lines corpus.

    Malformed lines and records that fail validation are dropped and reported
    with their line number; an unreadable file raises ``OSError``.
    """
    records: list[ArticleRecord] = []
    errors: list[LineError] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = record_from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as exc:
                errors.append(LineError(lineno, f"malformed record: {exc}"))
                continue
            problems = validate_record(rec, groups, current_year)
            if rec.id in seen:
                problems.append(f"duplicate id {rec.id!r}")
            if problems:
                errors.append(LineError(lineno, "; ".join(problems)))
                continue
            seen.add(rec.id)
            records.append(rec)
    for err in errors:
        logger.warning("%s: %s", path, err)
    return LoadResult(CorpusSet(tuple(groups), tuple(records)), errors)


# -- filtering ----------------------------------------------------------------


def filter_non_research(
    records: Sequence[ArticleRecord],
    rules: Sequence[ExclusionRule] = DEFAULT_RULES,
    is_english: Optional[Callable[[str], bool]] = None,
) -> tuple[list[ArticleRecord], list[tuple[ArticleRecord, str]]]:
    """Split records into kept and excluded, preserving input order.

    A record is excluded when its lowercased title contains any rule keyword.
    The first matching rule (in ``rules`` order) is reported.  ``is_english``
    is an optional title classifier; titles it rejects are excluded under
    ``LANGUAGE_RULE``.
    """
    kept: list[ArticleRecord] = []
    excluded: list[tuple[ArticleRecord, str]] = []
    for rec in records:
        title = rec.title.lower()
        hit = next((r.keyword for r in rules if r.keyword in title), None)
        if hit is None and is_english is not None and not is_english(rec.title):
            hit = LANGUAGE_RULE
        if hit is None:
            kept.append(rec)
        else:
            excluded.append((rec, hit))
    return kept, excluded
