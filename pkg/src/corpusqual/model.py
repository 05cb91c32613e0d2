"""Shared data model: articles, their authors, references and citing works."""

from __future__ import annotations

import datetime
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

MIN_YEAR = 1900


class CorpusError(ValueError):
    """A corpus violates one of its structural invariants."""


@dataclass(frozen=True)
class AuthorRef:
    author_id: str
    country: Optional[str] = None


@dataclass(frozen=True)
class WorkRef:
    """A work referenced by an article."""

    work_id: str
    author_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class CitingWork:
    """A later work citing an article."""

    work_id: str
    author_ids: tuple[str, ...] = ()
    year: int = MIN_YEAR


@dataclass(frozen=True)
class ArticleRecord:
    id: str
    group: str
    title: str
    pub_year: int
    doi: Optional[str] = None
    abstract: str = ""
    full_text: str = ""
    authors: tuple[AuthorRef, ...] = ()
    references: tuple[WorkRef, ...] = ()
    citations: tuple[CitingWork, ...] = ()

    @property
    def author_ids(self) -> frozenset[str]:
        return frozenset(a.author_id for a in self.authors)


def validate_record(
    record: ArticleRecord,
    groups: Optional[Iterable[str]] = None,
    current_year: Optional[int] = None,
) -> list[str]:
    """Return every invariant violation of ``record``; empty means valid.

    The group check is only performed when ``groups`` is given.
    """
    if current_year is None:
        current_year = datetime.date.today().year
    problems = []
    if not record.id:
        problems.append("id is empty")
    if not isinstance(record.pub_year, int) or not MIN_YEAR <= record.pub_year <= current_year:
        problems.append("pub_year out of range")
    if groups is not None and record.group not in set(groups):
        problems.append(f"unknown group {record.group!r}")
    for i, author in enumerate(record.authors):
        if not author.author_id:
            problems.append(f"authors[{i}]: author_id is empty")
    for i, ref in enumerate(record.references):
        if not ref.work_id:
            problems.append(f"references[{i}]: work_id is empty")
    for i, cit in enumerate(record.citations):
        if not cit.work_id:
            problems.append(f"citations[{i}]: work_id is empty")
        if cit.year < MIN_YEAR:
            problems.append(f"citations[{i}]: year before {MIN_YEAR}")
    return problems


@dataclass(frozen=True)
class CorpusSet:
    groups: tuple[str, ...]
    records: tuple[ArticleRecord, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "records", tuple(self.records))
        if len(self.groups) < 2:
            raise CorpusError("a corpus needs at least two groups")
        if len(set(self.groups)) != len(self.groups):
            raise CorpusError("duplicate group labels")
        known = set(self.groups)
        for rec in self.records:
            if rec.group not in known:
                raise CorpusError(f"record {rec.id!r} has unknown group {rec.group!r}")
        dupes = [i for i, n in Counter(r.id for r in self.records).items() if n > 1]
        if dupes:
            raise CorpusError(f"duplicate record ids: {sorted(dupes)[:5]}")

    def __len__(self) -> int:
        return len(self.records)

    def in_group(self, group: str) -> list[ArticleRecord]:
        return [r for r in self.records if r.group == group]

    def with_records(self, records: Sequence[ArticleRecord]) -> "CorpusSet":
        return CorpusSet(self.groups, tuple(records))
