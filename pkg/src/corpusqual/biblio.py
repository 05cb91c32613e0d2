"""Reference, citation, self-citation and authorship indicators.

Self-references and self-citations are matched on author IDs only: a
referenced or citing work counts when its author set intersects the
article's.  Ratios with an empty denominator are ``None``, never 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import ArticleRecord

DEFAULT_WINDOW_YEARS = 3


@dataclass(frozen=True)
class BiblioIndicators:
    n_references: int
    n_citations_total: int
    n_citations_3yr: Optional[int]
    pct_self_references: Optional[float]
    pct_self_citations: Optional[float]
    n_authors: int
    n_countries: Optional[int]


def count_references(record: ArticleRecord) -> int:
    return len(record.references)


def citations_in_window(record: ArticleRecord, window_years: int = DEFAULT_WINDOW_YEARS) -> int:
    """Citations from calendar years ``pub_year .. pub_year + window_years - 1``."""
    last = record.pub_year + window_years - 1
    return sum(1 for c in record.citations if c.year <= last)


def _self_share(author_ids: frozenset, works) -> Optional[float]:
    if not works:
        return None
    hits = sum(1 for w in works if author_ids.intersection(w.author_ids))
    return 100.0 * hits / len(works)


def self_reference_pct(record: ArticleRecord) -> Optional[float]:
    return _self_share(record.author_ids, record.references)


def self_citation_pct(record: ArticleRecord) -> Optional[float]:
    return _self_share(record.author_ids, record.citations)


def author_and_country_counts(record: ArticleRecord) -> tuple[int, Optional[int]]:
    countries = {a.country.upper() for a in record.authors if a.country}
    return len(record.authors), (len(countries) or None)


def biblio_indicators(
    record: ArticleRecord,
    window_years: int = DEFAULT_WINDOW_YEARS,
    citations_as_of: Optional[int] = None,
) -> BiblioIndicators:
    """All bibliometric indicators for one article.

    With ``citations_as_of`` set, the windowed count is ``None`` for articles
    whose window has not yet closed by that year.
    """
    window = citations_in_window(record, window_years)
    if citations_as_of is not None and record.pub_year + window_years - 1 > citations_as_of:
        window = None
    n_authors, n_countries = author_and_country_counts(record)
    return BiblioIndicators(
        n_references=count_references(record),
        n_citations_total=len(record.citations),
        n_citations_3yr=window,
        pct_self_references=self_reference_pct(record),
        pct_self_citations=self_citation_pct(record),
        n_authors=n_authors,
        n_countries=n_countries,
    )
