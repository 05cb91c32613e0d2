"""Per-article indicators, group summaries, routed group comparisons and
report/plot-data emission.

Every indicator is assigned one test family:

    anova    lengths and readability (ANOVA, then Tukey HSD)
    kruskal  skewed counts and percentages (Kruskal-Wallis, then pairwise Wilcoxon)
    chisq    boolean indicators (k-sample proportions, then pairwise proportions)

Pairwise tests run only when the omnibus test is significant at ``alpha``
unless ``force_pairwise`` is set.  Null values never enter a test or an ``n``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import biblio, mentions, spellscan, statparse, textmetrics
from .config import Resources, RunConfig
from .inferstats import (
    OmnibusResult,
    PairwiseResult,
    StatsError,
    chisq_proportions,
    kruskal_wallis,
    one_way_anova,
    pairwise_proportions,
    pairwise_wilcoxon,
    tukey_hsd,
)
from .model import ArticleRecord, CorpusSet

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ROUTING = {
    "abstract_words": "anova",
    "fulltext_words": "anova",
    "fre": "anova",
    "title_spell_error": "chisq",
    "abstract_spell_error": "chisq",
    "n_references": "kruskal",
    "n_citations_total": "kruskal",
    "n_citations_3yr": "kruskal",
    "pct_self_references": "kruskal",
    "pct_self_citations": "kruskal",
    "n_authors": "kruskal",
    "n_countries": "kruskal",
    "has_participants": "chisq",
    "mentions_ethics": "chisq",
    "mentions_consent": "chisq",
    "has_any_test": "chisq",
    "has_decision_error": "chisq",
}
INDICATORS = tuple(ROUTING)
BOOLEAN_INDICATORS = tuple(k for k, v in ROUTING.items() if v == "chisq")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class IndicatorVector:
    id: str
    group: str
    abstract_words: Optional[int] = None
    fulltext_words: Optional[int] = None
    fre: Optional[float] = None
    title_spell_error: Optional[bool] = None
    abstract_spell_error: Optional[bool] = None
    n_references: Optional[int] = None
    n_citations_total: Optional[int] = None
    n_citations_3yr: Optional[int] = None
    pct_self_references: Optional[float] = None
    pct_self_citations: Optional[float] = None
    n_authors: Optional[int] = None
    n_countries: Optional[int] = None
    has_participants: Optional[bool] = None
    mentions_ethics: Optional[bool] = None
    mentions_consent: Optional[bool] = None
    has_any_test: Optional[bool] = None
    has_decision_error: Optional[bool] = None
    errors: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["errors"] = list(self.errors)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IndicatorVector":
        d = dict(d)
        d["errors"] = tuple(d.get("errors") or ())
        return cls(**d)


# -- per-article computation --------------------------------------------------


def article_indicators(rec: ArticleRecord, res: Resources, cfg: RunConfig) -> IndicatorVector:
    """Compute one article's IndicatorVector; failures leave nulls and a note."""
    values: dict = {}
    errors: list[str] = []

    def attempt(name, fn):
        try:
            fn()
        except Exception as exc:  # recorded per article, never fatal
            errors.append(f"{name}: {exc}")

    def lengths():
        if rec.abstract.strip():
            values["abstract_words"] = textmetrics.count_words(rec.abstract)
        if rec.full_text.strip():
            values["fulltext_words"] = textmetrics.count_words(rec.full_text)

    def readability():
        if textmetrics.count_words(rec.full_text):
            values["fre"] = textmetrics.flesch_reading_ease(rec.full_text, res.abbreviations).fre

    def spelling():
        if rec.title.strip():
            values["title_spell_error"] = bool(
                spellscan.scan_misspellings(rec.title, res.dictionary, res.allowlist)
            )
        if rec.abstract.strip():
            values["abstract_spell_error"] = bool(
                spellscan.scan_misspellings(rec.abstract, res.dictionary, res.allowlist)
            )

    def bibliometrics():
        b = biblio.biblio_indicators(rec, cfg.window_years, cfg.citations_as_of)
        values.update(
            n_references=b.n_references,
            n_citations_total=b.n_citations_total,
            n_citations_3yr=b.n_citations_3yr,
            pct_self_references=b.pct_self_references,
            pct_self_citations=b.pct_self_citations,
            n_authors=b.n_authors,
            n_countries=b.n_countries,
        )

    def ethics():
        flags = mentions.mention_flags(rec.full_text, res.ethics_terms, res.consent_terms)
        values["has_participants"] = flags.has_participants
        if flags.has_participants:
            values["mentions_ethics"] = flags.mentions_ethics
            values["mentions_consent"] = flags.mentions_consent

    def statistics():
        any_test, decision_error = statparse.article_decision_error(rec.full_text, cfg.alpha, cfg.tails)
        values["has_any_test"] = any_test
        if any_test:
            values["has_decision_error"] = decision_error

    for name, fn in (
        ("lengths", lengths),
        ("readability", readability),
        ("spelling", spelling),
        ("biblio", bibliometrics),
        ("mentions", ethics),
        ("statcheck", statistics),
    ):
        attempt(name, fn)
    return IndicatorVector(id=rec.id, group=rec.group, errors=tuple(errors), **values)


_WORKER_STATE: dict = {}


def _init_worker(res: Resources, cfg: RunConfig) -> None:
    _WORKER_STATE["res"] = res
    _WORKER_STATE["cfg"] = cfg


def _worker(rec: ArticleRecord) -> IndicatorVector:
    return article_indicators(rec, _WORKER_STATE["res"], _WORKER_STATE["cfg"])


def compute_indicators(
    corpus: CorpusSet | Sequence[ArticleRecord],
    cfg: Optional[RunConfig] = None,
    resources: Optional[Resources] = None,
) -> list[IndicatorVector]:
    """IndicatorVectors for every record, in corpus order."""
    cfg = cfg or RunConfig()
    res = resources or Resources.from_config(cfg)
    records = corpus.records if isinstance(corpus, CorpusSet) else list(corpus)
    if cfg.workers > 1 and len(records) > 1:
        chunk = max(1, len(records) // (cfg.workers * 4))
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(res, cfg)) as pool:
            vectors = list(pool.map(_worker, records, chunksize=chunk))
    else:
        vectors = [article_indicators(r, res, cfg) for r in records]
    for v in vectors:
        for err in v.errors:
            logger.warning("article %s: %s", v.id, err)
    return vectors


# -- summaries ----------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    group: str
    indicator: str
    n: int
    mean: Optional[float]
    median: Optional[float]
    q1: Optional[float]
    q3: Optional[float]
    min: Optional[float]
    max: Optional[float]
    successes: Optional[int] = None

    @property
    def proportion(self) -> Optional[float]:
        return self.mean if self.successes is not None else None


def indicator_values(vectors: Iterable[IndicatorVector], indicator: str, group: str) -> list:
    if indicator not in ROUTING:
        raise UsageError(f"unknown indicator {indicator!r}")
    return [getattr(v, indicator) for v in vectors if v.group == group and getattr(v, indicator) is not None]


def five_number(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    x = np.asarray(values, dtype=float)
    lo, q1, med, q3, hi = np.percentile(x, [0, 25, 50, 75, 100])
    return float(lo), float(q1), float(med), float(q3), float(hi)


def summarize(vectors: Sequence[IndicatorVector], groups: Sequence[str]) -> list[SummaryRow]:
    """One row per (group, indicator); statistics are None when n == 0."""
    rows = []
    for indicator in INDICATORS:
        is_bool = ROUTING[indicator] == "chisq"
        for group in groups:
            vals = indicator_values(vectors, indicator, group)
            successes = sum(bool(v) for v in vals) if is_bool else None
            if not vals:
                rows.append(SummaryRow(group, indicator, 0, None, None, None, None, None, None, successes))
                continue
            lo, q1, med, q3, hi = five_number([float(v) for v in vals])
            mean = float(np.mean(np.asarray(vals, dtype=float)))
            rows.append(SummaryRow(group, indicator, len(vals), mean, med, q1, q3, lo, hi, successes))
    return rows


# -- comparisons ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupComparison:
    indicator: str
    test_family: str
    omnibus: Optional[OmnibusResult]
    pairwise: tuple[PairwiseResult, ...] = ()
    skipped_groups: tuple[str, ...] = ()
    note: Optional[str] = None


def compare_groups(
    vectors: Sequence[IndicatorVector],
    indicator: str,
    cfg: Optional[RunConfig] = None,
    groups: Optional[Sequence[str]] = None,
) -> GroupComparison:
    cfg = cfg or RunConfig()
    if indicator not in ROUTING:
        raise UsageError(f"unknown indicator {indicator!r}")
    family = ROUTING[indicator]
    if groups is None:
        groups = list(dict.fromkeys(v.group for v in vectors))
    data = {g: indicator_values(vectors, indicator, g) for g in groups}
    skipped = tuple(g for g, vals in data.items() if not vals)
    for g in skipped:
        logger.warning("indicator %s: group %s has no data and is skipped", indicator, g)
    data = {g: vals for g, vals in data.items() if vals}
    if len(data) < 2:
        return GroupComparison(indicator, family, None, (), skipped, "fewer than two groups with data")

    labels = list(data)
    try:
        if family == "anova":
            omnibus = one_way_anova(data)
        elif family == "kruskal":
            omnibus = kruskal_wallis(data)
        else:
            successes = [sum(bool(v) for v in data[g]) for g in labels]
            totals = [len(data[g]) for g in labels]
            omnibus = chisq_proportions(successes, totals)
    except StatsError as exc:
        return GroupComparison(indicator, family, None, (), skipped, str(exc))

    pairwise: list[PairwiseResult] = []
    if omnibus.p_value < cfg.alpha or cfg.force_pairwise:
        if family == "anova":
            pairwise = tukey_hsd(data)
        elif family == "kruskal":
            pairwise = pairwise_wilcoxon(data, cfg.correction)
        else:
            pairwise = pairwise_proportions(successes, totals, cfg.correction, labels)
    return GroupComparison(indicator, family, omnibus, tuple(pairwise), skipped)


def compare_all(vectors, cfg: RunConfig, groups: Sequence[str]) -> list[GroupComparison]:
    return [compare_groups(vectors, ind, cfg, groups) for ind in INDICATORS]


# -- emission -----------------------------------------------------------------


def _clean(x):
    """JSON-safe value: non-finite floats become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, (np.floating, np.integer)):
        return _clean(x.item())
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def summary_to_dict(row: SummaryRow) -> dict:
    d = dataclasses.asdict(row)
    d["proportion"] = row.proportion
    return d


def comparison_to_dict(c: GroupComparison) -> dict:
    return {
        "indicator": c.indicator,
        "test_family": c.test_family,
        "omnibus": dataclasses.asdict(c.omnibus) if c.omnibus else None,
        "pairwise": [dataclasses.asdict(p) for p in c.pairwise],
        "skipped_groups": list(c.skipped_groups),
        "note": c.note,
    }


def format_p(p: float) -> str:
    if p < 0.001:
        return "p < .001"
    return "p = " + f"{p:.3f}".lstrip("0")


def format_omnibus(o: OmnibusResult) -> str:
    df1 = f"{o.df[0]:g}"
    if o.test == "anova_F":
        head = f"F({df1}, {o.df[1]:g}) = {o.statistic:.1f}"
    elif o.test == "kruskal_H":
        head = f"H({df1}) = {o.statistic:.1f}"
    else:
        head = f"χ2({df1}, N = {o.n:,}) = {o.statistic:.1f}"
    return f"{head}, {format_p(o.p_value)}"


def _fmt_num(x: Optional[float], digits: int = 1) -> str:
    return "–" if x is None else f"{x:.{digits}f}"


def render_json(summaries, comparisons, metadata: Optional[dict] = None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "metadata": metadata or {},
        "summaries": [summary_to_dict(r) for r in summaries],
        "comparisons": [comparison_to_dict(c) for c in comparisons],
    }
    return json.dumps(_clean(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


CSV_COLUMNS = (
    "row_type", "indicator", "group", "group_b", "n", "mean", "median", "q1", "q3",
    "min", "max", "proportion", "test", "statistic", "df1", "df2", "p_value",
    "estimate", "method",
)


def render_csv(summaries, comparisons) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in summaries:
        writer.writerow({
            "row_type": "summary", "indicator": r.indicator, "group": r.group, "n": r.n,
            "mean": r.mean, "median": r.median, "q1": r.q1, "q3": r.q3,
            "min": r.min, "max": r.max, "proportion": r.proportion,
        })
    for c in comparisons:
        if c.omnibus is not None:
            o = c.omnibus
            writer.writerow({
                "row_type": "omnibus", "indicator": c.indicator, "n": o.n, "test": o.test,
                "statistic": o.statistic, "df1": o.df[0], "df2": o.df[1], "p_value": o.p_value,
            })
        for p in c.pairwise:
            writer.writerow({
                "row_type": "pairwise", "indicator": c.indicator, "group": p.group_a,
                "group_b": p.group_b, "statistic": p.statistic, "p_value": p.p_adjusted,
                "estimate": p.estimate, "method": p.method,
            })
    return buf.getvalue()


def render_markdown(summaries, comparisons, groups: Sequence[str]) -> str:
    by_key = {(r.indicator, r.group): r for r in summaries}
    indicators = list(dict.fromkeys(r.indicator for r in summaries))
    lines = ["# Article quality indicators", "", "## Group summaries", ""]
    lines.append("| indicator | " + " | ".join(groups) + " |")
    lines.append("|---|" + "---|" * len(groups))
    for ind in indicators:
        cells = []
        for g in groups:
            r = by_key.get((ind, g))
            if r is None or r.n == 0:
                cells.append("–")
            elif r.successes is not None:
                cells.append(f"{100 * r.proportion:.1f}% ({r.successes}/{r.n})")
            else:
                cells.append(
                    f"mean {_fmt_num(r.mean)}, median {_fmt_num(r.median)} "
                    f"[{_fmt_num(r.q1)}, {_fmt_num(r.q3)}], n = {r.n}"
                )
        lines.append(f"| {ind} | " + " | ".join(cells) + " |")
    if comparisons:
        lines += ["", "## Group comparisons", ""]
        lines.append("| indicator | family | omnibus | pairwise |")
        lines.append("|---|---|---|---|")
        for c in comparisons:
            omni = format_omnibus(c.omnibus) if c.omnibus else f"not tested ({c.note})"
            pairs = "; ".join(
                f"{p.group_a} vs {p.group_b}: {p.estimate:+.3g}, {format_p(p.p_adjusted)}"
                for p in c.pairwise
            ) or "–"
            lines.append(f"| {c.indicator} | {c.test_family} | {omni} | {pairs} |")
    return "\n".join(lines) + "\n"


def emit_report(
    summaries: Sequence[SummaryRow],
    comparisons: Sequence[GroupComparison],
    out_dir: str | Path,
    formats: Sequence[str] = ("json", "csv", "markdown"),
    groups: Optional[Sequence[str]] = None,
    metadata: Optional[dict] = None,
) -> list[Path]:
    """Write report.json / report.csv / report.md; output is byte-deterministic."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if groups is None:
        groups = list(dict.fromkeys(r.group for r in summaries))
    written = []
    for fmt in formats:
        if fmt == "json":
            path, text = out / "report.json", render_json(summaries, comparisons, metadata)
        elif fmt == "csv":
            path, text = out / "report.csv", render_csv(summaries, comparisons)
        elif fmt == "markdown":
            path, text = out / "report.md", render_markdown(summaries, comparisons, groups)
        else:
            raise UsageError(f"unknown format {fmt!r}")
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


# -- plot data ------------------------------------------------------------------


def emit_plot_data(
    vectors: Sequence[IndicatorVector],
    indicator: str,
    destination: str | Path,
    groups: Optional[Sequence[str]] = None,
    svg: bool = False,
) -> list[Path]:
    """Box-plot (numeric) or bar-chart (boolean) data for one indicator.

    Numeric indicators produce ``<indicator>.csv`` with per-group five-number
    summaries and ``<indicator>_values.csv`` with the raw values; boolean ones
    produce per-group proportions.  ``svg`` adds a minimal rendering.
    """
    if indicator not in ROUTING:
        raise UsageError(f"unknown indicator {indicator!r}")
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    if groups is None:
        groups = list(dict.fromkeys(v.group for v in vectors))
    data = {g: indicator_values(vectors, indicator, g) for g in groups}
    written = []
    if ROUTING[indicator] == "chisq":
        rows = [
            (g, len(vals), sum(bool(v) for v in vals), (sum(bool(v) for v in vals) / len(vals)) if vals else None)
            for g, vals in data.items()
        ]
        path = dest / f"{indicator}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["group", "n", "successes", "proportion"])
            w.writerows(rows)
        written.append(path)
        if svg:
            written.append(_bar_svg(dest / f"{indicator}.svg", indicator, rows))
        return written

    stats = {g: (five_number(vals) if vals else None) for g, vals in data.items()}
    path = dest / f"{indicator}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "n", "min", "q1", "median", "q3", "max"])
        for g, vals in data.items():
            w.writerow([g, len(vals), *(stats[g] or ("",) * 5)])
    written.append(path)
    values_path = dest / f"{indicator}_values.csv"
    with open(values_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "value"])
        for g, vals in data.items():
            w.writerows((g, v) for v in vals)
    written.append(values_path)
    if svg:
        written.append(_box_svg(dest / f"{indicator}.svg", indicator, stats))
    return written


_W, _H, _PAD = 480, 320, 40


def _svg_doc(title: str, body: list[str]) -> str:
    return "\n".join([
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - 10}" y2="{_H - _PAD}" stroke="black"/>',
        *body,
        "</svg>",
        "",
    ])


def _box_svg(path: Path, indicator: str, stats: dict) -> Path:
    present = [s for s in stats.values() if s]
    lo = min((s[0] for s in present), default=0.0)
    hi = max((s[4] for s in present), default=1.0)
    span = (hi - lo) or 1.0

    def y(v):
        return _H - _PAD - (v - lo) / span * (_H - 2 * _PAD - 20)

    slot = (_W - _PAD - 10) / max(1, len(stats))
    body = []
    for i, (g, s) in enumerate(stats.items()):
        cx = _PAD + slot * (i + 0.5)
        body.append(f'<text x="{cx:.1f}" y="{_H - _PAD + 16}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(g)}</text>')
        if not s:
            continue
        mn, q1, med, q3, mx = s
        half = slot * 0.25
        body += [
            f'<line x1="{cx:.1f}" y1="{y(mn):.1f}" x2="{cx:.1f}" y2="{y(q1):.1f}" stroke="black"/>',
            f'<line x1="{cx:.1f}" y1="{y(q3):.1f}" x2="{cx:.1f}" y2="{y(mx):.1f}" stroke="black"/>',
            f'<rect x="{cx - half:.1f}" y="{y(q3):.1f}" width="{2 * half:.1f}" height="{max(y(q1) - y(q3), 0.5):.1f}" fill="#cfe0f3" stroke="black"/>',
            f'<line x1="{cx - half:.1f}" y1="{y(med):.1f}" x2="{cx + half:.1f}" y2="{y(med):.1f}" stroke="black" stroke-width="2"/>',
        ]
    path.write_text(_svg_doc(indicator, body), encoding="utf-8")
    return path


def _bar_svg(path: Path, indicator: str, rows) -> Path:
    slot = (_W - _PAD - 10) / max(1, len(rows))
    body = []
    for i, (g, _, _, prop) in enumerate(rows):
        x = _PAD + slot * i + slot * 0.2
        body.append(f'<text x="{x + slot * 0.3:.1f}" y="{_H - _PAD + 16}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(g)}</text>')
        if prop is None:
            continue
        h = prop * (_H - 2 * _PAD - 20)
        body.append(f'<rect x="{x:.1f}" y="{_H - _PAD - h:.1f}" width="{slot * 0.6:.1f}" height="{h:.1f}" fill="#cfe0f3" stroke="black"/>')
        body.append(f'<text x="{x + slot * 0.3:.1f}" y="{_H - _PAD - h - 4:.1f}" text-anchor="middle" font-family="sans-serif" font-size="11">{100 * prop:.1f}%</text>')
    path.write_text(_svg_doc(indicator, body), encoding="utf-8")
    return path
