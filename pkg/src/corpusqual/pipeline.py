"""End-to-end run: load -> filter -> (enrich) -> indicators -> compare -> emit."""

from __future__ import annotations

import json
import logging
import platform
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, statparse
from .config import Resources, RunConfig
from .enrich import EnrichConfig, FetchReport, enrich_from_metadata_service
from .ingest import LineError, filter_non_research, load_corpus
from .model import CorpusSet
from .report import (
    INDICATORS,
    GroupComparison,
    IndicatorVector,
    SummaryRow,
    compare_all,
    compute_indicators,
    emit_plot_data,
    emit_report,
    summarize,
)

logger = logging.getLogger(__name__)


@dataclass
class IngestSummary:
    corpus: CorpusSet
    line_errors: list[LineError]
    excluded: Counter = field(default_factory=Counter)

    @property
    def kept(self) -> int:
        return len(self.corpus)

    def describe(self) -> str:
        total_excl = sum(self.excluded.values())
        if len(self.excluded) == 1:
            detail = next(iter(self.excluded))
        else:
            detail = ", ".join(f"{n} {rule}" for rule, n in sorted(self.excluded.items()))
        text = f"kept {self.kept}"
        if total_excl:
            text += f", excluded {total_excl} ({detail})"
        if self.line_errors:
            text += f", {len(self.line_errors)} line errors"
        return text


def ingest(cfg: RunConfig, resources: Optional[Resources] = None) -> IngestSummary:
    loaded = load_corpus(cfg.corpus, cfg.groups)
    corpus = loaded.corpus
    excluded: Counter = Counter()
    if cfg.filter_non_research:
        res = resources or Resources.from_config(cfg)
        kept, dropped = filter_non_research(corpus.records, res.exclusion_rules)
        excluded.update(rule for _, rule in dropped)
        corpus = corpus.with_records(kept)
    return IngestSummary(corpus, loaded.errors, excluded)


@dataclass
class RunResult:
    ingest: IngestSummary
    vectors: list[IndicatorVector]
    summaries: list[SummaryRow]
    comparisons: list[GroupComparison]
    fetch_report: Optional[FetchReport]
    files: list[Path]

    @property
    def failed_articles(self) -> int:
        return sum(1 for v in self.vectors if v.errors)


def run_pipeline(cfg: RunConfig) -> RunResult:
    cfg.validate()
    res = Resources.from_config(cfg)
    summary = ingest(cfg, res)
    corpus = summary.corpus

    fetch_report = None
    if cfg.enrich:
        records, fetch_report = enrich_from_metadata_service(
            corpus.records,
            EnrichConfig(
                endpoint=cfg.endpoint,
                cache_dir=cfg.cache_dir,
                offline=cfg.offline,
                workers=min(4, max(1, cfg.workers)),
            ),
        )
        corpus = corpus.with_records(records)

    vectors = compute_indicators(corpus, cfg, res)
    summaries = summarize(vectors, cfg.groups)
    comparisons = compare_all(vectors, cfg, cfg.groups)

    out = Path(cfg.output_dir)
    metadata = {
        "groups": cfg.groups,
        "alpha": cfg.alpha,
        "correction": cfg.correction,
        "tails": cfg.tails,
        "force_pairwise": cfg.force_pairwise,
    }
    files = emit_report(summaries, comparisons, out, cfg.formats, cfg.groups, metadata)
    with open(out / "indicators.jsonl", "w", encoding="utf-8") as fh:
        for v in vectors:
            fh.write(json.dumps(v.to_dict(), sort_keys=True) + "\n")
    files.append(out / "indicators.jsonl")
    if cfg.plots:
        for ind in INDICATORS:
            files += emit_plot_data(vectors, ind, out / "plots", cfg.groups, svg=cfg.svg)
    if cfg.statcheck_dump:
        files.append(_dump_statcheck(corpus, cfg, out))

    meta = {
        "config_digest": cfg.digest(),
        "config": cfg.to_dict(),
        "versions": {
            "corpusqual": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "counts": {
            "kept": summary.kept,
            "excluded": dict(sorted(summary.excluded.items())),
            "line_errors": len(summary.line_errors),
            "per_group": {g: len(corpus.in_group(g)) for g in cfg.groups},
            "articles_with_errors": sum(1 for v in vectors if v.errors),
        },
    }
    if fetch_report is not None:
        meta["enrichment"] = {
            "enriched": len(fetch_report.enriched),
            "unmatched": len(fetch_report.unmatched),
            "errors": len(fetch_report.errors),
            "network_calls": fetch_report.network_calls,
            "cache_hits": fetch_report.cache_hits,
        }
    meta_path = out / "run_meta.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files.append(meta_path)
    return RunResult(summary, vectors, summaries, comparisons, fetch_report, files)


def _dump_statcheck(corpus: CorpusSet, cfg: RunConfig, out: Path) -> Path:
    path = out / "statcheck.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus.records:
            checked = statparse.check_text(rec.full_text, cfg.alpha, cfg.tails)
            row = {"id": rec.id, "tests": [statparse.checked_to_dict(c) for c in checked]}
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
    return path


def load_vectors(path: str | Path) -> list[IndicatorVector]:
    with open(path, encoding="utf-8") as fh:
        return [IndicatorVector.from_dict(json.loads(line)) for line in fh if line.strip()]
