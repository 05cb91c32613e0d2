"""Command-line interface.

    corpusqual ingest    --corpus FILE --groups A B C
    corpusqual run       --corpus FILE --groups A B C --output-dir OUT
    corpusqual statcheck PATH [PATH ...]
    corpusqual report    --indicators OUT/indicators.jsonl --groups A B C --output-dir OUT

Settings resolve as: command-line flags > ``--config`` TOML file > defaults.
Exit status: 0 success, 1 warning threshold exceeded, 2 fatal config/I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, statparse
from .config import FORMATS, ConfigError, RunConfig, load_config_file

EXIT_OK, EXIT_WARN, EXIT_FATAL = 0, 1, 2

log = logging.getLogger("corpusqual")

S = argparse.SUPPRESS


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file of RunConfig keys")
    p.add_argument("--corpus", default=S, help="JSON Lines corpus file")
    p.add_argument("--groups", nargs="+", default=S, help="group labels, in report order")
    p.add_argument("--exclusion-keywords", dest="exclusion_keywords", default=S,
                   help="title keyword list for non-research filtering")
    p.add_argument("--no-filter", dest="filter_non_research", action="store_false", default=S,
                   help="keep editorials, corrections etc.")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output-dir", dest="output_dir", default=S)
    p.add_argument("--format", dest="formats", action="append", choices=FORMATS, default=S,
                   help="report format (repeatable; default all)")
    p.add_argument("--alpha", type=float, default=S, help="significance level (default 0.05)")
    p.add_argument("--tails", choices=("two", "one"), default=S,
                   help="tails for t/r/z p-value recomputation (default two)")
    p.add_argument("--correction", choices=("holm", "bonferroni", "none"), default=S,
                   help="pairwise multiple-comparison correction (default holm)")
    p.add_argument("--force-pairwise", dest="force_pairwise", action="store_true", default=S,
                   help="run pairwise tests even when the omnibus test is not significant")
    p.add_argument("--dictionary", default=S, help="word list for spell checking")
    p.add_argument("--allowlist", default=S, help="extra accepted words (jargon)")
    p.add_argument("--ethics-terms", dest="ethics_terms", default=S)
    p.add_argument("--consent-terms", dest="consent_terms", default=S)
    p.add_argument("--abbreviations", default=S, help="abbreviations that never end a sentence")
    p.add_argument("--window-years", dest="window_years", type=int, default=S,
                   help="citation window in calendar years (default 3)")
    p.add_argument("--citations-as-of", dest="citations_as_of", type=int, default=S,
                   help="null the windowed count when the window ends after this year")
    p.add_argument("--enrich", action="store_true", default=S,
                   help="fetch authors/references/citations by DOI")
    p.add_argument("--endpoint", default=S, help="metadata service URL (or $CORPUSQUAL_ENDPOINT)")
    p.add_argument("--cache-dir", dest="cache_dir", default=S)
    p.add_argument("--offline", action="store_true", default=S, help="serve enrichment from cache only")
    p.add_argument("--workers", type=int, default=S, help="worker processes (default: CPU count)")
    p.add_argument("--no-plots", dest="plots", action="store_false", default=S)
    p.add_argument("--svg", action="store_true", default=S, help="also render SVG plots")
    p.add_argument("--statcheck-dump", dest="statcheck_dump", action="store_true", default=S,
                   help="write per-article extracted tests to statcheck.jsonl")
    p.add_argument("--warn-threshold", dest="warn_threshold", type=float, default=S,
                   help="exit 1 when the share of problem articles exceeds this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corpusqual", description="Article quality indicators by group.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, validate and filter a corpus")
    _add_common(p)
    p.add_argument("--export", help="write the kept records as JSON Lines")

    p = sub.add_parser("run", help="full pipeline producing all report artifacts")
    _add_common(p)
    _add_run_options(p)

    p = sub.add_parser("statcheck", help="recompute p-values of APA statistics in text files")
    p.add_argument("paths", nargs="+", help="text files or directories of .txt files")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tails", choices=("two", "one"), default="two")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("report", help="regenerate reports from a saved indicators.jsonl")
    p.add_argument("--indicators", required=True)
    p.add_argument("--config", help="TOML file of RunConfig keys")
    p.add_argument("--groups", nargs="+", default=S)
    _add_run_options(p)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    skip = {"config", "command", "verbose", "export", "indicators"}
    values.update({k: v for k, v in vars(args).items() if k not in skip})
    values.setdefault("workers", _cpu_count())
    return RunConfig(**values)


def _cpu_count() -> int:
    import os

    return os.cpu_count() or 1


# -- subcommands ----------------------------------------------------------------


def cmd_ingest(args) -> int:
    from .ingest import write_corpus
    from .pipeline import ingest

    cfg = resolve_config(args)
    cfg.validate()
    summary = ingest(cfg)
    for err in summary.line_errors:
        print(f"{cfg.corpus}: {err}", file=sys.stderr)
    print(summary.describe())
    for g in cfg.groups:
        print(f"  {g}: {len(summary.corpus.in_group(g))}")
    if args.export:
        write_corpus(summary.corpus.records, args.export)
    return EXIT_OK


def cmd_run(args) -> int:
    from .pipeline import run_pipeline

    cfg = resolve_config(args)
    result = run_pipeline(cfg)
    for err in result.ingest.line_errors:
        print(f"{cfg.corpus}: {err}", file=sys.stderr)
    for v in result.vectors:
        for e in v.errors:
            print(f"article {v.id}: {e}", file=sys.stderr)
    if result.fetch_report is not None:
        for rid, e in sorted(result.fetch_report.errors.items()):
            print(f"enrichment {rid}: {e}", file=sys.stderr)
    print(result.ingest.describe())
    print(f"wrote {len(result.files)} files to {cfg.output_dir}")
    if cfg.warn_threshold is not None:
        total = result.ingest.kept + len(result.ingest.line_errors)
        problems = result.failed_articles + len(result.ingest.line_errors)
        if result.fetch_report is not None:
            problems += len(result.fetch_report.errors)
        if total and problems / total > cfg.warn_threshold:
            print(f"warning: {problems} of {total} articles had problems", file=sys.stderr)
            return EXIT_WARN
    return EXIT_OK


def cmd_report(args) -> int:
    from .pipeline import load_vectors
    from .report import INDICATORS, compare_all, emit_plot_data, emit_report, summarize

    cfg = resolve_config(args)
    cfg.validate(need_corpus=False)
    vectors = load_vectors(args.indicators)
    groups = cfg.groups or list(dict.fromkeys(v.group for v in vectors))
    summaries = summarize(vectors, groups)
    comparisons = compare_all(vectors, cfg, groups)
    metadata = {"groups": groups, "alpha": cfg.alpha, "correction": cfg.correction,
                "tails": cfg.tails, "force_pairwise": cfg.force_pairwise}
    files = emit_report(summaries, comparisons, cfg.output_dir, cfg.formats, groups, metadata)
    if cfg.plots:
        for ind in INDICATORS:
            files += emit_plot_data(vectors, ind, Path(cfg.output_dir) / "plots", groups, svg=cfg.svg)
    print(f"wrote {len(files)} files to {cfg.output_dir}")
    return EXIT_OK


def _text_files(paths: Sequence[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.is_file() and q.suffix in (".txt", ".md", "")))
        else:
            out.append(p)
    return out


def cmd_statcheck(args) -> int:
    if not 0 < args.alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    sections = []
    failures = 0
    for path in _text_files(args.paths):
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            failures += 1
            sections.append({"document": str(path), "error": str(exc), "tests": []})
            continue
        checked = statparse.check_text(text, args.alpha, args.tails)
        sections.append({"document": str(path), "tests": [statparse.checked_to_dict(c) for c in checked]})

    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        if args.format == "json":
            json.dump(sections, out, indent=2, ensure_ascii=False)
            out.write("\n")
        else:
            cols = ["document", "kind", "df1", "df2", "n", "value", "p_comparator",
                    "p_reported", "p_recomputed", "status", "error"]
            w = csv.DictWriter(out, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for sec in sections:
                for t in sec["tests"]:
                    w.writerow({"document": sec["document"], **t})
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_WARN if failures else EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "run": cmd_run, "statcheck": cmd_statcheck, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
