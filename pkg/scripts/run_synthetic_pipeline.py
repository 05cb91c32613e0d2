"""Generate a synthetic corpus, run the full pipeline and print the headline comparisons.

    python3 scripts/run_synthetic_pipeline.py --out runs/synthetic --workers 4
"""

import argparse
import time
from pathlib import Path

from corpusqual.config import RunConfig
from corpusqual.ingest import write_corpus
from corpusqual.pipeline import run_pipeline
from corpusqual.report import format_omnibus, format_p
from corpusqual.synthetic import SyntheticConfig, generate_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/synthetic")
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--seed", type=int, default=20231)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--svg", action="store_true")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    syn = SyntheticConfig(n_per_group=args.n, seed=args.seed, editorials_per_group=3)
    write_corpus(generate_corpus(syn), out / "corpus.jsonl")
    groups = list(syn.profiles)

    t0 = time.perf_counter()
    result = run_pipeline(RunConfig(corpus=out / "corpus.jsonl", groups=groups, output_dir=out / "report",
                                    workers=args.workers, svg=args.svg))
    elapsed = time.perf_counter() - t0

    print(result.ingest.describe())
    for comp in result.comparisons:
        line = f"{comp.indicator:22s} {comp.test_family:8s} "
        line += format_omnibus(comp.omnibus) if comp.omnibus else f"skipped ({comp.note})"
        print(line)
        for pw in comp.pairwise:
            print(f"    {pw.group_a} vs {pw.group_b}: diff {pw.estimate:+.3f}, {format_p(pw.p_adjusted)}")
    print(f"pipeline: {elapsed:.1f} s, {len(result.files)} files in {out / 'report'}")


if __name__ == "__main__":
    main()
