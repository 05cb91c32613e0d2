"""Write a synthetic three-group corpus as JSON Lines.

    python3 scripts/make_synthetic_corpus.py -o synthetic.jsonl --n 600 --seed 20231
"""

import argparse

from corpusqual.ingest import write_corpus
from corpusqual.synthetic import SyntheticConfig, generate_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--n", type=int, default=600, help="articles per group")
    ap.add_argument("--seed", type=int, default=20231)
    ap.add_argument("--editorials", type=int, default=3, help="non-research items per group")
    ap.add_argument("--fulltext-scale", type=float, default=0.25,
                    help="multiplier on full-text lengths (1.0 = journal-length texts)")
    args = ap.parse_args()
    cfg = SyntheticConfig(n_per_group=args.n, seed=args.seed, editorials_per_group=args.editorials,
                          fulltext_scale=args.fulltext_scale)
    records = generate_corpus(cfg)
    write_corpus(records, args.output)
    print(f"wrote {len(records)} records for groups {', '.join(cfg.profiles)} to {args.output}")


if __name__ == "__main__":
    main()
