#!/usr/bin/env python3
"""Expand hunspell .dic/.aff pairs into the plain lowercase word list used by spellscan.

Only the subset of the affix format used by the SCOWL English dictionaries is
handled: single-character flags, PFX/SFX rules with strip/add/condition, and
prefix+suffix cross products.

    npm pack dictionary-en dictionary-en-gb
    python scripts/build_dictionary.py en_US:path/index.dic,path/index.aff \
        en_GB:path/index.dic,path/index.aff -o src/corpusqual/data/en_words.txt.gz
"""

import argparse
import gzip
import re
from dataclasses import dataclass


@dataclass
class Affix:
    kind: str  # "PFX" or "SFX"
    cross: bool
    strip: str
    add: str
    cond: re.Pattern

    def apply(self, word):
        if not self.cond.search(word):
            return None
        if self.kind == "SFX":
            if self.strip and not word.endswith(self.strip):
                return None
            base = word[: len(word) - len(self.strip)] if self.strip else word
            return base + self.add
        if self.strip and not word.startswith(self.strip):
            return None
        return self.add + word[len(self.strip):]


def parse_aff(path):
    rules = {}
    headers = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) < 4 or parts[0] not in ("PFX", "SFX"):
                continue
            kind, flag = parts[0], parts[1]
            if flag not in headers:
                headers[flag] = parts[2] == "Y"
                rules[flag] = []
                continue
            strip = "" if parts[2] == "0" else parts[2]
            add = parts[3].split("/")[0]
            add = "" if add == "0" else add
            cond = parts[4] if len(parts) > 4 else "."
            pattern = ("^" + cond) if kind == "PFX" else (cond + "$")
            rules[flag].append(Affix(kind, headers[flag], strip, add, re.compile(pattern)))
    return rules


def expand(dic_path, rules):
    words = set()
    with open(dic_path, encoding="utf-8") as fh:
        next(fh)  # entry count
        for line in fh:
            line = line.strip()
            if not line:
                continue
            stem, _, flags = line.partition("/")
            forms = {stem}
            prefixed, suffixed = [], []
            for flag in flags:
                for aff in rules.get(flag, ()):
                    out = aff.apply(stem)
                    if out is None:
                        continue
                    forms.add(out)
                    (prefixed if aff.kind == "PFX" else suffixed).append((aff, out))
            for pfx, _ in prefixed:
                if not pfx.cross:
                    continue
                for sfx, sform in suffixed:
                    if sfx.cross:
                        out = pfx.apply(sform)
                        if out is not None:
                            forms.add(out)
            words.update(forms)
    return words


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("sources", nargs="+", help="NAME:DIC,AFF")
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args()

    words = set()
    for src in args.sources:
        _, _, paths = src.partition(":")
        dic, aff = paths.split(",")
        words |= expand(dic, parse_aff(aff))
    keep = sorted({w.lower() for w in words if re.fullmatch(r"[A-Za-z][A-Za-z']*", w)})
    data = "\n".join(keep).encode("utf-8") + b"\n"
    opener = gzip.open if args.output.endswith(".gz") else open
    with opener(args.output, "wb") as fh:
        fh.write(data)
    print(f"wrote {len(keep)} words to {args.output}")


if __name__ == "__main__":
    main()
