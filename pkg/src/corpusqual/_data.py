"""Access to the word and term lists shipped with the package."""

from __future__ import annotations

import gzip
from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(resources.files("corpusqual") / "data" / name))


def read_list(path: str | Path) -> list[str]:
    """Read a one-entry-per-line list, skipping blanks and ``#`` comments.

    Files ending in ``.gz`` are decompressed transparently.
    """
    path = Path(path)
    if path.suffix == ".gz":
        text = gzip.decompress(path.read_bytes()).decode("utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out
