"""Loading and hashing of title-pair sample files.

The on-disk format is the matcher pipeline's pair schema: JSON lines with
``a``, ``b`` (the two titles), ``label`` (bool) and auxiliary fields this
service ignores (author lists stay outside the encoder by design).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path


class DataFormat(Exception):
    """A sample file violates the pair schema."""


@dataclass(frozen=True)
class TitlePair:
    a: str
    b: str
    label: bool


def load_pairs(path: str | Path) -> list[TitlePair]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                a, b, label = obj["a"], obj["b"], obj["label"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataFormat(f"{path}:{line_no}: {exc}") from exc
            if not isinstance(a, str) or not isinstance(b, str) or not isinstance(label, bool):
                raise DataFormat(f"{path}:{line_no}: wrong field types")
            pairs.append(TitlePair(a=a, b=b, label=label))
    if not pairs:
        raise DataFormat(f"{path}: no samples")
    return pairs


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
