"""Loader for the versioned table of imported constants.

Each non-comment line reads ``key lo hi citation...``.  The decimal
endpoints are enclosed outward, so a pinned value is always a valid
Interval even when the decimals are not doubles.
"""
from __future__ import annotations

import functools
import os
from dataclasses import dataclass

from .interval import Interval, I

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DEFAULT_PATH = os.path.join(DATA_DIR, "pinned_constants.txt")
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Pinned:
    key: str
    value: Interval
    citation: str


@functools.lru_cache(maxsize=None)
def load(path: str = DEFAULT_PATH) -> dict:
    out = {}
    version = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#!version"):
                version = int(line.split()[1])
                continue
            if not line or line.startswith("#"):
                continue
            key, lo, hi, cite = line.split(None, 3)
            out[key] = Pinned(key, Interval(I(lo).lo, I(hi).hi), cite)
    if version != FORMAT_VERSION:
        raise ValueError(f"pinned constants file has version {version}, expected {FORMAT_VERSION}")
    return out


def pinned(key: str, citation: bool = False, path: str = DEFAULT_PATH):
    table = load(path)
    if key not in table:
        raise KeyError(f"no pinned constant {key!r}")
    return table[key].citation if citation else table[key].value
