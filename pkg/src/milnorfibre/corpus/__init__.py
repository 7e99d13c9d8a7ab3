"""Bundled example diagrams with their expected headline numbers."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path


def corpus_dir() -> Path:
    return Path(str(resources.files(__name__)))


@lru_cache(maxsize=None)
def index() -> tuple[dict, ...]:
    data = json.loads((corpus_dir() / "index.json").read_text(encoding="utf-8"))
    return tuple(data["examples"])


def names() -> list[str]:
    return [e["name"] for e in index()]


def entry(name: str) -> dict:
    for e in index():
        if e["name"] == name:
            return e
    raise KeyError(f"unknown example '{name}'; available: {', '.join(names())}")


def path(name: str) -> Path:
    return corpus_dir() / entry(name)["file"]
