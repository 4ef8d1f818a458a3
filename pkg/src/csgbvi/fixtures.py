"""Bundled example models."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import Csg, load_csg


def names() -> list[str]:
    root = resources.files(__package__) / "models"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def path(name: str) -> Path:
    if not name.endswith(".json"):
        name += ".json"
    p = Path(str(resources.files(__package__) / "models" / name))
    if not p.exists():
        raise FileNotFoundError(f"no bundled model {name!r}")
    return p


def load(name: str) -> Csg:
    return load_csg(path(name))
