"""Bundled model documents used by the examples, tests, and docs."""

from __future__ import annotations

from importlib import resources

NAMES = (
    "arkticheskoe",
    "kruzensternskoe",
    "yamal_region",
    "arkticheskoe_multiset",
)


def fixture_path(name: str):
    """Filesystem path of a bundled fixture (without the .json suffix)."""
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {NAMES}")
    return resources.files(__name__) / f"{name}.json"


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")
