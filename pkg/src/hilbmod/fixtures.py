"""Shipped scene fixtures, addressable by name."""
from __future__ import annotations

from importlib import resources

from .scene import Scene, parse_scene

FIXTURES = ("kol17", "fixture-b", "fixture-c", "fixture-d", "rotated-automorphism")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("hilbmod").joinpath("fixtures", f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Scene:
    return parse_scene(fixture_text(name))
