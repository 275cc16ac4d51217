"""Bundled example programs, usable from tests and documentation."""

from importlib import resources

__all__ = ["msc_is_source", "tiny_source"]


def _read(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def msc_is_source() -> str:
    """Source of the five-module Master's conversion program example."""
    return _read("msc_is.curriculum")


def tiny_source() -> str:
    """Source of a two-module single-path program, handy for tests."""
    return _read("tiny.curriculum")
