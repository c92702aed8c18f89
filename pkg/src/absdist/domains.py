"""Name-based lookup of the analysis domains."""

from __future__ import annotations

from absdist.groundness import Groundness
from absdist.sharing import Sharing

__all__ = ["get_domain", "DOMAINS"]

DOMAINS = ("gr", "share")


def get_domain(name: str, widen: int | None = None):
    if name == "gr":
        if widen is not None:
            raise ValueError("the groundness domain has no widening")
        return Groundness()
    if name == "share":
        return Sharing(widen)
    raise ValueError(f"unknown domain {name!r} (expected one of {', '.join(DOMAINS)})")
