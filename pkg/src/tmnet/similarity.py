"""Stream similarity metrics with a small pluggable registry."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import engine
from .errors import UnknownMetric

DEFAULT_THRESHOLD = 0.8


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance between two token sequences."""
    index: dict = {}
    ea = [index.setdefault(t, len(index)) for t in a]
    eb = [index.setdefault(t, len(index)) for t in b]
    return engine.levenshtein(ea, eb)


def edit_similarity(a: Sequence, b: Sequence) -> float:
    """Normalized edit similarity in [0, 1].

    Defined as 1 - distance / max(len(a), len(b)); two empty streams are
    perfectly similar.
    """
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


_METRICS: dict = {"edit": edit_similarity}


def register_metric(name: str, fn: Callable[[Sequence, Sequence], float]) -> None:
    """Add a metric; it must map two token sequences into [0, 1]."""
    _METRICS[name] = fn


def get_metric(name: str) -> Callable[[Sequence, Sequence], float]:
    try:
        return _METRICS[name]
    except KeyError:
        raise UnknownMetric(
            f"no metric {name!r}; registered: {sorted(_METRICS)}"
        ) from None


def metric_names() -> list:
    return sorted(_METRICS)


@dataclass(frozen=True)
class SimilarityConfig:
    """Which metric to use and the verdict threshold."""

    metric: str = "edit"
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        get_metric(self.metric)
