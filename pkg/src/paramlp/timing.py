"""Per-phase wall-clock accounting."""

from __future__ import annotations

import time
from collections import defaultdict
from contextlib import contextmanager


class PhaseTimer:
    """Collects duration samples per named phase."""

    def __init__(self):
        self.samples: dict[str, list[float]] = defaultdict(list)

    def add(self, name: str, seconds: float) -> None:
        self.samples[name].append(seconds)

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.add(name, time.perf_counter() - start)

    def summary(self) -> dict[str, dict[str, float]]:
        out = {}
        for name, vals in sorted(self.samples.items()):
            out[name] = {
                "count": len(vals),
                "min": min(vals),
                "mean": sum(vals) / len(vals),
                "max": max(vals),
                "total": sum(vals),
            }
        return out


class Stopwatch:
    """Accumulates time across many short sections."""

    def __init__(self):
        self.total = 0.0

    @contextmanager
    def running(self):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.total += time.perf_counter() - start
