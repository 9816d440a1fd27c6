"""Baseline input generation: uniform random and adaptive random testing.

Adaptive random testing (ART) repeatedly draws a fixed-size candidate set
and keeps the candidate whose minimum Euclidean distance to everything
already executed is largest. Distances treat integers as reals, booleans as
0/1, and unequal strings as distance 1 per coordinate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .spec_io import InterfaceSpec, ValueKind


@dataclass(frozen=True)
class ArtConfig:
    candidate_set_size: int = 10
    # min-max normalization of numeric coordinates (off: raw values,
    # matching the plain Euclidean-distance setup)
    normalize: bool = False

    def __post_init__(self):
        if self.candidate_set_size < 1:
            raise ValueError("candidate_set_size must be >= 1")


def sample_random_input(spec: InterfaceSpec, rng: random.Random) -> tuple:
    """One uniform draw per parameter: doubles on [min, max], integers on
    the inclusive range, booleans fair, strings over the enumeration."""
    values = []
    for p in spec.parameters:
        if p.kind is ValueKind.DOUBLE:
            values.append(rng.uniform(p.min, p.max))
        elif p.kind is ValueKind.INTEGER:
            values.append(rng.randint(p.min, p.max))
        elif p.kind is ValueKind.BOOLEAN:
            values.append(rng.random() < 0.5)
        else:
            values.append(p.values[rng.randrange(len(p.values))])
    return tuple(values)


def _spans(spec: InterfaceSpec) -> list[float]:
    spans = []
    for p in spec.parameters:
        if p.kind in (ValueKind.DOUBLE, ValueKind.INTEGER):
            spans.append(float(p.max) - float(p.min))
        else:
            spans.append(1.0)
    return spans


def distance(u, v, spec: InterfaceSpec, cfg: ArtConfig | None = None) -> float:
    """Euclidean distance over mixed coordinates."""
    cfg = cfg or ArtConfig()
    spans = _spans(spec) if cfg.normalize else None
    acc = 0.0
    for i, p in enumerate(spec.parameters):
        if p.kind in (ValueKind.DOUBLE, ValueKind.INTEGER):
            d = float(u[i]) - float(v[i])
            if spans is not None:
                d = d / spans[i] if spans[i] > 0.0 else 0.0
        else:
            d = 0.0 if u[i] == v[i] else 1.0
        acc += d * d
    return math.sqrt(acc)


def art_select(
    executed: list[tuple],
    candidates: list[tuple],
    spec: InterfaceSpec,
    cfg: ArtConfig | None = None,
) -> tuple:
    """The candidate maximizing the minimum distance to the executed set.

    With nothing executed yet, the first candidate wins; ties go to the
    lowest candidate index.
    """
    if not candidates:
        raise ValueError("candidate set must not be empty")
    if not executed:
        return candidates[0]
    best = candidates[0]
    best_score = min(distance(candidates[0], e, spec, cfg) for e in executed)
    for c in candidates[1:]:
        score = min(distance(c, e, spec, cfg) for e in executed)
        if score > best_score:
            best, best_score = c, score
    return best


def generate_suite(
    strategy: str,
    spec: InterfaceSpec,
    seed_tests: list[tuple],
    total_budget: int,
    cfg: ArtConfig | None = None,
    rng: random.Random | None = None,
) -> list[tuple]:
    """Extend the seed tests to ``total_budget`` inputs with the chosen
    baseline strategy ('random' or 'art')."""
    cfg = cfg or ArtConfig()
    if rng is None:
        raise ValueError("a seeded random source is required")
    suite = [tuple(t) for t in seed_tests]
    if total_budget < len(suite):
        raise ValueError(
            f"total_budget {total_budget} is below the seed count {len(suite)}"
        )
    if strategy == "random":
        while len(suite) < total_budget:
            suite.append(sample_random_input(spec, rng))
    elif strategy == "art":
        while len(suite) < total_budget:
            candidates = [
                sample_random_input(spec, rng)
                for _ in range(cfg.candidate_set_size)
            ]
            suite.append(art_select(suite, candidates, spec, cfg))
    else:
        raise ValueError(f"unknown strategy {strategy!r} (expected random or art)")
    return suite
