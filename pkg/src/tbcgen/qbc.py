"""Committee-disagreement scoring and the iterative test-generation loop.

Each iteration infers a fresh population of models from all executions so
far, takes the fittest ``committee_size`` trees as the committee, draws a
pool of random candidate inputs, and repeatedly executes the candidate with
the largest mean absolute deviation (MAD) across the committee's sanitized
predictions. Non-finite predictions are substituted with a large constant
before any statistic sees them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import generators, gp
from .expr import DEFAULT_EQ_TOLERANCE, ExprTree, size as tree_size
from .gp import Execution, GpConfig, Population, SUBSTITUTION_VALUE
from .kernel import run_program
from .program import EvalContext, compile_tree
from .spec_io import InterfaceSpec
from .sut import SutExecutionError


@dataclass(frozen=True)
class TbcConfig:
    iterations: int = 60
    tests_per_iteration: int = 5
    random_pool_size: int = 1000
    committee_size: int = 10
    gp: GpConfig = field(default_factory=GpConfig)
    substitution_value: float = SUBSTITUTION_VALUE

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.tests_per_iteration < 1:
            raise ValueError("tests_per_iteration must be positive")
        if self.tests_per_iteration > self.random_pool_size:
            raise ValueError("tests_per_iteration must be <= random_pool_size")
        if not (1 <= self.committee_size <= self.gp.population_size):
            raise ValueError("committee_size must be in [1, population_size]")
        if not math.isfinite(self.substitution_value):
            raise ValueError("substitution_value must be finite")


@dataclass(frozen=True)
class Committee:
    """The fittest trees of one population, used to score candidate inputs."""

    models: tuple[ExprTree, ...]

    def __post_init__(self):
        if not self.models:
            raise ValueError("committee must contain at least one model")
        object.__setattr__(self, "models", tuple(self.models))

    def __len__(self) -> int:
        return len(self.models)

    @classmethod
    def from_population(cls, pop: Population, committee_size: int) -> "Committee":
        ranked = gp.committee_ranking(pop)
        return cls(tuple(m.tree for m in ranked[:committee_size]))


@dataclass(frozen=True)
class UtilityScore:
    input: tuple
    mad: float


def sanitize(x: float, substitution_value: float = SUBSTITUTION_VALUE) -> float:
    """Finite values pass through; +-infinity and NaN become the
    substitution value."""
    x = float(x)
    return x if math.isfinite(x) else float(substitution_value)


def mad(xs) -> float:
    """Mean absolute deviation around the mean: (1/n) * sum |x_i - mean|.

    Constant lists return exactly 0 (the rounded mean of [c, c, c] can land
    one ulp away from c); sums are compensated to keep translation
    invariance tight.
    """
    xs = [float(x) for x in xs]
    if not xs:
        raise ValueError("mad of an empty list")
    first = xs[0]
    if all(x == first for x in xs):
        return 0.0
    n = len(xs)
    m = math.fsum(xs) / n
    return math.fsum(abs(x - m) for x in xs) / n


class _CommitteeScorer:
    """Committee models compiled once, scored over many candidate inputs."""

    def __init__(self, committee: Committee, spec: InterfaceSpec, cfg: TbcConfig):
        self.ctx = EvalContext(spec)
        self.programs = [
            compile_tree(m, self.ctx, eq_tolerance=DEFAULT_EQ_TOLERANCE)
            for m in committee.models
        ]
        self.substitution_value = cfg.substitution_value

    def mads(self, inputs) -> list[float]:
        x = self.ctx.encode_batch(inputs)
        preds = np.vstack(
            [run_program(p.ops, p.args, x, p.stack_need) for p in self.programs]
        )
        preds = np.where(np.isfinite(preds), preds, self.substitution_value)
        assert np.isfinite(preds).all()  # sanitization totality
        return [mad(preds[:, j].tolist()) for j in range(preds.shape[1])]


def utility(
    committee: Committee,
    input_vector: tuple,
    spec: InterfaceSpec,
    cfg: TbcConfig | None = None,
) -> UtilityScore:
    """Disagreement of the committee about one input: the MAD of its
    sanitized predictions."""
    cfg = cfg or TbcConfig()
    scorer = _CommitteeScorer(committee, spec, cfg)
    return UtilityScore(tuple(input_vector), scorer.mads([input_vector])[0])


def select_next_tests(
    committee: Committee,
    pool: list[tuple],
    s: int,
    executor,
    spec: InterfaceSpec,
    cfg: TbcConfig | None = None,
) -> list[Execution]:
    """Pick and execute the s highest-MAD pool members, one at a time.

    Ties break toward the lowest pool index. Selected inputs are removed
    from ``pool`` in place. An execution failure aborts with the offending
    input attached.
    """
    cfg = cfg or TbcConfig()
    if len(pool) < s:
        raise ValueError(f"pool of {len(pool)} cannot supply {s} tests")
    scorer = _CommitteeScorer(committee, spec, cfg)
    scores = scorer.mads(pool)
    remaining = list(range(len(pool)))
    picked: list[Execution] = []
    for _ in range(s):
        best = remaining[0]
        for idx in remaining[1:]:
            if scores[idx] > scores[best]:
                best = idx
        u = pool[best]
        try:
            observed = float(executor(u))
        except SutExecutionError:
            raise
        except Exception as exc:
            raise SutExecutionError(f"executing selected input {u!r}: {exc}") from exc
        picked.append(Execution(tuple(u), observed))
        remaining.remove(best)
    pool[:] = [pool[i] for i in remaining]
    return picked


@dataclass(frozen=True)
class IterationRecord:
    """One campaign-log entry (no timing: logs are byte-reproducible)."""

    iteration: int
    best_fitness_error: float
    committee_size: int
    selected: tuple[tuple[tuple, float], ...]  # (input, mad) pairs
    suite_size: int

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "best_fitness_error": self.best_fitness_error,
            "committee_size": self.committee_size,
            "selected": [
                {"input": list(u), "mad": m} for u, m in self.selected
            ],
            "suite_size": self.suite_size,
        }


def run_tbc(
    spec: InterfaceSpec,
    seed_tests: list[tuple],
    cfg: TbcConfig,
    executor,
    rng: random.Random,
    warm_start: bool = False,
    observer=None,
) -> list[Execution]:
    """The full campaign loop.

    Executes the seed tests, then for each iteration: infer models from all
    executions so far, form the committee, draw a fresh random pool, and add
    the ``tests_per_iteration`` most-disputed inputs (executed) to the
    suite. Returns all executions in order; the final count is
    ``len(seed_tests) + iterations * tests_per_iteration``.
    """
    if not seed_tests:
        raise ValueError("seed test set must not be empty")
    executions: list[Execution] = []
    for u in seed_tests:
        u = tuple(u)
        try:
            observed = float(executor(u))
        except SutExecutionError:
            raise
        except Exception as exc:
            raise SutExecutionError(f"executing seed input {u!r}: {exc}") from exc
        executions.append(Execution(u, observed))

    prev_trees: list[ExprTree] | None = None
    for iteration in range(1, cfg.iterations + 1):
        pop = gp.infer(
            executions,
            cfg.gp,
            spec,
            rng,
            substitution_value=cfg.substitution_value,
            initial_trees=prev_trees,
        )
        committee = Committee.from_population(pop, cfg.committee_size)
        pool = [
            generators.sample_random_input(spec, rng)
            for _ in range(cfg.random_pool_size)
        ]
        scorer = _CommitteeScorer(committee, spec, cfg)
        picked = select_next_tests(committee, pool, cfg.tests_per_iteration,
                                   executor, spec, cfg)
        executions.extend(picked)
        if observer:
            selected = tuple(
                (e.input, scorer.mads([e.input])[0]) for e in picked
            )
            observer(
                IterationRecord(
                    iteration=iteration,
                    best_fitness_error=pop.best.fitness_error,
                    committee_size=len(committee),
                    selected=selected,
                    suite_size=len(executions),
                )
            )
        prev_trees = [m.tree for m in pop.members] if warm_start else None
    return executions
