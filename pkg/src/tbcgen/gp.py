"""Strongly-typed genetic-programming inference of behavioral models.

A population of expression trees is evolved to fit observed executions of
the program under test. Selection is elitist tournament selection; variation
is subtree crossover at type-compatible node pairs and point mutation.
Fitness is the mean absolute error between sanitized predictions and
sanitized observations, where sanitization replaces non-finite doubles with
a large substitution constant (10,000,000 by default).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .expr import Call, Const, ExprTree, Var
from .kernel import run_program
from .program import EvalContext, compile_tree
from .spec_io import InterfaceSpec, ValueKind

SUBSTITUTION_VALUE = 10_000_000.0

# retries before a depth-violating crossover falls back to reproduction
_CROSSOVER_ATTEMPTS = 5


@dataclass(frozen=True)
class Execution:
    """One labeled data point: an input vector and the observed output."""

    input: tuple
    observed: float


@dataclass(frozen=True)
class GpConfig:
    population_size: int = 800
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    max_depth: int = 10
    tournament_size: int = 6
    max_generations: int = 100
    stagnation_window: int = 15

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if not (0.0 <= self.crossover_rate and 0.0 <= self.mutation_rate):
            raise ValueError("rates must be non-negative")
        if self.crossover_rate + self.mutation_rate > 1.0:
            raise ValueError("crossover_rate + mutation_rate must be <= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if not (1 <= self.tournament_size <= self.population_size):
            raise ValueError("tournament_size must be in [1, population_size]")
        if self.max_generations < 1 or self.stagnation_window < 1:
            raise ValueError("generation limits must be positive")


@dataclass(frozen=True)
class ScoredIndividual:
    tree: ExprTree
    fitness_error: float


@dataclass(frozen=True)
class Population:
    """Members sorted ascending by fitness error."""

    members: tuple[ScoredIndividual, ...]
    generation: int = 0

    @property
    def best(self) -> ScoredIndividual:
        return self.members[0]


def model_root_kind(spec: InterfaceSpec) -> ValueKind:
    """Trees predict the declared output: integer outputs get integer roots."""
    return spec.output.kind


class FitnessEvaluator:
    """Shared encoding of one training set, for scoring many trees.

    Observations are sanitized once; predictions are sanitized per tree.
    The evaluator asserts that no non-finite value survives sanitization.
    """

    def __init__(
        self,
        train: list[Execution],
        spec: InterfaceSpec,
        substitution_value: float = SUBSTITUTION_VALUE,
        eq_tolerance: float = expr.DEFAULT_EQ_TOLERANCE,
    ):
        if not train:
            raise ValueError("training set is empty")
        if not np.isfinite(substitution_value):
            raise ValueError("substitution_value must be finite")
        self.spec = spec
        self.substitution_value = float(substitution_value)
        self.eq_tolerance = eq_tolerance
        self.ctx = EvalContext(spec)
        self.x = self.ctx.encode_batch([e.input for e in train])
        observed = np.array([e.observed for e in train], dtype=np.float64)
        self.y = np.where(np.isfinite(observed), observed, self.substitution_value)
        assert np.isfinite(self.y).all()

    def error(self, tree: ExprTree) -> float:
        prog = compile_tree(tree, self.ctx, eq_tolerance=self.eq_tolerance)
        pred = run_program(prog.ops, prog.args, self.x, prog.stack_need)
        pred = np.where(np.isfinite(pred), pred, self.substitution_value)
        assert np.isfinite(pred).all()
        return float(np.abs(pred - self.y).mean())


def fitness(
    tree: ExprTree,
    train: list[Execution],
    spec: InterfaceSpec,
    substitution_value: float = SUBSTITUTION_VALUE,
) -> float:
    """Mean absolute error of a tree against a training set (lower is better)."""
    return FitnessEvaluator(train, spec, substitution_value).error(tree)


def tournament(pop: Population, k: int, rng: random.Random) -> ScoredIndividual:
    """Best of k members sampled without replacement (members are sorted,
    so the winner is the lowest sampled index)."""
    return pop.members[min(rng.sample(range(len(pop.members)), k))]


def subtree_crossover(
    a: ExprTree,
    b: ExprTree,
    max_depth: int,
    rng: random.Random,
) -> ExprTree:
    """Swap a subtree of ``a`` for a type-compatible subtree of ``b``.

    The crossover point is uniform over type-compatible node pairs. If the
    child would exceed max_depth the draw is retried a few times, after
    which the parent is reproduced unchanged.
    """
    nodes_a: dict[ValueKind, list] = {k: [] for k in expr.KIND_ORDER}
    nodes_b: dict[ValueKind, list] = {k: [] for k in expr.KIND_ORDER}
    for path, node in expr.iter_nodes(a):
        nodes_a[expr.result_kind(node)].append(path)
    for path, node in expr.iter_nodes(b):
        nodes_b[expr.result_kind(node)].append(path)
    total = sum(len(nodes_a[k]) * len(nodes_b[k]) for k in expr.KIND_ORDER)
    if total == 0:
        return a
    for _ in range(_CROSSOVER_ATTEMPTS):
        t = rng.randrange(total)
        for k in expr.KIND_ORDER:
            block = len(nodes_a[k]) * len(nodes_b[k])
            if t < block:
                i, j = divmod(t, len(nodes_b[k]))
                child = expr.replace_at(a, nodes_a[k][i], expr.subtree_at(b, nodes_b[k][j]))
                break
            t -= block
        if expr.depth(child) <= max_depth:
            return child
    return a


def point_mutation(
    tree: ExprTree,
    spec: InterfaceSpec,
    max_depth: int,
    rng: random.Random,
) -> ExprTree:
    """Mutate one uniformly chosen node.

    Terminals get their value changed (ephemeral constants are resampled,
    other terminals are redrawn); a non-terminal is replaced by a fresh
    random subtree of the same kind within the remaining depth budget.
    """
    nodes = list(expr.iter_nodes(tree))
    path, node = nodes[rng.randrange(len(nodes))]
    if isinstance(node, Call):
        budget = max(max_depth - len(path), 1)
        replacement = expr.random_tree(node.op.result_kind, budget, spec, rng)
    elif isinstance(node, Const) and node.ephemeral:
        if node.kind is ValueKind.DOUBLE:
            replacement = Const(rng.uniform(*expr.EPHEMERAL_RANGE), node.kind, ephemeral=True)
        else:
            replacement = Const(rng.choice(expr.EPHEMERAL_INTEGERS), node.kind, ephemeral=True)
    else:
        kind = expr.result_kind(node)
        replacement = expr.draw_terminal(kind, spec, rng)
    return expr.replace_at(tree, path, replacement)


def evolve_generation(
    pop: Population,
    train: list[Execution],
    cfg: GpConfig,
    spec: InterfaceSpec,
    rng: random.Random,
    evaluator: FitnessEvaluator | None = None,
    substitution_value: float = SUBSTITUTION_VALUE,
) -> Population:
    """One elitist generation: keep the best member, fill the rest with
    tournament-selected offspring (crossover / mutation / reproduction)."""
    ev = evaluator or FitnessEvaluator(train, spec, substitution_value)
    trees: list[ExprTree] = [pop.best.tree]
    while len(trees) < cfg.population_size:
        r = rng.random()
        if r < cfg.crossover_rate:
            p1 = tournament(pop, cfg.tournament_size, rng)
            p2 = tournament(pop, cfg.tournament_size, rng)
            child = subtree_crossover(p1.tree, p2.tree, cfg.max_depth, rng)
        elif r < cfg.crossover_rate + cfg.mutation_rate:
            parent = tournament(pop, cfg.tournament_size, rng)
            child = point_mutation(parent.tree, spec, cfg.max_depth, rng)
        else:
            child = tournament(pop, cfg.tournament_size, rng).tree
        trees.append(child)
    scored = sorted(
        (ScoredIndividual(t, ev.error(t)) for t in trees),
        key=lambda s: s.fitness_error,
    )
    return Population(tuple(scored), pop.generation + 1)


def infer(
    train: list[Execution],
    cfg: GpConfig,
    spec: InterfaceSpec,
    rng: random.Random,
    substitution_value: float = SUBSTITUTION_VALUE,
    initial_trees: list[ExprTree] | None = None,
    observer=None,
) -> Population:
    """Evolve a population against the training set.

    Stops when the best error hits zero, when it has not improved for
    ``stagnation_window`` generations, or at ``max_generations``. Per-
    generation best errors are non-increasing (asserted: elitism).
    """
    ev = FitnessEvaluator(train, spec, substitution_value)
    if initial_trees is not None:
        if len(initial_trees) != cfg.population_size:
            raise ValueError(
                f"initial population has {len(initial_trees)} trees, "
                f"config wants {cfg.population_size}"
            )
        trees = list(initial_trees)
    else:
        trees = expr.ramped_half_and_half(
            cfg.population_size, model_root_kind(spec), cfg.max_depth, spec, rng
        )
    scored = sorted(
        (ScoredIndividual(t, ev.error(t)) for t in trees),
        key=lambda s: s.fitness_error,
    )
    pop = Population(tuple(scored), 0)
    if observer:
        observer(pop)
    best_so_far = pop.best.fitness_error
    stagnant = 0
    while (
        pop.best.fitness_error > 0.0
        and pop.generation < cfg.max_generations
        and stagnant < cfg.stagnation_window
    ):
        nxt = evolve_generation(pop, train, cfg, spec, rng, evaluator=ev)
        assert nxt.best.fitness_error <= pop.best.fitness_error
        if nxt.best.fitness_error < best_so_far:
            best_so_far = nxt.best.fitness_error
            stagnant = 0
        else:
            stagnant += 1
        pop = nxt
        if observer:
            observer(pop)
    return pop


def pick_best(
    pop: Population,
    train: list[Execution],
    spec: InterfaceSpec,
    substitution_value: float = SUBSTITUTION_VALUE,
) -> ScoredIndividual:
    """The member with minimal error on ``train``; ties go to the smaller
    tree, then the earlier population index."""
    if not pop.members:
        raise ValueError("population is empty")
    ev = FitnessEvaluator(train, spec, substitution_value)
    best = None
    best_key = None
    for idx, member in enumerate(pop.members):
        err = ev.error(member.tree)
        key = (err, expr.size(member.tree), idx)
        if best_key is None or key < best_key:
            best_key = key
            best = ScoredIndividual(member.tree, err)
    return best


def committee_ranking(pop: Population) -> list[ScoredIndividual]:
    """Members ordered by (error, tree size, original index)."""
    return [
        m
        for _, m in sorted(
            enumerate(pop.members),
            key=lambda im: (im[1].fitness_error, expr.size(im[1].tree), im[0]),
        )
    ]


def dump_models(pop: Population, top_k: int = 10) -> list[dict]:
    """JSON-ready report of the top models (audit / walkthrough output)."""
    out = []
    for rank, m in enumerate(committee_ranking(pop)[:top_k]):
        out.append(
            {
                "rank": rank,
                "model": expr.render(m.tree),
                "fitness_error": m.fitness_error,
                "size": expr.size(m.tree),
                "depth": expr.depth(m.tree),
            }
        )
    return out
