"""Comparative evaluation: mutation kills, campaigns, and rank-sum tests.

All three strategies (committee-guided, random, adaptive random) are run on
the same per-iteration budget so their kill trajectories are directly
comparable. A mutant counts as killed when some test input makes it differ
from the original beyond a relative tolerance or in finiteness class
(finite / +inf / -inf / NaN).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations as _combinations

from . import generators, qbc, sut
from .generators import ArtConfig
from .gp import Execution
from .qbc import TbcConfig

DEFAULT_KILL_TOLERANCE = 1e-9

STRATEGIES = ("tbc", "random", "art")


@dataclass(frozen=True)
class KillRecord:
    mutant_id: str
    description: str
    killed: bool
    witness: tuple | None

    def __post_init__(self):
        assert self.killed == (self.witness is not None)


@dataclass(frozen=True)
class PerIteration:
    iteration: int
    suite_size: int
    kills_cumulative: int
    best_fitness_error: float | None = None


@dataclass(frozen=True)
class CampaignReport:
    strategy: str
    seed: int
    per_iteration: tuple[PerIteration, ...]


def output_class(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return "finite"


def outputs_differ(original: float, mutant: float, tolerance: float) -> bool:
    """True when the mutant output is observably different from the
    original's: different finiteness class, or a relative gap beyond
    tolerance * max(1, |original|)."""
    co, cm = output_class(original), output_class(mutant)
    if co != cm:
        return True
    if co != "finite":
        return False
    return abs(mutant - original) > tolerance * max(1.0, abs(original))


def kills_against(
    tests: list[Execution],
    variants,
    tolerance: float = DEFAULT_KILL_TOLERANCE,
) -> list[KillRecord]:
    """Kill records for arbitrary (id, description, callable) variants.

    ``tests`` must be labeled against the original; each variant's callable
    maps an input vector to its output.
    """
    records = []
    for mutant_id, description, fn in variants:
        witness = None
        for e in tests:
            if outputs_differ(e.observed, float(fn(e.input)), tolerance):
                witness = e.input
                break
        records.append(
            KillRecord(
                mutant_id=mutant_id,
                description=description,
                killed=witness is not None,
                witness=witness,
            )
        )
    return records


def kills(
    tests: list[Execution],
    fixture_id: str,
    tolerance: float = DEFAULT_KILL_TOLERANCE,
) -> list[KillRecord]:
    """Which of the fixture's mutants are distinguished by the given tests."""
    f = sut.fixture(fixture_id)  # raises for unknown fixtures
    variants = [
        (f"m{idx:02d}", m.description, sut.BuiltinSut(fixture_id, idx))
        for idx, m in enumerate(f.mutants)
    ]
    return kills_against(tests, variants, tolerance)


def _kill_count(tests: list[Execution], fixture_id: str, tolerance: float) -> int:
    return sum(1 for r in kills(tests, fixture_id, tolerance) if r.killed)


def _run_one(
    strategy: str,
    fixture_id: str,
    seed_tests: list[tuple],
    cfg: TbcConfig,
    seed: int,
    art: ArtConfig,
    tolerance: float,
) -> CampaignReport:
    spec = sut.interface_spec(fixture_id)
    executor = sut.BuiltinSut(fixture_id)
    rng = random.Random(seed)
    rows: list[PerIteration] = []

    def row(iteration, executions, best_err=None):
        rows.append(
            PerIteration(
                iteration=iteration,
                suite_size=len(executions),
                kills_cumulative=_kill_count(executions, fixture_id, tolerance),
                best_fitness_error=best_err,
            )
        )

    if strategy == "tbc":
        records: list[qbc.IterationRecord] = []
        executions = qbc.run_tbc(
            spec, seed_tests, cfg, executor, rng, observer=records.append
        )
        n_seed = len(seed_tests)
        row(0, executions[:n_seed])
        for rec in records:
            prefix = executions[: n_seed + rec.iteration * cfg.tests_per_iteration]
            row(rec.iteration, prefix, rec.best_fitness_error)
    elif strategy in ("random", "art"):
        executions = [Execution(tuple(u), executor(u)) for u in seed_tests]
        row(0, executions)
        for iteration in range(1, cfg.iterations + 1):
            for _ in range(cfg.tests_per_iteration):
                if strategy == "random":
                    u = generators.sample_random_input(spec, rng)
                else:
                    candidates = [
                        generators.sample_random_input(spec, rng)
                        for _ in range(art.candidate_set_size)
                    ]
                    u = generators.art_select(
                        [e.input for e in executions], candidates, spec, art
                    )
                executions.append(Execution(u, executor(u)))
            row(iteration, executions)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    return CampaignReport(strategy=strategy, seed=seed, per_iteration=tuple(rows))


def run_campaign(
    strategy: str,
    fixture_id: str,
    seed_tests: list[tuple],
    cfg: TbcConfig,
    runs: int,
    rng_seeds,
    art: ArtConfig | None = None,
    tolerance: float = DEFAULT_KILL_TOLERANCE,
) -> list[CampaignReport]:
    """One report per seeded run of one strategy; all strategies draw the
    same per-iteration budget, so suite sizes line up across reports."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    rng_seeds = list(rng_seeds)
    if len(rng_seeds) < runs:
        raise ValueError(f"need {runs} seeds, got {len(rng_seeds)}")
    art = art or ArtConfig()
    return [
        _run_one(strategy, fixture_id, seed_tests, cfg, seed, art, tolerance)
        for seed in rng_seeds[:runs]
    ]


def compare_strategies(
    fixture_id: str,
    seed_tests: list[tuple],
    cfg: TbcConfig,
    runs: int,
    rng_seeds,
    art: ArtConfig | None = None,
    tolerance: float = DEFAULT_KILL_TOLERANCE,
    jobs: int = 1,
    progress=None,
) -> list[CampaignReport]:
    """All three strategies over the same seeds and budget."""
    art = art or ArtConfig()
    rng_seeds = list(rng_seeds)[:runs]
    tasks = [(strategy, seed) for strategy in STRATEGIES for seed in rng_seeds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(
                    _run_one, strategy, fixture_id, seed_tests, cfg, seed, art,
                    tolerance,
                )
                for strategy, seed in tasks
            ]
            reports = []
            for fut, (strategy, seed) in zip(futures, tasks):
                reports.append(fut.result())
                if progress:
                    progress(strategy, seed)
            return reports
    reports = []
    for strategy, seed in tasks:
        reports.append(
            _run_one(strategy, fixture_id, seed_tests, cfg, seed, art, tolerance)
        )
        if progress:
            progress(strategy, seed)
    return reports


# --- rank-sum test -----------------------------------------------------------

@dataclass(frozen=True)
class RankSumResult:
    u: float
    p_one_sided: float  # P(U_a <= u_observed): evidence that a runs smaller


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _exact_cdf(n: int, m: int, u_obs: int) -> float:
    """P(U <= u_obs) by counting rank arrangements (no ties).

    count[j][u] = number of ways to place j of the 'a' sample among the
    first positions with Mann-Whitney statistic u; standard recurrence.
    """
    max_u = n * m
    u_obs = min(u_obs, max_u)
    # f(i, j, u): ways to interleave i a's and j b's with statistic u
    prev = [[0] * (max_u + 1) for _ in range(m + 1)]
    for j in range(m + 1):
        prev[j][0] = 1  # no a's: statistic 0
    for i in range(1, n + 1):
        cur = [[0] * (max_u + 1) for _ in range(m + 1)]
        cur[0][0] = 1
        for j in range(1, m + 1):
            for u in range(max_u + 1):
                ways = cur[j - 1][u]  # largest element is a b
                if u >= j:
                    ways += prev[j][u - j]  # largest element is an a
                cur[j][u] = ways
        prev = cur
    total = math.comb(n + m, n)
    return sum(prev[m][: u_obs + 1]) / total


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def rank_sum(a, b) -> RankSumResult:
    """Mann-Whitney/Wilcoxon rank-sum with midrank ties.

    The statistic is U of the first sample. The one-sided p-value is
    P(U <= u): small when ``a`` tends below ``b``. Exact by enumeration for
    tie-free samples with n+m <= 12, normal approximation with tie and
    continuity correction otherwise.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    n, m = len(a), len(b)
    combined = a + b
    ranks = _midranks(combined)
    r_a = sum(ranks[:n])
    u = r_a - n * (n + 1) / 2.0

    has_ties = len(set(combined)) < len(combined)
    if not has_ties and n + m <= 12:
        return RankSumResult(u=u, p_one_sided=_exact_cdf(n, m, int(round(u))))

    big_n = n + m
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in combined:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_term += count**3 - count
    sigma_sq = (n * m / 12.0) * (big_n + 1.0 - tie_term / (big_n * (big_n - 1.0)))
    if sigma_sq <= 0.0:
        return RankSumResult(u=u, p_one_sided=0.5)  # everything tied
    z = (u + 0.5 - n * m / 2.0) / math.sqrt(sigma_sq)
    return RankSumResult(u=u, p_one_sided=_norm_cdf(z))


# --- reporting ---------------------------------------------------------------

CSV_HEADER = "strategy,seed,iteration,suite_size,kills,best_fitness_error"


def emit_report(reports: list[CampaignReport]) -> tuple[str, dict]:
    """Render campaign reports as (CSV text, JSON-ready summary).

    The CSV has one row per strategy x seed x iteration. The summary holds
    per-strategy final-kill means and pairwise one-sided rank-sum p-values
    in both directions (directional claims are reported, never asserted).
    """
    lines = [CSV_HEADER]
    for rep in reports:
        for row in rep.per_iteration:
            err = "" if row.best_fitness_error is None else repr(row.best_fitness_error)
            lines.append(
                f"{rep.strategy},{rep.seed},{row.iteration},"
                f"{row.suite_size},{row.kills_cumulative},{err}"
            )
    csv_text = "\n".join(lines) + "\n"

    by_strategy: dict[str, list[CampaignReport]] = {}
    for rep in reports:
        by_strategy.setdefault(rep.strategy, []).append(rep)

    strategies = {}
    finals: dict[str, list[int]] = {}
    for name, reps in by_strategy.items():
        fk = [rep.per_iteration[-1].kills_cumulative for rep in reps]
        finals[name] = fk
        strategies[name] = {
            "runs": len(reps),
            "final_kills": fk,
            "final_kills_mean": sum(fk) / len(fk),
        }

    pairwise = []
    for s1, s2 in _combinations(by_strategy, 2):
        less = rank_sum(finals[s1], finals[s2])
        greater = rank_sum(finals[s2], finals[s1])
        pairwise.append(
            {
                "a": s1,
                "b": s2,
                "u_a": less.u,
                "p_a_less_b": less.p_one_sided,
                "p_a_greater_b": greater.p_one_sided,
            }
        )
    return csv_text, {"strategies": strategies, "pairwise_rank_sum": pairwise}
