"""Command-line surface.

Subcommands: ``generate`` (committee-guided campaign), ``baseline``
(random/ART suites), ``evaluate`` (mutation kills for a labeled suite),
``compare`` (all three strategies plus rank-sum report), ``infer`` (model
inference dump), ``fixtures`` (builtin catalog).

Exit codes: 0 success, 1 usage/validation error, 2 runtime or SUT error.
Progress goes to stderr; data artifacts are written only under the
directories and files named by output flags, byte-reproducibly for a fixed
``--seed``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from pathlib import Path

from . import generators, gp, harness, qbc, spec_io, sut
from .generators import ArtConfig
from .gp import Execution, GpConfig
from .kernel import backend_name
from .qbc import TbcConfig

# paper-scale defaults live in the config dataclasses; this preset trades
# population and iteration count for desk-scale runtimes
DESK_PRESET = {
    "iterations": 30,
    "gp": {"population_size": 200, "max_generations": 50},
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_code_for_usage(message))

    @staticmethod
    def exit_code_for_usage(message) -> int:
        print(f"error: {message}", file=sys.stderr)
        return 1


def _progress(msg: str):
    print(msg, file=sys.stderr)


# --- configuration resolution -------------------------------------------------

def _config_dict(cfg: TbcConfig, seed: int, art: ArtConfig, warm_start: bool) -> dict:
    return {
        "seed": seed,
        "warm_start": warm_start,
        "iterations": cfg.iterations,
        "tests_per_iteration": cfg.tests_per_iteration,
        "random_pool_size": cfg.random_pool_size,
        "committee_size": cfg.committee_size,
        "substitution_value": cfg.substitution_value,
        "gp": dataclasses.asdict(cfg.gp),
        "art": dataclasses.asdict(art),
    }


def _merge(base: dict, overlay: dict, where: str):
    for key, value in overlay.items():
        if key not in base:
            raise ValueError(f"{where}: unknown configuration key {key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"{where}: {key!r} must be an object")
            _merge(base[key], value, f"{where}.{key}")
        else:
            base[key] = value


def resolve_config(args) -> tuple[TbcConfig, int, ArtConfig, bool]:
    """defaults < preset < config file < explicit flags."""
    resolved = _config_dict(TbcConfig(), seed=0, art=ArtConfig(), warm_start=False)
    if getattr(args, "preset", None) == "desk":
        _merge(resolved, DESK_PRESET, "preset")
    config_path = getattr(args, "config", None)
    if config_path:
        doc = json.loads(Path(config_path).read_text())
        if isinstance(doc, dict) and "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]  # accept a previous campaign log directly
        _merge(resolved, doc, str(config_path))

    flag_map = {
        "iterations": "iterations",
        "per_iteration": "tests_per_iteration",
        "pool": "random_pool_size",
        "committee": "committee_size",
        "substitution": "substitution_value",
        "seed": "seed",
    }
    gp_flag_map = {
        "population": "population_size",
        "crossover_rate": "crossover_rate",
        "mutation_rate": "mutation_rate",
        "max_depth": "max_depth",
        "tournament": "tournament_size",
        "max_generations": "max_generations",
        "stagnation": "stagnation_window",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            resolved[key] = value
    for flag, key in gp_flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            resolved["gp"][key] = value
    if getattr(args, "art_candidates", None) is not None:
        resolved["art"]["candidate_set_size"] = args.art_candidates
    if getattr(args, "warm_start", None) is not None:
        resolved["warm_start"] = args.warm_start

    cfg = TbcConfig(
        iterations=resolved["iterations"],
        tests_per_iteration=resolved["tests_per_iteration"],
        random_pool_size=resolved["random_pool_size"],
        committee_size=resolved["committee_size"],
        substitution_value=resolved["substitution_value"],
        gp=GpConfig(**resolved["gp"]),
    )
    art = ArtConfig(**resolved["art"])
    return cfg, int(resolved["seed"]), art, bool(resolved["warm_start"])


def _add_config_options(p: argparse.ArgumentParser, gp_only: bool = False):
    p.add_argument("--seed", type=int, default=None,
                   help="fixes all randomness (default 0)")
    p.add_argument("--config", metavar="FILE",
                   help="JSON config (or a previous campaign log); flags win")
    p.add_argument("--preset", choices=["paper", "desk"], default=None,
                   help="desk: population 200, 30 iterations, 50 generations")
    g = p.add_argument_group("model inference")
    g.add_argument("--population", type=int, default=None)
    g.add_argument("--crossover-rate", type=float, default=None, dest="crossover_rate")
    g.add_argument("--mutation-rate", type=float, default=None, dest="mutation_rate")
    g.add_argument("--max-depth", type=int, default=None, dest="max_depth")
    g.add_argument("--tournament", type=int, default=None)
    g.add_argument("--max-generations", type=int, default=None, dest="max_generations")
    g.add_argument("--stagnation", type=int, default=None)
    if gp_only:
        return
    c = p.add_argument_group("campaign")
    c.add_argument("--iterations", type=int, default=None)
    c.add_argument("--per-iteration", type=int, default=None, dest="per_iteration")
    c.add_argument("--pool", type=int, default=None, help="random pool size")
    c.add_argument("--committee", type=int, default=None)
    c.add_argument("--substitution", type=float, default=None,
                   help="replacement for non-finite predictions")
    c.add_argument("--warm-start", action="store_true", default=None,
                   dest="warm_start",
                   help="seed each iteration's population from the last one")


def _add_sut_options(p: argparse.ArgumentParser):
    p.add_argument("--spec", metavar="FILE", help="interface specification (JSON)")
    p.add_argument("--fixture", metavar="ID", help="builtin fixture instead of --spec")
    p.add_argument("--timeout", type=float, default=sut.DEFAULT_TIMEOUT,
                   help="external command timeout in seconds")


def _load_sut(args) -> tuple[spec_io.InterfaceSpec, object]:
    if bool(args.spec) == bool(args.fixture):
        raise ValueError("exactly one of --spec and --fixture is required")
    if args.fixture:
        return sut.interface_spec(args.fixture), sut.BuiltinSut(args.fixture)
    path = Path(args.spec)
    spec = spec_io.parse_interface_spec(path.read_text())
    executor = sut.ExternalSut(spec, timeout=args.timeout,
                               base_dir=str(path.resolve().parent))
    return spec, executor


def _load_seed_tests(path: str, spec) -> list[tuple]:
    return spec_io.parse_test_inputs(Path(path).read_text(), spec)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _labeled_executions(args, spec, executor, inputs) -> list[Execution]:
    """Label inputs from an --outputs file when given, else by running the SUT."""
    outputs_path = getattr(args, "outputs", None)
    if outputs_path:
        tokens = Path(outputs_path).read_text().split()
        if len(tokens) != len(inputs):
            raise ValueError(
                f"--outputs has {len(tokens)} values for {len(inputs)} tests"
            )
        return [Execution(tuple(u), float(t)) for u, t in zip(inputs, tokens)]
    return [Execution(tuple(u), executor(u)) for u in inputs]


# --- subcommands ---------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg, seed, art, warm_start = resolve_config(args)
    spec, executor = _load_sut(args)
    seeds = _load_seed_tests(args.tests, spec)
    if isinstance(executor, sut.ExternalSut):
        sut.verify_deterministic(executor, seeds[:1])
    rng = random.Random(seed)
    records = []

    def observe(rec):
        records.append(rec)
        _progress(
            f"iteration {rec.iteration}/{cfg.iterations}: "
            f"best error {rec.best_fitness_error:.6g}, "
            f"suite size {rec.suite_size}"
        )

    executions = qbc.run_tbc(spec, seeds, cfg, executor, rng,
                             warm_start=warm_start, observer=observe)
    out = Path(args.out)
    _write(out / "suite.txt", spec_io.write_test_inputs([e.input for e in executions]))
    _write(out / "outputs.txt", "".join(repr(e.observed) + "\n" for e in executions))
    log = {
        "backend": backend_name(),
        "config": _config_dict(cfg, seed, art, warm_start),
        "iterations": [r.to_dict() for r in records],
    }
    _write(out / "campaign.json", _json_text(log))
    _progress(f"wrote {len(executions)} executions to {out}")
    return 0


def cmd_baseline(args) -> int:
    cfg, seed, art, _ = resolve_config(args)
    spec, executor = _load_sut(args)
    seeds = _load_seed_tests(args.tests, spec)
    budget = len(seeds) + cfg.iterations * cfg.tests_per_iteration
    rng = random.Random(seed)
    suite = generators.generate_suite(args.strategy, spec, seeds, budget, art, rng)
    executions = [Execution(tuple(u), executor(u)) for u in suite]
    out = Path(args.out)
    _write(out / "suite.txt", spec_io.write_test_inputs([e.input for e in executions]))
    _write(out / "outputs.txt", "".join(repr(e.observed) + "\n" for e in executions))
    log = {
        "strategy": args.strategy,
        "config": _config_dict(cfg, seed, art, False),
        "suite_size": len(executions),
    }
    _write(out / "campaign.json", _json_text(log))
    _progress(f"wrote {len(executions)} executions to {out}")
    return 0


def cmd_evaluate(args) -> int:
    spec = sut.interface_spec(args.fixture)
    executor = sut.BuiltinSut(args.fixture)
    inputs = _load_seed_tests(args.suite, spec)
    executions = _labeled_executions(args, spec, executor, inputs)
    records = harness.kills(executions, args.fixture, tolerance=args.tolerance)
    killed = sum(1 for r in records if r.killed)
    report = {
        "fixture": args.fixture,
        "tolerance": args.tolerance,
        "suite_size": len(executions),
        "killed": killed,
        "mutants": [
            {
                "id": r.mutant_id,
                "description": r.description,
                "killed": r.killed,
                "witness": list(r.witness) if r.witness is not None else None,
            }
            for r in records
        ],
    }
    _write(Path(args.out), _json_text(report))
    _progress(f"killed {killed}/{len(records)} mutants; report at {args.out}")
    return 0


def cmd_compare(args) -> int:
    cfg, seed, art, _ = resolve_config(args)
    spec = sut.interface_spec(args.fixture)
    seeds = _load_seed_tests(args.tests, spec)
    rng_seeds = [seed + i for i in range(args.runs)]
    reports = harness.compare_strategies(
        args.fixture, seeds, cfg, args.runs, rng_seeds, art=art,
        tolerance=args.tolerance, jobs=args.jobs,
        progress=lambda s, sd: _progress(f"finished {s} run (seed {sd})"),
    )
    csv_text, summary = harness.emit_report(reports)
    out = Path(args.out)
    _write(out / "report.csv", csv_text)
    summary_doc = {
        "fixture": args.fixture,
        "runs": args.runs,
        "config": _config_dict(cfg, seed, art, False),
        **summary,
    }
    _write(out / "summary.json", _json_text(summary_doc))
    means = {
        name: s["final_kills_mean"] for name, s in summary["strategies"].items()
    }
    _progress(f"final mean kills: {means}")
    return 0


def cmd_infer(args) -> int:
    cfg, seed, _, _ = resolve_config(args)
    spec, executor = _load_sut(args)
    inputs = _load_seed_tests(args.tests, spec)
    executions = _labeled_executions(args, spec, executor, inputs)
    rng = random.Random(seed)
    pop = gp.infer(executions, cfg.gp, spec, rng,
                   substitution_value=cfg.substitution_value)
    doc = {
        "config": dataclasses.asdict(cfg.gp),
        "seed": seed,
        "generations": pop.generation,
        "models": gp.dump_models(pop, top_k=args.top),
    }
    _write(Path(args.out), _json_text(doc))
    _progress(
        f"best error {pop.best.fitness_error:.6g} after "
        f"{pop.generation} generations; models at {args.out}"
    )
    return 0


def cmd_fixtures(args) -> int:
    for entry in sut.catalog():
        params = ", ".join(
            f"{p.name}:{p.kind.value}"
            + (f"[{p.min},{p.max}]" if p.min is not None else "")
            for p in entry.parameters
        )
        print(f"{entry.id}: {entry.description}")
        print(f"  parameters: {params}")
        print(f"  mutants: {len(entry.mutants)}")
        if args.verbose:
            for i, desc in enumerate(entry.mutants):
                print(f"    m{i:02d}: {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tbcgen",
        description="Black-box test generation guided by committee disagreement.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("generate", help="run a committee-guided campaign")
    _add_sut_options(p)
    p.add_argument("--tests", required=True, help="seed test-input file")
    p.add_argument("--out", default="tbcgen_out", help="output directory")
    _add_config_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("baseline", help="generate a random or ART suite")
    p.add_argument("--strategy", required=True, choices=["random", "art"])
    _add_sut_options(p)
    p.add_argument("--tests", required=True, help="seed test-input file")
    p.add_argument("--out", default="tbcgen_out", help="output directory")
    p.add_argument("--art-candidates", type=int, default=None, dest="art_candidates")
    _add_config_options(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="count mutant kills for a labeled suite")
    p.add_argument("--fixture", required=True)
    p.add_argument("--suite", required=True, help="test-input file")
    p.add_argument("--outputs", help="observed outputs, one per line "
                                     "(default: execute the original fixture)")
    p.add_argument("--tolerance", type=float, default=harness.DEFAULT_KILL_TOLERANCE)
    p.add_argument("--out", default="kills.json", help="kill report file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="run all three strategies and report")
    p.add_argument("--fixture", required=True)
    p.add_argument("--tests", required=True, help="seed test-input file")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=harness.DEFAULT_KILL_TOLERANCE)
    p.add_argument("--jobs", type=int, default=1, help="parallel campaign runs")
    p.add_argument("--art-candidates", type=int, default=None, dest="art_candidates")
    p.add_argument("--out", default="tbcgen_out", help="output directory")
    _add_config_options(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("infer", help="infer models and dump the top k")
    _add_sut_options(p)
    p.add_argument("--tests", required=True, help="test-input file")
    p.add_argument("--outputs", help="observed outputs, one per line "
                                     "(default: execute the SUT)")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--out", default="models.json", help="model dump file")
    _add_config_options(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("fixtures", help="list the builtin fixture catalog")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help exits 0
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (spec_io.SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except sut.SutExecutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():  # console-script entry point
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
