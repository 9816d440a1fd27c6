"""tbcgen: black-box test generation for numeric programs.

Infers committees of candidate behavioral models with strongly-typed
genetic programming and, at each iteration, executes the candidate inputs
the committee disagrees about most. Ships random and adaptive-random
baselines, builtin fixture programs with seeded mutants, and a desk-scale
mutation-analysis harness for comparing the three strategies.
"""

from .spec_io import (
    InterfaceSpec,
    OutputSpec,
    ParamSpec,
    SpecError,
    SpecFormatError,
    SpecValidationError,
    TestInputError,
    ValueKind,
    parse_interface_spec,
    parse_test_inputs,
    write_test_inputs,
)
from .expr import EvalResult, evaluate, random_tree, render
from .gp import Execution, GpConfig, Population, ScoredIndividual, fitness, infer
from .qbc import Committee, TbcConfig, mad, run_tbc, sanitize, utility
from .generators import ArtConfig, art_select, generate_suite, sample_random_input
from .sut import BuiltinSut, ExternalSut, SutExecutionError, catalog, execute
from .harness import CampaignReport, KillRecord, emit_report, kills, rank_sum, run_campaign

__version__ = "0.1.0"

__all__ = [
    "ArtConfig",
    "BuiltinSut",
    "CampaignReport",
    "Committee",
    "EvalResult",
    "Execution",
    "ExternalSut",
    "GpConfig",
    "InterfaceSpec",
    "KillRecord",
    "OutputSpec",
    "ParamSpec",
    "Population",
    "ScoredIndividual",
    "SpecError",
    "SpecFormatError",
    "SpecValidationError",
    "SutExecutionError",
    "TbcConfig",
    "TestInputError",
    "ValueKind",
    "art_select",
    "catalog",
    "emit_report",
    "evaluate",
    "execute",
    "fitness",
    "generate_suite",
    "infer",
    "kills",
    "mad",
    "parse_interface_spec",
    "parse_test_inputs",
    "random_tree",
    "rank_sum",
    "render",
    "run_campaign",
    "run_tbc",
    "sample_random_input",
    "sanitize",
    "utility",
    "write_test_inputs",
    "__version__",
]
