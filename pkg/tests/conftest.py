import random
from pathlib import Path

import pytest

from tbcgen import sut
from tbcgen.expr import Call, Const, D, OPERATOR_BY_NAME as OPS, Var
from tbcgen.gp import Execution
from tbcgen.spec_io import InterfaceSpec, OutputSpec, ParamSpec, ValueKind

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES_DIR = REPO_ROOT / "fixtures"

# the walkthrough seed suite (height weight), shipped as fixtures/bmi_seed.txt
BMI_SEED_VECTORS = [
    (1.7, 50.0),
    (1.8, 70.0),
    (1.9, 100.0),
    (1.7, 110.0),
    (0.0, 5.0),
    (5.0, 0.0),
]


@pytest.fixture
def bmi_spec() -> InterfaceSpec:
    return sut.interface_spec("bmi")


@pytest.fixture
def bmi_seed_vectors():
    return list(BMI_SEED_VECTORS)


@pytest.fixture
def bmi_train(bmi_seed_vectors):
    executor = sut.BuiltinSut("bmi")
    return [Execution(u, executor(u)) for u in bmi_seed_vectors]


def make_gp1():
    """Mult(weight,Exp(-1.1518922634307343)) from the walkthrough."""
    return Call(
        OPS["multiply"],
        (Var("weight", D), Call(OPS["exp"], (Const(-1.1518922634307343, D),))),
    )


def make_gp2():
    """Div(height,Exp(Sub(height,Log(weight)))) from the walkthrough."""
    return Call(
        OPS["divide"],
        (
            Var("height", D),
            Call(
                OPS["exp"],
                (
                    Call(
                        OPS["subtract"],
                        (Var("height", D), Call(OPS["log"], (Var("weight", D),))),
                    ),
                ),
            ),
        ),
    )


@pytest.fixture
def mixed_spec() -> InterfaceSpec:
    """A spec exercising all four parameter kinds."""
    return InterfaceSpec(
        command="mixed",
        parameters=(
            ParamSpec("a", ValueKind.DOUBLE, -100.0, 100.0),
            ParamSpec("b", ValueKind.DOUBLE, -2.0, 2.0),
            ParamSpec("n", ValueKind.INTEGER, -5, 5),
            ParamSpec("flag", ValueKind.BOOLEAN),
            ParamSpec("color", ValueKind.STRING, values=("red", "green", "blue")),
        ),
        output=OutputSpec("out", ValueKind.DOUBLE),
    )


@pytest.fixture
def seeded_rng():
    return random.Random(0xC0FFEE)
