"""Command-line surface: subcommands, exit codes, reproducibility."""

import json
import shutil

import pytest

from tbcgen.cli import main

from conftest import FIXTURES_DIR

DESK_FLAGS = [
    "--population", "30", "--max-generations", "3", "--stagnation", "2",
    "--tournament", "3", "--committee", "5",
]


@pytest.fixture
def bmi_dir(tmp_path):
    """A scratch copy of the shipped fixture files."""
    for name in ("bmi.json", "bmi_seed.txt", "bmi.sh"):
        shutil.copy(FIXTURES_DIR / name, tmp_path / name)
    (tmp_path / "bmi.sh").chmod(0o755)
    return tmp_path


def read_outputs(root):
    return {
        "suite": (root / "suite.txt").read_text(),
        "outputs": (root / "outputs.txt").read_text(),
        "log": (root / "campaign.json").read_text(),
    }


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert main(["fixtures", "--wat"]) == 1

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        code = main([
            "generate", "--fixture", "bmi",
            "--tests", str(tmp_path / "nope.txt"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 2

    def test_invalid_spec_is_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"command": "x", "parameters": [], "output": []}')
        tests = tmp_path / "t.txt"
        tests.write_text("1 2\n")
        code = main([
            "generate", "--spec", str(bad), "--tests", str(tests),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 1

    def test_spec_and_fixture_are_mutually_exclusive(self, tmp_path):
        tests = tmp_path / "t.txt"
        tests.write_text("1 2\n")
        code = main([
            "generate", "--fixture", "bmi", "--spec", "x.json",
            "--tests", str(tests), "--out", str(tmp_path / "out"),
        ])
        assert code == 1

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0


class TestFixturesCommand:
    def test_lists_catalog(self, capsys):
        assert main(["fixtures"]) == 0
        out = capsys.readouterr().out
        for fixture_id in ("bmi", "piecewise", "poly3", "binom_small"):
            assert fixture_id in out

    def test_verbose_lists_mutants(self, capsys):
        assert main(["fixtures", "--verbose"]) == 0
        out = capsys.readouterr().out
        assert "m00" in out and "square dropped" in out


class TestGenerate:
    def test_walkthrough_shape_external(self, bmi_dir, capsys):
        """One iteration, one new test, pool of three: a 7-line suite."""
        out = bmi_dir / "out"
        code = main([
            "generate", "--spec", str(bmi_dir / "bmi.json"),
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "1", "--per-iteration", "1", "--pool", "3",
            "--seed", "7", *DESK_FLAGS,
            "--out", str(out),
        ])
        assert code == 0
        suite_lines = (out / "suite.txt").read_text().strip().splitlines()
        assert len(suite_lines) == 7
        assert suite_lines[0] == "1.7 50.0"
        outputs = (out / "outputs.txt").read_text().strip().splitlines()
        assert len(outputs) == 7
        log = json.loads((out / "campaign.json").read_text())
        assert log["config"]["seed"] == 7
        assert len(log["iterations"]) == 1

    def test_byte_identical_reruns(self, bmi_dir):
        args = [
            "generate", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "2", "--per-iteration", "2", "--pool", "10",
            "--seed", "11", *DESK_FLAGS,
        ]
        a_dir, b_dir = bmi_dir / "a", bmi_dir / "b"
        assert main(args + ["--out", str(a_dir)]) == 0
        assert main(args + ["--out", str(b_dir)]) == 0
        assert read_outputs(a_dir) == read_outputs(b_dir)

    def test_different_seeds_differ(self, bmi_dir):
        base = [
            "generate", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "1", "--per-iteration", "2", "--pool", "10",
            *DESK_FLAGS,
        ]
        assert main(base + ["--seed", "1", "--out", str(bmi_dir / "s1")]) == 0
        assert main(base + ["--seed", "2", "--out", str(bmi_dir / "s2")]) == 0
        assert (bmi_dir / "s1" / "suite.txt").read_text() != (
            bmi_dir / "s2" / "suite.txt"
        ).read_text()

    def test_rerun_from_logged_config(self, bmi_dir):
        """The campaign log doubles as a config file and reproduces itself."""
        out1 = bmi_dir / "r1"
        args = [
            "generate", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "1", "--per-iteration", "2", "--pool", "8",
            "--seed", "23", *DESK_FLAGS, "--out", str(out1),
        ]
        assert main(args) == 0
        out2 = bmi_dir / "r2"
        code = main([
            "generate", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--config", str(out1 / "campaign.json"),
            "--out", str(out2),
        ])
        assert code == 0
        assert read_outputs(out1) == read_outputs(out2)


class TestBaseline:
    @pytest.mark.parametrize("strategy", ["random", "art"])
    def test_suite_budget(self, bmi_dir, strategy):
        out = bmi_dir / f"base-{strategy}"
        code = main([
            "baseline", "--strategy", strategy, "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "3", "--per-iteration", "2", "--seed", "5",
            "--out", str(out),
        ])
        assert code == 0
        lines = (out / "suite.txt").read_text().strip().splitlines()
        assert len(lines) == 6 + 3 * 2

    def test_deterministic(self, bmi_dir):
        args = [
            "baseline", "--strategy", "art", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--iterations", "2", "--per-iteration", "3", "--seed", "9",
        ]
        assert main(args + ["--out", str(bmi_dir / "x")]) == 0
        assert main(args + ["--out", str(bmi_dir / "y")]) == 0
        assert read_outputs(bmi_dir / "x") == read_outputs(bmi_dir / "y")


class TestEvaluate:
    def test_kill_report(self, bmi_dir):
        suite = bmi_dir / "suite.txt"
        suite.write_text("1.7 50\n1.9 80\n")
        out = bmi_dir / "kills.json"
        code = main([
            "evaluate", "--fixture", "bmi", "--suite", str(suite),
            "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["fixture"] == "bmi"
        assert report["suite_size"] == 2
        assert report["killed"] >= 10
        assert len(report["mutants"]) == 11
        assert all(
            (m["witness"] is not None) == m["killed"] for m in report["mutants"]
        )

    def test_outputs_file_used_for_labels(self, bmi_dir):
        suite = bmi_dir / "suite.txt"
        suite.write_text("1.7 50\n")
        outputs = bmi_dir / "outputs.txt"
        outputs.write_text("17.301038062283737\n")
        out = bmi_dir / "kills.json"
        code = main([
            "evaluate", "--fixture", "bmi", "--suite", str(suite),
            "--outputs", str(outputs), "--out", str(out),
        ])
        assert code == 0

    def test_outputs_length_mismatch(self, bmi_dir):
        suite = bmi_dir / "suite.txt"
        suite.write_text("1.7 50\n1.8 60\n")
        outputs = bmi_dir / "outputs.txt"
        outputs.write_text("17.3\n")
        assert main([
            "evaluate", "--fixture", "bmi", "--suite", str(suite),
            "--outputs", str(outputs), "--out", str(bmi_dir / "k.json"),
        ]) == 1


class TestCompare:
    def test_small_campaign_report(self, bmi_dir):
        out = bmi_dir / "cmp"
        code = main([
            "compare", "--fixture", "poly3",
            "--tests", str(write_poly_seed(bmi_dir)),
            "--runs", "2", "--iterations", "2", "--per-iteration", "1",
            "--pool", "20", "--seed", "1", *DESK_FLAGS,
            "--out", str(out),
        ])
        assert code == 0
        csv_lines = (out / "report.csv").read_text().strip().splitlines()
        assert csv_lines[0].startswith("strategy,seed,iteration")
        assert len(csv_lines) - 1 == 3 * 2 * 3  # strategies x runs x (i+1)
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["strategies"]) == {"tbc", "random", "art"}
        assert len(summary["pairwise_rank_sum"]) == 3

    def test_compare_deterministic(self, bmi_dir):
        args = [
            "compare", "--fixture", "poly3",
            "--tests", str(write_poly_seed(bmi_dir)),
            "--runs", "2", "--iterations", "1", "--per-iteration", "1",
            "--pool", "10", "--seed", "3", *DESK_FLAGS,
        ]
        assert main(args + ["--out", str(bmi_dir / "c1")]) == 0
        assert main(args + ["--out", str(bmi_dir / "c2")]) == 0
        assert (bmi_dir / "c1" / "report.csv").read_text() == (
            bmi_dir / "c2" / "report.csv"
        ).read_text()
        assert (bmi_dir / "c1" / "summary.json").read_text() == (
            bmi_dir / "c2" / "summary.json"
        ).read_text()


class TestInfer:
    def test_dumps_models(self, bmi_dir):
        out = bmi_dir / "models.json"
        code = main([
            "infer", "--fixture", "bmi",
            "--tests", str(bmi_dir / "bmi_seed.txt"),
            "--seed", "4", "--top", "5", *DESK_FLAGS,
            "--out", str(out),
        ])
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["models"]) == 5
        first = doc["models"][0]
        assert set(first) == {"rank", "model", "fitness_error", "size", "depth"}
        errors = [m["fitness_error"] for m in doc["models"]]
        assert errors == sorted(errors)


def write_poly_seed(root):
    path = root / "poly_seed.txt"
    path.write_text("0.5\n-3.0\n")
    return path


def test_config_file_precedence(bmi_dir):
    config = bmi_dir / "cfg.json"
    config.write_text(json.dumps({
        "iterations": 1,
        "tests_per_iteration": 1,
        "random_pool_size": 5,
        "committee_size": 5,
        "gp": {"population_size": 30, "max_generations": 2,
               "stagnation_window": 2, "tournament_size": 3},
        "seed": 55,
    }))
    out = bmi_dir / "cfgout"
    # the flag overrides the file; the file overrides defaults
    code = main([
        "generate", "--fixture", "bmi",
        "--tests", str(bmi_dir / "bmi_seed.txt"),
        "--config", str(config), "--per-iteration", "2",
        "--out", str(out),
    ])
    assert code == 0
    log = json.loads((out / "campaign.json").read_text())
    assert log["config"]["iterations"] == 1  # from file
    assert log["config"]["tests_per_iteration"] == 2  # from flag
    assert log["config"]["seed"] == 55  # from file
    suite_lines = (out / "suite.txt").read_text().strip().splitlines()
    assert len(suite_lines) == 6 + 2


def test_unknown_config_key_rejected(bmi_dir):
    config = bmi_dir / "cfg.json"
    config.write_text('{"populations": 5}')
    code = main([
        "generate", "--fixture", "bmi",
        "--tests", str(bmi_dir / "bmi_seed.txt"),
        "--config", str(config), "--out", str(bmi_dir / "o"),
    ])
    assert code == 1


def test_console_entry_point_exists():
    import tbcgen.cli as cli

    assert callable(cli.entry)
