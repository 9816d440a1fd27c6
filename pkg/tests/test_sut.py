"""Builtin fixtures (with mutants) and external-command execution."""

import math
import stat

import pytest

from tbcgen import sut
from tbcgen.generators import sample_random_input
from tbcgen.spec_io import parse_interface_spec
from tbcgen.sut import (
    BuiltinSut,
    ExternalSut,
    SutExecutionError,
    catalog,
    execute,
    interface_spec,
    verify_deterministic,
)

from conftest import FIXTURES_DIR


class TestBuiltinFixtures:
    def test_bmi_reference_value(self):
        got = execute(BuiltinSut("bmi"), (1.7, 50.0))
        assert got == pytest.approx(50.0 / 2.89, rel=1e-12)

    def test_bmi_division_by_zero(self):
        assert execute(BuiltinSut("bmi"), (0.0, 5.0)) == math.inf

    def test_bmi_zero_by_zero_is_nan(self):
        assert math.isnan(execute(BuiltinSut("bmi"), (0.0, 0.0)))

    def test_bmi_mutant_weight_over_height(self):
        got = execute(BuiltinSut("bmi", 0), (1.7, 50.0))
        assert got == pytest.approx(29.4118, abs=1e-4)
        assert got != pytest.approx(17.3010, abs=1e-3)

    def test_unknown_fixture(self):
        with pytest.raises(ValueError, match="unknown fixture"):
            BuiltinSut("bmj")

    def test_mutant_index_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            BuiltinSut("bmi", 99)

    def test_binom_values(self):
        assert execute(BuiltinSut("binom_small"), (5, 2)) == 10.0
        assert execute(BuiltinSut("binom_small"), (12, 6)) == 924.0
        assert execute(BuiltinSut("binom_small"), (3, 5)) == 0.0

    def test_piecewise_branches(self):
        f = BuiltinSut("piecewise")
        assert execute(f, (-30.0,)) == pytest.approx(3.0 * -30 + 40)
        assert execute(f, (0.0,)) == pytest.approx(-2.0)
        assert execute(f, (50.0,)) == pytest.approx(50.0)

    def test_poly3_extrema_region(self):
        f = BuiltinSut("poly3")
        assert execute(f, (0.0,)) == 12.0
        assert execute(f, (1.0,)) == pytest.approx(1 - 6 + 4 + 12)

    def test_arity_enforced(self):
        with pytest.raises(Exception):
            execute(BuiltinSut("bmi"), (1.0,))

    def test_determinism(self, seeded_rng):
        spec = interface_spec("piecewise")
        handle = BuiltinSut("piecewise")
        for _ in range(100):
            u = sample_random_input(spec, seeded_rng)
            assert execute(handle, u) == execute(handle, u)


class TestCatalog:
    def test_contains_all_four_fixtures(self):
        ids = [e.id for e in catalog()]
        assert ids == ["bmi", "piecewise", "poly3", "binom_small"]

    def test_bmi_has_two_parameters(self):
        entry = next(e for e in catalog() if e.id == "bmi")
        assert len(entry.parameters) == 2

    def test_every_fixture_has_ten_plus_mutants(self):
        for entry in catalog():
            assert len(entry.mutants) >= 10, entry.id

    @pytest.mark.parametrize("fixture_id", ["bmi", "piecewise", "poly3", "binom_small"])
    def test_seeding_self_test(self, fixture_id, seeded_rng):
        """Every mutant disagrees with the original somewhere: no equivalent
        mutants under random probing."""
        spec = interface_spec(fixture_id)
        entry = next(e for e in catalog() if e.id == fixture_id)
        inputs = [sample_random_input(spec, seeded_rng) for _ in range(10_000)]
        original = [execute(BuiltinSut(fixture_id), u) for u in inputs]
        for idx in range(len(entry.mutants)):
            handle = BuiltinSut(fixture_id, idx)
            for u, ref in zip(inputs, original):
                got = execute(handle, u)
                if got != ref and not (math.isnan(got) and math.isnan(ref)):
                    break
            else:
                pytest.fail(f"{fixture_id} mutant {idx} never disagreed")


class TestExternalExecution:
    def test_bmi_script_agrees_with_builtin(self, seeded_rng):
        spec = parse_interface_spec((FIXTURES_DIR / "bmi.json").read_text())
        external = ExternalSut(spec, base_dir=str(FIXTURES_DIR))
        builtin = BuiltinSut("bmi")
        spec_b = interface_spec("bmi")
        # the script prints %.6g (six significant digits), which bounds the
        # achievable agreement at ~5e-6 relative
        for _ in range(1000):
            u = sample_random_input(spec_b, seeded_rng)
            got = execute(external, u)
            want = execute(builtin, u)
            if math.isfinite(want):
                assert got == pytest.approx(want, rel=5e-6, abs=1e-5)
            else:
                assert not math.isfinite(got)

    def test_walkthrough_value(self):
        spec = parse_interface_spec((FIXTURES_DIR / "bmi.json").read_text())
        external = ExternalSut(spec, base_dir=str(FIXTURES_DIR))
        assert execute(external, (1.8, 70.0)) == pytest.approx(21.6049, abs=1e-4)

    def test_infinity_token(self):
        spec = parse_interface_spec((FIXTURES_DIR / "bmi.json").read_text())
        external = ExternalSut(spec, base_dir=str(FIXTURES_DIR))
        assert execute(external, (0.0, 5.0)) == math.inf

    def test_nonzero_exit_status(self, tmp_path):
        script = tmp_path / "fail.sh"
        script.write_text("#!/bin/bash\necho nope >&2\nexit 3\n")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        spec = parse_interface_spec(
            (FIXTURES_DIR / "bmi.json").read_text().replace("bmi.sh", "fail.sh")
        )
        external = ExternalSut(spec, base_dir=str(tmp_path))
        with pytest.raises(SutExecutionError, match="exit status 3"):
            execute(external, (1.0, 1.0))

    def test_multi_token_output_rejected(self, tmp_path):
        script = tmp_path / "chatty.sh"
        script.write_text("#!/bin/bash\necho 1.0 2.0\n")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        spec = parse_interface_spec(
            (FIXTURES_DIR / "bmi.json").read_text().replace("bmi.sh", "chatty.sh")
        )
        external = ExternalSut(spec, base_dir=str(tmp_path))
        with pytest.raises(SutExecutionError, match="single numeric token"):
            execute(external, (1.0, 1.0))

    def test_unparsable_output_rejected(self, tmp_path):
        script = tmp_path / "words.sh"
        script.write_text("#!/bin/bash\necho result\n")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        spec = parse_interface_spec(
            (FIXTURES_DIR / "bmi.json").read_text().replace("bmi.sh", "words.sh")
        )
        external = ExternalSut(spec, base_dir=str(tmp_path))
        with pytest.raises(SutExecutionError, match="cannot parse"):
            execute(external, (1.0, 1.0))

    def test_timeout(self, tmp_path):
        script = tmp_path / "slow.sh"
        script.write_text("#!/bin/bash\nsleep 2\necho 1.0\n")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        spec = parse_interface_spec(
            (FIXTURES_DIR / "bmi.json").read_text().replace("bmi.sh", "slow.sh")
        )
        external = ExternalSut(spec, timeout=0.2, base_dir=str(tmp_path))
        with pytest.raises(SutExecutionError, match="timed out"):
            execute(external, (1.0, 1.0))

    def test_argument_rendering_roundtrips(self, mixed_spec, seeded_rng):
        from tbcgen.spec_io import parse_test_inputs, write_test_inputs

        for _ in range(100):
            u = sample_random_input(mixed_spec, seeded_rng)
            line = write_test_inputs([u])
            assert parse_test_inputs(line, mixed_spec) == [u]

    def test_verify_deterministic_accepts_script(self):
        spec = parse_interface_spec((FIXTURES_DIR / "bmi.json").read_text())
        external = ExternalSut(spec, base_dir=str(FIXTURES_DIR))
        verify_deterministic(external, [(1.7, 50.0), (0.0, 5.0)])

    def test_verify_deterministic_rejects_randomness(self, tmp_path):
        script = tmp_path / "rand.sh"
        script.write_text("#!/bin/bash\necho $RANDOM\n")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        spec = parse_interface_spec(
            (FIXTURES_DIR / "bmi.json").read_text().replace("bmi.sh", "rand.sh")
        )
        external = ExternalSut(spec, base_dir=str(tmp_path))
        with pytest.raises(SutExecutionError, match="not deterministic"):
            verify_deterministic(external, [(1.0, 1.0)])
