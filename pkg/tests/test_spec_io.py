"""Interface-spec parsing, test-file parsing, and round-trips."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tbcgen import spec_io
from tbcgen.spec_io import (
    InterfaceSpec,
    OutputSpec,
    ParamSpec,
    SpecFormatError,
    SpecValidationError,
    ValueKind,
    parse_interface_spec,
    parse_test_inputs,
    write_test_inputs,
)

# aliased so pytest does not try to collect the exception class
InputError = spec_io.TestInputError

from conftest import FIXTURES_DIR

BMI_JSON = (FIXTURES_DIR / "bmi.json").read_text()


class TestParseInterfaceSpec:
    def test_bmi_listing(self):
        spec = parse_interface_spec(BMI_JSON)
        assert spec.command == "bmi.sh"
        assert [p.name for p in spec.parameters] == ["height", "weight"]
        for p in spec.parameters:
            assert p.kind is ValueKind.DOUBLE
            assert (p.min, p.max) == (-100.0, 100.0)
        assert spec.output.kind is ValueKind.DOUBLE

    def test_empty_document_is_a_parse_error(self):
        with pytest.raises(SpecFormatError):
            parse_interface_spec("")

    def test_malformed_json_reports_position(self):
        with pytest.raises(SpecFormatError, match=r"line \d+"):
            parse_interface_spec('{"command": "x",}")')

    def test_min_above_max_rejected(self):
        doc = BMI_JSON.replace('"min": "-100"', '"min": "10"', 1).replace(
            '"max": "100"', '"max": "-10"', 1
        )
        with pytest.raises(SpecValidationError, match="height"):
            parse_interface_spec(doc)

    def test_unknown_kind_rejected(self):
        doc = BMI_JSON.replace('"type": "double"', '"type": "quadruple"', 1)
        with pytest.raises(SpecValidationError, match="quadruple"):
            parse_interface_spec(doc)

    def test_missing_bounds_rejected(self):
        doc = BMI_JSON.replace('"max": "100",', "", 1)
        with pytest.raises(SpecValidationError, match="height"):
            parse_interface_spec(doc)

    def test_duplicate_names_rejected(self):
        doc = BMI_JSON.replace('"name": "weight"', '"name": "height"')
        with pytest.raises(SpecValidationError, match="height"):
            parse_interface_spec(doc)

    def test_output_must_be_numeric(self):
        doc = BMI_JSON.replace(
            '"name": "output",\n            "type": "double"',
            '"name": "output",\n            "type": "string"',
        )
        with pytest.raises(SpecValidationError, match="output"):
            parse_interface_spec(doc)

    def test_string_parameter_requires_values(self):
        with pytest.raises(SpecValidationError, match="values"):
            ParamSpec("mode", ValueKind.STRING)

    def test_integer_bounds_truncated(self):
        p = ParamSpec("n", ValueKind.INTEGER, min=-2.7, max=7.9)
        assert (p.min, p.max) == (-2, 7)

    def test_at_least_one_parameter(self):
        with pytest.raises(SpecValidationError, match="parameter"):
            InterfaceSpec("cmd", (), OutputSpec("out", ValueKind.DOUBLE))

    def test_roundtrip_through_writer(self):
        spec = parse_interface_spec(BMI_JSON)
        again = parse_interface_spec(spec_io.write_interface_spec(spec))
        assert again == spec


class TestParseTestInputs:
    def test_bmi_seed_file(self, bmi_spec):
        text = (FIXTURES_DIR / "bmi_seed.txt").read_text()
        vectors = parse_test_inputs(text, bmi_spec)
        assert len(vectors) == 6
        assert vectors[0] == (1.7, 50.0)
        assert vectors[-1] == (5.0, 0.0)

    def test_empty_file(self, bmi_spec):
        assert parse_test_inputs("", bmi_spec) == []

    def test_arity_error_names_line(self, bmi_spec):
        with pytest.raises(InputError, match="line 1"):
            parse_test_inputs("1.7\n", bmi_spec)

    def test_arity_error_deep_in_file(self, bmi_spec):
        with pytest.raises(InputError, match="line 3"):
            parse_test_inputs("1 2\n3 4\n5 6 7\n", bmi_spec)

    def test_unparsable_token(self, bmi_spec):
        with pytest.raises(InputError, match="tall"):
            parse_test_inputs("tall 50\n", bmi_spec)

    def test_blank_lines_and_comments_ignored(self, bmi_spec):
        text = "# header\n\n1.7 50\n   \n# trailing\n1.8 70\n"
        assert parse_test_inputs(text, bmi_spec) == [(1.7, 50.0), (1.8, 70.0)]

    def test_binding_is_positional(self, bmi_spec):
        renamed = InterfaceSpec(
            command=bmi_spec.command,
            parameters=tuple(
                ParamSpec(f"p{i}", p.kind, p.min, p.max)
                for i, p in enumerate(bmi_spec.parameters)
            ),
            output=bmi_spec.output,
        )
        text = "1.7 50\n1.8 70\n"
        assert parse_test_inputs(text, bmi_spec) == parse_test_inputs(text, renamed)

    def test_integer_token_must_be_integral(self, mixed_spec):
        with pytest.raises(InputError, match="'3.0'"):
            parse_test_inputs("1 1 3.0 true red\n", mixed_spec)

    def test_mixed_kinds(self, mixed_spec):
        got = parse_test_inputs("1.5 -0.25 3 TRUE blue\n", mixed_spec)
        assert got == [(1.5, -0.25, 3, True, "blue")]

    def test_bad_boolean(self, mixed_spec):
        with pytest.raises(InputError, match="yes"):
            parse_test_inputs("1 1 3 yes red\n", mixed_spec)


class TestWriteTestInputs:
    def test_single_row(self):
        assert write_test_inputs([(1.7, 50.0)]) == "1.7 50.0\n"

    def test_empty(self):
        assert write_test_inputs([]) == ""

    def test_mixed_arity_rejected(self):
        with pytest.raises(ValueError, match="arities"):
            write_test_inputs([(1.0, 2.0), (1.0,)])

    def test_roundtrip_random_vectors(self, mixed_spec, seeded_rng):
        from tbcgen.generators import sample_random_input

        vectors = [sample_random_input(mixed_spec, seeded_rng) for _ in range(100)]
        again = parse_test_inputs(write_test_inputs(vectors), mixed_spec)
        assert again == vectors

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.floats(allow_nan=False, width=64),
                st.integers(min_value=-(2**40), max_value=2**40),
                st.booleans(),
            ),
            max_size=30,
        )
    )
    def test_roundtrip_property(self, rows):
        spec = InterfaceSpec(
            command="x",
            parameters=(
                ParamSpec("d", ValueKind.DOUBLE, -1e300, 1e300),
                ParamSpec("i", ValueKind.INTEGER, -(2**40), 2**40),
                ParamSpec("b", ValueKind.BOOLEAN),
            ),
            output=OutputSpec("out", ValueKind.DOUBLE),
        )
        text = write_test_inputs(rows)
        assert parse_test_inputs(text, spec) == [tuple(r) for r in rows]


def test_check_input_vector_kinds(mixed_spec):
    ok = spec_io.check_input_vector((1.0, 1.0, 2, True, "red"), mixed_spec)
    assert ok == (1.0, 1.0, 2, True, "red")
    with pytest.raises(SpecValidationError, match="expected 5"):
        spec_io.check_input_vector((1.0,), mixed_spec)
    with pytest.raises(SpecValidationError, match="integer"):
        spec_io.check_input_vector((1.0, 1.0, 2.5, True, "red"), mixed_spec)
    # bounds are sampling ranges: out-of-range seeds are accepted by default
    assert spec_io.check_input_vector((500.0, 0.0, 2, True, "red"), mixed_spec)
    with pytest.raises(SpecValidationError, match="outside"):
        spec_io.check_input_vector(
            (500.0, 0.0, 2, True, "red"), mixed_spec, enforce_bounds=True
        )
