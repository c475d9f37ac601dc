import pytest

from mldnn.errors import SpecError
from mldnn.modelspec import (
    DEFAULT_ARCHITECTURE,
    ArchitectureSpec,
    LevelSpec,
    default_spec,
    parse_spec,
    render_spec,
    validate_spec,
)


def test_canonical_text_parses_to_expected_topology():
    spec = parse_spec(DEFAULT_ARCHITECTURE)
    assert spec.input_width == 13
    assert spec.use_batchnorm
    assert len(spec.levels) == 3
    assert spec.levels[0] == LevelSpec(6, 128, "relu", "pairs")
    assert spec.levels[1] == LevelSpec(3, 128, "relu", "all")
    assert spec.levels[2] == LevelSpec(1, 128, "relu", "none")
    assert spec.output_units == 1
    assert spec.output_activation == "linear"
    # ten hidden dense layers in total
    assert sum(level.branches for level in spec.levels) == 10


def test_zero_units_rejected():
    text = "input 13\nlevel 1: branches 1, units 0, relu\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="units"):
        parse_spec(text)


def test_merge_pairs_needs_even_branches():
    text = "input 13\nlevel 1: branches 3, units 8, relu, merge pairs\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="even branch count, got 3"):
        parse_spec(text)


def test_validate_reports_stream_mismatch():
    spec = ArchitectureSpec(
        input_width=13,
        use_batchnorm=True,
        levels=[
            LevelSpec(6, 128, "relu", "pairs"),
            LevelSpec(4, 128, "relu", "all"),
        ],
        output_units=1,
        output_activation="linear",
    )
    violations = validate_spec(spec)
    assert any("branches 4 ≠ streams 3" in v for v in violations)


def test_validate_reports_all_violations_not_just_first():
    spec = ArchitectureSpec(
        input_width=0,
        use_batchnorm=False,
        levels=[LevelSpec(2, 0, "relu", "none")],
        output_units=0,
        output_activation="linear",
    )
    violations = validate_spec(spec)
    assert len(violations) >= 3


def test_validate_input_width_zero():
    spec = ArchitectureSpec(
        input_width=0,
        use_batchnorm=False,
        levels=[LevelSpec(1, 4, "relu")],
        output_units=1,
        output_activation="linear",
    )
    assert any("input width" in v for v in validate_spec(spec))


def test_validate_final_level_must_emit_one_stream():
    spec = ArchitectureSpec(
        input_width=13,
        use_batchnorm=False,
        levels=[LevelSpec(4, 8, "relu", "pairs")],  # emits 2 streams
        output_units=1,
        output_activation="linear",
    )
    assert any("final level emits 2 streams" in v for v in validate_spec(spec))


def test_canonical_spec_is_valid():
    assert validate_spec(default_spec()) == []


def test_render_parse_round_trip():
    specs = [
        default_spec(),
        ArchitectureSpec(13, False, [LevelSpec(1, 4, "relu")], 1, "linear"),
        ArchitectureSpec(
            5,
            True,
            [LevelSpec(4, 16, "relu", "pairs"), LevelSpec(2, 8, "linear", "all")],
            2,
            "relu",
        ),
    ]
    for spec in specs:
        assert parse_spec(render_spec(spec)) == spec


def test_keywords_case_insensitive_and_comments_ignored():
    text = """
# architecture under test
INPUT 13
BatchNorm
Level 1: Branches 2, Units 4, RELU, Merge ALL  # trailing comment
output: 1, LINEAR
"""
    spec = parse_spec(text)
    assert spec.use_batchnorm and spec.levels == [LevelSpec(2, 4, "relu", "all")]


def test_default_merge_is_none():
    spec = parse_spec("input 4\nlevel 1: branches 1, units 3, relu\noutput: 1, linear\n")
    assert spec.levels[0].merge == "none"


def test_syntax_error_carries_line_number_and_expectation():
    text = "input 13\nlevel 1: branches two, units 4, relu\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="line 2") as exc:
        parse_spec(text)
    assert "branch count" in str(exc.value)


def test_unknown_activation_rejected():
    text = "input 13\nlevel 1: branches 1, units 4, sigmoid\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="line 2"):
        parse_spec(text)


def test_unknown_merge_keyword_rejected():
    text = "input 13\nlevel 1: branches 2, units 4, relu, merge halves\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="merge mode"):
        parse_spec(text)


def test_missing_output_line():
    with pytest.raises(SpecError, match="output"):
        parse_spec("input 13\nlevel 1: branches 1, units 4, relu\n")


def test_declarations_after_output_rejected():
    text = "input 13\nlevel 1: branches 1, units 4, relu\noutput: 1, linear\nbatchnorm\n"
    with pytest.raises(SpecError, match="after 'output'"):
        parse_spec(text)


def test_parse_is_total_over_garbage():
    # arbitrary text either parses or raises a positioned SpecError
    for garbage in ("", "xyzzy", "input", "input -3", "level 1:", "input 13\ninput 13"):
        with pytest.raises(SpecError, match="line"):
            parse_spec(garbage)


def test_level_numbers_must_be_consecutive():
    text = "input 13\nlevel 2: branches 1, units 4, relu\noutput: 1, linear\n"
    with pytest.raises(SpecError, match="expected level 1"):
        parse_spec(text)
