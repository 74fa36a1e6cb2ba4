import io
import random

import pytest

from genutil import random_function
from watpaths import (
    ModuleAst,
    PathMode,
    least_common_instructions,
    parse_module,
    summary,
    top_paths,
)


def test_top_paths_hand_counts(g1):
    table = top_paths([g1], PathMode.NESTED, 2)
    assert table.total == 3
    assert table.rows[0] == (1, "local.get", 2, pytest.approx(66.6667, abs=0.01))
    assert table.rows[1] == (2, "i32.add", 1, pytest.approx(33.3333, abs=0.01))


def test_top_paths_k_larger_than_distinct(g1):
    table = top_paths([g1], PathMode.NESTED, 50)
    assert len(table.rows) == 2


def test_top_paths_ties_broken_lexicographically():
    module = parse_module("(module (func drop nop))", "m.wat")
    table = top_paths([module], PathMode.SIMPLE, 2)
    assert [row[1] for row in table.rows] == ["drop", "nop"]


def test_top_paths_percent_sums_to_100(g1, g2):
    table = top_paths([g1, g2], PathMode.NESTED, 1000)
    assert sum(row[3] for row in table.rows) == pytest.approx(100.0, abs=0.05)


def test_top_paths_rejects_bad_k(g1):
    with pytest.raises(ValueError):
        top_paths([g1], PathMode.NESTED, 0)


def test_top_paths_csv_format(g1):
    buffer = io.StringIO()
    top_paths([g1], PathMode.NESTED, 2).write_csv(buffer)
    assert buffer.getvalue().splitlines() == [
        "rank,path,count,percent",
        "1,local.get,2,66.67",
        "2,i32.add,1,33.33",
    ]


def test_rare_instruction_attribution():
    module = parse_module("(module (func $m f32.copysign))", "lib.wat")
    table = least_common_instructions([module], 1)
    assert table.rows == [("f32.copysign", ("lib.wat",), 1, 1)]


def test_rare_instruction_package_mapping(g1):
    table = least_common_instructions([g1], 5, packages={"g1.wat": "alpha"})
    for _, projects, _, _ in table.rows:
        assert projects == ("alpha",)


def test_rare_instruction_threshold_filters(g1, g2):
    # local.get appears in both functions; threshold 1 excludes it
    table = least_common_instructions([g1, g2], 1)
    mnemonics = [row[0] for row in table.rows]
    assert "local.get" not in mnemonics
    assert "i32.add" in mnemonics


def test_rare_instruction_rejects_zero_threshold(g1):
    with pytest.raises(ValueError):
        least_common_instructions([g1], 0)


def test_rare_instruction_sorted_by_method_count(g1, g2):
    table = least_common_instructions([g1, g2], 10)
    counts = [row[3] for row in table.rows]
    assert counts == sorted(counts)


def test_summary_hand_counts(g1):
    result = summary([g1], PathMode.NESTED)
    assert result.distinct_paths == 2
    assert result.total_occurrences == 3
    assert result.mean_nonzero_per_function == 2.0
    assert not result.empty


def test_summary_empty_corpus():
    result = summary([], PathMode.NESTED)
    assert result.distinct_paths == 0
    assert result.total_occurrences == 0
    assert result.mean_nonzero_per_function == 0.0
    assert result.empty
    assert result.to_json_obj()["flag"] == "empty_corpus"


def test_results_independent_of_corpus_order():
    rng = random.Random(21)
    modules = []
    for i in range(8):
        module = ModuleAst(source_id=f"m{i}")
        func = random_function(rng)
        func.ordinal = 0
        module.functions.append(func)
        modules.append(module)
    reordered = list(reversed(modules))
    forward = top_paths(modules, PathMode.NESTED, 100)
    backward = top_paths(reordered, PathMode.NESTED, 100)
    assert forward == backward
    assert summary(modules, PathMode.NESTED) == summary(reordered, PathMode.NESTED)
    a = least_common_instructions(modules, 3)
    b = least_common_instructions(reordered, 3)
    assert a == b


def test_total_counts_match_instruction_occurrences(g1, g2):
    from watpaths import linearize

    table = top_paths([g1, g2], PathMode.SIMPLE, 10_000)
    expected = sum(len(linearize(f)) for m in (g1, g2) for f in m.functions)
    assert sum(row[2] for row in table.rows) == expected == table.total
