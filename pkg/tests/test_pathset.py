import io
import random

import pytest

from genutil import random_function
from watpaths import (
    ManifestFormatError,
    ModuleAst,
    PathMode,
    PathSet,
    UnfrozenSetError,
    build_path_set,
    coverage_verify,
    load_manifest,
    manifest_text,
    parse_module,
    save_manifest,
)


def test_build_golden_indices(g2):
    path_set, curve = build_path_set([g2], PathMode.NESTED)
    assert path_set.entries == (
        "i32.const",
        "if,local.get",
        "if,loop,br",
        "if,loop,local.get",
    )
    assert [path_set.lookup(e) for e in path_set.entries] == [1, 2, 3, 4]
    assert curve.points == [("g2.wat", 4)]


def test_build_empty_corpus():
    path_set, curve = build_path_set([], PathMode.NESTED)
    assert path_set.frozen
    assert len(path_set) == 0
    assert curve.points == []


def test_build_rejects_raw_mode(g2):
    with pytest.raises(ValueError):
        build_path_set([g2], PathMode.RAW)


def test_frozen_entries_independent_of_corpus_order(g1, g2):
    forward, curve_fwd = build_path_set([g1, g2], PathMode.NESTED)
    backward, curve_bwd = build_path_set([g2, g1], PathMode.NESTED)
    assert forward.entries == backward.entries
    assert forward._index == backward._index
    assert curve_fwd.points != curve_bwd.points  # discovery order differs


def test_curve_is_nondecreasing_and_ends_at_set_size(g1, g2, extra_dir):
    extra = parse_module((extra_dir / "module_style.wat").read_text(), "module_style.wat")
    path_set, curve = build_path_set([g1, extra, g2], PathMode.NESTED)
    counts = [c for _, c in curve.points]
    assert counts == sorted(counts)
    assert counts[-1] == len(path_set)


def test_lookup_present_and_absent(g2):
    path_set, _ = build_path_set([g2], PathMode.NESTED)
    assert path_set.lookup("if,loop,br") == 3
    assert path_set.lookup("loop,local.get") is None


def test_lookup_unfrozen_raises():
    unfrozen = PathSet(mode=PathMode.NESTED, entries=("a",), frozen=False)
    with pytest.raises(UnfrozenSetError):
        unfrozen.lookup("a")


def test_save_requires_frozen():
    unfrozen = PathSet(mode=PathMode.NESTED, frozen=False)
    with pytest.raises(UnfrozenSetError):
        save_manifest(unfrozen, io.StringIO())


# ---------------------------------------------------------------------------
# Manifest round trips
# ---------------------------------------------------------------------------


def test_manifest_round_trip(g2, tmp_path):
    path_set, _ = build_path_set([g2], PathMode.NESTED, provenance="golden")
    target = tmp_path / "manifest.txt"
    save_manifest(path_set, target)
    text = target.read_text()
    lines = text.splitlines()
    assert lines[0] == "# wasmwalker-pathset v1 mode=NESTED count=4"
    assert lines[1] == "# provenance=golden"
    assert len(lines) == 6  # header + provenance + 4 entries
    loaded = load_manifest(target)
    assert loaded.entries == path_set.entries
    assert loaded.mode == path_set.mode
    assert loaded.provenance == path_set.provenance
    assert loaded._index == path_set._index


def test_manifest_round_trip_empty_set():
    empty, _ = build_path_set([], PathMode.SIMPLE)
    loaded = load_manifest(io.StringIO(manifest_text(empty)))
    assert loaded.entries == ()
    assert loaded.mode is PathMode.SIMPLE


def test_manifest_bytes_stable(g2):
    a, _ = build_path_set([g2], PathMode.NESTED)
    b, _ = build_path_set([g2], PathMode.NESTED)
    assert manifest_text(a) == manifest_text(b)


def test_manifest_duplicate_path_rejected():
    bad = (
        "# wasmwalker-pathset v1 mode=NESTED count=2\n"
        "1\ti32.add\n"
        "2\ti32.add\n"
    )
    with pytest.raises(ManifestFormatError) as exc:
        load_manifest(io.StringIO(bad))
    assert exc.value.line == 3


def test_manifest_bad_header():
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO("not a manifest\n"))


def test_manifest_count_mismatch():
    bad = "# wasmwalker-pathset v1 mode=NESTED count=3\n1\ti32.add\n"
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO(bad))


def test_manifest_out_of_order_index():
    bad = (
        "# wasmwalker-pathset v1 mode=NESTED count=2\n"
        "1\ti32.add\n"
        "3\tlocal.get\n"
    )
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO(bad))


def test_manifest_nested_entry_with_block_rejected():
    bad = "# wasmwalker-pathset v1 mode=NESTED count=1\n1\tblock,i32.add\n"
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO(bad))


def test_manifest_nested_entry_with_adjacent_repeat_rejected():
    bad = "# wasmwalker-pathset v1 mode=NESTED count=1\n1\tif,if,i32.add\n"
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO(bad))


def test_manifest_rejects_raw_mode_header():
    bad = "# wasmwalker-pathset v1 mode=RAW count=0\n"
    with pytest.raises(ManifestFormatError):
        load_manifest(io.StringIO(bad))


# ---------------------------------------------------------------------------
# Coverage verification
# ---------------------------------------------------------------------------


def test_self_coverage_has_zero_unseen(g1, g2):
    path_set, _ = build_path_set([g1, g2], PathMode.NESTED)
    report = coverage_verify([g1, g2], path_set)
    assert report.unseen == {}
    assert report.seen == len(path_set)


def test_unseen_path_with_attribution(g2):
    path_set, _ = build_path_set([g2], PathMode.NESTED)
    probe = parse_module("(module (func $v v128.load))", source_id="probe.wat")
    report = coverage_verify([probe], path_set)
    assert set(report.unseen) == {"v128.load"}
    count, attributions = report.unseen["v128.load"]
    assert count == 1
    assert attributions == [("probe.wat", "v")]


def test_coverage_empty_corpus(g2):
    path_set, _ = build_path_set([g2], PathMode.NESTED)
    report = coverage_verify([], path_set)
    assert report.seen == 0
    assert report.unseen == {}


def test_coverage_requires_frozen():
    with pytest.raises(UnfrozenSetError):
        coverage_verify([], PathSet(mode=PathMode.NESTED, frozen=False))


def test_coverage_csv_shape(g2):
    path_set, _ = build_path_set([g2], PathMode.NESTED)
    probe = parse_module(
        "(module (func $a v128.load) (func $b v128.load i8x16.abs))", "probe.wat"
    )
    report = coverage_verify([probe], path_set)
    buffer = io.StringIO()
    report.write_csv(buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "path,count,files,methods"
    assert lines[1] == "i8x16.abs,1,1,1"
    assert lines[2] == "v128.load,2,1,2"


def test_self_coverage_on_random_corpus():
    rng = random.Random(4)
    modules = []
    for i in range(10):
        module = ModuleAst(source_id=f"m{i}")
        for j in range(3):
            func = random_function(rng)
            func.ordinal = j
            module.functions.append(func)
        modules.append(module)
    for mode in (PathMode.NESTED, PathMode.SIMPLE):
        path_set, _ = build_path_set(modules, mode)
        assert coverage_verify(modules, path_set).unseen == {}
