"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside pytest's own verdicts.  All comparisons are exact (integer /
string equality); the property criterion generates >= 10,000 random ASTs and
must finish within its stated budget.
"""

import itertools
import json
import random
import re
import time
from collections import Counter
from pathlib import Path as FsPath

from genutil import random_function
from watpaths import (
    LabelSidecar,
    Path,
    PathMode,
    PathVector,
    SEPARATOR_TOKEN,
    Variant,
    assemble_variant,
    build_path_set,
    build_records,
    collapse_repeats,
    coverage_verify,
    export_parallel,
    extract_paths,
    extract_raw_paths,
    filter_min_count,
    last_k_instructions,
    linearize,
    manifest_text,
    parse_module,
    refine,
    sequence_tokens,
    split_by_package,
    to_path_sequence,
    vectorize,
)

FIXTURES = FsPath(__file__).parent / "fixtures"


def _load(path):
    return parse_module(path.read_text(), source_id=path.name)


def _counts(multiset):
    return {p.canonical(): c for p, c in multiset.counts.items()}


def _ok(line):
    print(f"PASS: {line}")


# ---------------------------------------------------------------------------
# Criterion 1: golden fixture multisets, all four modes, exact
# ---------------------------------------------------------------------------


def test_criterion_golden_multisets():
    g1 = _load(FIXTURES / "golden" / "g1.wat").functions[0]
    g2 = _load(FIXTURES / "golden" / "g2.wat").functions[0]

    assert _counts(extract_raw_paths(g1)) == {"local.get": 2, "i32.add": 1}
    assert _counts(extract_paths(g1, PathMode.COLLAPSED)) == {"local.get": 2, "i32.add": 1}
    assert _counts(extract_paths(g1, PathMode.NESTED)) == {"local.get": 2, "i32.add": 1}
    assert _counts(extract_paths(g1, PathMode.SIMPLE)) == {"local.get": 2, "i32.add": 1}

    assert _counts(extract_raw_paths(g2)) == {
        "block,block,if,local.get": 1,
        "block,block,if,loop,local.get": 1,
        "block,block,if,loop,br": 1,
        "i32.const": 1,
    }
    assert _counts(extract_paths(g2, PathMode.COLLAPSED)) == {
        "block,if,local.get": 1,
        "block,if,loop,local.get": 1,
        "block,if,loop,br": 1,
        "i32.const": 1,
    }
    assert _counts(extract_paths(g2, PathMode.NESTED)) == {
        "if,local.get": 1,
        "if,loop,local.get": 1,
        "if,loop,br": 1,
        "i32.const": 1,
    }
    assert _counts(extract_paths(g2, PathMode.SIMPLE)) == {
        "local.get": 2,
        "br": 1,
        "i32.const": 1,
    }
    _ok("golden fixtures: raw/collapsed/nested/simple multisets exact")


# ---------------------------------------------------------------------------
# Criterion 2: the worked collapse example, verbatim
# ---------------------------------------------------------------------------


def test_criterion_collapse_example():
    before = Path.from_canonical("block,if,block,block,block,if,f64.ne")
    after = collapse_repeats(before)
    assert after.canonical() == "block,if,block,if,f64.ne"
    _ok('collapse: "block,if,block,block,block,if,f64.ne" -> "block,if,block,if,f64.ne"')


# ---------------------------------------------------------------------------
# Criterion 3: the worked tuple-sequence example, exact
# ---------------------------------------------------------------------------


def test_criterion_sequence_example():
    v = PathVector(dim=3352, counts={1: 1, 3: 204, 3352: 2}, mode=PathMode.NESTED)
    seq = to_path_sequence(v, 30)
    assert seq.tuples == [(1, 1), (3, 30), (3352, 1)]
    _ok("sequence encoding: [1,0,204,...,2] with cap 30 -> <1,1> <3,30> <3352,1>")


# ---------------------------------------------------------------------------
# Criterion 4: randomized property suite, >= 10,000 ASTs, < 60 s
# ---------------------------------------------------------------------------


def test_criterion_property_suite():
    start = time.time()
    rng = random.Random(0xC0FFEE)
    modes = (PathMode.RAW, PathMode.COLLAPSED, PathMode.NESTED, PathMode.SIMPLE)
    n = 10_000
    for _ in range(n):
        func = random_function(rng, max_depth=4, max_items=4)
        total = len(linearize(func))
        distinct = []
        for mode in modes:
            multiset = extract_paths(func, mode)
            assert multiset.total() == total  # count conservation
            distinct.append(multiset.distinct())
        assert distinct[0] >= distinct[1] >= distinct[2] >= distinct[3]  # monotone
        for path in extract_raw_paths(func).counts:
            once = collapse_repeats(path)
            assert collapse_repeats(once) == once  # idempotence
            nested = refine(path, PathMode.NESTED)
            assert "block" not in nested.nesting
            assert all(a != b for a, b in zip(nested.nesting, nested.nesting[1:]))
        # tuple-sequence bounds on a synthetic vector
        dim = rng.randint(1, 40)
        counts = {
            i: rng.randint(1, 300)
            for i in rng.sample(range(1, dim + 1), rng.randint(0, dim))
        }
        cap = rng.randint(1, 50)
        seq = to_path_sequence(PathVector(dim=dim, counts=counts, mode=PathMode.NESTED), cap)
        assert len(seq.tuples) == len(counts)
        assert all(1 <= m <= cap for _, m in seq.tuples)
    elapsed = time.time() - start
    assert elapsed < 60.0, f"property suite took {elapsed:.1f}s"
    _ok(f"property suite: {n} random ASTs in {elapsed:.1f}s, all invariants held")


# ---------------------------------------------------------------------------
# Criterion 5: oracle equivalence
# ---------------------------------------------------------------------------

_SCAN_KEYWORDS = {
    "module", "func", "block", "loop", "if", "then", "else", "end",
    "param", "result", "local", "type", "export", "import", "memory",
    "table", "global", "data", "elem", "start", "mut", "item", "offset",
    "shared",
}
_SCAN_VALTYPES = {"i32", "i64", "f32", "f64", "v128", "funcref", "externref"}


def scan_instruction_mnemonics(text):
    """Independent text-level scan for instruction mnemonics inside func forms."""
    text = re.sub(r";;[^\n]*", " ", text)
    while True:
        stripped = re.sub(r"\(;(?:[^;]|;(?!\)))*;\)", " ", text)
        if stripped == text:
            break
        text = stripped
    text = re.sub(r'"(?:\\.|[^"\\])*"', " ", text)
    mnemonics = set()
    stack = []
    expecting_head = False
    for tok in re.findall(r"\(|\)|[^\s()]+", text):
        if tok == "(":
            if expecting_head:
                stack.append("?")
            expecting_head = True
            continue
        if tok == ")":
            if expecting_head:
                expecting_head = False
            elif stack:
                stack.pop()
            continue
        in_func = "func" in stack
        if expecting_head:
            stack.append(tok)
            expecting_head = False
            in_func = in_func or tok == "func"
        if tok in _SCAN_KEYWORDS or tok in _SCAN_VALTYPES:
            continue
        if tok[0] in "0123456789+-$" or "=" in tok or tok in ("inf", "nan") or tok.startswith("nan:"):
            continue
        if in_func and tok != "func":
            mnemonics.add(tok)
    return mnemonics


def test_criterion_simple_paths_match_token_scan():
    wat_files = sorted(FIXTURES.rglob("*.wat"))
    corpus = [_load(p) for p in wat_files]
    simple_set, _ = build_path_set(corpus, PathMode.SIMPLE)
    scanned = set()
    for path in wat_files:
        scanned |= scan_instruction_mnemonics(path.read_text())
    assert set(simple_set.entries) == scanned
    _ok(f"oracle: SIMPLE path set == token scan ({len(scanned)} mnemonics)")


def _rewrite_to_fixpoint(labels):
    seq = list(labels)
    changed = True
    while changed:
        changed = False
        for i in range(len(seq) - 1):
            if seq[i] == seq[i + 1]:
                del seq[i + 1]
                changed = True
                break
    return seq


def test_criterion_nested_refine_matches_rewriting_oracle():
    labels = ("block", "if", "loop")
    cases = 0
    for length in range(0, 7):
        for nesting in itertools.product(labels, repeat=length):
            collapsed = _rewrite_to_fixpoint(nesting)
            dropped = [l for l in collapsed if l != "block"]
            expected = tuple(_rewrite_to_fixpoint(dropped))
            actual = refine(Path(nesting, "op"), PathMode.NESTED).nesting
            assert actual == expected
            cases += 1
    assert cases == 1093  # 3^0 + ... + 3^6
    _ok("oracle: NESTED refine == string-rewriting oracle on all 1093 strings")


# ---------------------------------------------------------------------------
# Criterion 6: determinism
# ---------------------------------------------------------------------------


def test_criterion_manifest_determinism():
    wat_files = sorted(FIXTURES.rglob("*.wat"))
    corpus = [_load(p) for p in wat_files]
    baseline = None
    rng = random.Random(31)
    for _ in range(5):
        permuted = list(corpus)
        rng.shuffle(permuted)
        path_set, _ = build_path_set(permuted, PathMode.NESTED)
        text = manifest_text(path_set)
        if baseline is None:
            baseline = text
        assert text == baseline
    _ok("determinism: manifests byte-identical across permuted input orders")


def _export_fixture_dataset(out_dir, seed):
    corpus = [_load(p) for p in sorted((FIXTURES / "golden").glob("*.wat"))]
    set_nested, _ = build_path_set(corpus, PathMode.NESTED)
    set_simple, _ = build_path_set(corpus, PathMode.SIMPLE)
    records, _ = build_records(
        corpus, set_nested=set_nested, set_simple=set_simple
    )
    split = split_by_package(records, seed=seed)
    for variant in Variant:
        export_parallel(split, variant, set_nested, set_simple, out_dir)


def test_criterion_dataset_export_determinism(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    _export_fixture_dataset(out_a, seed=9)
    _export_fixture_dataset(out_b, seed=9)
    files_a = sorted(p.name for p in out_a.iterdir())
    files_b = sorted(p.name for p in out_b.iterdir())
    assert files_a == files_b and files_a
    for name in files_a:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    _ok(f"determinism: {len(files_a)} dataset export files byte-identical across reruns")


# ---------------------------------------------------------------------------
# Criterion 7: coverage
# ---------------------------------------------------------------------------


def test_criterion_coverage():
    corpus = [_load(p) for p in sorted(FIXTURES.rglob("*.wat"))]
    for mode in (PathMode.NESTED, PathMode.SIMPLE):
        path_set, _ = build_path_set(corpus, mode)
        report = coverage_verify(corpus, path_set)
        assert report.unseen == {}
        assert report.seen == len(path_set)

    golden = [_load(p) for p in sorted((FIXTURES / "golden").glob("*.wat"))]
    non_simd_set, _ = build_path_set(golden, PathMode.NESTED)
    simd_corpus = [_load(FIXTURES / "simd" / "simd.wat")]
    report = coverage_verify(simd_corpus, non_simd_set)
    assert set(report.unseen) == {
        "v128.load", "i8x16.abs", "i16x8.add", "i32x4.mul", "i64x2.neg",
    }
    for path, (count, attributions) in report.unseen.items():
        assert count == 1
        assert attributions == [("simd.wat", "vec")]
    _ok("coverage: self-coverage unseen=0; SIMD probe reports exactly the SIMD mnemonics")


# ---------------------------------------------------------------------------
# Criterion 8: variant token structure
# ---------------------------------------------------------------------------


def test_criterion_variant_structure():
    corpus = [_load(p) for p in sorted(FIXTURES.rglob("*.wat"))]
    set_nested, _ = build_path_set(corpus, PathMode.NESTED)
    set_simple, _ = build_path_set(corpus, PathMode.SIMPLE)
    functions = [f for m in corpus for f in m.functions]
    assert functions
    for func in functions:
        nested_seq = to_path_sequence(vectorize(func, set_nested)[0], 30)
        simple_seq = to_path_sequence(vectorize(func, set_simple)[0], 30)
        window = last_k_instructions(func, 20)
        i_tokens = assemble_variant(Variant.I, window=window).tokens
        np_tokens = assemble_variant(Variant.NP, nested_seq=nested_seq).tokens
        sp_tokens = assemble_variant(Variant.SP, simple_seq=simple_seq).tokens
        inp = assemble_variant(Variant.INP, window=window, nested_seq=nested_seq).tokens
        isp = assemble_variant(Variant.ISP, window=window, simple_seq=simple_seq).tokens
        assert inp == i_tokens + [SEPARATOR_TOKEN] + np_tokens
        assert isp == i_tokens + [SEPARATOR_TOKEN] + sp_tokens
        # path-sequence tokens do not depend on the window size
        for k in (20, 40):
            win_k = last_k_instructions(func, k)
            inp_k = assemble_variant(Variant.INP, window=win_k, nested_seq=nested_seq).tokens
            assert inp_k[len(win_k.tokens) + 1 :] == np_tokens
            assert np_tokens == sequence_tokens(nested_seq)
    _ok(f"variants: INP == I ++ <SEP> ++ NP on {len(functions)} fixture functions; NP k-invariant")


# ---------------------------------------------------------------------------
# Criterion 9: dataset invariants
# ---------------------------------------------------------------------------


def _synthetic_corpus_and_sidecar(tmp_path):
    rng = random.Random(5150)
    bodies = [
        "local.get 0 local.get 1 i32.add",
        "(block (if (local.get 0) (then nop)))",
        "i32.const 1 drop",
        "loop nop br 0 end",
    ]
    modules = []
    sidecar_rows = []
    for i in range(40):
        name = f"fn{i % 7}"
        text = f"(module (func ${name} (param i32 i32) {bodies[i % len(bodies)]}))"
        source = f"s{i:02d}.wat"
        modules.append(parse_module(text, source_id=source))
        sidecar_rows.append(
            {
                "source": source,
                "func": name,
                "method_name": f"__Do{name.capitalize()}<T>" if i % 2 else name,
                "return_type": "primitive i32",
                "package": f"pkg{rng.randint(0, 9)}",
            }
        )
    sidecar_path = tmp_path / "labels.jsonl"
    sidecar_path.write_text("\n".join(json.dumps(r) for r in sidecar_rows) + "\n")
    return modules, LabelSidecar.load(sidecar_path)


def test_criterion_dataset_invariants(tmp_path):
    modules, sidecar = _synthetic_corpus_and_sidecar(tmp_path)
    set_nested, _ = build_path_set(modules, PathMode.NESTED)
    set_simple, _ = build_path_set(modules, PathMode.SIMPLE)
    records, _ = build_records(
        modules, sidecar=sidecar, set_nested=set_nested, set_simple=set_simple
    )
    m = 3
    filtered = filter_min_count(records, m)
    assert len(filtered) < len(records)  # the filter really dropped something
    support = Counter(r.label for r in filtered)
    assert support and all(count >= m for count in support.values())

    split = split_by_package(filtered, seed=77)
    package_sets = [
        {r.package for r in part} for part in split.partitions().values()
    ]
    for a, b in itertools.combinations(package_sets, 2):
        assert a & b == set()
    assert set.union(*package_sets) == {r.package for r in filtered}

    out = tmp_path / "export"
    for variant in Variant:
        export_parallel(split, variant, set_nested, set_simple, out)
        for partition, part_records in split.partitions().items():
            src = (out / f"{partition}.{variant.value}.src.txt").read_text().splitlines()
            tgt = (out / f"{partition}.{variant.value}.tgt.txt").read_text().splitlines()
            assert len(src) == len(tgt) == len(part_records)
    _ok(f"dataset: min-support >= {m}; src/tgt aligned for all 5 variants; packages disjoint")
