"""Labeled dataset assembly: records, name preprocessing, filtering, splits, exports.

Ground-truth labels arrive through a JSON-lines sidecar keyed by source file
and function (name or ordinal); when no sidecar is given, method names fall
back to the functions' own ``$``-identifiers or export names.  Packages are
the unit of splitting so that no package straddles partitions.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import ModeMismatchError
from .parser import FunctionNode, ModuleAst
from .paths import PathMode
from .pathset import PathSet
from .representations import (
    DEFAULT_MAGNITUDE_CAP,
    DEFAULT_WINDOW_SIZE,
    InstructionWindow,
    PathVector,
    Variant,
    VariantInput,
    assemble_variant,
    last_k_instructions,
    to_path_sequence,
    vectorize,
)

DEFAULT_RATIOS = (0.96, 0.02, 0.02)
PARTITIONS = ("train", "validation", "test")


@dataclass
class FunctionRecord:
    source_id: str
    package: str
    func_ordinal: int
    func_name: Optional[str]
    label: str
    window: InstructionWindow
    vector_nested: Optional[PathVector] = None
    vector_simple: Optional[PathVector] = None

    def func_key(self) -> str:
        return self.func_name if self.func_name is not None else str(self.func_ordinal)

    def sort_key(self) -> tuple[str, str, int]:
        return (self.package, self.source_id, self.func_ordinal)


@dataclass
class LabelSidecar:
    """Label entries keyed by (source_id, function name-or-ordinal)."""

    entries: dict[tuple[str, str], dict] = field(default_factory=dict)

    @classmethod
    def load(cls, source: Union[str, FsPath, TextIO]) -> "LabelSidecar":
        """Read JSON-lines records {"source","func","method_name","return_type","package"}."""
        if isinstance(source, (str, FsPath)):
            with open(source, "r", encoding="utf-8") as stream:
                return cls._read(stream)
        return cls._read(source)

    @classmethod
    def _read(cls, stream: TextIO) -> "LabelSidecar":
        sidecar = cls()
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line:
                continue
            obj = json.loads(line)
            key = (str(obj["source"]), str(obj["func"]))
            if key in sidecar.entries:
                raise ValueError(f"duplicate sidecar key {key} (line {lineno})")
            sidecar.entries[key] = obj
        return sidecar

    def lookup(self, source_id: str, func: FunctionNode) -> Optional[dict]:
        if func.name is not None:
            entry = self.entries.get((source_id, func.name))
            if entry is not None:
                return entry
        return self.entries.get((source_id, str(func.ordinal)))


@dataclass
class DatasetSplit:
    train: list[FunctionRecord]
    validation: list[FunctionRecord]
    test: list[FunctionRecord]
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    seed: int = 0

    def partitions(self) -> dict[str, list[FunctionRecord]]:
        return {"train": self.train, "validation": self.validation, "test": self.test}


def preprocess_method_name(raw: str) -> str:
    """Normalize a raw method name for use as a prediction target.

    Balanced angle-bracket spans (generic arguments) are removed, leading
    underscores stripped, and the result lowercased.  An empty string means
    nothing survived and the record should be dropped.  Unbalanced ``<`` is
    kept so names like ``operator<`` stay intact.
    """
    spans: list[tuple[int, int]] = []
    stack: list[int] = []
    for i, c in enumerate(raw):
        if c == "<":
            stack.append(i)
        elif c == ">" and stack:
            start = stack.pop()
            if not stack:  # outermost span only; inner ones go with it
                spans.append((start, i))
    text = raw
    for start, end in reversed(spans):
        text = text[:start] + text[end + 1:]
    return text.lstrip("_").lower()


def filter_min_count(records: Sequence[FunctionRecord], m: int) -> list[FunctionRecord]:
    """Keep records whose label occurs at least ``m`` times, preserving order."""
    if m < 1:
        raise ValueError("minimum support m must be >= 1")
    support = Counter(r.label for r in records)
    return [r for r in records if support[r.label] >= m]


def _apportion(n: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of ``n`` items to the given ratios."""
    exact = [Fraction(str(r)) * n for r in ratios]
    if sum(Fraction(str(r)) for r in ratios) != 1:
        raise ValueError("split ratios must sum to 1")
    floors = [int(q) for q in exact]
    remainders = sorted(
        range(len(ratios)),
        key=lambda i: (exact[i] - floors[i], -i),
        reverse=True,
    )
    counts = list(floors)
    for i in remainders[: n - sum(floors)]:
        counts[i] += 1
    return counts


def _package_rank(seed: int, package: str) -> str:
    return hashlib.sha256(f"{seed}:{package}".encode("utf-8")).hexdigest()


def split_by_package(
    records: Sequence[FunctionRecord],
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> DatasetSplit:
    """Assign whole packages to train/validation/test.

    Packages are ordered by a seeded hash and cut at quotas computed by
    largest-remainder apportionment, so the same seed and package set always
    produce the same assignment, record order notwithstanding, and partition
    sizes track the ratios as closely as integer counts allow.
    """
    packages = sorted({r.package for r in records})
    ranked = sorted(packages, key=lambda p: (_package_rank(seed, p), p))
    quotas = _apportion(len(ranked), ratios)
    assignment: dict[str, str] = {}
    cursor = 0
    for partition, quota in zip(PARTITIONS, quotas):
        for package in ranked[cursor : cursor + quota]:
            assignment[package] = partition
        cursor += quota
    buckets: dict[str, list[FunctionRecord]] = {p: [] for p in PARTITIONS}
    for record in records:
        buckets[assignment[record.package]].append(record)
    for bucket in buckets.values():
        bucket.sort(key=FunctionRecord.sort_key)
    return DatasetSplit(
        train=buckets["train"],
        validation=buckets["validation"],
        test=buckets["test"],
        ratios=ratios,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Record assembly
# ---------------------------------------------------------------------------


@dataclass
class RecordReport:
    built: int = 0
    missing_label: int = 0
    empty_label: int = 0


def build_records(
    corpus: Iterable[ModuleAst],
    sidecar: Optional[LabelSidecar] = None,
    set_nested: Optional[PathSet] = None,
    set_simple: Optional[PathSet] = None,
    k: int = DEFAULT_WINDOW_SIZE,
    include_immediates: bool = False,
    label_kind: str = "method_name",
) -> tuple[list[FunctionRecord], RecordReport]:
    """Assemble one record per labelable function.

    ``label_kind="method_name"`` preprocesses names; ``"return_type"`` passes
    the sidecar's token sequence through verbatim (and requires a sidecar).
    Functions without a resolvable or surviving label are dropped and counted.
    """
    if label_kind not in ("method_name", "return_type"):
        raise ValueError(f"label_kind must be 'method_name' or 'return_type', got {label_kind!r}")
    if label_kind == "return_type" and sidecar is None:
        raise ValueError("return_type labels require a sidecar")
    records: list[FunctionRecord] = []
    report = RecordReport()
    for module in corpus:
        for func in module.functions:
            package = module.source_id
            raw_label: Optional[str] = None
            if sidecar is not None:
                entry = sidecar.lookup(module.source_id, func)
                if entry is None:
                    report.missing_label += 1
                    continue
                raw_label = entry.get(label_kind)
                package = entry.get("package") or module.source_id
            elif func.name is not None:
                raw_label = func.name
            if not raw_label:
                report.missing_label += 1
                continue
            label = (
                preprocess_method_name(raw_label)
                if label_kind == "method_name"
                else str(raw_label)
            )
            if not label:
                report.empty_label += 1
                continue
            records.append(
                FunctionRecord(
                    source_id=module.source_id,
                    package=package,
                    func_ordinal=func.ordinal,
                    func_name=func.name,
                    label=label,
                    window=last_k_instructions(func, k, include_immediates=include_immediates),
                    vector_nested=vectorize(func, set_nested)[0] if set_nested else None,
                    vector_simple=vectorize(func, set_simple)[0] if set_simple else None,
                )
            )
            report.built += 1
    return records, report


# ---------------------------------------------------------------------------
# Parallel text export
# ---------------------------------------------------------------------------


@dataclass
class ExportReport:
    lines: dict[str, int] = field(default_factory=dict)
    missing_label: int = 0
    deduplicated: int = 0


def _variant_input(record: FunctionRecord, variant: Variant, cap: int) -> VariantInput:
    nested_seq = (
        to_path_sequence(record.vector_nested, cap)
        if record.vector_nested is not None
        else None
    )
    simple_seq = (
        to_path_sequence(record.vector_simple, cap)
        if record.vector_simple is not None
        else None
    )
    return assemble_variant(
        variant, window=record.window, nested_seq=nested_seq, simple_seq=simple_seq
    )


def _check_set(vector: Optional[PathVector], path_set: Optional[PathSet], want: PathMode) -> None:
    if vector is None or path_set is None:
        return
    if vector.mode is not want or path_set.mode is not want:
        raise ModeMismatchError(f"expected a {want.name} set/vector")
    if vector.dim != path_set.dim:
        raise ModeMismatchError(
            f"vector dim {vector.dim} does not match set dim {path_set.dim}"
        )


def export_parallel(
    split: DatasetSplit,
    variant: Variant,
    set_nested: Optional[PathSet],
    set_simple: Optional[PathSet],
    destination: Union[str, FsPath],
    cap: int = DEFAULT_MAGNITUDE_CAP,
    dedupe: bool = False,
) -> ExportReport:
    """Write aligned ``src``/``tgt`` token files for each partition.

    One line per record, ordered by (package, source_id, ordinal); the target
    line is the record's label token sequence.  ``dedupe`` drops repeated
    (src, tgt) pairs within a partition.
    """
    destination = FsPath(destination)
    destination.mkdir(parents=True, exist_ok=True)
    report = ExportReport()
    for partition, records in split.partitions().items():
        ordered = sorted(records, key=FunctionRecord.sort_key)
        src_path = destination / f"{partition}.{variant.value}.src.txt"
        tgt_path = destination / f"{partition}.{variant.value}.tgt.txt"
        seen_pairs: set[tuple[str, str]] = set()
        lines = 0
        with open(src_path, "w", encoding="utf-8", newline="\n") as src, open(
            tgt_path, "w", encoding="utf-8", newline="\n"
        ) as tgt:
            for record in ordered:
                if not record.label:
                    report.missing_label += 1
                    continue
                _check_set(record.vector_nested, set_nested, PathMode.NESTED)
                _check_set(record.vector_simple, set_simple, PathMode.SIMPLE)
                src_line = _variant_input(record, variant, cap).line()
                tgt_line = " ".join(record.label.split())
                if dedupe:
                    pair = (src_line, tgt_line)
                    if pair in seen_pairs:
                        report.deduplicated += 1
                        continue
                    seen_pairs.add(pair)
                src.write(src_line + "\n")
                tgt.write(tgt_line + "\n")
                lines += 1
        report.lines[partition] = lines
    return report


def sidecar_template(corpus: Iterable[ModuleAst]) -> list[dict]:
    """Skeleton sidecar rows for a corpus (useful for building label files)."""
    rows = []
    for module in corpus:
        for func in module.functions:
            rows.append(
                {
                    "source": module.source_id,
                    "func": func.name if func.name is not None else str(func.ordinal),
                    "method_name": func.name or "",
                    "return_type": "",
                    "package": os.path.basename(module.source_id),
                }
            )
    return rows
