"""Corpus-level frequency tables and summary statistics.

All aggregations are associative merges of per-function count maps, so the
results are independent of corpus file order.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

from .parser import ModuleAst
from .paths import PathMode, extract_paths

MEAN_UNDEFINED_FLAG = "empty_corpus"


@dataclass
class PathFrequencyTable:
    # (rank, canonical path, count, percent-of-total)
    rows: list[tuple[int, str, int, float]] = field(default_factory=list)
    total: int = 0

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["rank", "path", "count", "percent"])
        for rank, path, count, percent in self.rows:
            writer.writerow([rank, path, count, f"{percent:.2f}"])


@dataclass
class RareInstructionTable:
    # (mnemonic, sorted project names, file count, method count)
    rows: list[tuple[str, tuple[str, ...], int, int]] = field(default_factory=list)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["mnemonic", "projects", "files", "methods"])
        for mnemonic, projects, files, methods in self.rows:
            writer.writerow([mnemonic, ";".join(projects), files, methods])


@dataclass
class CorpusSummary:
    distinct_paths: int
    total_occurrences: int
    function_count: int
    mean_nonzero_per_function: float
    empty: bool

    def to_json_obj(self) -> dict:
        obj = {
            "distinct_paths": self.distinct_paths,
            "total_occurrences": self.total_occurrences,
            "function_count": self.function_count,
            "mean_nonzero_per_function": self.mean_nonzero_per_function,
        }
        if self.empty:
            obj["flag"] = MEAN_UNDEFINED_FLAG
        return obj


def top_paths(corpus: Iterable[ModuleAst], mode: PathMode, k: int) -> PathFrequencyTable:
    """The ``k`` most frequent refined paths; ties broken lexicographically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    totals: Counter = Counter()
    for module in corpus:
        for func in module.functions:
            for path, count in extract_paths(func, mode).counts.items():
                totals[path.canonical()] += count
    grand_total = sum(totals.values())
    ordered = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    table = PathFrequencyTable(total=grand_total)
    for rank, (path, count) in enumerate(ordered[:k], start=1):
        table.rows.append((rank, path, count, 100.0 * count / grand_total))
    return table


def least_common_instructions(
    corpus: Iterable[ModuleAst],
    threshold: int,
    packages: Optional[dict[str, str]] = None,
) -> RareInstructionTable:
    """Mnemonics used by at most ``threshold`` methods, with attributions.

    ``packages`` maps source_id to a project name for attribution; sources
    without a mapping attribute to themselves.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    packages = packages or {}
    files: dict[str, set[str]] = {}
    methods: dict[str, set[tuple[str, str]]] = {}
    projects: dict[str, set[str]] = {}
    for module in corpus:
        project = packages.get(module.source_id, module.source_id)
        for func in module.functions:
            multiset = extract_paths(func, PathMode.SIMPLE)
            for path in multiset.counts:
                mnemonic = path.terminal
                files.setdefault(mnemonic, set()).add(module.source_id)
                methods.setdefault(mnemonic, set()).add((module.source_id, multiset.owner))
                projects.setdefault(mnemonic, set()).add(project)
    table = RareInstructionTable()
    for mnemonic in methods:
        method_count = len(methods[mnemonic])
        if method_count <= threshold:
            table.rows.append(
                (
                    mnemonic,
                    tuple(sorted(projects[mnemonic])),
                    len(files[mnemonic]),
                    method_count,
                )
            )
    table.rows.sort(key=lambda row: (row[3], row[0]))
    return table


def summary(corpus: Iterable[ModuleAst], mode: PathMode) -> CorpusSummary:
    """Distinct/total path counts and the mean distinct-path count per function."""
    distinct: set[str] = set()
    total = 0
    function_count = 0
    nonzero_sum = 0
    for module in corpus:
        for func in module.functions:
            multiset = extract_paths(func, mode)
            function_count += 1
            total += multiset.total()
            nonzero_sum += multiset.distinct()
            for path in multiset.counts:
                distinct.add(path.canonical())
    if function_count == 0:
        return CorpusSummary(0, 0, 0, 0.0, empty=True)
    return CorpusSummary(
        distinct_paths=len(distinct),
        total_occurrences=total,
        function_count=function_count,
        mean_nonzero_per_function=nonzero_sum / function_count,
        empty=False,
    )
