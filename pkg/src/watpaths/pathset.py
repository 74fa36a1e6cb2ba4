"""Frozen, 1-based indexed sets of refined paths, with persistence.

A path set is built over a training corpus, then frozen: entries are sorted
lexicographically by canonical path string and indexed 1..N.  Lexicographic
order makes the indices reproducible regardless of machine or ingestion
order; the order in which paths were first discovered is retained separately
in the accumulative curve.  Frozen sets never grow -- paths a probe corpus
contains but the set does not are reported, not added.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Optional, TextIO, Union

from .errors import ManifestFormatError, UnfrozenSetError
from .parser import ModuleAst
from .paths import Path, PathMode, extract_paths

MANIFEST_MAGIC = "wasmwalker-pathset"
MANIFEST_VERSION = "v1"


@dataclass
class PathSet:
    mode: PathMode
    entries: tuple[str, ...] = ()
    provenance: str = ""
    frozen: bool = False
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, paths: Iterable[str], mode: PathMode, provenance: str = "") -> "PathSet":
        """Freeze a set over the given canonical path strings."""
        entries = tuple(sorted(set(paths)))
        return cls(
            mode=mode,
            entries=entries,
            provenance=provenance,
            frozen=True,
            _index={p: i for i, p in enumerate(entries, start=1)},
        )

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def lookup(self, p: Union[Path, str]) -> Optional[int]:
        """1-based index of a path, or None when unseen."""
        if not self.frozen:
            raise UnfrozenSetError("lookup on an unfrozen path set")
        key = p.canonical() if isinstance(p, Path) else p
        return self._index.get(key)

    def path_at(self, index: int) -> str:
        if not self.frozen:
            raise UnfrozenSetError("path_at on an unfrozen path set")
        return self.entries[index - 1]


@dataclass
class AccumulativeCurve:
    """Cumulative distinct-path count after each source, in ingestion order."""

    points: list[tuple[str, int]] = field(default_factory=list)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["source_id", "cumulative_count"])
        for source_id, count in self.points:
            writer.writerow([source_id, count])


@dataclass
class CoverageReport:
    """Classification of a probe corpus's distinct paths against a frozen set."""

    seen: int = 0
    # canonical path -> (occurrences, [(source_id, function), ...])
    unseen: dict[str, tuple[int, list[tuple[str, str]]]] = field(default_factory=dict)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["path", "count", "files", "methods"])
        for path in sorted(self.unseen):
            count, attributions = self.unseen[path]
            files = len({src for src, _ in attributions})
            writer.writerow([path, count, files, len(attributions)])


def lookup(path_set: PathSet, p: Union[Path, str]) -> Optional[int]:
    return path_set.lookup(p)


def build_path_set(
    corpus: Iterable[ModuleAst],
    mode: PathMode,
    provenance: str = "",
) -> tuple[PathSet, AccumulativeCurve]:
    """Collect every distinct refined path in the corpus into a frozen set.

    The curve records the cumulative distinct count after each source in the
    caller's order; the frozen set itself is order-independent.
    """
    if mode not in (PathMode.NESTED, PathMode.SIMPLE):
        raise ValueError("path sets are built in NESTED or SIMPLE mode")
    discovered: set[str] = set()
    curve = AccumulativeCurve()
    for module in corpus:
        for func in module.functions:
            for path in extract_paths(func, mode).counts:
                discovered.add(path.canonical())
        curve.points.append((module.source_id, len(discovered)))
    return PathSet.build(discovered, mode, provenance=provenance), curve


def coverage_verify(corpus: Iterable[ModuleAst], frozen: PathSet) -> CoverageReport:
    """Classify every distinct refined path of the corpus as seen or unseen.

    Unseen paths carry total occurrence counts and per-function attributions.
    """
    if not frozen.frozen:
        raise UnfrozenSetError("coverage_verify requires a frozen path set")
    report = CoverageReport()
    seen_paths: set[str] = set()
    for module in corpus:
        for func in module.functions:
            multiset = extract_paths(func, frozen.mode)
            for path, count in multiset.counts.items():
                key = path.canonical()
                if frozen.lookup(key) is not None:
                    seen_paths.add(key)
                    continue
                occurrences, attributions = report.unseen.get(key, (0, []))
                attributions.append((module.source_id, multiset.owner))
                report.unseen[key] = (occurrences + count, attributions)
    report.seen = len(seen_paths)
    return report


# ---------------------------------------------------------------------------
# Manifest persistence
# ---------------------------------------------------------------------------


def save_manifest(path_set: PathSet, destination: Union[str, FsPath, TextIO]) -> None:
    """Write a frozen set as a plain-text manifest (diff-able, 1 path per line)."""
    if not path_set.frozen:
        raise UnfrozenSetError("cannot save an unfrozen path set")
    if isinstance(destination, (str, FsPath)):
        with open(destination, "w", encoding="utf-8", newline="\n") as stream:
            _write_manifest(path_set, stream)
    else:
        _write_manifest(path_set, destination)


def _write_manifest(path_set: PathSet, stream: TextIO) -> None:
    stream.write(
        f"# {MANIFEST_MAGIC} {MANIFEST_VERSION} "
        f"mode={path_set.mode.name} count={len(path_set)}\n"
    )
    if path_set.provenance:
        stream.write(f"# provenance={path_set.provenance}\n")
    for index, entry in enumerate(path_set.entries, start=1):
        stream.write(f"{index}\t{entry}\n")


def load_manifest(source: Union[str, FsPath, TextIO]) -> PathSet:
    """Load a manifest written by :func:`save_manifest`.

    Raises :class:`ManifestFormatError` on a bad header, duplicate or
    out-of-order entries, or a count mismatch.
    """
    if isinstance(source, (str, FsPath)):
        with open(source, "r", encoding="utf-8") as stream:
            return _read_manifest(stream)
    return _read_manifest(source)


def _read_manifest(stream: TextIO) -> PathSet:
    header = stream.readline().rstrip("\n")
    fields = header.split()
    if (
        len(fields) < 5
        or fields[0] != "#"
        or fields[1] != MANIFEST_MAGIC
        or fields[2] != MANIFEST_VERSION
    ):
        raise ManifestFormatError(f"bad manifest header: {header!r}", 1)
    attrs = dict(f.split("=", 1) for f in fields[3:] if "=" in f)
    try:
        mode = PathMode[attrs["mode"]]
        count = int(attrs["count"])
    except (KeyError, ValueError) as exc:
        raise ManifestFormatError(f"bad manifest header: {header!r}", 1) from exc
    if mode not in (PathMode.NESTED, PathMode.SIMPLE):
        raise ManifestFormatError(f"manifest mode must be NESTED or SIMPLE, got {mode.name}", 1)

    provenance = ""
    entries: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(stream, start=2):
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("provenance="):
                provenance = body[len("provenance="):]
            continue
        index_text, sep, entry = line.partition("\t")
        if not sep or not entry:
            raise ManifestFormatError(f"expected 'index<TAB>path', got {line!r}", lineno)
        try:
            index = int(index_text)
        except ValueError:
            raise ManifestFormatError(f"bad index {index_text!r}", lineno) from None
        if index != len(entries) + 1:
            raise ManifestFormatError(f"index {index} out of order", lineno)
        if entry in seen:
            raise ManifestFormatError(f"duplicate path {entry!r}", lineno)
        if entries and entry < entries[-1]:
            raise ManifestFormatError(f"path {entry!r} breaks lexicographic order", lineno)
        if mode is PathMode.NESTED:
            nesting = entry.split(",")[:-1]
            if "block" in nesting:
                raise ManifestFormatError("NESTED entry contains 'block'", lineno)
            if any(a == b for a, b in zip(nesting, nesting[1:])):
                raise ManifestFormatError("NESTED entry has adjacent repeated labels", lineno)
        seen.add(entry)
        entries.append(entry)
    if len(entries) != count:
        raise ManifestFormatError(
            f"header declares count={count} but manifest holds {len(entries)} entries",
            1,
        )
    return PathSet.build(entries, mode, provenance=provenance)


def manifest_text(path_set: PathSet) -> str:
    """The manifest serialization as a string (convenient for tests)."""
    buffer = io.StringIO()
    _write_manifest(path_set, buffer)
    return buffer.getvalue()
