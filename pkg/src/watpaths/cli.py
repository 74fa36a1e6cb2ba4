"""Command-line pipeline over directories of .wat files.

Subcommands: build-pathset, vectorize, sequence, dataset, stats,
verify-coverage.  Data goes to files under --out, logs go to stderr, and
stdout carries a single machine-readable JSON run summary.  Per-file parse
failures are logged and skipped; only unreadable inputs or broken manifests
abort the run (exit code 2).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import signal
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterator, Optional, Sequence

from .dataset import (
    LabelSidecar,
    build_records,
    export_parallel,
    filter_min_count,
    split_by_package,
)
from .errors import WatPathsError
from .parser import ModuleAst, parse_module
from .paths import PathMode
from .pathset import build_path_set, coverage_verify, load_manifest, save_manifest
from .representations import (
    DEFAULT_MAGNITUDE_CAP,
    DEFAULT_WINDOW_SIZE,
    Variant,
    sequence_tokens,
    to_path_sequence,
    vectorize,
)
from .stats import least_common_instructions, summary, top_paths

logger = logging.getLogger("watpaths")

EXIT_OK = 0
EXIT_FATAL = 2


@dataclass
class RunConfig:
    inputs: list[str]
    out: Optional[str] = None
    mode: PathMode = PathMode.NESTED
    cap: int = DEFAULT_MAGNITUDE_CAP          # --D
    window: int = DEFAULT_WINDOW_SIZE         # --k
    min_count: int = 1                        # --m
    seed: int = 0
    timeout: float = 0.0                      # seconds per file; 0 disables
    variants: list[Variant] = field(default_factory=lambda: list(Variant))
    include_immediates: bool = False
    dedupe: bool = False

    def __post_init__(self) -> None:
        if self.cap < 1:
            raise ValueError("--D must be >= 1")
        if self.window < 1:
            raise ValueError("--k must be >= 1")
        if self.min_count < 1:
            raise ValueError("--m must be >= 1")
        if self.timeout < 0:
            raise ValueError("--timeout must be >= 0")


class FatalCliError(Exception):
    """Abort the run with exit code 2."""


class _FileTimeout(Exception):
    pass


@contextlib.contextmanager
def time_limit(seconds: float):
    """Raise _FileTimeout if the block runs longer than ``seconds`` (0 = off)."""
    if seconds <= 0:
        yield
        return

    def handler(signum, frame):
        raise _FileTimeout()

    previous = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def discover_wat_files(inputs: Sequence[str]) -> list[tuple[str, FsPath]]:
    """Resolve inputs (directories or files) to (source_id, path) pairs.

    Directories are searched recursively for ``.wat`` files; source ids are
    POSIX-style paths relative to the given directory, and results are sorted
    so corpus order is reproducible.
    """
    found: list[tuple[str, FsPath]] = []
    for item in inputs:
        root = FsPath(item)
        if root.is_dir():
            for path in sorted(root.rglob("*.wat")):
                found.append((path.relative_to(root).as_posix(), path))
        elif root.is_file():
            found.append((root.name, root))
        else:
            raise FatalCliError(f"input not readable: {item}")
    found.sort(key=lambda pair: pair[0])
    return found


def load_corpus(config: RunConfig) -> tuple[list[ModuleAst], list[dict]]:
    """Parse every discovered file, skipping and logging per-file failures."""
    corpus: list[ModuleAst] = []
    skipped: list[dict] = []
    for source_id, path in discover_wat_files(config.inputs):
        try:
            with time_limit(config.timeout):
                text = path.read_text(encoding="utf-8")
                corpus.append(parse_module(text, source_id=source_id))
        except _FileTimeout:
            logger.warning("timeout after %.1fs, skipping %s", config.timeout, source_id)
            skipped.append({"source": source_id, "reason": "timeout"})
        except (WatPathsError, UnicodeDecodeError, OSError) as exc:
            logger.warning("skipping %s: %s", source_id, exc)
            skipped.append({"source": source_id, "reason": str(exc)})
    return corpus, skipped


def _load_manifest_or_die(path: str):
    try:
        return load_manifest(path)
    except (OSError, WatPathsError) as exc:
        raise FatalCliError(f"cannot load manifest {path}: {exc}") from exc


def _out_dir(config: RunConfig) -> FsPath:
    out = FsPath(config.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _function_count(corpus: Sequence[ModuleAst]) -> int:
    return sum(len(m.functions) for m in corpus)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_build_pathset(config: RunConfig) -> dict:
    corpus, skipped = load_corpus(config)
    provenance = ";".join(config.inputs)
    path_set, curve = build_path_set(corpus, config.mode, provenance=provenance)
    out = _out_dir(config)
    manifest_path = out / f"pathset_{config.mode.value}.txt"
    curve_path = out / f"curve_{config.mode.value}.csv"
    save_manifest(path_set, manifest_path)
    with open(curve_path, "w", encoding="utf-8", newline="\n") as stream:
        curve.write_csv(stream)
    return {
        "command": "build-pathset",
        "files": len(corpus),
        "functions": _function_count(corpus),
        "entries": len(path_set),
        "skipped_files": skipped,
        "outputs": {"manifest": str(manifest_path), "curve": str(curve_path)},
    }


def cmd_vectorize(config: RunConfig, manifest: str) -> dict:
    path_set = _load_manifest_or_die(manifest)
    corpus, skipped = load_corpus(config)
    out = _out_dir(config)
    vectors_path = out / "vectors.jsonl"
    skipped_report: dict[str, tuple[int, set[str], set[str]]] = {}
    records = 0
    with open(vectors_path, "w", encoding="utf-8", newline="\n") as stream:
        for module in corpus:
            for func in module.functions:
                vector, unseen = vectorize(func, path_set)
                func_key = func.name if func.name is not None else str(func.ordinal)
                stream.write(json.dumps(vector.to_json_obj(module.source_id, func_key)) + "\n")
                records += 1
                for path in unseen:
                    count, files, methods = skipped_report.get(path, (0, set(), set()))
                    files.add(module.source_id)
                    methods.add((module.source_id, func_key))
                    skipped_report[path] = (count + 1, files, methods)
    skipped_path = out / "skipped_paths.csv"
    with open(skipped_path, "w", encoding="utf-8", newline="\n") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["path", "count", "files", "methods"])
        for path in sorted(skipped_report):
            count, files, methods = skipped_report[path]
            writer.writerow([path, count, len(files), len(methods)])
    return {
        "command": "vectorize",
        "files": len(corpus),
        "functions": records,
        "unseen_paths": len(skipped_report),
        "skipped_files": skipped,
        "outputs": {"vectors": str(vectors_path), "skipped": str(skipped_path)},
    }


def cmd_sequence(config: RunConfig, manifest: str) -> dict:
    path_set = _load_manifest_or_die(manifest)
    corpus, skipped = load_corpus(config)
    out = _out_dir(config)
    sequences_path = out / "sequences.txt"
    lines = 0
    with open(sequences_path, "w", encoding="utf-8", newline="\n") as stream:
        for module in corpus:
            for func in module.functions:
                vector, _ = vectorize(func, path_set)
                seq = to_path_sequence(vector, config.cap)
                stream.write(" ".join(sequence_tokens(seq)) + "\n")
                lines += 1
    return {
        "command": "sequence",
        "files": len(corpus),
        "functions": lines,
        "skipped_files": skipped,
        "outputs": {"sequences": str(sequences_path)},
    }


def _required_modes(variants: Sequence[Variant]) -> tuple[bool, bool]:
    needs_nested = any(v in (Variant.INP, Variant.NP) for v in variants)
    needs_simple = any(v in (Variant.ISP, Variant.SP) for v in variants)
    return needs_nested, needs_simple


def cmd_dataset(
    config: RunConfig,
    nested_manifest: Optional[str],
    simple_manifest: Optional[str],
    sidecar_path: Optional[str],
    label_kind: str,
) -> dict:
    needs_nested, needs_simple = _required_modes(config.variants)
    if needs_nested and not nested_manifest:
        raise FatalCliError("selected variants require --nested-manifest")
    if needs_simple and not simple_manifest:
        raise FatalCliError("selected variants require --simple-manifest")
    set_nested = _load_manifest_or_die(nested_manifest) if nested_manifest else None
    set_simple = _load_manifest_or_die(simple_manifest) if simple_manifest else None
    if set_nested and set_nested.mode is not PathMode.NESTED:
        raise FatalCliError("--nested-manifest is not a NESTED manifest")
    if set_simple and set_simple.mode is not PathMode.SIMPLE:
        raise FatalCliError("--simple-manifest is not a SIMPLE manifest")
    sidecar = None
    if sidecar_path:
        try:
            sidecar = LabelSidecar.load(sidecar_path)
        except (OSError, ValueError) as exc:
            raise FatalCliError(f"cannot load sidecar {sidecar_path}: {exc}") from exc

    corpus, skipped = load_corpus(config)
    records, record_report = build_records(
        corpus,
        sidecar=sidecar,
        set_nested=set_nested,
        set_simple=set_simple,
        k=config.window,
        include_immediates=config.include_immediates,
        label_kind=label_kind,
    )
    records = filter_min_count(records, config.min_count)
    split = split_by_package(records, seed=config.seed)
    out = _out_dir(config)
    exports = {}
    missing = record_report.missing_label + record_report.empty_label
    for variant in config.variants:
        report = export_parallel(
            split,
            variant,
            set_nested,
            set_simple,
            out,
            cap=config.cap,
            dedupe=config.dedupe,
        )
        exports[variant.value] = report.lines
        missing += report.missing_label
    print(f"records without usable labels: {missing}", file=sys.stderr)
    return {
        "command": "dataset",
        "files": len(corpus),
        "records": len(records),
        "partitions": {name: len(part) for name, part in split.partitions().items()},
        "missing_labels": missing,
        "skipped_files": skipped,
        "lines": exports,
        "outputs": {"directory": str(out)},
    }


def cmd_stats(config: RunConfig, top: int, threshold: int) -> dict:
    corpus, skipped = load_corpus(config)
    out = _out_dir(config)
    table = top_paths(corpus, config.mode, top) if _function_count(corpus) else None
    top_path = out / "top_paths.csv"
    with open(top_path, "w", encoding="utf-8", newline="\n") as stream:
        if table is not None:
            table.write_csv(stream)
        else:
            stream.write("rank,path,count,percent\n")
    rare = least_common_instructions(corpus, threshold)
    rare_path = out / "rare_instructions.csv"
    with open(rare_path, "w", encoding="utf-8", newline="\n") as stream:
        rare.write_csv(stream)
    _, curve = build_path_set(corpus, config.mode)
    curve_path = out / f"curve_{config.mode.value}.csv"
    with open(curve_path, "w", encoding="utf-8", newline="\n") as stream:
        curve.write_csv(stream)
    corpus_summary = summary(corpus, config.mode)
    summary_path = out / "summary.json"
    with open(summary_path, "w", encoding="utf-8", newline="\n") as stream:
        json.dump(corpus_summary.to_json_obj(), stream, indent=2)
        stream.write("\n")
    return {
        "command": "stats",
        "files": len(corpus),
        "functions": corpus_summary.function_count,
        "skipped_files": skipped,
        "summary": corpus_summary.to_json_obj(),
        "outputs": {
            "top_paths": str(top_path),
            "rare_instructions": str(rare_path),
            "curve": str(curve_path),
            "summary": str(summary_path),
        },
    }


def cmd_verify_coverage(config: RunConfig, manifest: str) -> dict:
    path_set = _load_manifest_or_die(manifest)
    corpus, skipped = load_corpus(config)
    report = coverage_verify(corpus, path_set)
    out = _out_dir(config)
    coverage_path = out / "coverage.csv"
    with open(coverage_path, "w", encoding="utf-8", newline="\n") as stream:
        report.write_csv(stream)
    return {
        "command": "verify-coverage",
        "files": len(corpus),
        "seen": report.seen,
        "unseen": len(report.unseen),
        "skipped_files": skipped,
        "outputs": {"coverage": str(coverage_path)},
    }


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("inputs", nargs="+", help=".wat files or directories")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--timeout", type=float, default=0.0,
                        help="per-file parse/extract budget in seconds (0 = none)")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="watpaths",
        description="Path-based code representations for WAT functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-pathset", help="collect refined paths into a frozen manifest")
    _add_common(p)
    p.add_argument("--mode", choices=["nested", "simple"], default="nested")

    p = sub.add_parser("vectorize", help="emit per-function path-count vectors as JSONL")
    _add_common(p)
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("sequence", help="emit per-function path-sequence token lines")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--D", dest="cap", type=int, default=DEFAULT_MAGNITUDE_CAP,
                   help="magnitude normalization cap")

    p = sub.add_parser("dataset", help="export parallel src/tgt files per split and variant")
    _add_common(p)
    p.add_argument("--nested-manifest")
    p.add_argument("--simple-manifest")
    p.add_argument("--sidecar", help="JSON-lines label sidecar")
    p.add_argument("--label", choices=["method_name", "return_type"], default="method_name")
    p.add_argument("--variants", default="INP,ISP,I,NP,SP",
                   help="comma-separated subset of INP,ISP,I,NP,SP")
    p.add_argument("--m", dest="min_count", type=int, default=1,
                   help="minimum records per label")
    p.add_argument("--k", dest="window", type=int, default=DEFAULT_WINDOW_SIZE,
                   help="instruction window size")
    p.add_argument("--D", dest="cap", type=int, default=DEFAULT_MAGNITUDE_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-immediates", action="store_true")
    p.add_argument("--dedupe", action="store_true")

    p = sub.add_parser("stats", help="top paths, rare instructions, curve, summary")
    _add_common(p)
    p.add_argument("--mode", choices=["nested", "simple"], default="nested")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--threshold", type=int, default=5,
                   help="max method count for the rare-instruction table")

    p = sub.add_parser("verify-coverage", help="probe a corpus against a frozen manifest")
    _add_common(p)
    p.add_argument("--manifest", required=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    variants = list(Variant)
    if getattr(args, "variants", None):
        try:
            variants = [Variant[name.strip()] for name in args.variants.split(",") if name.strip()]
        except KeyError as exc:
            raise FatalCliError(f"unknown variant {exc.args[0]!r}") from exc
    return RunConfig(
        inputs=list(args.inputs),
        out=args.out,
        mode=PathMode(getattr(args, "mode", "nested")),
        cap=getattr(args, "cap", DEFAULT_MAGNITUDE_CAP),
        window=getattr(args, "window", DEFAULT_WINDOW_SIZE),
        min_count=getattr(args, "min_count", 1),
        seed=getattr(args, "seed", 0),
        timeout=args.timeout,
        variants=variants,
        include_immediates=getattr(args, "include_immediates", False),
        dedupe=getattr(args, "dedupe", False),
    )


def _configure_logging() -> None:
    # rebind on every invocation so the handler tracks the current sys.stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers = [handler]
    logger.setLevel(logging.INFO)
    logger.propagate = False


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    args = build_arg_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "build-pathset":
            result = cmd_build_pathset(config)
        elif args.command == "vectorize":
            result = cmd_vectorize(config, args.manifest)
        elif args.command == "sequence":
            result = cmd_sequence(config, args.manifest)
        elif args.command == "dataset":
            result = cmd_dataset(config, args.nested_manifest, args.simple_manifest,
                                 args.sidecar, args.label)
        elif args.command == "stats":
            result = cmd_stats(config, args.top, args.threshold)
        elif args.command == "verify-coverage":
            result = cmd_verify_coverage(config, args.manifest)
        else:  # pragma: no cover - argparse enforces the choices
            raise FatalCliError(f"unknown command {args.command}")
    except (FatalCliError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_FATAL
    print(json.dumps(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
