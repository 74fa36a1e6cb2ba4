"""Root-to-leaf path extraction and refinement for WAT function ASTs.

A path is the sequence of nesting constructs (``block``/``if``/``loop``)
between the function root (excluded) and one instruction, followed by that
instruction's mnemonic.  Refinement reduces the path space in stages:

* RAW        -- as extracted.
* COLLAPSED  -- runs of equal adjacent nesting labels collapsed to one.
* NESTED     -- COLLAPSED with all ``block`` labels dropped, then collapsed
                again (dropping can create fresh adjacent repeats).
* SIMPLE     -- the bare instruction mnemonic, no nesting at all.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import groupby

from .parser import FunctionNode, AstNode, NodeKind, NESTING_CONSTRUCTS


class PathMode(Enum):
    RAW = "raw"
    COLLAPSED = "collapsed"
    NESTED = "nested"
    SIMPLE = "simple"

    @property
    def reduction_rank(self) -> int:
        """Position in the RAW -> COLLAPSED -> NESTED -> SIMPLE reduction order."""
        return _MODE_ORDER.index(self)


_MODE_ORDER = [PathMode.RAW, PathMode.COLLAPSED, PathMode.NESTED, PathMode.SIMPLE]


@dataclass(frozen=True)
class Path:
    """An ordered nesting-label list plus one terminal instruction mnemonic."""

    nesting: tuple[str, ...]
    terminal: str

    def __post_init__(self) -> None:
        if not self.terminal:
            raise ValueError("path terminal must be non-empty")

    def canonical(self) -> str:
        """Comma-joined form, e.g. ``"if,loop,local.get"``."""
        return ",".join((*self.nesting, self.terminal))

    @classmethod
    def from_canonical(cls, text: str) -> "Path":
        parts = text.split(",")
        return cls(tuple(parts[:-1]), parts[-1])

    def __str__(self) -> str:
        return self.canonical()


@dataclass
class PathMultiset:
    """Path -> occurrence count for one function."""

    owner: str
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())

    def distinct(self) -> int:
        return len(self.counts)


def _owner_id(func: FunctionNode) -> str:
    return func.name if func.name is not None else str(func.ordinal)


def extract_raw_paths(func: FunctionNode) -> PathMultiset:
    """One RAW path per instruction occurrence in the function body.

    Nesting records the ``block``/``if``/``loop`` ancestors between the
    ``func`` root (exclusive) and the instruction; ``then``/``else`` and other
    constructs are transparent, and instructions folded inside another
    instruction inherit only construct ancestors.
    """
    multiset = PathMultiset(owner=_owner_id(func))

    def walk(node: AstNode, nesting: tuple[str, ...]) -> None:
        if node.kind is NodeKind.INSTRUCTION:
            multiset.counts[Path(nesting, node.label)] += 1
            for child in node.children:
                walk(child, nesting)
        elif node.kind is NodeKind.CONSTRUCT:
            child_nesting = nesting
            if node.label in NESTING_CONSTRUCTS:
                child_nesting = nesting + (node.label,)
            for child in node.children:
                walk(child, child_nesting)
        # literals terminate nothing and contribute nothing

    for child in func.body.children:
        walk(child, ())
    return multiset


def collapse_repeats(p: Path) -> Path:
    """Collapse maximal runs of equal adjacent nesting labels to one occurrence."""
    collapsed = tuple(label for label, _ in groupby(p.nesting))
    return Path(collapsed, p.terminal)


def drop_label(p: Path, label: str) -> Path:
    """Remove every occurrence of ``label`` from the nesting."""
    if label not in NESTING_CONSTRUCTS:
        raise ValueError(f"not a nesting label: {label!r}")
    return Path(tuple(l for l in p.nesting if l != label), p.terminal)


def refine(p: Path, mode: PathMode) -> Path:
    """Apply the reduction pipeline to a RAW path."""
    if mode is PathMode.RAW:
        return p
    collapsed = collapse_repeats(p)
    if mode is PathMode.COLLAPSED:
        return collapsed
    if mode is PathMode.NESTED:
        return collapse_repeats(drop_label(collapsed, "block"))
    if mode is PathMode.SIMPLE:
        return Path((), p.terminal)
    raise ValueError(f"unknown mode: {mode!r}")


def extract_paths(func: FunctionNode, mode: PathMode) -> PathMultiset:
    """Extract RAW paths and refine each to ``mode``, merging counts."""
    raw = extract_raw_paths(func)
    if mode is PathMode.RAW:
        return raw
    refined = PathMultiset(owner=raw.owner)
    for path, count in raw.counts.items():
        refined.counts[refine(path, mode)] += count
    return refined
