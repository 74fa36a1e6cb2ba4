"""Per-function code representations over a frozen path set.

Two representations are produced: a sparse count vector (one dimension per
indexed path) and its compact tuple-sequence encoding, where every non-zero
vector entry ``e`` at index ``n`` becomes a tuple ``<n, m>`` with magnitude
``m = ceil(e * D / sum(v))`` normalized into ``1..D``.  A trailing
instruction window and five token-stream layouts combine these for
sequence-model consumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import ModeMismatchError, UnfrozenSetError
from .parser import FunctionNode, linearize, linearize_with_immediates
from .paths import PathMode, extract_paths
from .pathset import PathSet

DEFAULT_MAGNITUDE_CAP = 30
DEFAULT_WINDOW_SIZE = 20
SEPARATOR_TOKEN = "<SEP>"


@dataclass
class PathVector:
    """Sparse per-function path counts over a frozen set of ``dim`` paths."""

    dim: int
    counts: dict[int, int]  # 1-based index -> count >= 1; zeros omitted
    mode: PathMode
    provenance: str = ""

    def total(self) -> int:
        return sum(self.counts.values())

    def nonzero(self) -> int:
        return len(self.counts)

    def to_dense(self) -> list[int]:
        dense = [0] * self.dim
        for index, count in self.counts.items():
            dense[index - 1] = count
        return dense

    def to_json_obj(self, source: str, func: str) -> dict:
        """JSONL record shape: {"source","func","mode","dim","counts"}."""
        return {
            "source": source,
            "func": func,
            "mode": self.mode.name,
            "dim": self.dim,
            "counts": {str(i): self.counts[i] for i in sorted(self.counts)},
        }


@dataclass
class PathSequence:
    """Ordered ``<index, magnitude>`` tuples for the non-zero vector entries."""

    tuples: list[tuple[int, int]]
    cap: int = DEFAULT_MAGNITUDE_CAP
    mode: PathMode = PathMode.NESTED


@dataclass
class InstructionWindow:
    """The trailing ``k`` instruction mnemonics of a function, in order."""

    tokens: list[str]
    k: int = DEFAULT_WINDOW_SIZE


class Variant(Enum):
    INP = "INP"  # instruction window ++ <SEP> ++ nested path sequence
    ISP = "ISP"  # instruction window ++ <SEP> ++ simple path sequence
    I = "I"      # instruction window only
    NP = "NP"    # nested path sequence only
    SP = "SP"    # simple path sequence only


@dataclass
class VariantInput:
    variant: Variant
    tokens: list[str] = field(default_factory=list)

    def line(self) -> str:
        return " ".join(self.tokens)


def vectorize(func: FunctionNode, path_set: PathSet) -> tuple[PathVector, list[str]]:
    """Count the function's refined paths against a frozen set.

    Paths missing from the set are skipped, one list entry per skipped
    occurrence, so ``vector.total() + len(skipped)`` equals the function's
    instruction count.
    """
    if not path_set.frozen:
        raise UnfrozenSetError("vectorize requires a frozen path set")
    counts: dict[int, int] = {}
    skipped: list[str] = []
    multiset = extract_paths(func, path_set.mode)
    for path in sorted(multiset.counts, key=lambda p: p.canonical()):
        count = multiset.counts[path]
        index = path_set.lookup(path)
        if index is None:
            skipped.extend([path.canonical()] * count)
        else:
            counts[index] = count
    vector = PathVector(
        dim=path_set.dim,
        counts=counts,
        mode=path_set.mode,
        provenance=path_set.provenance,
    )
    return vector, skipped


def to_path_sequence(v: PathVector, cap: int = DEFAULT_MAGNITUDE_CAP) -> PathSequence:
    """Encode the non-zero entries of ``v`` as ``<index, magnitude>`` tuples.

    Magnitudes use exact integer ceiling division, so they always land in
    ``1..cap`` (every entry satisfies ``1 <= e <= total``).
    """
    if cap < 1:
        raise ValueError("magnitude cap must be >= 1")
    total = v.total()
    tuples = [
        (index, (v.counts[index] * cap + total - 1) // total)
        for index in sorted(v.counts)
    ]
    return PathSequence(tuples=tuples, cap=cap, mode=v.mode)


def last_k_instructions(
    func: FunctionNode,
    k: int = DEFAULT_WINDOW_SIZE,
    include_immediates: bool = False,
) -> InstructionWindow:
    """The trailing ``min(k, total)`` instruction mnemonics of the function.

    ``include_immediates`` appends each instruction's literal immediates as
    separate tokens (for replicating instruction-sequence models that keep
    them); the window still selects by instruction count.
    """
    if k < 1:
        raise ValueError("window size must be >= 1")
    if include_immediates:
        tokens: list[str] = []
        for mnemonic, immediates in linearize_with_immediates(func)[-k:]:
            tokens.append(mnemonic)
            tokens.extend(immediates)
        return InstructionWindow(tokens=tokens, k=k)
    return InstructionWindow(tokens=linearize(func)[-k:], k=k)


def sequence_tokens(seq: PathSequence) -> list[str]:
    """Render tuples as alternating ``P{n}`` / ``C{m}`` token pairs."""
    tokens: list[str] = []
    for index, magnitude in seq.tuples:
        tokens.append(f"P{index}")
        tokens.append(f"C{magnitude}")
    return tokens


def assemble_variant(
    variant: Variant,
    window: Optional[InstructionWindow] = None,
    nested_seq: Optional[PathSequence] = None,
    simple_seq: Optional[PathSequence] = None,
) -> VariantInput:
    """Lay out the token stream for one model-input variant.

    Concatenated variants are the window tokens, a ``<SEP>`` marker, then the
    path-sequence tokens.  Sequences must come from a set of the matching
    mode, otherwise :class:`ModeMismatchError` is raised.
    """
    if nested_seq is not None and nested_seq.mode is not PathMode.NESTED:
        raise ModeMismatchError(
            f"nested sequence built from a {nested_seq.mode.name} set"
        )
    if simple_seq is not None and simple_seq.mode is not PathMode.SIMPLE:
        raise ModeMismatchError(
            f"simple sequence built from a {simple_seq.mode.name} set"
        )

    def require(value, what: str):
        if value is None:
            raise ValueError(f"variant {variant.value} requires {what}")
        return value

    if variant is Variant.I:
        return VariantInput(variant, list(require(window, "an instruction window").tokens))
    if variant is Variant.NP:
        return VariantInput(variant, sequence_tokens(require(nested_seq, "a nested sequence")))
    if variant is Variant.SP:
        return VariantInput(variant, sequence_tokens(require(simple_seq, "a simple sequence")))
    window_tokens = list(require(window, "an instruction window").tokens)
    if variant is Variant.INP:
        tail = sequence_tokens(require(nested_seq, "a nested sequence"))
    elif variant is Variant.ISP:
        tail = sequence_tokens(require(simple_seq, "a simple sequence"))
    else:
        raise ValueError(f"unknown variant: {variant!r}")
    return VariantInput(variant, window_tokens + [SEPARATOR_TOKEN] + tail)
