"""watpaths: path-based code representations for WebAssembly text functions.

Parses WAT modules into per-function ASTs, extracts and refines root-to-leaf
paths, freezes indexed path sets, and renders the representations (count
vectors, tuple sequences, instruction windows, model-input variants) used to
assemble labeled datasets for method-name and return-type models.
"""

from .errors import (
    ManifestFormatError,
    MalformedTokenError,
    MissingLabelError,
    ModeMismatchError,
    UnbalancedParensError,
    UnfrozenSetError,
    WatPathsError,
)
from .parser import (
    AstNode,
    FunctionNode,
    ModuleAst,
    NodeKind,
    linearize,
    linearize_with_immediates,
    parse_module,
)
from .paths import (
    Path,
    PathMode,
    PathMultiset,
    collapse_repeats,
    drop_label,
    extract_paths,
    extract_raw_paths,
    refine,
)
from .pathset import (
    AccumulativeCurve,
    CoverageReport,
    PathSet,
    build_path_set,
    coverage_verify,
    load_manifest,
    lookup,
    manifest_text,
    save_manifest,
)
from .representations import (
    DEFAULT_MAGNITUDE_CAP,
    DEFAULT_WINDOW_SIZE,
    SEPARATOR_TOKEN,
    InstructionWindow,
    PathSequence,
    PathVector,
    Variant,
    VariantInput,
    assemble_variant,
    last_k_instructions,
    sequence_tokens,
    to_path_sequence,
    vectorize,
)
from .dataset import (
    DatasetSplit,
    FunctionRecord,
    LabelSidecar,
    build_records,
    export_parallel,
    filter_min_count,
    preprocess_method_name,
    split_by_package,
)
from .stats import (
    CorpusSummary,
    PathFrequencyTable,
    RareInstructionTable,
    least_common_instructions,
    summary,
    top_paths,
)
from .vectorizer import WatPathVectorizer, as_modules

__version__ = "0.1.0"

__all__ = [
    "AstNode", "FunctionNode", "ModuleAst", "NodeKind",
    "parse_module", "linearize", "linearize_with_immediates",
    "Path", "PathMode", "PathMultiset",
    "extract_raw_paths", "extract_paths", "collapse_repeats", "drop_label", "refine",
    "PathSet", "AccumulativeCurve", "CoverageReport",
    "build_path_set", "lookup", "save_manifest", "load_manifest", "manifest_text",
    "coverage_verify",
    "PathVector", "PathSequence", "InstructionWindow", "Variant", "VariantInput",
    "vectorize", "to_path_sequence", "last_k_instructions", "assemble_variant",
    "sequence_tokens",
    "DEFAULT_MAGNITUDE_CAP", "DEFAULT_WINDOW_SIZE", "SEPARATOR_TOKEN",
    "FunctionRecord", "LabelSidecar", "DatasetSplit",
    "preprocess_method_name", "filter_min_count", "split_by_package",
    "build_records", "export_parallel",
    "PathFrequencyTable", "RareInstructionTable", "CorpusSummary",
    "top_paths", "least_common_instructions", "summary",
    "WatPathVectorizer", "as_modules",
    "WatPathsError", "UnbalancedParensError", "MalformedTokenError",
    "UnfrozenSetError", "ManifestFormatError", "ModeMismatchError",
    "MissingLabelError",
]
