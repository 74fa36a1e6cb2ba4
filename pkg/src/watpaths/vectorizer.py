"""scikit-learn estimator facade over path-set learning and vectorization.

``WatPathVectorizer`` behaves like a text vectorizer: ``fit`` learns a frozen
path vocabulary from a corpus of WAT modules and ``transform`` maps every
function to a sparse row of path counts, so the representation drops straight
into sklearn pipelines.
"""

from __future__ import annotations

import os
from typing import Iterable, Union

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .parser import ModuleAst, parse_module
from .paths import PathMode
from .pathset import build_path_set
from .representations import vectorize

ModuleInput = Union[str, os.PathLike, ModuleAst]


def as_modules(X: Iterable[ModuleInput], input: str = "content") -> list[ModuleAst]:
    """Validate and normalize corpus input to parsed modules.

    ``input="content"`` treats string items as WAT source text;
    ``input="filename"`` reads them from disk.  Already-parsed
    :class:`ModuleAst` items pass through either way.
    """
    if input not in ("content", "filename"):
        raise ValueError(f"input must be 'content' or 'filename', got {input!r}")
    modules: list[ModuleAst] = []
    for position, item in enumerate(X):
        if isinstance(item, ModuleAst):
            modules.append(item)
        elif isinstance(item, os.PathLike) or (isinstance(item, str) and input == "filename"):
            path = os.fspath(item)
            with open(path, "r", encoding="utf-8") as handle:
                modules.append(parse_module(handle.read(), source_id=path))
        elif isinstance(item, str):
            modules.append(parse_module(item, source_id=f"<content:{position}>"))
        else:
            raise TypeError(
                f"corpus items must be WAT text, paths or ModuleAst, got {type(item).__name__}"
            )
    return modules


class WatPathVectorizer(BaseEstimator, TransformerMixin):
    """Map WAT functions to sparse path-count vectors over a learned path set.

    Parameters
    ----------
    mode : {"nested", "simple"}, default="nested"
        Refinement mode of the learned path set.
    input : {"content", "filename"}, default="content"
        How string corpus items are interpreted.

    Attributes
    ----------
    path_set_ : PathSet
        The frozen, lexicographically indexed path set learned by ``fit``.
    curve_ : AccumulativeCurve
        Cumulative distinct-path counts in ingestion order.
    """

    def __init__(self, mode: str = "nested", input: str = "content"):
        self.mode = mode
        self.input = input

    def _path_mode(self) -> PathMode:
        try:
            mode = PathMode(self.mode)
        except ValueError:
            raise ValueError(f"mode must be 'nested' or 'simple', got {self.mode!r}") from None
        if mode not in (PathMode.NESTED, PathMode.SIMPLE):
            raise ValueError(f"mode must be 'nested' or 'simple', got {self.mode!r}")
        return mode

    def fit(self, X: Iterable[ModuleInput], y=None) -> "WatPathVectorizer":
        modules = as_modules(X, input=self.input)
        self.path_set_, self.curve_ = build_path_set(modules, self._path_mode())
        return self

    def transform(self, X: Iterable[ModuleInput]) -> sp.csr_matrix:
        """One sparse row of path counts per function, across all modules in order.

        Paths absent from the learned set are skipped (the frozen set never
        grows at transform time).
        """
        check_is_fitted(self, "path_set_")
        modules = as_modules(X, input=self.input)
        data: list[int] = []
        rows: list[int] = []
        cols: list[int] = []
        row = 0
        for module in modules:
            for func in module.functions:
                vector, _ = vectorize(func, self.path_set_)
                for index, count in vector.counts.items():
                    rows.append(row)
                    cols.append(index - 1)
                    data.append(count)
                row += 1
        return sp.csr_matrix(
            (data, (rows, cols)), shape=(row, self.path_set_.dim), dtype=np.int64
        )

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "path_set_")
        return np.asarray(self.path_set_.entries, dtype=object)
