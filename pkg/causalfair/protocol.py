# Copyright 2024 The causalfair Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Implement the sample container passed between the sampler, the estimators and the validators.
A SampleMatrix holds n rows over named float64 columns plus meta info (seed, provenance).
"""

import copy
import io
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from .utils.py_functional import format_number


__all__ = ["SampleMatrix"]


@dataclass
class SampleMatrix:
    """
    A SampleMatrix is an ordered dict of equally long 1-D float64 columns and a meta_info dict. Columns follow
    the graph's declaration order; meta_info records the seed and the provenance of the draw.
    """

    columns: dict[str, NDArray] = field(default_factory=dict)
    meta_info: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.check_consistency()

    def __len__(self) -> int:
        if len(self.columns) == 0:
            return 0

        pivot_key = next(iter(self.columns))
        return self.columns[pivot_key].shape[0]

    def __contains__(self, key: str) -> bool:
        return key in self.columns

    def __getitem__(self, item: Union[str, slice, list[int], NDArray]) -> Union[NDArray, "SampleMatrix"]:
        if isinstance(item, str):
            if item not in self.columns:
                raise KeyError(f"Column {item} not in sample matrix, available: {self.names}.")

            return self.columns[item]

        if isinstance(item, slice):
            return self.slice_select(item.start, item.stop, item.step)

        if isinstance(item, (list, np.ndarray)):
            return self.index_select(item)

        raise TypeError(f"Indexing with {type(item)} is not supported.")

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def check_consistency(self):
        """Check that every column is a 1-D float64 array and all columns have the same length."""
        num_rows = None
        for key, value in self.columns.items():
            assert isinstance(value, np.ndarray), f"column {key} must be a numpy array, got {type(value)}."
            assert value.ndim == 1, f"column {key} must be 1-D, got shape {value.shape}."
            assert value.dtype == np.float64, f"column {key} must be float64, got {value.dtype}."
            if num_rows is None:
                num_rows = value.shape[0]
            else:
                assert value.shape[0] == num_rows, f"column {key} has {value.shape[0]} rows, expected {num_rows}."

    @classmethod
    def from_dict(
        cls, columns: dict[str, Union[NDArray, list[float]]], meta_info: Optional[dict[str, Any]] = None
    ) -> "SampleMatrix":
        columns = {key: np.asarray(value, dtype=np.float64).reshape(-1) for key, value in columns.items()}
        return cls(columns=columns, meta_info=meta_info or {})

    def to_dict_of_arrays(self) -> dict[str, NDArray]:
        return dict(self.columns)

    def select(self, keys: Optional[Iterable[str]] = None, deepcopy: bool = False) -> "SampleMatrix":
        """Select a subset of columns, in the order given.

        Args:
            keys (list, optional): column names to keep, unknown names are ignored.
            deepcopy (bool): copy the arrays and the meta info.

        Returns:
            SampleMatrix: the matrix with the selected columns.
        """
        if keys is not None:
            columns = {key: self.columns[key] for key in keys if key in self.columns}
        else:
            columns = dict(self.columns)

        meta_info = self.meta_info
        if deepcopy:
            columns = {key: value.copy() for key, value in columns.items()}
            meta_info = copy.deepcopy(meta_info)

        return SampleMatrix(columns=columns, meta_info=meta_info)

    def index_select(self, index: Union[list[int], NDArray]) -> "SampleMatrix":
        if isinstance(index, list):
            index = np.array(index, dtype=bool if index and isinstance(index[0], bool) else np.int64)

        columns = {key: value[index] for key, value in self.columns.items()}
        return SampleMatrix(columns=columns, meta_info=self.meta_info)

    def slice_select(
        self, start: Optional[int] = None, end: Optional[int] = None, step: Optional[int] = None
    ) -> "SampleMatrix":
        index = slice(start, end, step)
        columns = {key: value[index] for key, value in self.columns.items()}
        return SampleMatrix(columns=columns, meta_info=self.meta_info)

    def chunk(self, chunks: int) -> list["SampleMatrix"]:
        """Split the rows into `chunks` nearly equal parts. The meta_info is passed to each part."""
        assert chunks > 0, f"chunks must be positive, got {chunks}."
        parts = [{} for _ in range(chunks)]
        for key, value in self.columns.items():
            for i, piece in enumerate(np.array_split(value, chunks)):
                parts[i][key] = piece

        return [SampleMatrix(columns=parts[i], meta_info=self.meta_info) for i in range(chunks)]

    @staticmethod
    def concat(data: list["SampleMatrix"]) -> "SampleMatrix":
        """Concat a list of SampleMatrix row-wise. The meta_info of the first one is used.

        Args:
            data (List[SampleMatrix]): matrices with identical column names

        Returns:
            SampleMatrix: concatenated SampleMatrix
        """
        assert len(data) > 0, "nothing to concatenate"
        names = data[0].names
        for matrix in data[1:]:
            assert matrix.names == names, f"column mismatch: {matrix.names} vs {names}."

        columns = {key: np.concatenate([matrix.columns[key] for matrix in data]) for key in names}
        return SampleMatrix(columns=columns, meta_info=data[0].meta_info)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.columns, columns=self.names)

    def to_csv(self, path: Optional[str] = None) -> Optional[str]:
        """Header row of column names, one row per sample, LF line endings, shortest round-trip numerals.
        Returns the text when no path is given."""
        buffer = io.StringIO() if path is None else path
        self.to_frame().to_csv(buffer, index=False, float_format=format_number, lineterminator="\n")
        if path is None:
            return buffer.getvalue()

    @classmethod
    def from_csv(
        cls,
        path_or_buffer: Union[str, io.StringIO],
        allowed_columns: Optional[Iterable[str]] = None,
        meta_info: Optional[dict[str, Any]] = None,
    ) -> "SampleMatrix":
        """Read a matrix written by `to_csv`.

        Args:
            allowed_columns: when given, any other column is an error.
        """
        frame = pd.read_csv(path_or_buffer, float_precision="round_trip")
        if allowed_columns is not None:
            allowed = set(allowed_columns)
            extra = [name for name in frame.columns if name not in allowed]
            if extra:
                raise ValueError(f"Unknown columns {extra}, expected a subset of {sorted(allowed)}.")

        columns = {}
        for name in frame.columns:
            try:
                columns[name] = frame[name].to_numpy(dtype=np.float64)
            except ValueError:
                raise ValueError(f"Column {name} is not numeric.") from None

        return cls(columns=columns, meta_info=meta_info or {})
