import math
import os
import re
import sys
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.exception.exception import (
    CustomException,
    DataIngestionError,
    DatasetError,
    DuplicateNameError,
    EmptyFileError,
    InvalidNameError,
    MissingColumnError,
    NonNumericCellError,
    RaggedRowError,
)
from src.logging.logger import logger
from src.models.var_types import NAME_PATTERN, Role, TimeSeriesDataset

_RAGGED = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")
# Plain ASCII decimal numerals.
_NUMERAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?", re.ASCII)


def _read_raw(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.EmptyDataError as e:
        raise EmptyFileError(path) from e
    except pd.errors.ParserError as e:
        match = _RAGGED.search(str(e))
        if match:
            expected, line, found = (int(g) for g in match.groups())
            raise RaggedRowError(line, expected, found) from e
        raise DataIngestionError(e, sys) from e


def _parse_cell(cell) -> float:
    text = str(cell).strip()
    if not _NUMERAL.fullmatch(text):
        return math.nan
    value = float(text)
    return value if math.isfinite(value) else math.nan


def _assign_roles(names: Sequence[str], dependent: Optional[Sequence[str]],
                  independent: Optional[Sequence[str]]):
    for name in list(dependent or []) + list(independent or []):
        if name not in names:
            raise MissingColumnError(name)
    overlap = set(dependent or []) & set(independent or [])
    if overlap:
        raise DatasetError(f"columns marked both dependent and independent: {sorted(overlap)}")

    if dependent is None and independent is None:
        return list(names), [Role.DEPENDENT] * len(names)
    if dependent is not None and independent is not None:
        kept = [n for n in names if n in dependent or n in independent]
        dropped = [n for n in names if n not in kept]
        if dropped:
            logger.info(f"ignoring columns without a role: {dropped}")
        return kept, [Role.DEPENDENT if n in dependent else Role.INDEPENDENT for n in kept]
    if dependent is not None:
        return list(names), [Role.DEPENDENT if n in dependent else Role.INDEPENDENT for n in names]
    return list(names), [Role.INDEPENDENT if n in independent else Role.DEPENDENT for n in names]


def load_csv(path: str, dependent: Optional[Sequence[str]] = None,
             independent: Optional[Sequence[str]] = None) -> TimeSeriesDataset:
    """
    Read a comma-separated file with a header row into a dataset.

    Role rules: with neither list every column is dependent; with one list the
    remaining columns take the other role; with both, unlisted columns are dropped.

    Args:
        path (str): CSV file path.
        dependent (list, optional): Names of dependent columns.
        independent (list, optional): Names of independent columns.

    Returns:
        TimeSeriesDataset: Parsed dataset with roles applied.

    Raises:
        EmptyFileError, DuplicateNameError, InvalidNameError, MissingColumnError,
        NonNumericCellError, RaggedRowError: One kind per ingestion failure.
    """
    try:
        if not os.path.exists(path):
            raise DataIngestionError(f"input file not found: {path}")
        raw = _read_raw(path)
        if raw.shape[0] < 2:
            raise EmptyFileError(path)

        names = [str(n).strip() for n in raw.iloc[0].tolist()]
        seen = set()
        for name in names:
            if not NAME_PATTERN.match(name):
                raise InvalidNameError(name)
            if name in seen:
                raise DuplicateNameError(name)
            seen.add(name)

        cells = raw.iloc[1:].to_numpy(dtype=object)
        values = np.empty(cells.shape, dtype=float)
        for i, row in enumerate(cells):
            line = i + 2
            present = [c for c in row if isinstance(c, str)]
            if len(present) != len(names):
                raise RaggedRowError(line, len(names), len(present))
            for j, cell in enumerate(row):
                value = _parse_cell(cell)
                if math.isnan(value):
                    raise NonNumericCellError(line, names[j], str(cell))
                values[i, j] = value

        kept, roles = _assign_roles(names, dependent, independent)
        columns = [names.index(n) for n in kept]
        ds = TimeSeriesDataset(values[:, columns], tuple(kept), tuple(roles))
        logger.info(f"loaded {path}: T={ds.T} rows, m={ds.m} columns")
        return ds

    except CustomException:
        raise
    except Exception as e:
        raise DataIngestionError(e, sys) from e


def write_csv(ds: TimeSeriesDataset, path: str) -> str:
    """
    Export a dataset as CSV with 17 significant digits, so reading it back with
    :func:`load_csv` reproduces every value exactly.
    """
    try:
        dir_path = os.path.dirname(path)
        if dir_path:
            os.makedirs(dir_path, exist_ok=True)
        frame = pd.DataFrame(np.asarray(ds.observations), columns=list(ds.names))
        frame.to_csv(path, index=False, header=True, float_format="%.17g", lineterminator="\n")
        logger.info(f"dataset exported to: {path}")
        return path
    except Exception as e:
        raise DataIngestionError(e, sys) from e
