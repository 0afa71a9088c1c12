"""Dataset containers, schema, and delimited-file ingestion.

Two containers cover the two roles data plays here: an
:class:`ObservedDataset` is a drawn sample carrying design weights,
and a :class:`FinitePopulation` is a complete universe carrying the
positive size measures a PPS design is built from. Reading is strict:
any malformed cell fails fast with its row and column named, rather
than being silently dropped or imputed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

import numpy as np
import numpy.typing as npt

__all__ = [
    "DataError",
    "DatasetSchema",
    "ObservedDataset",
    "FinitePopulation",
    "read_dataset",
    "read_matrix",
    "write_dataset",
    "validate_dataset",
]


class DataError(ValueError):
    """Raised when a dataset file or container violates its contract."""


@dataclass(frozen=True)
class DatasetSchema:
    """Column roles for a delimited data file.

    ``response`` and ``predictors`` are required. ``weight`` names a
    design-weight column for sample files; ``size`` names a
    size-measure column for population files. A schema naming ``size``
    reads as a :class:`FinitePopulation`, anything else as an
    :class:`ObservedDataset`.
    """

    response: str
    predictors: tuple[str, ...]
    weight: str | None = None
    size: str | None = None

    def __post_init__(self) -> None:
        preds = tuple(self.predictors)
        object.__setattr__(self, "predictors", preds)
        if len(preds) == 0:
            raise DataError("schema needs at least one predictor column")
        names = [self.response, *preds]
        if self.weight is not None:
            names.append(self.weight)
        if self.size is not None:
            names.append(self.size)
        if any(not isinstance(c, str) or c == "" for c in names):
            raise DataError("schema column names must be non-empty strings")
        if len(set(names)) != len(names):
            raise DataError(f"schema column names are not distinct: {names}")


@dataclass(frozen=True)
class ObservedDataset:
    """A drawn sample: responses, predictor matrix, design weights.

    ``origin`` optionally records each row's index in the population
    it was drawn from; it is transient bookkeeping and is not written
    by :func:`write_dataset`.
    """

    y: npt.NDArray[np.float64]
    x: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]
    origin: npt.NDArray[np.int64] | None = None

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])


@dataclass(frozen=True)
class FinitePopulation:
    """A complete universe with one size measure per record."""

    ids: npt.NDArray[np.int64]
    y: npt.NDArray[np.float64]
    x: npt.NDArray[np.float64]
    z: npt.NDArray[np.float64]

    @property
    def size(self) -> int:
        return int(self.y.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])


Dataset = Union[ObservedDataset, FinitePopulation]

Source = Union[str, Path, IO[str]]


def _open_text(source: Source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", newline="", encoding="utf-8"), True
    return source, False


def _parse_cell(raw: str, row_no: int, column: str) -> float:
    text = raw.strip()
    if text == "":
        raise DataError(f"row {row_no}, column {column!r}: empty cell")
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"row {row_no}, column {column!r}: not a number: {raw!r}"
        ) from None
    if not np.isfinite(value):
        raise DataError(
            f"row {row_no}, column {column!r}: non-finite value: {raw!r}"
        )
    return value


def read_dataset(source: Source, schema: DatasetSchema) -> Dataset:
    """Read a delimited file into a validated container.

    Parameters
    ----------
    source : path or text stream
        Comma-separated file with a header row.
    schema : DatasetSchema
        Column roles. If ``schema.size`` is set the result is a
        :class:`FinitePopulation` (record ids are row order);
        otherwise an :class:`ObservedDataset`, with unit weights when
        ``schema.weight`` is absent.

    Raises
    ------
    DataError
        On a missing or duplicated header column, a non-numeric,
        empty, or non-finite cell, a non-positive weight or size, a
        blank or ragged row, or a file with no data rows. Messages
        name the offending row (1-based, counting the header as row 1)
        and column.
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file: no header row") from None
        header = [h.strip() for h in header]

        needed = [schema.response, *schema.predictors]
        if schema.weight is not None:
            needed.append(schema.weight)
        if schema.size is not None:
            needed.append(schema.size)
        col_index: dict[str, int] = {}
        for name in needed:
            hits = [i for i, h in enumerate(header) if h == name]
            if len(hits) == 0:
                raise DataError(f"missing column {name!r} in header {header}")
            if len(hits) > 1:
                raise DataError(f"column {name!r} appears more than once in header")
            col_index[name] = hits[0]

        y_rows: list[float] = []
        x_rows: list[list[float]] = []
        extra_rows: list[float] = []
        extra_col = schema.size if schema.size is not None else schema.weight
        for row_no, row in enumerate(reader, start=2):
            if all(cell.strip() == "" for cell in row):
                raise DataError(f"row {row_no}: blank row")
            if len(row) != len(header):
                raise DataError(
                    f"row {row_no}: expected {len(header)} fields, got {len(row)}"
                )
            y_rows.append(_parse_cell(row[col_index[schema.response]], row_no,
                                      schema.response))
            x_rows.append([
                _parse_cell(row[col_index[name]], row_no, name)
                for name in schema.predictors
            ])
            if extra_col is not None:
                value = _parse_cell(row[col_index[extra_col]], row_no, extra_col)
                if value <= 0.0:
                    role = "size" if schema.size is not None else "weight"
                    raise DataError(
                        f"row {row_no}, column {extra_col!r}: "
                        f"{role} must be strictly positive, got {value!r}"
                    )
                extra_rows.append(value)

        if len(y_rows) == 0:
            raise DataError("no data rows after the header")
    finally:
        if owned:
            stream.close()

    y = np.asarray(y_rows, dtype=np.float64)
    x = np.asarray(x_rows, dtype=np.float64)
    if schema.size is not None:
        return FinitePopulation(
            ids=np.arange(y.shape[0], dtype=np.int64),
            y=y,
            x=x,
            z=np.asarray(extra_rows, dtype=np.float64),
        )
    if schema.weight is not None:
        weights = np.asarray(extra_rows, dtype=np.float64)
    else:
        weights = np.ones(y.shape[0], dtype=np.float64)
    return ObservedDataset(y=y, x=x, weights=weights)


def read_matrix(source: Source, columns: Sequence[str]) -> npt.NDArray[np.float64]:
    """Read named numeric columns into an ``(n, len(columns))`` array.

    The input format and error reporting match :func:`read_dataset`;
    only the listed columns are required, so a file holding nothing
    but predictors can feed prediction.
    """
    names = tuple(columns)
    if len(names) == 0:
        raise DataError("no columns requested")
    if len(set(names)) != len(names):
        raise DataError(f"requested columns are not distinct: {list(names)}")
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file: no header row") from None
        header = [h.strip() for h in header]
        col_index: dict[str, int] = {}
        for name in names:
            hits = [i for i, h in enumerate(header) if h == name]
            if len(hits) == 0:
                raise DataError(f"missing column {name!r} in header {header}")
            if len(hits) > 1:
                raise DataError(f"column {name!r} appears more than once in header")
            col_index[name] = hits[0]

        rows: list[list[float]] = []
        for row_no, row in enumerate(reader, start=2):
            if all(cell.strip() == "" for cell in row):
                raise DataError(f"row {row_no}: blank row")
            if len(row) != len(header):
                raise DataError(
                    f"row {row_no}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append([
                _parse_cell(row[col_index[name]], row_no, name)
                for name in names
            ])
        if len(rows) == 0:
            raise DataError("no data rows after the header")
    finally:
        if owned:
            stream.close()
    return np.asarray(rows, dtype=np.float64)


def write_dataset(data: Dataset, target: Source, schema: DatasetSchema) -> None:
    """Write a container back to a delimited file.

    Column order is response, predictors, then the weight or size
    column when the schema names one. Floats are written with
    ``repr`` so a read-write-read cycle reproduces the container
    exactly.
    """
    if isinstance(data, FinitePopulation):
        if schema.size is None:
            raise DataError("writing a population requires schema.size")
        extra = data.z
        extra_name = schema.size
    else:
        extra = data.weights if schema.weight is not None else None
        extra_name = schema.weight
    if data.x.shape[1] != len(schema.predictors):
        raise DataError(
            f"container has {data.x.shape[1]} predictors, "
            f"schema names {len(schema.predictors)}"
        )

    stream, owned = (
        (open(target, "w", newline="", encoding="utf-8"), True)
        if isinstance(target, (str, Path))
        else (target, False)
    )
    try:
        writer = csv.writer(stream, lineterminator="\n")
        header = [schema.response, *schema.predictors]
        if extra is not None:
            header.append(extra_name)
        writer.writerow(header)
        for i in range(data.y.shape[0]):
            row = [repr(float(data.y[i]))]
            row.extend(repr(float(v)) for v in data.x[i])
            if extra is not None:
                row.append(repr(float(extra[i])))
            writer.writerow(row)
    finally:
        if owned:
            stream.close()


def _check_matrix(report: list[str], x: np.ndarray) -> None:
    if x.ndim != 2:
        report.append(f"x must be a 2-d matrix, got {x.ndim} dimensions")
        return
    if x.shape[1] == 0:
        report.append("x has no predictor columns")
    bad = np.argwhere(~np.isfinite(x))
    for r, c in bad[:20]:
        report.append(f"x[{r},{c}] is not finite")


def _check_vector(report: list[str], v: np.ndarray, name: str,
                  positive: bool = False) -> None:
    bad = np.flatnonzero(~np.isfinite(v))
    for i in bad[:20]:
        report.append(f"{name}[{i}] is not finite")
    if positive:
        nonpos = np.flatnonzero(np.isfinite(v) & (v <= 0.0))
        for i in nonpos[:20]:
            report.append(f"{name}[{i}] must be strictly positive, got {v[i]!r}")


def validate_dataset(data: Dataset) -> list[str]:
    """Check container invariants, returning one message per violation.

    An empty list means the container is valid. Checks cover row-count
    agreement between arrays, finiteness of responses and predictors,
    and strict positivity of weights (samples) or size measures
    (populations).
    """
    report: list[str] = []
    n = int(data.y.shape[0])
    if n == 0:
        report.append("container has no rows")
    if data.y.ndim != 1:
        report.append("y must be one-dimensional")
    _check_matrix(report, data.x)
    if data.x.ndim == 2 and data.x.shape[0] != n:
        report.append(f"row counts differ: y has {n}, x has {data.x.shape[0]}")
    _check_vector(report, data.y, "y")
    if isinstance(data, FinitePopulation):
        if data.z.shape[0] != n:
            report.append(f"row counts differ: y has {n}, z has {data.z.shape[0]}")
        _check_vector(report, data.z, "z", positive=True)
        if data.ids.shape[0] != n:
            report.append(
                f"row counts differ: y has {n}, ids has {data.ids.shape[0]}"
            )
    else:
        if data.weights.shape[0] != n:
            report.append(
                f"row counts differ: y has {n}, weights has {data.weights.shape[0]}"
            )
        _check_vector(report, data.weights, "weights", positive=True)
        if data.origin is not None and data.origin.shape[0] != n:
            report.append(
                f"row counts differ: y has {n}, origin has {data.origin.shape[0]}"
            )
    return report


def dataset_from_rows(rows: Iterable[str], schema: DatasetSchema) -> Dataset:
    """Convenience wrapper reading from lines already in memory."""
    return read_dataset(io.StringIO("".join(rows)), schema)
