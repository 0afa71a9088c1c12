"""Axis-aligned box partitions and their size under a marginal EDF.

A partition here is the set of leaf regions of a fitted tree: boxes
with half-open sides, lower-open and upper-closed, so a point on a
cut boundary belongs to the box on the low side. The norm computed by
:func:`partition_norm` summarizes how wide the boxes are in
probability along one coordinate: it is the weighted average, over
data mass, of the EDF width of the box the data falls in. Small norms
mean the partition has become fine along that coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt

from surveytree.data import FinitePopulation, ObservedDataset
from surveytree.estimators import EdfVariant

__all__ = ["Box", "Partition", "box_containing", "partition_norm"]


@dataclass(frozen=True)
class Box:
    """One region: per-dimension bounds plus member row indices.

    ``lower`` and ``upper`` have one entry per dimension and may be
    infinite on unbounded sides. Containment is half-open:
    ``lower < x <= upper`` coordinate-wise. ``members`` indexes rows
    of whatever dataset the partition was built over.
    """

    lower: npt.NDArray[np.float64]
    upper: npt.NDArray[np.float64]
    members: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(
            self, "members", np.asarray(self.members, dtype=np.int64)
        )
        if lo.ndim != 1 or hi.shape != lo.shape:
            raise ValueError("box bounds must be equal-length vectors")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds may not be NaN")
        if not np.all(lo < hi):
            raise ValueError("box needs lower < upper on every dimension")

    @property
    def d(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, point: npt.NDArray[np.float64]) -> bool:
        return bool(np.all(point > self.lower) and np.all(point <= self.upper))


@dataclass(frozen=True)
class Partition:
    """A collection of disjoint boxes over a common dimension count."""

    boxes: tuple[Box, ...]
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "boxes", tuple(self.boxes))
        if len(self.boxes) == 0:
            raise ValueError("partition needs at least one box")
        for b in self.boxes:
            if b.d != self.d:
                raise ValueError(
                    f"box dimension {b.d} does not match partition dimension {self.d}"
                )
        seen: set[int] = set()
        for b in self.boxes:
            ids = set(int(i) for i in b.members)
            if seen & ids:
                raise ValueError("boxes share member rows; partition is not disjoint")
            seen |= ids


def box_containing(p: Partition, point: npt.ArrayLike) -> int | None:
    """Index of the box containing ``point``, or ``None`` if no box does.

    Boundary points go to the box on the low side of the cut, matching
    the half-open convention used when a tree routes data.
    """
    q = np.asarray(point, dtype=np.float64)
    if q.shape != (p.d,):
        raise ValueError(f"point must have shape ({p.d},), got {q.shape}")
    if np.any(np.isnan(q)):
        raise ValueError("point contains NaN")
    for i, b in enumerate(p.boxes):
        if b.contains(q):
            return i
    return None


Dataset = Union[ObservedDataset, FinitePopulation]


def _data_weights(data: Dataset) -> npt.NDArray[np.float64]:
    if isinstance(data, FinitePopulation):
        return np.ones(data.y.shape[0], dtype=np.float64)
    return data.weights


def partition_norm(
    p: Partition, data: Dataset, dim: int, variant: EdfVariant = "right"
) -> float:
    """Average EDF width of the partition along one coordinate.

    For each box the width is ``F(b) - F(a)``, where ``F`` is the
    weighted marginal EDF of coordinate ``dim`` over all rows of
    ``data`` (right-continuous for ``variant="right"``, the left
    limit ``P(X < t)`` for ``variant="left_limit"``), and ``a, b``
    are the box's bounds after snapping each one down to the largest
    observed coordinate value not exceeding it. An unbounded or
    below-support lower side snaps to the observed minimum. Widths are
    then averaged with each box weighted by its share of total data
    weight.

    Snapping to realized values rather than raw cutpoints matters for
    the two variants: with an atom at a bound, the right variant
    excludes the atom at the lower bound while the left-limit variant
    excludes the one at the upper bound, so the two norms bracket the
    mass a box actually covers. Populations count with unit weight.

    Returns
    -------
    float
        A value in ``[0, 1]``; refining the partition never
        increases it.
    """
    if not 0 <= dim < p.d:
        raise ValueError(f"dimension {dim} out of range for d={p.d}")
    if variant not in ("right", "left_limit"):
        raise ValueError(f"unknown EDF variant: {variant!r}")
    vals = data.x[:, dim]
    w = _data_weights(data)
    if vals.shape[0] == 0:
        raise ValueError("dataset has no rows")
    if np.any(~np.isfinite(vals)):
        raise ValueError("coordinate values must be finite")

    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    cw = np.cumsum(w[order])
    total = cw[-1]

    def snap(t: float) -> float:
        # Largest observed value <= t; anything below the support
        # snaps to the observed minimum.
        idx = int(np.searchsorted(sv, t, side="right"))
        return float(sv[idx - 1]) if idx > 0 else float(sv[0])

    def edf_at(t: float) -> float:
        side = "right" if variant == "right" else "left"
        idx = int(np.searchsorted(sv, t, side=side))
        return float(cw[idx - 1] / total) if idx > 0 else 0.0

    norm = 0.0
    for b in p.boxes:
        if b.members.shape[0] == 0:
            continue
        share = float(np.sum(w[b.members]) / total)
        a = snap(float(b.lower[dim]))
        bb = snap(float(b.upper[dim]))
        width = edf_at(bb) - edf_at(a)
        norm += width * share
    return float(norm)
