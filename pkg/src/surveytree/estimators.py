"""Weighted estimators over a slice of survey observations.

Every function in this module operates on a pair of equal-length
arrays, response values and strictly positive design weights, and
treats that pair as one estimation slice (typically the members of a
tree node). All estimators here are ratio estimators: rescaling the
weights by a positive constant leaves them unchanged, except for
:func:`weighted_sse`, which is deliberately unnormalized so that it
decomposes additively across a split.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
import numpy.typing as npt

__all__ = [
    "hajek_mean",
    "weighted_edf",
    "weighted_quantile",
    "trimmed_mean",
    "weighted_sse",
]

EdfVariant = Literal["right", "left_limit"]

_VARIANTS = ("right", "left_limit")


def _as_slice(
    values: npt.ArrayLike, weights: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Coerce and validate a (values, weights) estimation slice."""
    y = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if y.ndim != 1 or w.ndim != 1:
        raise ValueError("values and weights must be one-dimensional")
    if y.shape[0] != w.shape[0]:
        raise ValueError(
            f"values and weights differ in length: {y.shape[0]} vs {w.shape[0]}"
        )
    if y.shape[0] == 0:
        raise ValueError("estimation slice is empty")
    if not np.all(np.isfinite(y)):
        raise ValueError("values contain NaN or infinity")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise ValueError("weights must be strictly positive and finite")
    return y, w


def hajek_mean(values: npt.ArrayLike, weights: npt.ArrayLike) -> float:
    """Weight-normalized mean of a slice.

    Parameters
    ----------
    values : array_like
        Response values, one-dimensional, finite.
    weights : array_like
        Design weights, same length, strictly positive and finite.

    Returns
    -------
    float
        ``sum(w * y) / sum(w)``, the standard survey estimator of a
        subpopulation mean from inverse-probability weights.

    Raises
    ------
    ValueError
        On an empty slice, mismatched lengths, non-finite values, or
        non-positive weights.
    """
    y, w = _as_slice(values, weights)
    return float(np.average(y, weights=w))


def weighted_edf(
    values: npt.ArrayLike,
    weights: npt.ArrayLike,
    t: float,
    variant: EdfVariant = "right",
) -> float:
    """Weighted empirical distribution function evaluated at ``t``.

    Parameters
    ----------
    values, weights : array_like
        The estimation slice, validated as in :func:`hajek_mean`.
    t : float
        Evaluation point.
    variant : {"right", "left_limit"}
        ``"right"`` returns the weight share of ``values <= t`` (the
        usual right-continuous EDF). ``"left_limit"`` returns the
        share of ``values < t``, i.e. the left limit of the EDF at
        ``t``. The two differ exactly by the weight share of the atom
        at ``t``.

    Returns
    -------
    float
        A value in ``[0, 1]``, nondecreasing in ``t`` for either
        variant, with ``right >= left_limit`` pointwise.
    """
    y, w = _as_slice(values, weights)
    if variant not in _VARIANTS:
        raise ValueError(f"unknown EDF variant: {variant!r}")
    if np.isnan(t):
        raise ValueError("evaluation point is NaN")
    mask = y <= t if variant == "right" else y < t
    return float(np.sum(w[mask]) / np.sum(w))


def weighted_quantile(
    values: npt.ArrayLike, weights: npt.ArrayLike, q: float
) -> float:
    """Lower weighted quantile, without interpolation.

    Returns the smallest observed value ``v`` whose right-continuous
    weighted EDF reaches ``q``, i.e. the smallest ``v`` in the slice
    with ``weighted_edf(values, weights, v) >= q``. Because the result
    is always an observed value, downstream cutpoint logic can rely on
    it being attained.

    Parameters
    ----------
    values, weights : array_like
        The estimation slice.
    q : float
        Target probability, must lie in ``(0, 1]``.

    Returns
    -------
    float
        An element of ``values``.
    """
    y, w = _as_slice(values, weights)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"quantile level must be in (0, 1], got {q!r}")
    order = np.argsort(y, kind="stable")
    sv = y[order]
    cw = np.cumsum(w[order])
    # Compare against the cumulative total, not a separate sum, so the
    # q = 1 boundary cannot fall past the last entry.
    idx = int(np.searchsorted(cw, q * cw[-1], side="left"))
    if idx >= sv.shape[0]:
        idx = sv.shape[0] - 1
    return float(sv[idx])


def trimmed_mean(
    values: npt.ArrayLike, weights: npt.ArrayLike, cutoff: float
) -> float:
    """Hajek mean of the slice after symmetric clamping at ``cutoff``.

    Each value is replaced by ``min(max(y, -cutoff), cutoff)`` before
    averaging. Writing ``y`` as the difference of its positive and
    negative parts, this equals the integral of ``1 - F`` over
    ``[0, cutoff]`` under the positive part's weighted EDF minus the
    same integral for the negative part, which is how the estimator is
    usually analyzed. An infinite ``cutoff`` disables the clamp and
    reduces to :func:`hajek_mean`.

    Parameters
    ----------
    values, weights : array_like
        The estimation slice.
    cutoff : float
        Clamp magnitude, strictly positive; ``math.inf`` is allowed.

    Returns
    -------
    float
        The clamped weighted mean, always within ``[-cutoff, cutoff]``.
    """
    y, w = _as_slice(values, weights)
    if np.isnan(cutoff) or cutoff <= 0.0:
        raise ValueError(f"cutoff must be positive, got {cutoff!r}")
    if np.isinf(cutoff):
        return float(np.average(y, weights=w))
    clipped = np.clip(y, -cutoff, cutoff)
    return float(np.average(clipped, weights=w))


def weighted_sse(values: npt.ArrayLike, weights: npt.ArrayLike) -> float:
    """Weighted sum of squared errors about the Hajek mean.

    Returns ``sum(w * (y - hajek_mean)**2)``. The sum is left
    unnormalized on purpose: for any binary split of the slice,
    ``sse(parent) >= sse(left) + sse(right)``, and the split-scoring
    code depends on that additive decomposition. Consequently the
    value scales linearly under ``weights -> c * weights`` while every
    comparison of such values is scale-free.

    Returns
    -------
    float
        Nonnegative; zero exactly when all values are equal.
    """
    y, w = _as_slice(values, weights)
    mu = np.average(y, weights=w)
    return float(np.sum(w * (y - mu) ** 2))
