"""Unit and property tests for the weighted estimator kernels.

Golden values are worked out by hand from the definitions; the trimmed
mean additionally gets two independent oracles, a clamp-then-average
reimplementation and exact step-function integration of the tail
areas of the positive and negative parts.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surveytree.estimators import (
    hajek_mean,
    trimmed_mean,
    weighted_edf,
    weighted_quantile,
    weighted_sse,
)

# The worked example used throughout: values 1, 2, 3 with weights
# 2, 1, 1, total weight 4.
Y = np.array([1.0, 2.0, 3.0])
W = np.array([2.0, 1.0, 1.0])


# ---------------------------------------------------------------------------
# oracles


def clamp_then_average(y, w, cutoff: float) -> float:
    total = 0.0
    wsum = 0.0
    for yi, wi in zip(y, w):
        total += wi * min(max(yi, -cutoff), cutoff)
        wsum += wi
    return total / wsum


def tail_area_integral(y, w, cutoff: float) -> float:
    """Exact integral of 1 - F over [0, cutoff] for the positive part
    minus the same for the negative part, with F the weighted EDF."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    wsum = float(np.sum(w))

    def one_side(part: np.ndarray) -> float:
        breaks = sorted({0.0, cutoff, *part[part < cutoff].tolist()})
        breaks = [b for b in breaks if 0.0 <= b <= cutoff]
        area = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            surv = float(np.sum(w[part > a]) / wsum)
            area += (b - a) * surv
        return area

    return one_side(np.maximum(y, 0.0)) - one_side(np.maximum(-y, 0.0))


# ---------------------------------------------------------------------------
# hand values


def test_hajek_mean_hand_value():
    assert hajek_mean(Y, W) == pytest.approx(7.0 / 4.0, abs=1e-15)


def test_hajek_mean_unit_weights_is_plain_mean():
    y = [4.0, 8.0, 0.0, 2.0]
    assert hajek_mean(y, np.ones(4)) == pytest.approx(3.5, abs=1e-15)


@pytest.mark.parametrize(
    "t,expected_right,expected_left",
    [
        (0.5, 0.0, 0.0),
        (1.0, 0.5, 0.0),
        (2.0, 0.75, 0.5),
        (2.5, 0.75, 0.75),
        (3.0, 1.0, 0.75),
        (9.0, 1.0, 1.0),
    ],
)
def test_weighted_edf_hand_values(t, expected_right, expected_left):
    assert weighted_edf(Y, W, t, "right") == pytest.approx(expected_right, abs=1e-15)
    assert weighted_edf(Y, W, t, "left_limit") == pytest.approx(
        expected_left, abs=1e-15
    )


@pytest.mark.parametrize(
    "q,expected",
    [
        (0.25, 1.0),
        (0.5, 1.0),  # cumulative weight of 1 reaches exactly 0.5
        (0.51, 2.0),
        (0.75, 2.0),
        (0.76, 3.0),
        (1.0, 3.0),
    ],
)
def test_weighted_quantile_hand_values(q, expected):
    assert weighted_quantile(Y, W, q) == expected


def test_weighted_quantile_is_observed_value():
    rng = np.random.default_rng(3)
    y = rng.normal(size=40)
    w = rng.uniform(0.5, 2.0, size=40)
    for q in (0.01, 0.3, 0.5, 0.99, 1.0):
        assert weighted_quantile(y, w, q) in y


def test_trimmed_mean_hand_value():
    y = [-5.0, 1.0, 10.0]
    w = [1.0, 1.0, 1.0]
    # clamps to -2, 1, 2
    assert trimmed_mean(y, w, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_trimmed_mean_infinite_cutoff_reduces_to_hajek():
    assert trimmed_mean(Y, W, math.inf) == hajek_mean(Y, W)


def test_weighted_sse_hand_value():
    # mean 7/4; sse = 2*(3/4)^2 + (1/4)^2 + (5/4)^2 = 44/16
    assert weighted_sse(Y, W) == pytest.approx(2.75, abs=1e-12)


def test_weighted_sse_constant_slice_is_zero():
    assert weighted_sse([5.0, 5.0, 5.0], [1.0, 2.0, 3.0]) == 0.0


# ---------------------------------------------------------------------------
# trimmed-mean oracles


def test_trimmed_mean_matches_both_oracles_randomized():
    rng = np.random.default_rng(71)
    for _ in range(300):
        n = int(rng.integers(1, 25))
        y = rng.normal(scale=3.0, size=n)
        w = rng.uniform(0.1, 5.0, size=n)
        cutoff = float(rng.uniform(0.05, 6.0))
        got = trimmed_mean(y, w, cutoff)
        assert got == pytest.approx(clamp_then_average(y, w, cutoff), abs=1e-9)
        assert got == pytest.approx(tail_area_integral(y, w, cutoff), abs=1e-9)


def test_trimmed_mean_with_atoms_at_cutoff():
    # atoms exactly at +/- cutoff must not be moved
    y = [-2.0, 2.0, 2.0, 5.0]
    w = [1.0, 1.0, 2.0, 1.0]
    got = trimmed_mean(y, w, 2.0)
    assert got == pytest.approx(clamp_then_average(y, w, 2.0), abs=1e-15)
    assert got == pytest.approx(tail_area_integral(y, w, 2.0), abs=1e-12)


# ---------------------------------------------------------------------------
# validation


def test_empty_slice_rejected():
    with pytest.raises(ValueError, match="empty"):
        hajek_mean([], [])


def test_length_mismatch_rejected():
    with pytest.raises(ValueError, match="differ in length"):
        hajek_mean([1.0, 2.0], [1.0])


def test_nonpositive_weight_rejected():
    with pytest.raises(ValueError, match="strictly positive"):
        hajek_mean([1.0, 2.0], [1.0, 0.0])


def test_nan_value_rejected():
    with pytest.raises(ValueError, match="NaN or infinity"):
        hajek_mean([1.0, math.nan], [1.0, 1.0])


def test_unknown_edf_variant_rejected():
    with pytest.raises(ValueError, match="variant"):
        weighted_edf(Y, W, 1.0, "central")  # type: ignore[arg-type]


def test_edf_nan_point_rejected():
    with pytest.raises(ValueError, match="NaN"):
        weighted_edf(Y, W, math.nan)


@pytest.mark.parametrize("q", [0.0, -0.1, 1.5, math.nan])
def test_quantile_level_out_of_range(q):
    with pytest.raises(ValueError, match="quantile level"):
        weighted_quantile(Y, W, q)


@pytest.mark.parametrize("cutoff", [0.0, -1.0, math.nan])
def test_trimmed_mean_bad_cutoff(cutoff):
    with pytest.raises(ValueError, match="cutoff"):
        trimmed_mean(Y, W, cutoff)


# ---------------------------------------------------------------------------
# properties

finite_floats = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
pos_weights = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def slices(draw, min_size: int = 1):
    n = draw(st.integers(min_size, 30))
    y = draw(
        st.lists(finite_floats, min_size=n, max_size=n).map(np.asarray)
    )
    w = draw(st.lists(pos_weights, min_size=n, max_size=n).map(np.asarray))
    return y, w


@given(slices(), st.floats(-1e6, 1e6, allow_nan=False))
@settings(max_examples=150, deadline=None)
def test_edf_bounds_and_variant_order(sl, t):
    y, w = sl
    right = weighted_edf(y, w, t, "right")
    left = weighted_edf(y, w, t, "left_limit")
    assert 0.0 <= left <= right <= 1.0


@given(slices(), st.floats(-1e3, 1e3, allow_nan=False), st.floats(0.0, 10.0))
@settings(max_examples=100, deadline=None)
def test_edf_monotone_in_t(sl, t, step):
    y, w = sl
    for variant in ("right", "left_limit"):
        assert weighted_edf(y, w, t, variant) <= weighted_edf(
            y, w, t + step, variant
        )


@given(slices(), st.floats(0.01, 1.0))
@settings(max_examples=150, deadline=None)
def test_quantile_attains_level(sl, q):
    y, w = sl
    v = weighted_quantile(y, w, q)
    assert v in y
    assert weighted_edf(y, w, v, "right") >= q - 1e-12
    # no strictly smaller observed value reaches the level; the slack
    # only absorbs summation-order noise between the two code paths
    smaller = y[y < v]
    if smaller.shape[0]:
        assert weighted_edf(y, w, float(np.max(smaller)), "right") < q + 1e-9


@given(slices(), st.floats(0.01, 100.0), st.floats(0.001, 1000.0))
@settings(max_examples=150, deadline=None)
def test_ratio_estimators_ignore_weight_scale(sl, cutoff, c):
    y, w = sl
    assert hajek_mean(y, c * w) == pytest.approx(hajek_mean(y, w), rel=1e-9, abs=1e-9)
    assert trimmed_mean(y, c * w, cutoff) == pytest.approx(
        trimmed_mean(y, w, cutoff), rel=1e-9, abs=1e-9
    )


@given(slices(), st.floats(0.01, 1.0), st.integers(-20, 20))
@settings(max_examples=150, deadline=None)
def test_quantile_ignores_power_of_two_weight_scale(sl, q, exponent):
    # powers of two rescale the cumulative weights exactly, so the
    # selected observation must be bit-identical
    y, w = sl
    c = 2.0**exponent
    assert weighted_quantile(y, c * w, q) == weighted_quantile(y, w, q)


@given(slices(), st.floats(0.001, 1000.0))
@settings(max_examples=150, deadline=None)
def test_sse_scales_linearly_in_weights(sl, c):
    y, w = sl
    assert weighted_sse(y, c * w) == pytest.approx(
        c * weighted_sse(y, w), rel=1e-9, abs=1e-9
    )


@given(slices(min_size=2), st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_sse_decomposes_across_any_split(sl, seed):
    y, w = sl
    rng = np.random.default_rng(seed)
    mask = rng.random(y.shape[0]) < 0.5
    if not mask.any() or mask.all():
        mask[0] = True
        mask[-1] = False
    parent = weighted_sse(y, w)
    parts = weighted_sse(y[mask], w[mask]) + weighted_sse(y[~mask], w[~mask])
    assert parent >= parts - 1e-9 * max(1.0, abs(parent))


@given(slices(), st.floats(0.01, 100.0))
@settings(max_examples=150, deadline=None)
def test_trimmed_mean_bounded_by_cutoff(sl, cutoff):
    y, w = sl
    assert abs(trimmed_mean(y, w, cutoff)) <= cutoff + 1e-12


@given(slices())
@settings(max_examples=100, deadline=None)
def test_trimmed_mean_no_op_beyond_range(sl):
    y, w = sl
    cutoff = float(np.max(np.abs(y))) + 1.0
    assert trimmed_mean(y, w, cutoff) == hajek_mean(y, w)
