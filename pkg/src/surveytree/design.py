"""Probability proportional to size sampling without replacement.

Inclusion probabilities are proportional to positive size measures,
capped at one: any unit whose proportional share exceeds one becomes
a certainty selection and the remaining sample size is redistributed
over the rest, repeatedly, since redistribution can push further
units over the cap. Draws use systematic sampling over a randomly
permuted frame, which realizes each unit's inclusion probability
exactly while fixing the sample size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from surveytree.data import FinitePopulation, ObservedDataset

__all__ = [
    "PpsDesign",
    "DrawnSample",
    "DesignSummary",
    "pps_inclusion_probs",
    "draw_pps_sample",
    "extract_sample",
    "design_summary",
]


def pps_inclusion_probs(z: npt.ArrayLike, n: int) -> npt.NDArray[np.float64]:
    """Size-proportional inclusion probabilities with certainty capping.

    Starts from ``n * z / sum(z)`` and, while any value exceeds one,
    fixes those units at exactly one and reallocates the remaining
    sample size proportionally over the rest. The result satisfies
    ``0 < pi <= 1`` elementwise, ``sum(pi) == n`` up to rounding, and
    is monotone in ``z``.

    Parameters
    ----------
    z : array_like
        Strictly positive, finite size measures.
    n : int
        Sample size, ``1 <= n <= len(z)``.
    """
    sizes = np.asarray(z, dtype=np.float64)
    if sizes.ndim != 1 or sizes.shape[0] == 0:
        raise ValueError("size measures must form a non-empty vector")
    if not np.all(np.isfinite(sizes)) or np.any(sizes <= 0.0):
        raise ValueError("size measures must be strictly positive and finite")
    big_n = sizes.shape[0]
    if not 1 <= n <= big_n:
        raise ValueError(f"sample size must lie in [1, {big_n}], got {n}")

    pi = np.empty(big_n, dtype=np.float64)
    certain = np.zeros(big_n, dtype=bool)
    while True:
        rest = ~certain
        m = n - int(np.count_nonzero(certain))
        # Fewer than one slot can never remain while units are
        # uncapped: each capping round consumes strictly less of the
        # remaining size than it had available.
        trial = m * sizes[rest] / np.sum(sizes[rest])
        over = trial > 1.0
        if not np.any(over):
            pi[rest] = trial
            break
        over_idx = np.flatnonzero(rest)[over]
        certain[over_idx] = True
        pi[over_idx] = 1.0
    return pi


@dataclass(frozen=True)
class PpsDesign:
    """A fixed-size PPS design over one population frame."""

    z: npt.NDArray[np.float64]
    n: int
    pi: npt.NDArray[np.float64] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", np.asarray(self.z, dtype=np.float64))
        object.__setattr__(self, "pi", pps_inclusion_probs(self.z, self.n))

    @property
    def certainty_count(self) -> int:
        return int(np.count_nonzero(self.pi == 1.0))


@dataclass(frozen=True)
class DrawnSample:
    """One realized sample: sorted indices, their probabilities, weights."""

    indices: npt.NDArray[np.int64]
    pi: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]


def draw_pps_sample(design: PpsDesign, seed: int) -> DrawnSample:
    """Draw one systematic PPS sample, deterministically per seed.

    Certainty units are always included. The rest of the frame is
    randomly permuted, probabilities are accumulated along the
    permutation, and a single uniform start selects every crossing of
    an integer offset. Exactly ``design.n`` distinct units come back,
    each with inclusion probability ``design.pi``; weights are the
    reciprocals.
    """
    rng = np.random.default_rng(seed)
    certain = np.flatnonzero(design.pi >= 1.0)
    rest = np.flatnonzero(design.pi < 1.0)
    m = design.n - certain.shape[0]
    picks = [certain]
    if m > 0:
        perm = rest[rng.permutation(rest.shape[0])]
        cum = np.cumsum(design.pi[perm])
        start = rng.uniform()
        pos = np.searchsorted(cum, start + np.arange(m), side="right")
        pos = np.minimum(pos, rest.shape[0] - 1)
        picks.append(perm[pos])
    indices = np.sort(np.concatenate(picks)).astype(np.int64)
    pi = design.pi[indices]
    return DrawnSample(indices=indices, pi=pi, weights=1.0 / pi)


def extract_sample(pop: FinitePopulation, drawn: DrawnSample) -> ObservedDataset:
    """Materialize a drawn sample as a weighted dataset."""
    idx = drawn.indices
    return ObservedDataset(
        y=pop.y[idx],
        x=pop.x[idx],
        weights=drawn.weights.copy(),
        origin=idx.copy(),
    )


@dataclass(frozen=True)
class DesignSummary:
    """Design diagnostics in the shape of the summary CSV row."""

    design: str
    n: int
    certainty_units: int
    min_pi: float
    max_pi: float
    cv_pi: float
    cor_y_pi: float
    sampling_fraction: float


def design_summary(
    pop: FinitePopulation, design: PpsDesign, label: str = "pps"
) -> DesignSummary:
    """Summarize how informative a design is for a population.

    ``cv_pi`` is the population coefficient of variation of the
    inclusion probabilities and ``cor_y_pi`` their Pearson correlation
    with the response, the quantity that determines how badly an
    unweighted estimator is tilted.
    """
    if design.pi.shape[0] != pop.size:
        raise ValueError(
            f"design covers {design.pi.shape[0]} units, population has {pop.size}"
        )
    pi = design.pi
    mean_pi = float(np.mean(pi))
    sd_pi = float(np.std(pi))
    if np.std(pop.y) == 0.0 or sd_pi == 0.0:
        cor = 0.0
    else:
        cor = float(np.corrcoef(pop.y, pi)[0, 1])
    return DesignSummary(
        design=label,
        n=design.n,
        certainty_units=design.certainty_count,
        min_pi=float(np.min(pi)),
        max_pi=float(np.max(pi)),
        cv_pi=sd_pi / mean_pi,
        cor_y_pi=cor,
        sampling_fraction=design.n / pop.size,
    )
