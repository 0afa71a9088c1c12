"""Monte Carlo harness: synthetic populations, repeated PPS fits.

The protocol fixes a finite population, fits one reference tree to it
with unit weights, then repeatedly draws PPS samples and fits two
trees per draw, one with the design weights and one ignoring them.
Each fitted tree is scored against the reference over every
population row, giving a per-replicate mean error and mean squared
error whose aggregates show the unweighted fit's selection bias and
the weighted fit's shrinking error.

Every replicate's seed is derived from the base seed and the
replicate coordinates alone, so results do not depend on execution
order and identical configurations reproduce identical output bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

import numpy as np
import numpy.typing as npt

from surveytree.data import FinitePopulation, ObservedDataset
from surveytree.design import PpsDesign, draw_pps_sample, extract_sample
from surveytree.estimators import EdfVariant
from surveytree.partition import partition_norm
from surveytree.tree import (
    FitConfig,
    Internal,
    Leaf,
    TreeModel,
    TreeNode,
    fit_tree,
    leaf_partition,
    predict_many,
    trimmed_mean,
)

__all__ = [
    "GeneratorSpec",
    "SimConfig",
    "RepRecord",
    "AggregateRecord",
    "SimResult",
    "derive_seed",
    "synth_population",
    "fit_population_tree",
    "population_on_sample_partition",
    "tree_discrepancy",
    "run_simulation",
    "dense_box_mass",
    "norm_report",
    "write_per_rep_csv",
    "write_aggregate_csv",
]

_SHAPES = ("step", "smooth", "constant")

# Size-measure construction constants: base keeps sizes positive,
# spread controls how informative the design is at a given target
# correlation. The floor bounds the heaviest design weight at five
# times the typical one; letting sizes approach zero would hand a
# handful of units enormous weights and swamp the weighted fit's
# variance.
_Z_BASE = 10.0
_Z_SPREAD = 4.0
_Z_FLOOR = 2.0


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic population.

    ``target_cor`` is the intended correlation between the response
    and the size measure; sizes are built as a positive affine mix of
    the standardized response residual and independent noise, so the
    realized correlation lands a little under the target (the floor on
    sizes absorbs a few percent) for populations of a few thousand
    rows or more. The default shape is the piecewise-constant signal:
    its cells are exactly representable by axis-aligned splits, so
    repeated-sampling studies measure estimation error rather than
    shape approximation error.
    """

    size: int = 7112
    d: int = 3
    shape: str = "step"
    noise_scale: float = 0.8
    target_cor: float = 0.22

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError(f"population size must be at least 2, got {self.size}")
        if self.d < 1:
            raise ValueError(f"dimension must be at least 1, got {self.d}")
        if self.shape not in _SHAPES:
            raise ValueError(f"shape must be one of {_SHAPES}, got {self.shape!r}")
        if math.isnan(self.noise_scale) or self.noise_scale < 0.0:
            raise ValueError(
                f"noise_scale must be nonnegative, got {self.noise_scale!r}"
            )
        if not 0.0 <= self.target_cor < 1.0:
            raise ValueError(
                f"target_cor must lie in [0, 1), got {self.target_cor!r}"
            )


def _signal(shape: str, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    d = x.shape[1]
    if shape == "constant":
        return np.full(x.shape[0], 3.0)
    if shape == "step":
        m = 1.0 + 3.0 * (x[:, 0] > 0.5)
        if d >= 2:
            m = m + 2.0 * (x[:, 1] > 0.3)
        return m
    m = 2.0 + 2.0 * np.sin(np.pi * x[:, 0])
    if d >= 2:
        m = m + 2.0 * x[:, 1]
    if d >= 3:
        m = m + np.square(x[:, 2])
    for j in range(3, d):
        m = m + 0.5 * x[:, j]
    return m


def synth_population(spec: GeneratorSpec, seed: int) -> FinitePopulation:
    """Generate a population with an informative size measure.

    Predictors are uniform on the unit cube and the response is the
    configured signal shape plus Gaussian noise. Size measures load on
    the standardized response residual, the part the predictors cannot
    explain, mixed with independent Gaussian noise so the overall
    response-size correlation comes out near ``spec.target_cor``.
    Residual loading makes the design informative conditionally on the
    predictors everywhere in the space, which is the situation design
    weights exist to fix; loading on the raw response instead would
    let the tree's own splits absorb most of the informativeness.
    Sizes are floored well above zero so no single unit can carry an
    outsized design weight.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(spec.size, spec.d))
    resid = spec.noise_scale * rng.standard_normal(spec.size)
    y = _signal(spec.shape, x) + resid
    eta = rng.standard_normal(spec.size)
    sd_resid = float(np.std(resid))
    sd_y = float(np.std(y))
    if spec.target_cor == 0.0:
        mix = eta
    else:
        if sd_resid == 0.0 or sd_y == 0.0:
            raise ValueError(
                "target correlation needs response noise; got noise_scale=0"
            )
        # cor(y, mix) = rho * sd_resid / sd_y, so this rho hits the
        # target; it must stay below 1 for the mix to exist.
        rho = spec.target_cor * sd_y / sd_resid
        if rho >= 1.0:
            raise ValueError(
                f"target_cor={spec.target_cor!r} is unreachable: the "
                f"predictors explain too much response variation; "
                f"raise noise_scale or lower target_cor"
            )
        mix = rho * resid / sd_resid + math.sqrt(1.0 - rho * rho) * eta
    z = np.maximum(_Z_BASE + _Z_SPREAD * mix, _Z_FLOOR)
    return FinitePopulation(
        ids=np.arange(spec.size, dtype=np.int64),
        y=y,
        x=x,
        z=z,
    )


def fit_population_tree(pop: FinitePopulation, config: FitConfig | None = None,
                        ) -> TreeModel:
    """Fit the reference tree: every population row, unit weights."""
    data = ObservedDataset(
        y=pop.y,
        x=pop.x,
        weights=np.ones(pop.size, dtype=np.float64),
        origin=None,
    )
    return fit_tree(data, config)


def _leaf_ids(model: TreeModel, x: npt.NDArray[np.float64]
              ) -> tuple[npt.NDArray[np.int64], list[Leaf]]:
    """Leaf index per row, plus the leaves in left-to-right order."""
    leaves: list[Leaf] = []
    ids = np.empty(x.shape[0], dtype=np.int64)

    def walk(node: TreeNode, rows: npt.NDArray[np.int64]) -> None:
        if isinstance(node, Leaf):
            ids[rows] = len(leaves)
            leaves.append(node)
            return
        go_left = x[rows, node.variable] <= node.cutpoint
        walk(node.left, rows[go_left])
        walk(node.right, rows[~go_left])

    walk(model.root, np.arange(x.shape[0], dtype=np.int64))
    return ids, leaves


def population_on_sample_partition(
    model: TreeModel, pop: FinitePopulation, k: float, gamma: float
) -> TreeModel:
    """Re-estimate a sample tree's leaves from the full population.

    The split structure is kept as is; each leaf's value is recomputed
    from the population rows it receives, with unit weights, trimmed
    at ``gamma``. A leaf receiving no more than ``k`` population rows
    gets value zero. This is the population-level target a weighted
    sample fit is aiming at, useful as an oracle in studies.
    """
    if pop.d != model.d:
        raise ValueError(f"population has d={pop.d}, model expects {model.d}")

    def rebuild(node: TreeNode, rows: npt.NDArray[np.int64]) -> TreeNode:
        if isinstance(node, Leaf):
            count = int(rows.shape[0])
            if count > k:
                est = trimmed_mean(
                    pop.y[rows], np.ones(count, dtype=np.float64), gamma
                )
            else:
                est = 0.0
            return Leaf(
                estimate=float(est),
                sample_count=count,
                weighted_count=float(count),
                dense=bool(count > k),
            )
        go_left = pop.x[rows, node.variable] <= node.cutpoint
        return Internal(
            variable=node.variable,
            cutpoint=node.cutpoint,
            split_kind=node.split_kind,
            left=rebuild(node.left, rows[go_left]),
            right=rebuild(node.right, rows[~go_left]),
        )

    root = rebuild(model.root, np.arange(pop.size, dtype=np.int64))
    return TreeModel(
        root=root,
        n=pop.size,
        d=model.d,
        k=k,
        gamma=gamma,
        config=model.config,
        variable_names=model.variable_names,
    )


def tree_discrepancy(
    model: TreeModel, reference: TreeModel, pop: FinitePopulation
) -> tuple[float, float]:
    """Population-averaged error of ``model`` against ``reference``.

    Returns ``(mean_error, mse)``: the plain average and the average
    square of ``model(x) - reference(x)`` over every population row.
    """
    diff = predict_many(model, pop.x) - predict_many(reference, pop.x)
    return float(np.mean(diff)), float(np.mean(diff * diff))


def dense_box_mass(model: TreeModel, data, k: float) -> float:
    """Weighted share of data mass in leaves with at least ``k`` rows.

    Leaf thickness is judged by the leaf's recorded fitted sample
    count; the mass is the share of ``data``'s weight routed to such
    leaves (populations count with unit weight). Values near one mean
    the partition kept essentially all mass estimable.
    """
    if isinstance(data, FinitePopulation):
        w = np.ones(data.size, dtype=np.float64)
    else:
        w = data.weights
    ids, leaves = _leaf_ids(model, data.x)
    dense = np.asarray([leaf.sample_count >= k for leaf in leaves], dtype=bool)
    return float(np.sum(w[dense[ids]]) / np.sum(w))


def norm_report(
    model: TreeModel,
    data,
    variants: Sequence[EdfVariant] = ("right", "left_limit"),
) -> list[dict]:
    """Per-coordinate partition norms of the model's leaves over ``data``.

    Returns one mapping per coordinate with the variable name and one
    entry per requested EDF variant.
    """
    part = leaf_partition(model, data.x)
    rows: list[dict] = []
    for dim in range(model.d):
        row: dict = {"variable": model.variable_names[dim]}
        for variant in variants:
            row[f"norm_{variant}"] = partition_norm(part, data, dim, variant)
        rows.append(row)
    return rows


def derive_seed(base_seed: int, n: int, rep: int) -> int:
    """Deterministic per-replicate seed from the replicate coordinates.

    Built by seeding a ``numpy.random.SeedSequence`` with the triple
    ``(base_seed, n, rep)``, so any subset of replicates can be drawn
    in any order, or in parallel, with identical results.
    """
    state = np.random.SeedSequence([base_seed, n, rep]).generate_state(1, np.uint64)
    return int(state[0])


@dataclass(frozen=True)
class SimConfig:
    """Study layout: sample sizes, replicates, base seed, fit settings."""

    sizes: tuple[int, ...] = (100, 200, 400, 800, 1600)
    reps: int = 200
    base_seed: int = 20260822
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) == 0 or any(s < 1 for s in self.sizes):
            raise ValueError(f"sizes must be positive, got {self.sizes!r}")
        if len(set(self.sizes)) != len(self.sizes):
            raise ValueError(f"sizes must be distinct, got {self.sizes!r}")
        if self.reps < 1:
            raise ValueError(f"reps must be at least 1, got {self.reps}")


@dataclass(frozen=True)
class RepRecord:
    method: str
    n: int
    rep: int
    mean_error: float
    mse: float


@dataclass(frozen=True)
class AggregateRecord:
    method: str
    n: int
    bias: float
    bias_se: float
    rmse: float
    rmse_se: float


@dataclass(frozen=True)
class SimResult:
    per_rep: tuple[RepRecord, ...]
    aggregate: tuple[AggregateRecord, ...]
    reference: TreeModel


_METHODS = ("unweighted", "weighted")


def run_simulation(pop: FinitePopulation, config: SimConfig) -> SimResult:
    """Run the repeated-sampling study against one population.

    For each configured size and replicate, one PPS sample is drawn
    with a seed derived from ``(base_seed, n, rep)`` and two trees are
    fitted to it, with the design weights and with unit weights. Both
    are scored against the unit-weight population reference tree.
    Output rows are sorted by method, then size, then replicate, and
    are identical across runs and scheduling orders.
    """
    reference = fit_population_tree(pop, config.fit)
    per_rep: list[RepRecord] = []
    ref_pred = predict_many(reference, pop.x)
    for n in config.sizes:
        design = PpsDesign(pop.z, n)
        for rep in range(config.reps):
            seed = derive_seed(config.base_seed, n, rep)
            drawn = draw_pps_sample(design, seed)
            weighted_data = extract_sample(pop, drawn)
            unweighted_data = ObservedDataset(
                y=weighted_data.y,
                x=weighted_data.x,
                weights=np.ones(weighted_data.n, dtype=np.float64),
                origin=weighted_data.origin,
            )
            for method, sample in (
                ("weighted", weighted_data),
                ("unweighted", unweighted_data),
            ):
                model = fit_tree(sample, config.fit)
                diff = predict_many(model, pop.x) - ref_pred
                per_rep.append(
                    RepRecord(
                        method=method,
                        n=n,
                        rep=rep,
                        mean_error=float(np.mean(diff)),
                        mse=float(np.mean(diff * diff)),
                    )
                )

    per_rep.sort(key=lambda r: (r.method, r.n, r.rep))
    aggregate: list[AggregateRecord] = []
    for method in _METHODS:
        for n in config.sizes:
            rows = [r for r in per_rep if r.method == method and r.n == n]
            errs = np.asarray([r.mean_error for r in rows])
            mses = np.asarray([r.mse for r in rows])
            reps = errs.shape[0]
            bias = float(np.mean(errs))
            rmse = float(math.sqrt(np.mean(mses)))
            if reps > 1:
                bias_se = float(np.std(errs, ddof=1) / math.sqrt(reps))
                mse_se = float(np.std(mses, ddof=1) / math.sqrt(reps))
                rmse_se = mse_se / (2.0 * rmse) if rmse > 0.0 else 0.0
            else:
                bias_se = 0.0
                rmse_se = 0.0
            aggregate.append(
                AggregateRecord(
                    method=method,
                    n=n,
                    bias=bias,
                    bias_se=bias_se,
                    rmse=rmse,
                    rmse_se=rmse_se,
                )
            )
    return SimResult(
        per_rep=tuple(per_rep),
        aggregate=tuple(sorted(aggregate, key=lambda r: (r.method, r.n))),
        reference=reference,
    )


Target = Union[str, Path, IO[str]]


def _open_out(target: Target) -> tuple[IO[str], bool]:
    if isinstance(target, (str, Path)):
        return open(target, "w", newline="", encoding="utf-8"), True
    return target, False


def _write_rows(target: Target, preamble: Iterable[str], header: list[str],
                rows: Iterable[list]) -> None:
    stream, owned = _open_out(target)
    try:
        for line in preamble:
            stream.write(f"# {line}\n")
        stream.write(",".join(header) + "\n")
        for row in rows:
            stream.write(
                ",".join(repr(v) if isinstance(v, float) else str(v) for v in row)
                + "\n"
            )
    finally:
        if owned:
            stream.close()


def _config_preamble(config: SimConfig) -> list[str]:
    rates = config.fit.rates
    scale = rates.gamma_scale
    return [
        f"sizes={','.join(str(s) for s in config.sizes)}",
        f"reps={config.reps}",
        f"base_seed={config.base_seed}",
        f"alpha={rates.alpha}",
        f"epsilon={rates.epsilon}",
        f"gamma_form={rates.gamma_form}",
        f"gamma_scale={'auto' if scale is None else scale}",
        f"p_threshold={config.fit.p_threshold}",
        f"sparse_leaf_value={config.fit.sparse_leaf_value}",
    ]


def write_per_rep_csv(result: SimResult, config: SimConfig, target: Target) -> None:
    """Write one row per (method, size, replicate)."""
    _write_rows(
        target,
        _config_preamble(config),
        ["method", "n", "rep", "mean_error", "mse"],
        ([r.method, r.n, r.rep, r.mean_error, r.mse] for r in result.per_rep),
    )


def write_aggregate_csv(result: SimResult, config: SimConfig, target: Target) -> None:
    """Write one row per (method, size) with Monte Carlo standard errors."""
    _write_rows(
        target,
        _config_preamble(config),
        ["method", "n", "bias", "bias_se", "rmse", "rmse_se"],
        (
            [r.method, r.n, r.bias, r.bias_se, r.rmse, r.rmse_se]
            for r in result.aggregate
        ),
    )
