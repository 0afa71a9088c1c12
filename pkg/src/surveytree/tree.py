"""Design-weighted regression tree: growth, estimation, serialization.

The recursive builder works on one node's member rows at a time:

1. A node with at most twice the minimum-leaf rate of rows stops.
2. Otherwise it scans every coordinate for the split maximizing the
   drop in weighted sum of squared errors, considering cutpoints at
   midpoints between consecutive distinct values and only splits that
   leave at least the minimum-leaf count (the rate rounded up to whole
   rows) on each side.
3. The best split is kept only when its drop is a real improvement,
   at least ``p_threshold`` percent of the node's weighted SSE.
4. Otherwise the node splits anyway, at the median of the least
   recently used coordinate, which forces every coordinate to keep
   being revisited as the tree deepens.

The minimum-leaf rate and the leaf-trimming cutoff both grow with
the fitted sample size at configured rates, which is what makes leaf
estimates stable enough for design consistency. Leaf values are
Hajek means after symmetric trimming; a leaf too thin to estimate
(member count not exceeding the minimum-leaf rate) falls back to a
configurable sparse rule, zero by default.

Two faces of the minimum-leaf rate coexist on purpose. Row-count
restrictions on candidate splits use the integer ``ceil(n ** alpha)``
because a side holds a whole number of rows. The stop rule and the
dense-versus-sparse test compare counts against the exact real rate
``n ** alpha``: every split already guarantees each side at least
``ceil(n ** alpha)`` rows, so any leaf born from a split clears the
real rate and estimates from its members. Rounding the rate up inside
those comparisons instead would turn every exactly-at-the-minimum
leaf into a zero, a sizable bias at small fitted sizes for no
stability gain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
import numpy.typing as npt

from surveytree.data import DataError, ObservedDataset, validate_dataset
from surveytree.estimators import trimmed_mean, weighted_quantile
from surveytree.partition import Box, Partition

__all__ = [
    "RateParams",
    "FitConfig",
    "Leaf",
    "Internal",
    "TreeNode",
    "TreeModel",
    "TreeFormatError",
    "rate_values",
    "best_mse_split",
    "fallback_median_split",
    "leaf_estimate",
    "fit_tree",
    "predict",
    "predict_many",
    "leaf_partition",
    "serialize_tree",
    "parse_tree",
    "render_text",
]

FORMAT_VERSION = 1


class TreeFormatError(ValueError):
    """Raised when a serialized tree cannot be parsed or validated."""


@dataclass(frozen=True)
class RateParams:
    """Growth rates for the minimum-leaf count and trimming cutoff.

    ``alpha`` sets the minimum-leaf count ``ceil(n ** alpha)`` and
    must lie strictly between one half and one: slower and leaf
    estimates keep too few observations to stabilize, faster and the
    tree cannot grow. The trimming cutoff either grows
    logarithmically, ``gamma_scale * log(1 + n)``, or as the power
    ``gamma_scale * n ** (alpha - epsilon - 1/2)`` with ``epsilon``
    strictly inside ``(0, alpha - 1/2)``. ``gamma_scale=inf``
    disables trimming; ``gamma_scale=None`` defers to a data-driven
    default chosen at fit time.
    """

    alpha: float = 0.6
    epsilon: float | None = None
    gamma_form: str = "log"
    gamma_scale: float | None = None

    def __post_init__(self) -> None:
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(
                f"alpha must lie strictly in (0.5, 1), got {self.alpha!r}"
            )
        if self.gamma_form not in ("log", "power"):
            raise ValueError(f"unknown gamma_form: {self.gamma_form!r}")
        if self.epsilon is not None:
            if not 0.0 < self.epsilon < self.alpha - 0.5:
                raise ValueError(
                    f"epsilon must lie strictly in (0, alpha - 0.5), "
                    f"got {self.epsilon!r} with alpha={self.alpha!r}"
                )
        elif self.gamma_form == "power":
            raise ValueError("gamma_form 'power' requires epsilon")
        if self.gamma_scale is not None:
            if math.isnan(self.gamma_scale) or self.gamma_scale <= 0.0:
                raise ValueError(
                    f"gamma_scale must be positive or inf, got {self.gamma_scale!r}"
                )


@dataclass(frozen=True)
class FitConfig:
    """Everything :func:`fit_tree` needs besides the data."""

    rates: RateParams = field(default_factory=RateParams)
    p_threshold: float = 5.0
    use_weighted_median: bool = True
    sparse_leaf_value: str = "zero"

    def __post_init__(self) -> None:
        if math.isnan(self.p_threshold) or self.p_threshold < 0.0:
            raise ValueError(
                f"p_threshold must be nonnegative, got {self.p_threshold!r}"
            )
        if self.sparse_leaf_value not in ("zero", "hajek"):
            raise ValueError(
                f"sparse_leaf_value must be 'zero' or 'hajek', "
                f"got {self.sparse_leaf_value!r}"
            )


@dataclass(frozen=True)
class Leaf:
    """Terminal node. ``weighted_count`` is the leaf's design mass in
    the fit's normalized weight scale (first fitted weight = 1), so
    rescaling every weight by one constant leaves it unchanged."""

    estimate: float
    sample_count: int
    weighted_count: float
    dense: bool


@dataclass(frozen=True)
class Internal:
    variable: int
    cutpoint: float
    split_kind: str  # "mse" or "median_fallback"
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class TreeModel:
    """A fitted tree plus the realized fitting constants.

    ``k`` is the realized minimum-leaf rate ``n ** alpha`` as a real
    number; split-size restrictions during growth used ``ceil(k)``.
    """

    root: TreeNode
    n: int
    d: int
    k: float
    gamma: float
    config: FitConfig
    variable_names: tuple[str, ...]


def rate_values(rates: RateParams, n: int) -> tuple[int, float]:
    """Realize the minimum-leaf count and trimming cutoff at size ``n``.

    Returns ``(k, gamma)`` with ``k = ceil(n ** alpha)`` and ``gamma``
    per the configured form. ``rates.gamma_scale`` must be concrete
    here (a number or ``inf``); resolving the data-driven default is
    the caller's job.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if rates.gamma_scale is None:
        raise ValueError("gamma_scale is unresolved; supply a number or inf")
    k = int(math.ceil(n ** rates.alpha))
    if math.isinf(rates.gamma_scale):
        gamma = math.inf
    elif rates.gamma_form == "log":
        gamma = rates.gamma_scale * math.log1p(n)
    else:
        gamma = rates.gamma_scale * n ** (rates.alpha - rates.epsilon - 0.5)
    return k, gamma


def _split_scan(
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
    w: npt.NDArray[np.float64],
    members: npt.NDArray[np.int64],
    k: int,
) -> tuple[int, float, float] | None:
    """Exhaustive best-SSE-drop scan. Ties: smallest variable, then cut."""
    m = members.shape[0]
    if m < 2 * k or m < 2:
        return None
    ym = y[members]
    wm = w[members]
    best: tuple[int, float, float] | None = None
    counts = np.arange(1, m)
    size_ok = (counts >= k) & (m - counts >= k)
    for var in range(x.shape[1]):
        v = x[members, var]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        sy = ym[order]
        sw = wm[order]
        cw = np.cumsum(sw)
        cwy = np.cumsum(sw * sy)
        valid = (sv[:-1] < sv[1:]) & size_ok
        if not np.any(valid):
            continue
        w_left = cw[:-1]
        w_right = cw[-1] - w_left
        mu_left = cwy[:-1] / w_left
        mu_right = (cwy[-1] - cwy[:-1]) / w_right
        # Between-group form of the SSE drop: nonnegative by
        # construction, so no cancellation for near-constant nodes.
        delta = np.where(
            valid, w_left * w_right * (mu_left - mu_right) ** 2 / cw[-1], -np.inf
        )
        j = int(np.argmax(delta))
        if best is None or delta[j] > best[2]:
            cut = (float(sv[j]) + float(sv[j + 1])) / 2.0
            best = (var, cut, float(delta[j]))
    return best


def best_mse_split(
    data: ObservedDataset, members: npt.ArrayLike, k: int
) -> tuple[int, float, float] | None:
    """Best single split of ``members`` by weighted-SSE drop.

    Candidate cutpoints are midpoints between consecutive distinct
    values of each coordinate, restricted to splits leaving at least
    ``k`` rows on each side. Returns ``(variable, cutpoint, delta)``
    where ``delta`` is the drop in weighted SSE (parent minus the two
    children), or ``None`` when no candidate satisfies the size
    restriction. Ties are broken toward the smallest variable index,
    then the smallest cutpoint.
    """
    idx = np.asarray(members, dtype=np.int64)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return _split_scan(data.x, data.y, data.weights, idx, k)


def fallback_median_split(
    data: ObservedDataset,
    members: npt.ArrayLike,
    lru_order: tuple[int, ...],
    k: int,
    weighted: bool = True,
) -> tuple[int, float] | None:
    """Median split on the least recently used usable coordinate.

    Walks ``lru_order`` front to back. For each coordinate the
    candidate cutpoint is the largest member value strictly below the
    (weighted) median, so member rows at the median go right. The
    first coordinate whose split leaves at least ``k`` rows on each
    side wins. Returns ``None`` when every coordinate is degenerate or
    too unbalanced, which only happens when no valid split exists at
    all.
    """
    idx = np.asarray(members, dtype=np.int64)
    m = idx.shape[0]
    wts = data.weights[idx] if weighted else np.ones(m, dtype=np.float64)
    for var in lru_order:
        v = data.x[idx, var]
        med = weighted_quantile(v, wts, 0.5)
        below = v[v < med]
        if below.shape[0] == 0:
            continue
        cut = float(np.max(below))
        n_left = int(np.count_nonzero(v <= cut))
        if n_left >= k and m - n_left >= k:
            return var, cut
    return None


def leaf_estimate(
    data: ObservedDataset,
    members: npt.ArrayLike,
    k: float,
    gamma: float,
    sparse_leaf_value: str = "zero",
) -> float:
    """Leaf value: trimmed Hajek mean when dense, sparse rule otherwise.

    A leaf is dense when it holds strictly more than ``k`` member
    rows, where ``k`` may be the real minimum-leaf rate rather than a
    whole number. Sparse leaves return 0 under the default rule, or
    the untrimmed Hajek mean under ``sparse_leaf_value="hajek"``.
    """
    idx = np.asarray(members, dtype=np.int64)
    if sparse_leaf_value not in ("zero", "hajek"):
        raise ValueError(f"unknown sparse rule: {sparse_leaf_value!r}")
    if idx.shape[0] > k:
        return trimmed_mean(data.y[idx], data.weights[idx], gamma)
    if sparse_leaf_value == "zero":
        return 0.0
    return trimmed_mean(data.y[idx], data.weights[idx], math.inf)


def _resolve_gamma_scale(
    rates: RateParams,
    y: npt.NDArray[np.float64],
    w: npt.NDArray[np.float64],
    n: int,
) -> RateParams:
    if rates.gamma_scale is not None:
        return rates
    # Data-driven default: trim near the top percentile of response
    # magnitude at the fitted size, whatever the configured form.
    p99 = weighted_quantile(np.abs(y), w, 0.99)
    if p99 <= 0.0:
        return replace(rates, gamma_scale=math.inf)
    return replace(rates, gamma_scale=p99 / math.log1p(n))


def fit_tree(
    data: ObservedDataset,
    config: FitConfig | None = None,
    variable_names: tuple[str, ...] | None = None,
) -> TreeModel:
    """Grow a design-weighted regression tree on ``data``.

    The returned model records the realized minimum-leaf count ``k``
    and trimming cutoff ``gamma`` alongside the configuration. Splits
    are deterministic: ties in the SSE scan break toward the smallest
    variable then cutpoint, and the median fallback consults a least
    recently used order that starts at coordinate 0 and demotes each
    coordinate when used. With all weights equal, the fit is
    identical to an unweighted one.

    Raises
    ------
    DataError
        When :func:`surveytree.data.validate_dataset` reports
        violations.
    """
    cfg = config if config is not None else FitConfig()
    problems = validate_dataset(data)
    if problems:
        raise DataError("; ".join(problems))
    n = data.n
    d = data.d
    if variable_names is None:
        names = tuple(f"x{j + 1}" for j in range(d))
    else:
        names = tuple(variable_names)
        if len(names) != d:
            raise ValueError(
                f"got {len(names)} variable names for {d} predictors"
            )

    # Scale-free weights make a constant-weight fit bit-identical to a
    # unit-weight fit, auto trimming cutoff and leaf mass totals
    # included; the cumulative sums behind the cutoff quantile do not
    # commute with a constant factor in float arithmetic.
    scaled = ObservedDataset(
        y=data.y,
        x=data.x,
        weights=data.weights / data.weights[0],
        origin=None,
    )
    rates = _resolve_gamma_scale(cfg.rates, data.y, scaled.weights, n)
    k_count, gamma = rate_values(rates, n)
    # Real rate for the stop and dense thresholds; whole-row ceiling
    # only where a side's row count is restricted.
    k = float(n**rates.alpha)
    p_frac = cfg.p_threshold / 100.0

    def make_leaf(members: npt.NDArray[np.int64]) -> Leaf:
        est = leaf_estimate(scaled, members, k, gamma, cfg.sparse_leaf_value)
        return Leaf(
            estimate=float(est),
            sample_count=int(members.shape[0]),
            weighted_count=float(np.sum(scaled.weights[members])),
            dense=bool(members.shape[0] > k),
        )

    def grow(members: npt.NDArray[np.int64], lru: tuple[int, ...]) -> TreeNode:
        if members.shape[0] <= 2 * k:
            return make_leaf(members)
        choice = _split_scan(scaled.x, scaled.y, scaled.weights, members, k_count)
        split: tuple[int, float, str] | None = None
        if choice is not None:
            var, cut, delta = choice
            node_sse = _node_sse(scaled, members)
            if delta > 0.0 and delta >= p_frac * node_sse:
                split = (var, cut, "mse")
        if split is None:
            fb = fallback_median_split(
                scaled, members, lru, k_count, weighted=cfg.use_weighted_median
            )
            if fb is None:
                return make_leaf(members)
            split = (fb[0], fb[1], "median_fallback")
        var, cut, kind = split
        go_left = scaled.x[members, var] <= cut
        child_lru = tuple(j for j in lru if j != var) + (var,)
        return Internal(
            variable=var,
            cutpoint=float(cut),
            split_kind=kind,
            left=grow(members[go_left], child_lru),
            right=grow(members[~go_left], child_lru),
        )

    root = grow(np.arange(n, dtype=np.int64), tuple(range(d)))
    return TreeModel(
        root=root, n=n, d=d, k=k, gamma=gamma, config=cfg, variable_names=names
    )


def _node_sse(data: ObservedDataset, members: npt.NDArray[np.int64]) -> float:
    y = data.y[members]
    w = data.weights[members]
    mu = np.average(y, weights=w)
    return float(np.sum(w * (y - mu) ** 2))


def predict(model: TreeModel, point: npt.ArrayLike) -> float:
    """Route one point to its leaf and return the leaf estimate."""
    q = np.asarray(point, dtype=np.float64)
    if q.shape != (model.d,):
        raise ValueError(f"point must have shape ({model.d},), got {q.shape}")
    if np.any(np.isnan(q)):
        raise ValueError("point contains NaN")
    node = model.root
    while isinstance(node, Internal):
        node = node.left if q[node.variable] <= node.cutpoint else node.right
    return node.estimate


def predict_many(model: TreeModel, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Vectorized :func:`predict` over the rows of a matrix."""
    q = np.asarray(x, dtype=np.float64)
    if q.ndim != 2 or q.shape[1] != model.d:
        raise ValueError(f"x must have shape (n, {model.d})")
    if np.any(np.isnan(q)):
        raise ValueError("x contains NaN")
    out = np.empty(q.shape[0], dtype=np.float64)

    def fill(node: TreeNode, rows: npt.NDArray[np.int64]) -> None:
        if isinstance(node, Leaf):
            out[rows] = node.estimate
            return
        go_left = q[rows, node.variable] <= node.cutpoint
        fill(node.left, rows[go_left])
        fill(node.right, rows[~go_left])

    fill(model.root, np.arange(q.shape[0], dtype=np.int64))
    return out


def leaf_partition(model: TreeModel, x: npt.ArrayLike) -> Partition:
    """The model's leaf regions as a partition over the rows of ``x``.

    Box bounds come from the root-to-leaf cut predicates, infinite on
    never-cut sides; members are the rows of ``x`` each leaf receives.
    """
    q = np.asarray(x, dtype=np.float64)
    if q.ndim != 2 or q.shape[1] != model.d:
        raise ValueError(f"x must have shape (n, {model.d})")
    boxes: list[Box] = []

    def walk(
        node: TreeNode,
        rows: npt.NDArray[np.int64],
        lower: npt.NDArray[np.float64],
        upper: npt.NDArray[np.float64],
    ) -> None:
        if isinstance(node, Leaf):
            boxes.append(Box(lower=lower, upper=upper, members=rows))
            return
        go_left = q[rows, node.variable] <= node.cutpoint
        lo2 = lower.copy()
        hi2 = upper.copy()
        hi2[node.variable] = min(upper[node.variable], node.cutpoint)
        walk(node.left, rows[go_left], lower, hi2)
        lo2[node.variable] = max(lower[node.variable], node.cutpoint)
        walk(node.right, rows[~go_left], lo2, upper)

    walk(
        model.root,
        np.arange(q.shape[0], dtype=np.int64),
        np.full(model.d, -np.inf),
        np.full(model.d, np.inf),
    )
    return Partition(boxes=tuple(boxes), d=model.d)


def _node_to_obj(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {
            "kind": "leaf",
            "estimate": node.estimate,
            "sample_count": node.sample_count,
            "weighted_count": node.weighted_count,
            "dense": node.dense,
        }
    return {
        "kind": "internal",
        "variable": node.variable,
        "cutpoint": node.cutpoint,
        "split_kind": node.split_kind,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def _encode_special(value: float | None) -> float | str | None:
    if value is None:
        return "auto"
    if math.isinf(value):
        return "inf"
    return value


def serialize_tree(model: TreeModel) -> str:
    """Render a model as deterministic JSON text.

    Key order and float formatting are fixed, so serializing, parsing,
    and serializing again reproduces the exact bytes. Infinite values
    are encoded as the string ``"inf"`` and an unresolved data-driven
    ``gamma_scale`` as ``"auto"``, keeping the document strict JSON.
    """
    cfg = model.config
    obj = {
        "format_version": FORMAT_VERSION,
        "n": model.n,
        "d": model.d,
        "k": model.k,
        "gamma": _encode_special(model.gamma),
        "variable_names": list(model.variable_names),
        "config": {
            "alpha": cfg.rates.alpha,
            "epsilon": cfg.rates.epsilon,
            "gamma_form": cfg.rates.gamma_form,
            "gamma_scale": _encode_special(cfg.rates.gamma_scale),
            "p_threshold": cfg.p_threshold,
            "use_weighted_median": cfg.use_weighted_median,
            "sparse_leaf_value": cfg.sparse_leaf_value,
        },
        "root": _node_to_obj(model.root),
    }
    return json.dumps(obj, indent=2, allow_nan=False)


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise TreeFormatError(f"missing {key!r} in {where}")
    return obj[key]


def _decode_special(value, where: str, allow_auto: bool) -> float | None:
    if value == "inf":
        return math.inf
    if value == "auto" and allow_auto:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise TreeFormatError(f"bad numeric value {value!r} in {where}")


def _obj_to_node(obj: dict, where: str) -> TreeNode:
    kind = _need(obj, "kind", where)
    if kind == "leaf":
        return Leaf(
            estimate=float(_need(obj, "estimate", where)),
            sample_count=int(_need(obj, "sample_count", where)),
            weighted_count=float(_need(obj, "weighted_count", where)),
            dense=bool(_need(obj, "dense", where)),
        )
    if kind == "internal":
        split_kind = _need(obj, "split_kind", where)
        if split_kind not in ("mse", "median_fallback"):
            raise TreeFormatError(f"bad split_kind {split_kind!r} in {where}")
        return Internal(
            variable=int(_need(obj, "variable", where)),
            cutpoint=float(_need(obj, "cutpoint", where)),
            split_kind=split_kind,
            left=_obj_to_node(_need(obj, "left", where), where + ".left"),
            right=_obj_to_node(_need(obj, "right", where), where + ".right"),
        )
    raise TreeFormatError(f"unknown node kind {kind!r} in {where}")


def parse_tree(text: str) -> TreeModel:
    """Parse :func:`serialize_tree` output back into a model.

    Raises
    ------
    TreeFormatError
        On malformed JSON (with the failure position), an unsupported
        format version, or missing or ill-typed fields.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(
            f"not valid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    version = _need(obj, "format_version", "document")
    if version != FORMAT_VERSION:
        raise TreeFormatError(
            f"unsupported format_version {version!r}, expected {FORMAT_VERSION}"
        )
    cfg_obj = _need(obj, "config", "document")
    eps = _need(cfg_obj, "epsilon", "config")
    rates = RateParams(
        alpha=float(_need(cfg_obj, "alpha", "config")),
        epsilon=None if eps is None else float(eps),
        gamma_form=str(_need(cfg_obj, "gamma_form", "config")),
        gamma_scale=_decode_special(
            _need(cfg_obj, "gamma_scale", "config"), "config.gamma_scale", True
        ),
    )
    config = FitConfig(
        rates=rates,
        p_threshold=float(_need(cfg_obj, "p_threshold", "config")),
        use_weighted_median=bool(_need(cfg_obj, "use_weighted_median", "config")),
        sparse_leaf_value=str(_need(cfg_obj, "sparse_leaf_value", "config")),
    )
    names = _need(obj, "variable_names", "document")
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise TreeFormatError("variable_names must be a list of strings")
    d = int(_need(obj, "d", "document"))
    if len(names) != d:
        raise TreeFormatError(
            f"variable_names has {len(names)} entries but d={d}"
        )
    gamma = _decode_special(_need(obj, "gamma", "document"), "gamma", False)
    root = _obj_to_node(_need(obj, "root", "document"), "root")
    _check_structure(root, d)
    k_value = _need(obj, "k", "document")
    if isinstance(k_value, bool) or not isinstance(k_value, (int, float)):
        raise TreeFormatError(f"bad numeric value {k_value!r} in k")
    return TreeModel(
        root=root,
        n=int(_need(obj, "n", "document")),
        d=d,
        k=float(k_value),
        gamma=float(gamma),
        config=config,
        variable_names=tuple(names),
    )


def _check_structure(node: TreeNode, d: int) -> None:
    if isinstance(node, Leaf):
        return
    if not 0 <= node.variable < d:
        raise TreeFormatError(
            f"split variable {node.variable} out of range for d={d}"
        )
    _check_structure(node.left, d)
    _check_structure(node.right, d)


def render_text(model: TreeModel) -> str:
    """Human-readable sketch of the tree, one node per line."""

    def counts(node: TreeNode) -> tuple[int, float]:
        if isinstance(node, Leaf):
            return node.sample_count, node.weighted_count
        ln, lw = counts(node.left)
        rn, rw = counts(node.right)
        return ln + rn, lw + rw

    lines: list[str] = []

    def walk(node: TreeNode, depth: int, label: str) -> None:
        pad = "  " * depth
        if isinstance(node, Leaf):
            tag = "dense" if node.dense else "sparse"
            lines.append(
                f"{pad}{label}leaf: estimate={node.estimate:.6g} "
                f"n={node.sample_count} wn={node.weighted_count:.6g} ({tag})"
            )
            return
        n_node, w_node = counts(node)
        name = model.variable_names[node.variable]
        lines.append(
            f"{pad}{label}split {name} <= {node.cutpoint:.6g} "
            f"[{node.split_kind}] n={n_node} wn={w_node:.6g}"
        )
        walk(node.left, depth + 1, "yes: ")
        walk(node.right, depth + 1, "no:  ")

    header = (
        f"tree: n={model.n} d={model.d} k={format(model.k, '.6g')} "
        f"gamma={'inf' if math.isinf(model.gamma) else format(model.gamma, '.6g')}"
    )
    lines.insert(0, header)
    walk(model.root, 0, "")
    return "\n".join(lines)
