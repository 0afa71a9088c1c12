"""Acceptance checks for the whole package, one per shipped guarantee.

Each test prints a single pass/fail line so the suite can double as a
checklist run (`pytest tests/test_acceptance.py -s`). The checks are
ordered from estimator arithmetic up to full simulation determinism.
"""

from __future__ import annotations

import math
import time

import numpy as np

from surveytree.cli import main as cli_main
from surveytree.data import DatasetSchema, ObservedDataset, dataset_from_rows
from surveytree.design import PpsDesign, design_summary, draw_pps_sample, extract_sample, pps_inclusion_probs
from surveytree.estimators import hajek_mean, trimmed_mean, weighted_sse
from surveytree.partition import Box, Partition, partition_norm
from surveytree.simlab import (
    GeneratorSpec,
    SimConfig,
    dense_box_mass,
    derive_seed,
    norm_report,
    run_simulation,
    synth_population,
)
from surveytree.tree import (
    Internal,
    Leaf,
    best_mse_split,
    fit_tree,
    parse_tree,
    serialize_tree,
)


def report(num: int, label: str, ok: bool, detail: str = "") -> None:
    print(f"criterion {num} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({label}) failed: {detail}"


def leaves_of(node) -> list[Leaf]:
    if isinstance(node, Leaf):
        return [node]
    return leaves_of(node.left) + leaves_of(node.right)


def internals_of(node) -> list[Internal]:
    if isinstance(node, Leaf):
        return []
    return [node] + internals_of(node.left) + internals_of(node.right)


# ---------------------------------------------------------------------------


def test_criterion_1_golden_partition_norms():
    start = time.perf_counter()
    data = dataset_from_rows(
        ["y,x1,w\n", "1.0,1.0,2.0\n", "2.0,2.0,1.0\n", "3.0,3.0,1.0\n"],
        DatasetSchema(response="y", predictors=("x1",), weight="w"),
    )
    part_x = data.x[:, 0]
    split = Partition(
        (
            Box(np.array([-math.inf]), np.array([2.5]), np.flatnonzero(part_x <= 2.5)),
            Box(np.array([2.5]), np.array([math.inf]), np.flatnonzero(part_x > 2.5)),
        ),
        d=1,
    )
    right = partition_norm(split, data, 0, "right")
    left = partition_norm(split, data, 0, "left_limit")
    elapsed = time.perf_counter() - start
    ok = (
        abs(right - 0.25) <= 1e-12
        and abs(left - 0.4375) <= 1e-12
        and elapsed < 1.0
    )
    report(
        1,
        "golden partition norms",
        ok,
        f"right={right!r} left_limit={left!r} elapsed={elapsed:.3f}s",
    )


def test_criterion_2_trimmed_mean_oracles():
    rng = np.random.default_rng(20260822)

    def clamp_oracle(y, w, cutoff):
        return float(np.sum(w * np.clip(y, -cutoff, cutoff)) / np.sum(w))

    def quadrature_oracle(y, w, cutoff):
        wsum = float(np.sum(w))

        def area(part):
            breaks = sorted({0.0, cutoff, *part[part < cutoff].tolist()})
            breaks = [b for b in breaks if 0.0 <= b <= cutoff]
            total = 0.0
            for a, b in zip(breaks[:-1], breaks[1:]):
                total += (b - a) * float(np.sum(w[part > a]) / wsum)
            return total

        pos = np.maximum(y, 0.0)
        neg = np.maximum(-y, 0.0)
        return area(pos) - area(neg)

    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        y = rng.normal(scale=3.0, size=n)
        w = rng.uniform(0.05, 8.0, size=n)
        cutoff = float(rng.uniform(0.05, 8.0))
        got = trimmed_mean(y, w, cutoff)
        worst = max(
            worst,
            abs(got - clamp_oracle(y, w, cutoff)),
            abs(got - quadrature_oracle(y, w, cutoff)),
        )
    ok = worst <= 1e-9
    report(2, "trimmed-mean oracles", ok, f"worst deviation {worst!r}")


def test_criterion_3_constant_weights_equal_unit_weights():
    rng = np.random.default_rng(3)
    constants = (0.1, 0.5, 1.0, 2.0, 7.3, 50.0, 1000.0)
    ok = True
    detail = ""
    for case in range(25):
        n, d = 500, 3
        x = rng.uniform(size=(n, d))
        y = np.where(x[:, 0] > 0.4, 2.0, -1.0) + rng.normal(scale=0.8, size=n)
        c = constants[case % len(constants)]
        unit = fit_tree(ObservedDataset(y=y, x=x, weights=np.ones(n)))
        const = fit_tree(ObservedDataset(y=y, x=x, weights=np.full(n, c)))
        if serialize_tree(unit) != serialize_tree(const):
            ok = False
            detail = f"case {case} with constant {c} diverged"
            break
    report(3, "constant weights equal unit weights", ok, detail)


def test_criterion_4_weight_scale_invariance():
    rng = np.random.default_rng(4)
    ok = True
    detail = ""
    for case in range(10):
        n, d = 400, 3
        x = rng.uniform(size=(n, d))
        y = 2.0 * np.sin(3.0 * x[:, 0]) + x[:, 1] + rng.normal(scale=0.5, size=n)
        w = rng.uniform(0.2, 9.0, size=n)
        base = fit_tree(ObservedDataset(y=y, x=x, weights=w))
        base_splits = [
            (s.variable, s.cutpoint, s.split_kind)
            for s in internals_of(base.root)
        ]
        base_leaves = leaves_of(base.root)
        for c in (0.1, 7.3, 1000.0):
            scaled = fit_tree(ObservedDataset(y=y, x=x, weights=c * w))
            splits = [
                (s.variable, s.cutpoint, s.split_kind)
                for s in internals_of(scaled.root)
            ]
            if splits != base_splits:
                ok = False
                detail = f"case {case}, c={c}: structure changed"
                break
            for a, b in zip(base_leaves, leaves_of(scaled.root)):
                scale = max(1.0, abs(a.estimate))
                if abs(a.estimate - b.estimate) > 1e-9 * scale:
                    ok = False
                    detail = (
                        f"case {case}, c={c}: estimate {b.estimate!r} "
                        f"vs {a.estimate!r}"
                    )
                    break
            if not ok:
                break
        if not ok:
            break
    report(4, "weight-scale invariance", ok, detail)


def test_criterion_5_split_gain_monotonicity():
    rng = np.random.default_rng(5)
    candidates = 0
    min_delta = math.inf
    while candidates < 10_000:
        n = int(rng.integers(8, 60))
        d = int(rng.integers(1, 4))
        x = rng.uniform(size=(n, d))
        y = rng.normal(scale=2.0, size=n)
        w = rng.uniform(0.2, 5.0, size=n)
        k = int(rng.integers(1, 5))
        parent = weighted_sse(y, w)
        for var in range(d):
            v = x[:, var]
            for cut_low in sorted(set(v.tolist()))[:-1]:
                cut = (cut_low + float(np.min(v[v > cut_low]))) / 2.0
                left = v <= cut
                if left.sum() < k or (~left).sum() < k:
                    continue
                delta = (
                    parent
                    - weighted_sse(y[left], w[left])
                    - weighted_sse(y[~left], w[~left])
                )
                min_delta = min(min_delta, delta)
                candidates += 1
        data = ObservedDataset(y=y, x=x, weights=w)
        got = best_mse_split(data, np.arange(n), k)
        if got is not None and got[2] < 0.0:
            min_delta = min(min_delta, got[2])

    accepted_ok = True
    for fit_case in range(10):
        n, d = 300, 3
        x = rng.uniform(size=(n, d))
        y = np.where(x[:, 0] > 0.5, 3.0, 0.0) + rng.normal(scale=0.6, size=n)
        w = rng.uniform(0.3, 4.0, size=n)
        data = ObservedDataset(y=y, x=x, weights=w)
        model = fit_tree(data)
        scaled_w = w / w[0]

        def walk(node, members):
            nonlocal accepted_ok
            if isinstance(node, Leaf):
                return
            v = x[members, node.variable]
            left = members[v <= node.cutpoint]
            right = members[v > node.cutpoint]
            if node.split_kind == "mse":
                parent = weighted_sse(y[members], scaled_w[members])
                drop = (
                    parent
                    - weighted_sse(y[left], scaled_w[left])
                    - weighted_sse(y[right], scaled_w[right])
                )
                hurdle = 0.05 * parent - 1e-9 * max(1.0, parent)
                if drop < hurdle:
                    accepted_ok = False
            walk(node.left, left)
            walk(node.right, right)

        walk(model.root, np.arange(n))

    ok = min_delta >= -1e-9 and accepted_ok
    report(
        5,
        "split-gain monotonicity",
        ok,
        f"candidates={candidates} min_delta={min_delta!r} "
        f"accepted_ok={accepted_ok}",
    )


def test_criterion_6_weighted_mean_rate():
    start = time.perf_counter()
    pop = synth_population(GeneratorSpec(size=10_000), 424)
    target = float(np.mean(pop.y))
    reps = 1000
    rmse = {}
    for n in (100, 1600):
        design = PpsDesign(pop.z, n)
        errs = np.empty(reps)
        for rep in range(reps):
            drawn = draw_pps_sample(design, derive_seed(6, n, rep))
            sample = extract_sample(pop, drawn)
            errs[rep] = hajek_mean(sample.y, sample.weights) - target
        rmse[n] = float(np.sqrt(np.mean(errs * errs)))
    ratio = rmse[1600] / rmse[100]
    elapsed = time.perf_counter() - start
    ok = 0.15 <= ratio <= 0.45 and elapsed < 60.0
    report(
        6,
        "weighted-mean convergence rate",
        ok,
        f"ratio={ratio:.4f} (target 0.25) elapsed={elapsed:.1f}s",
    )


def test_criterion_7_weighted_beats_unweighted_study():
    start = time.perf_counter()
    pop = synth_population(GeneratorSpec(), 42)
    config = SimConfig()

    cors = {}
    for n in config.sizes:
        cors[n] = design_summary(pop, PpsDesign(pop.z, n)).cor_y_pi
    cor_ok = all(0.15 <= c <= 0.25 for c in cors.values())

    result = run_simulation(pop, config)
    agg = {(r.method, r.n): r for r in result.aggregate}
    unw = [agg[("unweighted", n)] for n in config.sizes]
    wtd = [agg[("weighted", n)] for n in config.sizes]

    bias_detectable = all(abs(r.bias) > 1.96 * r.bias_se for r in unw)
    bias_smaller = all(
        abs(w.bias) < abs(u.bias) for w, u in zip(wtd, unw)
    )
    rmse_better = all(
        w.rmse < u.rmse
        for w, u in zip(wtd, unw)
        if w.n >= 400
    )
    rmse_decreasing = all(
        a.rmse > b.rmse for a, b in zip(wtd[:-1], wtd[1:])
    )
    elapsed = time.perf_counter() - start
    ok = (
        cor_ok
        and bias_detectable
        and bias_smaller
        and rmse_better
        and rmse_decreasing
        and elapsed < 600.0
    )
    report(
        7,
        "weighted fits beat unweighted fits",
        ok,
        f"cors={ {n: round(c, 4) for n, c in cors.items()} } "
        f"bias_detectable={bias_detectable} bias_smaller={bias_smaller} "
        f"rmse_better={rmse_better} rmse_decreasing={rmse_decreasing} "
        f"elapsed={elapsed:.1f}s",
    )


def test_criterion_8_partition_shrinks_with_size():
    spec = GeneratorSpec(
        size=20_000, d=2, shape="smooth", noise_scale=0.8, target_cor=0.22
    )
    seeds = range(20)
    sizes = (200, 3200)
    mass = {n: [] for n in sizes}
    norms: dict[tuple[str, str, int], list[float]] = {}
    for s in seeds:
        pop = synth_population(spec, 1000 + s)
        for n in sizes:
            design = PpsDesign(pop.z, n)
            drawn = draw_pps_sample(design, derive_seed(8, n, s))
            sample = extract_sample(pop, drawn)
            model = fit_tree(sample)
            mass[n].append(dense_box_mass(model, pop, model.k))
            for row in norm_report(model, pop):
                for variant in ("norm_right", "norm_left_limit"):
                    key = (row["variable"], variant, n)
                    norms.setdefault(key, []).append(row[variant])

    med_mass = {n: float(np.median(mass[n])) for n in sizes}
    mass_ok = med_mass[3200] >= 0.95 and med_mass[3200] >= med_mass[200]
    norm_ok = True
    worst = ""
    for var in ("x1", "x2"):
        for variant in ("norm_right", "norm_left_limit"):
            small = float(np.median(norms[(var, variant, 200)]))
            large = float(np.median(norms[(var, variant, 3200)]))
            if not large < small:
                norm_ok = False
                worst = f"{var}/{variant}: {large!r} !< {small!r}"
    ok = mass_ok and norm_ok
    report(
        8,
        "partitions refine with sample size",
        ok,
        f"median mass={med_mass} norm_ok={norm_ok} {worst}",
    )


def test_criterion_9_certainty_allocation():
    pi = pps_inclusion_probs([1.0, 1.0, 1.0, 10.0], 2)
    exact_ok = np.array_equal(pi, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0])

    rng = np.random.default_rng(9)
    random_ok = True
    for _ in range(100):
        big_n = int(rng.integers(2, 80))
        n = int(rng.integers(1, big_n + 1))
        z = rng.lognormal(sigma=1.5, size=big_n)
        probs = pps_inclusion_probs(z, n)
        if abs(float(np.sum(probs)) - n) > 1e-9:
            random_ok = False
        if not (np.all(probs > 0.0) and np.all(probs <= 1.0)):
            random_ok = False
        order = np.argsort(z, kind="stable")
        if np.any(np.diff(probs[order]) < -1e-12):
            random_ok = False
    ok = exact_ok and random_ok
    report(
        9,
        "certainty allocation",
        ok,
        f"exact_ok={exact_ok} random_ok={random_ok}",
    )


def test_criterion_10_determinism_and_round_trip(tmp_path):
    args = lambda out: [
        "simulate",
        "--schema-predictors",
        "x1,x2",
        "--gen-size",
        "400",
        "--gen-dims",
        "2",
        "--sizes",
        "30,60",
        "--reps",
        "3",
        "--seed",
        "7",
        "--out",
        str(out),
    ]
    first = tmp_path / "a"
    second = tmp_path / "b"
    assert cli_main(args(first)) == 0
    assert cli_main(args(second)) == 0
    csv_ok = all(
        (first / name).read_bytes() == (second / name).read_bytes()
        for name in ("per_rep.csv", "aggregate.csv", "design_summary.csv")
    )

    rng = np.random.default_rng(10)
    round_trip_ok = True
    for _ in range(50):
        n = int(rng.integers(40, 200))
        d = int(rng.integers(1, 4))
        x = rng.uniform(size=(n, d))
        y = np.where(x[:, 0] > 0.5, 2.5, 0.0) + rng.normal(scale=0.6, size=n)
        w = rng.uniform(0.3, 5.0, size=n)
        model = fit_tree(ObservedDataset(y=y, x=x, weights=w))
        text = serialize_tree(model)
        if serialize_tree(parse_tree(text)) != text:
            round_trip_ok = False
            break
    ok = csv_ok and round_trip_ok
    report(
        10,
        "determinism and round-trip",
        ok,
        f"csv_ok={csv_ok} round_trip_ok={round_trip_ok}",
    )
