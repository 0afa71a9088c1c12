"""Command line interface.

Four commands: ``fit`` grows and saves a tree, ``predict`` applies a
saved tree, ``simulate`` runs the repeated-sampling study, and
``diagnose`` reports partition norms and dense-box mass for a tree
over a dataset. Exit codes: 0 on success, 1 on data or runtime
errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from surveytree.data import (
    DataError,
    DatasetSchema,
    FinitePopulation,
    read_dataset,
    read_matrix,
)
from surveytree.design import PpsDesign, design_summary
from surveytree.simlab import (
    GeneratorSpec,
    SimConfig,
    dense_box_mass,
    norm_report,
    run_simulation,
    synth_population,
    write_aggregate_csv,
    write_per_rep_csv,
)
from surveytree.tree import (
    FitConfig,
    RateParams,
    TreeFormatError,
    fit_tree,
    parse_tree,
    predict_many,
    render_text,
    serialize_tree,
)

__all__ = ["main"]


def _parse_scale(text: str) -> float | None:
    if text == "auto":
        return None
    if text == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number, 'inf', or 'auto', got {text!r}"
        ) from None


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not sizes:
        raise argparse.ArgumentTypeError("at least one size is required")
    return sizes


def _schema_args(parser: argparse.ArgumentParser, need_response: bool | None = True,
                 with_weight: bool = True, with_size: bool = False) -> None:
    if need_response is not None:
        parser.add_argument("--schema-response", required=need_response,
                            help="response column name")
    parser.add_argument("--schema-predictors", required=True,
                        help="comma-separated predictor column names")
    if with_weight:
        parser.add_argument("--schema-weight", default=None,
                            help="design weight column (default: unit weights)")
    if with_size:
        parser.add_argument("--schema-size", default=None,
                            help="size-measure column (marks a population file)")


def _fit_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.6,
                        help="minimum-leaf growth exponent, in (0.5, 1)")
    parser.add_argument("--epsilon", type=float, default=None,
                        help="power-form trimming exponent offset")
    parser.add_argument("--gamma-form", choices=("log", "power"), default="log",
                        help="trimming cutoff growth form")
    parser.add_argument("--gamma-scale", type=_parse_scale, default=None,
                        help="trimming scale; a number, 'inf', or 'auto'")
    parser.add_argument("--p-threshold", type=float, default=5.0,
                        help="minimum SSE improvement percent to accept a split")
    parser.add_argument("--sparse-leaf", choices=("zero", "hajek"),
                        default="zero", help="value rule for too-thin leaves")


def _fit_config(args: argparse.Namespace) -> FitConfig:
    rates = RateParams(
        alpha=args.alpha,
        epsilon=args.epsilon,
        gamma_form=args.gamma_form,
        gamma_scale=args.gamma_scale,
    )
    return FitConfig(
        rates=rates,
        p_threshold=args.p_threshold,
        sparse_leaf_value=args.sparse_leaf,
    )


def _predictors(args: argparse.Namespace) -> tuple[str, ...]:
    names = tuple(s for s in args.schema_predictors.split(",") if s != "")
    if not names:
        raise DataError("no predictor names given")
    return names


def _cmd_fit(args: argparse.Namespace) -> int:
    schema = DatasetSchema(
        response=args.schema_response,
        predictors=_predictors(args),
        weight=args.schema_weight,
    )
    data = read_dataset(args.data, schema)
    model = fit_tree(data, _fit_config(args), variable_names=schema.predictors)
    text = serialize_tree(model)
    Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(render_text(model))
    print(f"wrote {args.out}")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model = parse_tree(Path(args.tree).read_text(encoding="utf-8"))
    names = _predictors(args)
    if len(names) != model.d:
        raise DataError(
            f"tree expects {model.d} predictors, schema names {len(names)}"
        )
    # Prediction inputs need no response or weight column.
    x = read_matrix(args.data, names)
    preds = predict_many(model, x)
    with open(args.out, "w", newline="", encoding="utf-8") as out:
        out.write("row_id,prediction\n")
        for i, value in enumerate(preds):
            out.write(f"{i},{float(value)!r}\n")
    print(f"wrote {args.out} ({preds.shape[0]} rows)")
    return 0


def _load_population(args: argparse.Namespace) -> FinitePopulation:
    if args.population is not None:
        if args.schema_size is None:
            raise DataError("--population requires --schema-size")
        schema = DatasetSchema(
            response=args.schema_response,
            predictors=_predictors(args),
            size=args.schema_size,
        )
        data = read_dataset(args.population, schema)
        if not isinstance(data, FinitePopulation):
            raise DataError("population file did not produce a population")
        return data
    spec = GeneratorSpec(
        size=args.gen_size,
        d=args.gen_dims,
        shape=args.gen_shape,
        noise_scale=args.gen_noise,
        target_cor=args.gen_cor,
    )
    return synth_population(spec, args.seed)


def _cmd_simulate(args: argparse.Namespace) -> int:
    pop = _load_population(args)
    config = SimConfig(
        sizes=args.sizes,
        reps=args.reps,
        base_seed=args.seed,
        fit=_fit_config(args),
    )
    bad = [n for n in config.sizes if n > pop.size]
    if bad:
        raise DataError(
            f"sizes {bad} exceed the population size {pop.size}"
        )
    result = run_simulation(pop, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_per_rep_csv(result, config, out_dir / "per_rep.csv")
    write_aggregate_csv(result, config, out_dir / "aggregate.csv")
    summary_path = out_dir / "design_summary.csv"
    with open(summary_path, "w", newline="", encoding="utf-8") as out:
        out.write(
            "design,n,certainty_units,min_pi,max_pi,cv_pi,cor_y_pi,"
            "sampling_fraction\n"
        )
        for n in config.sizes:
            s = design_summary(pop, PpsDesign(pop.z, n), label="pps")
            out.write(
                f"{s.design},{s.n},{s.certainty_units},{s.min_pi!r},"
                f"{s.max_pi!r},{s.cv_pi!r},{s.cor_y_pi!r},"
                f"{s.sampling_fraction!r}\n"
            )
    written = ["per_rep.csv", "aggregate.csv", "design_summary.csv"]
    if args.chart:
        from surveytree.plots import render_sim_chart

        render_sim_chart(result.aggregate, out_dir / "figure.svg")
        written.append("figure.svg")
    print(f"wrote {', '.join(written)} under {out_dir}")
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    model = parse_tree(Path(args.tree).read_text(encoding="utf-8"))
    names = _predictors(args)
    if len(names) != model.d:
        raise DataError(
            f"tree expects {model.d} predictors, schema names {len(names)}"
        )
    schema = DatasetSchema(
        response=args.schema_response,
        predictors=names,
        weight=args.schema_weight,
    )
    data = read_dataset(args.data, schema)
    rows = norm_report(model, data)
    mass = dense_box_mass(model, data, model.k)
    with open(args.out, "w", newline="", encoding="utf-8") as out:
        out.write(f"# k={model.k}\n")
        gamma = "inf" if math.isinf(model.gamma) else repr(model.gamma)
        out.write(f"# gamma={gamma}\n")
        if args.population_size is not None:
            frac = data.y.shape[0] / args.population_size
            out.write(f"# sampling_fraction={frac!r}\n")
        out.write("variable,norm_right,norm_left_limit\n")
        for row in rows:
            out.write(
                f"{row['variable']},{row['norm_right']!r},"
                f"{row['norm_left_limit']!r}\n"
            )
        out.write(f"dense_box_mass,{mass!r},{mass!r}\n")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surveytree",
        description="Design-weighted regression trees for survey samples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a tree to a delimited sample file")
    p_fit.add_argument("--data", required=True, help="sample CSV path")
    _schema_args(p_fit)
    _fit_args(p_fit)
    p_fit.add_argument("--out", required=True, help="tree file to write")
    p_fit.set_defaults(func=_cmd_fit)

    p_pred = sub.add_parser("predict", help="apply a saved tree to a CSV")
    p_pred.add_argument("--tree", required=True, help="tree file from fit")
    p_pred.add_argument("--data", required=True, help="CSV with predictor columns")
    _schema_args(p_pred, need_response=None, with_weight=False)
    p_pred.add_argument("--out", required=True, help="prediction CSV to write")
    p_pred.set_defaults(func=_cmd_predict)

    p_sim = sub.add_parser(
        "simulate", help="repeated PPS sampling study against a population"
    )
    p_sim.add_argument("--population", default=None,
                       help="population CSV (otherwise a synthetic one is used)")
    _schema_args(p_sim, need_response=False, with_weight=False, with_size=True)
    gen_defaults = GeneratorSpec()
    p_sim.add_argument("--gen-size", type=int, default=gen_defaults.size,
                       help="synthetic population size")
    p_sim.add_argument("--gen-dims", type=int, default=gen_defaults.d,
                       help="synthetic predictor count")
    p_sim.add_argument("--gen-shape", choices=("step", "smooth", "constant"),
                       default=gen_defaults.shape, help="synthetic signal shape")
    p_sim.add_argument("--gen-noise", type=float, default=gen_defaults.noise_scale,
                       help="synthetic noise scale")
    p_sim.add_argument("--gen-cor", type=float, default=gen_defaults.target_cor,
                       help="target correlation of response and size measure")
    p_sim.add_argument("--sizes", type=_parse_sizes,
                       default=(100, 200, 400, 800, 1600),
                       help="comma-separated sample sizes")
    p_sim.add_argument("--reps", type=int, default=200,
                       help="replicates per size")
    p_sim.add_argument("--seed", type=int, default=20260822,
                       help="base seed; all randomness derives from it")
    _fit_args(p_sim)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--chart", action="store_true",
                       help="also render figure.svg")
    p_sim.set_defaults(func=_cmd_simulate)

    p_diag = sub.add_parser(
        "diagnose", help="partition norms and dense-box mass for a saved tree"
    )
    p_diag.add_argument("--tree", required=True, help="tree file from fit")
    p_diag.add_argument("--data", required=True, help="sample CSV path")
    _schema_args(p_diag)
    p_diag.add_argument("--population-size", type=int, default=None,
                        help="population size, for the sampling fraction")
    p_diag.add_argument("--out", required=True, help="report CSV to write")
    p_diag.set_defaults(func=_cmd_diagnose)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # Schema-response is optional only where a command can do without
    # it; simulate needs it whenever a population file is given.
    if args.command == "simulate" and args.population is not None:
        if args.schema_response is None:
            parser.error("--population requires --schema-response")
    try:
        return args.func(args)
    except (DataError, TreeFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
