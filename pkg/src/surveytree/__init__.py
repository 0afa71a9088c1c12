"""Design-weighted regression trees for complex survey samples.

The package fits piecewise-constant regression trees in which every
estimation step (split scoring, stopping, leaf values) uses design
weights, so the fitted tree targets the finite-population tree rather
than the sample-selection-tilted one. It also ships probability
proportional to size (PPS) sampling utilities and a Monte Carlo
harness for comparing weighted and unweighted fits against a
population reference tree.
"""

from surveytree.data import (
    DataError,
    DatasetSchema,
    FinitePopulation,
    ObservedDataset,
    read_dataset,
    read_matrix,
    validate_dataset,
    write_dataset,
)
from surveytree.design import (
    DesignSummary,
    DrawnSample,
    PpsDesign,
    design_summary,
    draw_pps_sample,
    extract_sample,
    pps_inclusion_probs,
)
from surveytree.estimators import (
    hajek_mean,
    trimmed_mean,
    weighted_edf,
    weighted_quantile,
    weighted_sse,
)
from surveytree.partition import Box, Partition, box_containing, partition_norm
from surveytree.simlab import (
    GeneratorSpec,
    SimConfig,
    SimResult,
    dense_box_mass,
    fit_population_tree,
    norm_report,
    population_on_sample_partition,
    run_simulation,
    synth_population,
    tree_discrepancy,
)
from surveytree.tree import (
    FitConfig,
    Internal,
    Leaf,
    RateParams,
    TreeFormatError,
    TreeModel,
    best_mse_split,
    fallback_median_split,
    fit_tree,
    leaf_estimate,
    leaf_partition,
    parse_tree,
    predict,
    predict_many,
    rate_values,
    serialize_tree,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "DataError",
    "DatasetSchema",
    "DesignSummary",
    "DrawnSample",
    "FinitePopulation",
    "FitConfig",
    "GeneratorSpec",
    "Internal",
    "Leaf",
    "ObservedDataset",
    "Partition",
    "PpsDesign",
    "RateParams",
    "SimConfig",
    "SimResult",
    "TreeFormatError",
    "TreeModel",
    "best_mse_split",
    "box_containing",
    "dense_box_mass",
    "design_summary",
    "draw_pps_sample",
    "extract_sample",
    "fallback_median_split",
    "fit_population_tree",
    "fit_tree",
    "hajek_mean",
    "leaf_estimate",
    "leaf_partition",
    "norm_report",
    "parse_tree",
    "partition_norm",
    "population_on_sample_partition",
    "pps_inclusion_probs",
    "predict",
    "predict_many",
    "rate_values",
    "read_dataset",
    "read_matrix",
    "run_simulation",
    "serialize_tree",
    "synth_population",
    "tree_discrepancy",
    "trimmed_mean",
    "validate_dataset",
    "weighted_edf",
    "weighted_quantile",
    "weighted_sse",
    "write_dataset",
]
