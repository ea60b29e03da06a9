"""Riemannian functional principal component analysis on S^d and SO(3)."""

from rfpca.baseline import L2Model, fit_l2_fpca, geodesic_fve_l2
from rfpca.compositional import (
    CompositionCurve,
    CountPanel,
    smooth_counts,
    sphere_to_composition,
    sqrt_embed,
    to_proportions,
)
from rfpca.data import TangentProcess, TrajectorySample, stack_samples, uniform_grid
from rfpca.fpca import (
    RfpcaModel,
    compute_fve,
    compute_log_processes,
    fit_rfpca,
    mode_of_variation,
    select_num_components,
    truncate_representation,
)
from rfpca.frechet import FrechetConfig, frechet_mean_curve, frechet_mean_point
from rfpca.manifold import (
    ManifoldSpec,
    exp_map,
    geodesic_distance,
    iota_embed,
    iota_extract,
    log_map,
    project_to_manifold,
    rotation_between,
)
from rfpca.simulate import SimConfig, gen_samples

__version__ = "0.1.0"

__all__ = [
    "L2Model",
    "fit_l2_fpca",
    "geodesic_fve_l2",
    "CompositionCurve",
    "CountPanel",
    "smooth_counts",
    "sphere_to_composition",
    "sqrt_embed",
    "to_proportions",
    "TangentProcess",
    "TrajectorySample",
    "stack_samples",
    "uniform_grid",
    "RfpcaModel",
    "compute_fve",
    "compute_log_processes",
    "fit_rfpca",
    "mode_of_variation",
    "select_num_components",
    "truncate_representation",
    "FrechetConfig",
    "frechet_mean_curve",
    "frechet_mean_point",
    "ManifoldSpec",
    "exp_map",
    "geodesic_distance",
    "iota_embed",
    "iota_extract",
    "log_map",
    "project_to_manifold",
    "rotation_between",
    "SimConfig",
    "gen_samples",
]
