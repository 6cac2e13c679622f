//! Hyperbolicity of finite metric spaces: Gromov products, the four-point
//! constant, thin triangles, tree decompositions and uniformly separated sets.

mod decomposition;
mod delta;
mod metric;
mod separation;
mod thin;

pub use decomposition::{validate_tree_decomposition, DecompositionReport, DecompositionSpec, DELTA_SUBSAMPLE};
pub use delta::{delta_four_point, quadruple_delta, DeltaMode, DeltaReport, DEFAULT_BUDGET, EXACT_LIMIT};
pub use metric::{gromov_product, random_tree, sample_points, FiniteMetric};
pub use separation::{
    estimate_d_star, region_boundary, validate_uniform_separation, DStarReport, SeparationReport,
    SeparationSpec, SetReport,
};
pub use thin::{check_rips, delta_thin, RipsCheck, ThinReport};
