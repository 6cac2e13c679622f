//! Curvature comparison for metric balls on triangulated surfaces, Gromov
//! hyperbolicity of finite metric spaces, and plane-domain estimates.

pub mod builders;
pub mod comparison;
pub mod error;
pub mod graph;
pub mod gromov;
pub mod mesh;
pub mod ode;
pub mod plane;

pub use num_complex::Complex64;

pub use comparison::{
    classify_surface, collar_width, comparison_area, comparison_boundary_length, disk_distance,
    eps0, eps0_target, f_c, round_annulus_modulus, topology_bound, ComparisonParams, SurfaceClass,
    SurfaceClassSpec,
};
pub use error::{Error, Result};
pub use graph::{ShortestPaths, UnionFind, WeightedGraph};
pub use mesh::{
    ball_profile, ball_profile_at, discrete_gauss_bonnet, distance_field, edge_distance_field,
    read_trimesh,
    scan_topology_bound, subsurface_distance, write_trimesh, BallProfile, BallSample,
    DistanceField, GaussBonnetReport, TopologyScan, TriMesh, VertexLink,
};
pub use ode::{
    check_comparison, check_fundamental_inequality, solve_linear_ode, ComparisonReport,
    FundamentalReport, OdeSolution, ProfileKind, ScalarProfile,
};
pub use builders::{basepoint, build, mark_surrounding_curve, BuildSpec, Hole, SurroundingCurve};
pub use gromov::{
    check_rips, delta_four_point, delta_thin, estimate_d_star, gromov_product, quadruple_delta, random_tree,
    sample_points,
    validate_tree_decomposition, validate_uniform_separation, DStarReport, DecompositionReport,
    DecompositionSpec, DeltaMode, DeltaReport, FiniteMetric, RipsCheck, SeparationReport,
    SeparationSpec, ThinReport,
};
pub use plane::{
    boundary_distance, check_length_ratio_punctured, check_minlen_bound, model_poincare_density,
    quasihyperbolic_distance, quasihyperbolic_distances, quasihyperbolic_length, random_polylines,
    uniformly_perfect_constant, LengthRatioReport, MinLenReport, Outer, PlaneDomain, PlaneHole,
    PoincareModel, RoundAnnulus, UniformlyPerfectReport,
};
