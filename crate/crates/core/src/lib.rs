//! Typical sphere-packing densities.
//!
//! Two random models are covered. For Poisson point fields, a configuration
//! is thinned by removing a vertex cover of its proximity graph `G_d`, which
//! leaves points pairwise more than `d` apart; the modules here compute the
//! graph census, exact and constructive covers, the resulting density bounds,
//! and Monte Carlo checks of the moments that drive them. For random lattices,
//! the planar case has an exact density law that is sampled and integrated,
//! and the large-dimension limit law is evaluated with its remainder bracket.
//!
//! All randomness flows from explicit 64-bit seeds (see [`rng`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decimate;
pub mod error;
pub mod lattice2d;
pub mod moments;
pub mod pointfield;
pub mod proxgraph;
pub mod quad;
pub mod rng;
pub mod schmidt;
pub mod stats;
pub mod vcover;

pub use decimate::{
    decimate, delta_nu_exact, estimate_d_curve, explicit_lower, nu_bounds, tau_bounds, CurveParams, CurveRow,
    DecimationMode, DecimationResult, Dispersion, NuBounds, TauBounds,
};
pub use error::{Error, Result};
pub use lattice2d::{cdf_delta, delta_moments, lattice_density, pdf_delta, sample_modular, ModularSample};
pub use moments::{concentration_check, expected_m, expected_m1_bracket, mc_estimate, variance_scaling_check};
pub use pointfield::{
    ball_volume, min_spacing, packing_density_clipped_mc, packing_density_torus, sample_poisson, torus_distance,
    BoxSpec, Convention, PointConfiguration,
};
pub use proxgraph::{build_graph, component_census, local_count, ComponentCensus, ProximityGraph};
pub use schmidt::{fn_bracket, limit_cdf, min_distance_for_density, remainder_bound, CdfBracket};
pub use stats::MCEstimate;
pub use vcover::{
    constructive_cover, min_vertex_cover, nonend_removal_vertex, verify_cover_bounds, CoverMode, CoverResult,
    SimpleGraph,
};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
