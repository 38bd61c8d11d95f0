//! Exact Bayesian density estimation on `[0, 1)` with a prior over infinite
//! dyadic trees of piecewise-constant densities.
//!
//! ```
//! use bayestree::{BayesTree, Dataset};
//!
//! let data = Dataset::new([0.1, 0.12, 0.7]).unwrap();
//! let engine = BayesTree::default();
//! let result = engine.evaluate(&data, Some(0.11)).unwrap();
//! assert!(result.log_evidence.finite().is_some());
//! let density = engine.predictive_density(&data, 0.11).unwrap();
//! assert!(density.finite().unwrap() > 1.0);
//! ```

pub mod distributions;
pub mod engine;
pub mod error;
pub mod model;
pub mod numerics;

pub use distributions::{l1_error, midpoint_grid, ReferenceDistribution, ALL_DISTRIBUTIONS};
pub use engine::{
    double_point_dim_coefficients, multipoint_dim_coefficients, prior_dim_closed_form, prior_dim_coefficients,
    split_probability, BayesTree, EvidenceIndex, InferenceResult, MomentSpec, NodeInfo, QueryKind, SkeletonNode,
    TreeHeights, TreeSkeleton, DEFAULT_DIM_MAX, DEFAULT_SKELETON_DEPTH,
};
pub use error::{Error, Result};
pub use model::{Compactify, Dataset, DivergenceClass, HeavyPoint, ModelParams, NodeAddress, DEFAULT_DEPTH_CAP};
pub use numerics::{log_gamma, log_mix, log_wbar, log_weight, LogValue, Quantity};
