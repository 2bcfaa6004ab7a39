//! Bakry-Émery curvature-dimension analysis on finite strongly connected
//! directed graphs.
//!
//! The pipeline is: lazy random walk M_α ([`stochastic`]) → stationary
//! vector φ → symmetrized Laplacian and Γ / Γ₂ forms ([`gamma`]) →
//! per-vertex curvature constants ([`curvature`]).
//!
//! ```
//! use cdgraph::{parse_edge_list, verify_graph, Dimension, VerifyOptions};
//!
//! let g = parse_edge_list("a b\nb a").unwrap();
//! let report = verify_graph(&g, 0.5, Dimension::Finite(2.0), &VerifyOptions::default()).unwrap();
//! assert!(report.all_cd_hold());
//! assert!((report.vertices[0].k_optimal - 0.5).abs() < 1e-12);
//! ```

pub mod cli;
pub mod curvature;
pub mod error;
pub mod gamma;
pub mod generate;
pub mod graph;
pub mod numerics;
pub mod report;
pub mod stochastic;

pub use curvature::{
    check_cd, local_constant_c, optimal_k, theorem_bound, verify_graph, CurvatureReport, Dimension, OptimalCurvature,
    VerifyOptions, VertexCurvature, Violation, ViolationSource,
};
pub use error::{Error, Result};
pub use gamma::{OperatorBundle, QuadraticForms, Reconciliation, VertexForms};
pub use graph::{parse_edge_list, parse_json_graph, DirectedGraph};
pub use numerics::{pencil_min_eig, solve_linear, sym_eig, Matrix, PencilBound, SymmetricEigen, TOLERANCES};
pub use stochastic::{build_probability_matrix, perron_vector, PerronVector, StochasticMatrix};
