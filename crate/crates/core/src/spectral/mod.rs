//! Eigensolves of compressions, empirical and exact integrated densities of
//! states, jump detection and von Neumann trace estimates.

pub mod eigen;
mod ids;
pub mod linalg;
mod quadrature;
mod trace;

pub use eigen::{cluster_sorted, eigensolve, EigenReport, EigenSummary};
pub use ids::{detect_jumps, empirical_ids, exact_ids_line, uniform_grid, IDSCurve, JumpCandidate, JumpReport};
pub use quadrature::{adaptive_simpson, moment_of_distribution};
pub use trace::{trace_rank_norm, vn_bound_check, vn_trace_poly, BoundStatus, VnBoundReport};
