//! Laplace, Markov and Schrödinger operators as sparse rows over an oracle and
//! as finite compressions with exterior coupling.

mod assembly;
mod potential;
mod scheme;

pub use assembly::{
    compress, compress_keys, local_moment, local_moments, lp_transform, operator_row, CompressedDocument,
    CompressedOperator, SparseMatrix, SparseRow,
};
pub use potential::{PotentialKind, PotentialSpec};
pub use scheme::OperatorWeightScheme;
