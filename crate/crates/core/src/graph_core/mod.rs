//! Weighted Serre graphs seen through lazy oracles, finite patches, and the
//! metric primitives on regions (thick boundaries, interiors, nets, packing).

mod exchange;
mod metric;
mod oracle;
mod patch;

pub use exchange::{PatchDocument, EXCHANGE_VERSION};
pub use metric::{inclusive_radius, maximal_net, packing_number, r_boundary, r_interior, TransversalFamily};
pub(crate) use metric::bfs_from;
pub use oracle::{
    audit_vertex, growth_volume, neighbor_keys, oracle_ball, weighted_degree, EdgeBundle, GraphOracle, ScaledOracle,
    VertexKey,
};
pub use patch::{build_patch, Patch, PatchEdge, Region, DEFAULT_VERTEX_CAP};
