//! Built-in groups, their Cayley graphs, height functions and Følner families.

mod cayley;
mod element;
mod folner;
mod height;

pub use cayley::{CayleyOracle, Convention, GeneratingSet, Step};
pub use element::{group_arithmetic, Element, GroupOp, GroupSpec};
pub use folner::{cross_fibre_family, folner_members, folner_set, lattice_mod_family, whole_group_family, FolnerSet};
pub use height::{
    certify_height, hom_coordinates, verify_height_axioms, HeightAxiomReport, HeightCertificate, HeightFunction,
    HeightRejection, HeightSpec, HeightViolation,
};
