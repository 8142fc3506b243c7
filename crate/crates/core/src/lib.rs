pub mod canon;
pub mod complex;
pub mod enumerate;
pub mod equivariant;
pub mod error;
pub mod graph;
pub mod homology;
pub mod iso;
pub mod oracle;
pub mod perm;
pub mod sparse;
pub mod store;

pub use error::{Error, Result};
pub use graph::MarkedWeightedGraph;
pub use iso::{canonicalize, CanonicalKey, SignedIso};
