//! Finite order trees, grafts and hybrids, foliage trees, a symbolic set
//! algebra on the Baire space, and the pipeline that rebuilds a π-tree on the
//! complement of a σ-compact set.

pub mod baire;
pub mod config;
pub mod driver;
pub mod enumerate;
pub mod export;
pub mod foliage;
pub mod graft;
pub mod laws;
pub mod pipeline;
pub mod report;
pub mod seq;
pub mod tree;
pub mod universe;

pub use foliage::{FoliageFlags, FoliageTree};
pub use seq::Seq;
pub use tree::{FinTree, NodeId, NodeSet, Relation};
pub use universe::{FiniteSets, Universe};
