//! Graph-theoretic services: canonical forms, planarity, path languages,
//! edge-label encoding and target rewiring.

pub mod canon;
mod encode;
mod paths;
pub mod planarity;
mod rewire;

pub use canon::{canonical_form, canonical_labeling, is_isomorphic, CanonicalForm};
pub use encode::encode_edge_labels;
pub(crate) use encode::annotated_form;
pub use paths::{label_paths, path_language};
pub use planarity::is_planar;
pub use rewire::{rewire, RewireReport};
