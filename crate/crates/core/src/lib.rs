pub mod cfmp;
pub mod digraph;
pub mod error;
pub mod fixtures;
pub mod graphoid;
pub mod io;
pub mod separation;

pub use digraph::{DiGraph, NodeSet, UGraph};
pub use error::{Error, Result};
pub use separation::{delta_separates, delta_separates_trail, SeparationQuery};
