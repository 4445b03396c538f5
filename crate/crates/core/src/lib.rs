//! Tropical Fermat–Weber medians of phylogenetic trees.

pub mod bench;
pub mod cli;
pub mod consensus;
pub mod error;
pub mod flow;
pub mod fw;
pub mod instances;
pub mod io;
pub mod lp;
pub mod rational;
pub mod transport;
pub mod trees;
pub mod tropical;

pub use error::{Error, Result};
