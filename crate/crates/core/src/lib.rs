//! Finite multidimensional ("joint") choice data: separability, menus
//! betweenness, selective families, revealed preference and
//! rationalizability, with replayable witnesses for every failed check and
//! generators for common behavioral models.

pub mod cli;
pub mod document;
pub mod error;
pub mod generators;
pub mod model;
mod par;
pub mod preferences;
pub mod selective;
pub mod separability;
pub mod witness;

pub use error::{Error, Result};
pub use model::{Alternative, DimSubset, DimensionSet, ItemId, ItemSet, JointChoiceDataset, Menu, Schema, Universe};
pub use par::is_parallel;
pub use witness::{Witness, WitnessKind};
