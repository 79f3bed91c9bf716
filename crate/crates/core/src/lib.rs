//! Finite open topological groupoids, their equivariant sheaves and the
//! Moerdijk site of sheaves `⟨G, U, N⟩`, together with restriction along
//! replete subgroupoids and the geometric-domination closure.

pub mod check;
pub mod eqsheaf;
pub mod error;
pub mod fintop;
pub mod format;
pub mod galois;
pub mod generate;
pub mod groupoid;
pub mod pointset;
pub mod restrict;
pub mod site;

pub use error::{Error, Result};
pub use fintop::{CtsMap, FinSpace, MapReport};
pub use groupoid::{FinGroupoid, GroupoidMorphism, OpenSubgroupoid, RepleteInclusion};
pub use pointset::PointSet;
