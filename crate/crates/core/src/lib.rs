//! Minimum cycle bases of plane graphs in implicit form, plus the cut
//! structures that follow from duality: weight vectors, Gomory-Hu trees and
//! a constant-time min-cut oracle.

pub mod planar;
pub mod gmcb_oracle;
pub mod io;
pub mod lexsp;
pub mod separator;
pub mod dual_forest;
pub mod mcb;
pub mod cuts;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;
