//! Relay placement for wireless sensor networks: heuristics and exact
//! small-case solvers for minimising the longest edge of a spanning tree
//! when up to `k` extra points may be added.

pub mod beading;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod heuristics;
pub mod one_bst;
pub mod oracle;
pub mod spanning;

pub use error::{Error, Result};
pub use geometry::Point;
pub use heuristics::{solve, Algorithm, Solution};
pub use spanning::{Node, NodeId, NodeKind, Tree};
