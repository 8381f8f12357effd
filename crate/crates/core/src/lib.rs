//! Approximation schemes for the knapsack problem with parametric item
//! weights `w_i(λ) = a_i + λ·b_i`.
//!
//! The solvers partition the real λ-axis into intervals and attach to each
//! interval one knapsack solution that is feasible throughout it and
//! `(1−ε)`-optimal at every point of it.

pub mod dp;
pub mod error;
pub mod feasibility;
pub mod fptas;
pub mod generate;
pub mod greedy;
pub mod instance;
pub mod numeric;
pub mod oracle;
pub mod par;
mod scaled;

pub use error::{Error, Result};
pub use instance::{Item, KnapsackSolution, ParametricInstance, PartitionFile, SolutionPartition};
pub use numeric::{AffineForm, ClosedInterval, ExtRational, Rational};
pub use par::ExecMode;
