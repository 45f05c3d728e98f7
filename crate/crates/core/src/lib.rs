//! Exact arithmetic for positive and alternating generalized Cantor
//! expansions driven by a column-stochastic digit matrix.
//!
//! A [`QMatrix`] supplies, for every position `j`, probabilities
//! `q_{0,j}, ..., q_{m_j,j}`. A digit sequence is then read in one of three
//! ways ([`SystemKind`]): the positive expansion, the analytic alternating
//! expansion (base `-Q`), or the geometric alternating expansion obtained by
//! partitioning `[0, 1]` left to right at odd ranks and right to left at even
//! ranks. Everything is computed with exact rationals; infinite tails are
//! summed in closed form because matrices and digit streams are eventually
//! periodic.

pub mod classic;
pub mod codec;
pub mod cylinders;
pub mod error;
pub mod extremes;
pub mod interval;
pub mod periodic;
pub mod qmatrix;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
pub use interval::Interval;
pub use qmatrix::{Column, QMatrix};
pub use rational::Rational;
pub use series::{DigitStream, DigitWord, SystemKind};
