//! Exact double Hurwitz numbers by three independent methods: transposition
//! factorizations, weighted ribbon graphs and tropical monodromy graphs.

pub mod chambers;
pub mod error;
pub mod params;
pub mod permutation;
pub mod rational;
pub mod ribbon;
pub mod traffic;
pub mod tropical;

pub use error::{HurwitzError, Result};
pub use params::{hurwitz_params, HurwitzParams, Partition};
pub use rational::Rational;
