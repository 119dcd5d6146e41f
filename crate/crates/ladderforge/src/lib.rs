//! Ladder operators of the two-mode {h(1)⊕h(1)}⋊u(2) algebra on a truncated Fock space.

pub mod algebra;
pub mod catalogue;
pub mod chen;
pub mod cli;
pub mod cplx;
pub mod eigenstates;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod spectra;
pub mod transforms;

pub use error::{Error, Result};
