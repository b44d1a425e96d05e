//! Derived L∞ brackets from V-data, with the deformation problems they control:
//! Lie algebra morphisms and subalgebras, Lie bialgebras, associative algebras and
//! L∞ algebras presented by coderivations.

pub mod error;
pub mod graded_core;
pub mod graded_lie;
pub mod vdata;

pub mod assoc_deform;
pub mod bialgebra_deform;
pub mod lie_deform;
pub mod linf_coder;

pub mod cli;

pub use error::{Error, Result};
