//! Exact computations for simply-laced Lie algebras: Chevalley bases, adjoint
//! flows, quadratic-independence certificates for adjoint-orbit coordinate
//! functions, and a rewriting check for commutation of matrix coefficients.

pub mod algebra;
pub mod cartan;
pub mod cli;
pub mod cqgrel;
pub mod error;
pub mod exactlin;
pub mod flows;
pub mod quadind;
pub mod rootsystem;

pub use error::{Error, Result};
