//! Quadratic independence of adjoint-orbit coordinate functions: sampled
//! rank certificates, products of families, and a symbolic replay of the
//! coefficient-comparison proof.

pub mod certify;
pub mod family;
pub mod formulas;
pub mod prover;

pub use certify::{linear_dimension, pair_index, pair_of, quadratic_dimension, Degree, SamplerConfig};
pub use family::{adjoint_family, product_family, AdjointFamily, CustomFamily, FunctionFamily, ProductFamily, Provenance};
pub use formulas::{flow_formula_checks, FormulaCheck};
pub use prover::{coefficient_prover, ProverOptions, ProverReport, TraceEntry};
