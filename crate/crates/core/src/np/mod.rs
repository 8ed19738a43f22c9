//! Adversarial-example search compiled to CNF: circuits, Tseitin and
//! cardinality encodings, DIMACS, a small solver, and the formula samplers.

pub mod cardinality;
pub mod circuit;
pub mod cnf;
pub mod reduction;
pub mod samplers;
pub mod solver;
pub mod tseitin;

pub use circuit::{circuit_of_classifier_c1, circuit_of_majority, circuit_of_parity, BoolCircuit, Gate};
pub use cnf::{CnfFormula, Lit};
pub use samplers::{sample_s1, sample_s2, sample_s_final, ManifestEntry, SamplerBundle, Stage};
pub use solver::{solve, solve_small, SolveResult, SolverLimits};
pub use tseitin::tseitin;
