//! Truncated Puiseux-series solutions of nonlinear q-difference equations.
//!
//! ```
//! use qpuiseux::field::rational::int;
//! use qpuiseux::parser::parse_polynomial;
//! use qpuiseux::solver::{solve_exact, BranchStatus, SolverConfig};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let p = parse_polynomial("y - x*y(q*x) - x")?;
//! let out = solve_exact(&p, &SolverConfig::new(int(4)))?;
//! assert_eq!(out.branches[0].series.to_string(), "x + q*x^2 + q^3*x^3 + q^6*x^4 + o(x^4)");
//! assert_eq!(out.branches[0].status, BranchStatus::Truncated);
//! # Ok(())
//! # }
//! ```

pub mod characteristic;
pub mod cli;
pub mod field;
pub mod gevrey;
pub mod json;
pub mod parser;
pub mod polygon;
pub mod qdiff;
pub mod roots;
pub mod solver;

pub use field::{Approx, Coefficient, FieldError, KScalar, QMonomialSum, Rational};
pub use qdiff::{MultiIndex, PuiseuxSeries, QDiffPolynomial, TermKey};
