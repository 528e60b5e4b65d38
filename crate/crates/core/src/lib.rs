//! Radon-Nikodym interpolation and operator-spectrum analysis of sampled
//! timeseries.
//!
//! A timeserie `(x_l, f_l)` is turned into moment vectors over a polynomial
//! basis, the moments are lifted into symmetric matrix pencils, and the
//! generalized eigenproblem of each pencil gives the distribution of the
//! observable of interest (value, derivative, relaxation rate). The same
//! machinery yields Radon-Nikodym and least squares interpolants, the
//! Christoffel function, and Gauss/Lebesgue quadratures built from data.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod models;
pub mod moments;
pub mod orthopoly;
pub mod spectral;

pub use analysis::Analysis;
pub use error::{Error, Result};
pub use linalg::{Cholesky, Matrix, Spectrum};
pub use moments::{DxMode, MatrixKind, MomentSet, OperatorPair, PairKind, Timeserie};
pub use orthopoly::{BasisSpec, DomainMap, Family, ProductExpansion};
