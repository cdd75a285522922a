//! Numerical toolkit for weighted Bergman spaces `A¹_μ` of analytic
//! functions on the disc or the plane.
//!
//! The crate builds lacunary block decompositions `(m_n, s_n, d_n)` of a
//! radial measure, evaluates the Bergman norm together with its block
//! equivalent, the solid-core norm and the solid-hull norm, and ships a
//! harness that checks the two-sided estimates between them on seeded
//! random polynomial corpora.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod harness;
pub mod hull;
pub mod lacunary;
pub mod logreal;
pub mod measure;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod weight;

pub use error::{Error, Result};
pub use hull::HullParameters;
pub use lacunary::LacunaryDecomposition;
pub use logreal::LogReal;
pub use measure::{Domain, RadialMeasure};
pub use poly::CoeffSeq;
pub use weight::RadialWeight;
