//! Pseudorandom sequences from endomorphism orbits on ordinary elliptic
//! curves over finite fields, with exact verifiers for the supporting
//! structure and evaluators for the distribution bounds.
//!
//! Counting and group arithmetic are exact over integers and packed field
//! elements. Floating-point code (character sums, bound evaluation) is
//! generic over [`num_traits::Float`]; the aliases below fix the usual
//! precisions.

pub mod analysis;
pub mod arith;
pub mod cm_order;
pub mod curve;
pub mod endo;
pub mod error;
pub mod field;
pub mod generator;
pub mod numeric;

pub use cm_order::{CMOrder, IdealHNF, OrderElement};
pub use curve::{Curve, Point};
pub use endo::{determine_end_ring, EndRing, Endomorphism, PointAction};
pub use error::{Error, Result};
pub use field::{FieldElement, FiniteField};
pub use generator::{GeneratorState, Observable, Output};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type BoundParamsF64 = analysis::bounds::BoundParams<f64>;
pub type BoundParamsF32 = analysis::bounds::BoundParams<f32>;
pub type KahanSum64 = numeric::KahanSum<f64>;
