//! p-adic formal groups, zero estimates, jet integrality over finite fields,
//! point counting and explicit Chabauty-type bounds.

pub mod bounds;
pub mod count;
pub mod error;
pub mod fgroup;
pub mod jetint;
pub mod presets;
pub mod rings;
pub mod scalar;
pub mod selftest;
pub mod report;
pub mod series;
pub mod zeroest;

pub use error::{Error, Result};
pub use scalar::{Field, PValued, Ring};

use num_rational::BigRational;

pub use rings::{FiniteField, FqElem, LocalFieldParams, Padic, PadicNum, QuadSurd, Valuation};
pub use series::{PolyOneForm, TruncSeries};

pub type QpSeries = TruncSeries<PadicNum>;
pub type FqSeries = TruncSeries<FqElem>;
pub type RatSeries = TruncSeries<BigRational>;
pub type F64Series = TruncSeries<f64>;
pub type QpLaw = fgroup::FormalGroupLaw<PadicNum>;
pub type QpExpLog = fgroup::ExpLog<PadicNum>;
pub type FqJet = jetint::JetMap<FqElem>;
