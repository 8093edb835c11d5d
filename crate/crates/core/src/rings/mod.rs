//! Coefficient arithmetic: finite fields, capped p-adic numbers, local field
//! parameters and quadratic surds.

pub mod arith;
pub mod finite_field;
pub mod local;
pub mod padic;
pub mod surd;

pub use finite_field::{enumeration_cap, ff_arith, Embedding, FieldOp, FiniteField, FqElem};
pub use local::LocalFieldParams;
pub use padic::{padic_arith, Padic, PadicJson, PadicNum, PadicOp, Valuation};
pub use surd::QuadSurd;
