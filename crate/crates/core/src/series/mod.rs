//! Truncated multivariate power series, chart one-forms and jet-ring
//! differentials.

pub mod forms;
pub mod text;
pub mod trunc;

pub use forms::{jetring_reduce, JetRingForm, PolyOneForm, CHART_NAMES};
pub use text::{default_names, TermJson};
pub use trunc::{Exps, TruncSeries};
