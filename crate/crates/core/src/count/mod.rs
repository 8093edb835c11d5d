//! Point counts over finite fields, zeta truncations, and the corrected counts
//! and invariants of singular curves.

pub mod branches;
pub mod curves;
mod upoly;
pub mod variety;
pub mod zeta;

pub use variety::{prime_power, variable_names, Ambient, Poly, Variety};
pub use zeta::{dwork_check, expand_ratio, pade, series_text, zeta_ops, DworkReport, ZetaTruncation};
pub use branches::{
    delta_invariant, genus_bookkeeping, weil_bound, weil_check, AdCount, BranchFileEntry, DeltaReport,
    SingularCurve, SingularPointData, SingularPointJson,
};
pub use curves::{shipped_curves, ShippedCurve};
