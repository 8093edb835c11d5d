//! Commutative formal group laws, their exponential and logarithm,
//! one-parameter subgroups and the residue-disk bound.

pub mod disk;
pub mod explog;
pub mod law;
pub mod onepar;

pub use disk::{disk_bound, DiskBoundReport};
pub use explog::{mult_by_m, ExpLog};
pub use law::{discriminant, parse_weierstrass, w_series, FormalGroupLaw, LawKind, Weierstrass};
pub use onepar::{equiv, OneParamSubgroup};
