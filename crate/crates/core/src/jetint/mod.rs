//! Jets into a two-dimensional chart over finite fields, integrality of
//! one-forms along them, and the overdetermined bound on jet orders.

pub mod jet;
pub mod search;

pub use jet::{
    is_integral, ord_on_branch, overdetermined_bound, pullback_form, BranchOrder, BranchRecord, JetMap, JetMapJson,
};
pub use search::{max_jet_order, translate, JetOrder, JetSearchConfig, JetSearchReport};
