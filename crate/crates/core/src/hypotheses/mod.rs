//! Case classification with certified box constants, the pair search,
//! surface-point location and the smooth weight.

mod classify;
mod grid;
mod pair;
mod surface;
mod weight;

pub use classify::{classify_case, CaseLabel, CaseReport};
pub use grid::{enclose_fn, enclose_poly, AxisBox, Enclosure, DEFAULT_GRID};
pub use pair::{find_good_pair, pair_diagnostics, PairDiagnostics};
pub use surface::{find_surface_point, singular_dim_lower_bound, SINGULAR_GRAD};
pub use weight::{build_weight, bump, Weight};
