//! Stationary phase geometry: the maps `Psi_v`, critical points of the
//! phase with log terms, the Morse chart around them, and the radius ladder
//! that makes all of it uniform in `v`.

mod branch;
mod critical;
mod ladder;
mod morse;
mod phi;
mod slice;

pub use branch::{branch_classify, Branch, BranchRegions};
pub use critical::{find_critical_point, newton_critical, no_critical_witness, CriticalSearch, CRITICAL_TOL};
pub use ladder::{build_ladder, newton_psi, Ladder, LadderOptions};
pub use morse::{build_chart, enclose_phi, ChartOptions, ChartSummary, MorseChart, MorseMap};
pub use phi::{log_series, log_series_derivative, phi_direct, PhiDecomposition};
pub use slice::{embed, embed_box, psi_polys, rest_indices, split_point, PhaseSlice, PsiMap};
