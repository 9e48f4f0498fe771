use serde::{Deserialize, Serialize};

use super::critical::newton_critical;
use super::ladder::Ladder;
use super::slice::PhaseSlice;
use crate::hypotheses::AxisBox;
use crate::ift::Vec2;

/// The squares `D1 = Psi_v(u0) + [-eta0, eta0]^2` and `D2 = Psi_v(u0) +
/// [-3 eta0, 3 eta0]^2` for one slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRegions {
    pub eta0: f64,
    pub center: Vec2,
    pub d1: AxisBox,
    pub d2: AxisBox,
}

impl BranchRegions {
    pub fn for_slice(ladder: &Ladder, slice: &PhaseSlice) -> Self {
        let c = slice.psi(ladder.u0);
        BranchRegions {
            eta0: ladder.eta0,
            center: c,
            d1: AxisBox::cube(&c, ladder.eta0),
            d2: AxisBox::cube(&c, 3.0 * ladder.eta0),
        }
    }
}

/// Which estimate applies to the slice integral, with the derivative bounds
/// fed to van der Corput. Coordinates are 0-based within the pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Branch {
    /// `|A_j| > lambda_j`: `|d_j phase| >= first_lower` and
    /// `|d_j^2 phase| >= second_lower` on the box.
    LargeA {
        j: usize,
        first_lower: f64,
        second_lower: f64,
    },
    /// `-A` is far from `D1`: `|d_j0 phase| >= first_lower` and
    /// `|d_j0^2 phase| <= second_upper` on `B3`.
    NoCritical {
        j0: usize,
        first_lower: f64,
        second_upper: f64,
    },
    /// A nondegenerate critical point in `B2`.
    Critical { z0: Vec2, residual: f64 },
    /// The critical branch applies but Newton did not converge in `B2`.
    Unresolved,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::LargeA { .. } => "large_a",
            Branch::NoCritical { .. } => "no_critical",
            Branch::Critical { .. } => "critical",
            Branch::Unresolved => "unresolved",
        }
    }
}

pub fn branch_classify(ladder: &Ladder, slice: &PhaseSlice) -> Branch {
    let a = slice.a;
    let lam = ladder.lambda;
    for j in 0..2 {
        if a[j].abs() > lam[j] {
            return Branch::LargeA {
                j,
                first_lower: lam[j] / (2.0 * ladder.rho_max),
                second_lower: lam[j] / (2.0 * ladder.rho_max * ladder.rho_max),
            };
        }
    }
    let reg = BranchRegions::for_slice(ladder, slice);
    let w = [-a[0] - reg.center[0], -a[1] - reg.center[1]];
    let eta = ladder.eta0;
    for j0 in 0..2 {
        if w[j0].abs() > 2.0 * eta {
            let r2 = ladder.rho_min * ladder.rho_min;
            return Branch::NoCritical {
                j0,
                first_lower: eta / ladder.rho_max,
                second_upper: lam[j0] / (2.0 * r2) + lam[j0] / r2,
            };
        }
    }
    let b2 = ladder.b2();
    match newton_critical(slice, ladder.u0) {
        Some((z0, residual, _)) if b2.contains(&z0) => Branch::Critical { z0, residual },
        _ => Branch::Unresolved,
    }
}
