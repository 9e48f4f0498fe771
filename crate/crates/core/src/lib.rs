//! Certified constructions and empirical sweeps for uniform bounds on
//! oscillatory integrals `∫ ϖ(x) x^{it} e^{2πiτF(x)} dx` with `F` a
//! homogeneous form.

pub mod error;
pub mod harness;
pub mod hypotheses;
pub mod ift;
pub mod oscquad;
pub mod polyring;
pub mod stphase;

pub use error::{Error, Result};
pub use polyring::{build_g, parse_poly, EvalPoly, Monomial, MonomialSplit, MultiPoly};
pub use hypotheses::{AxisBox, CaseLabel, CaseReport, Weight};
pub use ift::{IftCertificate, SmoothMap2};
pub use stphase::{Branch, Ladder, MorseChart, PhaseSlice};
pub use oscquad::{integrate_phase, PhaseProblem, QuadResult};
pub use harness::{Problem, ProblemConfig, SweepReport};
