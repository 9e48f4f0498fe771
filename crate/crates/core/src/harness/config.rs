use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_OUTER_NODES: usize = 33;

/// Weight half-width: a number, or `"certified"` for the radius issued by
/// the stationary-phase ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Delta0Repr", into = "Delta0Repr")]
pub enum Delta0 {
    Fixed(f64),
    Certified,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Delta0Repr {
    Number(f64),
    Word(String),
}

impl TryFrom<Delta0Repr> for Delta0 {
    type Error = String;
    fn try_from(r: Delta0Repr) -> std::result::Result<Self, String> {
        match r {
            Delta0Repr::Number(v) => Ok(Delta0::Fixed(v)),
            Delta0Repr::Word(w) if w == "certified" => Ok(Delta0::Certified),
            Delta0Repr::Word(w) => Err(format!("delta0 must be a number or \"certified\", got {w:?}")),
        }
    }
}

impl From<Delta0> for Delta0Repr {
    fn from(d: Delta0) -> Self {
        match d {
            Delta0::Fixed(v) => Delta0Repr::Number(v),
            Delta0::Certified => Delta0Repr::Word("certified".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub delta0: Delta0,
    /// Exponent shifts `r_k` absorbed into the weight.
    #[serde(default)]
    pub r: Option<Vec<f64>>,
}

/// Problem file. Variable indices here are 1-based, matching `x1 .. xn`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub polynomial: String,
    pub n: usize,
    /// Declared dimension of the singular locus; only cross-checked.
    pub dim_v_star: usize,
    #[serde(default)]
    pub pair: Option<[usize; 2]>,
    pub x0: Vec<f64>,
    pub delta: f64,
    pub weight: WeightConfig,
    /// `t_k` for the coordinates outside the pair, in index order.
    #[serde(default)]
    pub t_fixed: Option<Vec<f64>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Enclosure grid for the certified bounds.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default = "default_outer")]
    pub outer_nodes: usize,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_outer() -> usize {
    DEFAULT_OUTER_NODES
}

impl ProblemConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        let c: ProblemConfig = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.x0.len() != self.n {
            return bad(format!("x0 has {} entries, expected {}", self.x0.len(), self.n));
        }
        if self.dim_v_star > self.n {
            return bad(format!("dim_v_star {} exceeds n", self.dim_v_star));
        }
        if let Some([i, j]) = self.pair {
            if i == j || i == 0 || j == 0 || i > self.n || j > self.n {
                return bad(format!("pair ({i}, {j}) is not two distinct indices in 1..={}", self.n));
            }
        }
        if !(self.delta > 0.0) {
            return bad("delta must be positive".into());
        }
        if let Delta0::Fixed(d) = self.weight.delta0 {
            if !(d > 0.0) {
                return bad("weight.delta0 must be positive".into());
            }
        }
        if let Some(t) = &self.t_fixed {
            if t.len() != self.n - 2 || t.iter().any(|v| !v.is_finite()) {
                return bad(format!("t_fixed needs {} finite entries", self.n - 2));
            }
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive".into());
        }
        if self.outer_nodes < 3 {
            return bad("outer_nodes must be at least 3".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let s = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(s.as_bytes()))
    }
}
