//! Fixtures shared by the benchmarks.

use oscbound::harness::{Problem, ProblemConfig};

pub const QUADRIC: &str = include_str!("../../../configs/quadric_case2.toml");
pub const CROSS: &str = include_str!("../../../configs/cross_case1.toml");

pub fn problem(src: &str) -> Problem {
    Problem::from_config(ProblemConfig::from_toml(src).expect("bundled config"), 0).expect("bundled problem")
}
