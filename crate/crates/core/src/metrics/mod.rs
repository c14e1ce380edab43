//! Metrics on the density space and the harnesses that check them.

pub mod bures;
pub mod probe;
pub mod quantum;
pub mod seminorm;
pub mod simplex;
pub mod suite;

use serde::Serialize;

use crate::algebra::{cstar_distance, DensityElement};
use crate::error::Result;
use crate::Trace;

use self::seminorm::Seminorm;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Bures,
    CStar,
    /// Monge-Kantorovich metric of the given seminorm; commutative shapes only.
    Quantum(Seminorm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Bures,
    Cstar,
    Quantum,
}

impl Metric {
    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::Bures => MetricKind::Bures,
            Metric::CStar => MetricKind::Cstar,
            Metric::Quantum(_) => MetricKind::Quantum,
        }
    }

    pub fn distance(&self, trace: &Trace, x: &DensityElement, y: &DensityElement) -> Result<f64> {
        match self {
            Metric::Bures => bures::bures_distance(trace, x, y),
            Metric::CStar => cstar_distance(x.element(), y.element()),
            Metric::Quantum(l) => quantum::mk_distance_lp(trace, l, x, y),
        }
    }

    /// Largest value of `d(x, x)` attributable to rounding. The Bures metric
    /// takes a square root of `1 − τ(|x|)`, so `1e-16` noise becomes `1e-8`;
    /// computing `|√x√x|` as `√(x²)` adds about `ε/λ` for each small
    /// eigenvalue `λ` of `x`, which reaches `1e-6` for `λ ≈ 1e-5`.
    pub fn zero_tolerance(&self) -> f64 {
        match self {
            Metric::Bures => 1e-5,
            _ => 1e-10,
        }
    }
}
