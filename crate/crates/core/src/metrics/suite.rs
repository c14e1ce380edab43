//! Randomized metric-axiom checks over seeded triples of density elements.
//!
//! Trial `i` draws its triple from a ChaCha stream keyed by `(seed, i)`, so
//! any reported failure can be replayed on its own. Trials run in parallel
//! and are reduced in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::{cstar_distance, sample_density_with, DensityElement};
use crate::error::Result;
use crate::metrics::{Metric, MetricKind};
use crate::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomTolerances {
    /// Allowed `d(x, z) − d(x, y) − d(y, z)`.
    pub triangle_slack: f64,
    pub symmetry: f64,
    /// Pairs closer than this in C*-norm are treated as equal.
    pub indiscernible: f64,
}

impl Default for AxiomTolerances {
    fn default() -> Self {
        AxiomTolerances {
            triangle_slack: 1e-9,
            symmetry: 1e-10,
            indiscernible: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Negative,
    Asymmetric,
    SelfDistance,
    Indiscernible,
    Triangle,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    pub inputs_digest: String,
    /// `[d(x,y), d(y,z), d(x,z)]`.
    pub distances: [f64; 3],
    pub violations: Vec<(ViolationKind, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub metric: MetricKind,
    pub shape: Vec<usize>,
    pub weights: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub tolerances: AxiomTolerances,
    /// Largest `d(x, z) − d(x, y) − d(y, z)` seen; negative means slack.
    pub worst_triangle_excess: f64,
    pub worst_symmetry_gap: f64,
    pub max_self_distance: f64,
    /// Records for every trial with at least one violation.
    pub failures: Vec<TrialRecord>,
}

impl AxiomReport {
    pub fn violation_count(&self) -> usize {
        self.failures.iter().map(|r| r.violations.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Independent generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Short SHA-256 digest of the entries of the given densities.
pub fn inputs_digest(points: &[&DensityElement]) -> String {
    let mut hasher = Sha256::new();
    for p in points {
        for b in p.element().blocks() {
            for z in b.iter() {
                hasher.update(z.re.to_le_bytes());
                hasher.update(z.im.to_le_bytes());
            }
        }
    }
    hex::encode(&hasher.finalize()[..8])
}

struct TrialOutcome {
    record: TrialRecord,
    triangle_excess: f64,
    symmetry_gap: f64,
    self_distance: f64,
}

fn run_trial(
    metric: &Metric,
    trace: &Trace,
    seed: u64,
    trial: u64,
    tol: &AxiomTolerances,
) -> TrialOutcome {
    let mut rng = trial_rng(seed, trial);
    let x = sample_density_with(trace, &mut rng);
    let y = sample_density_with(trace, &mut rng);
    let z = sample_density_with(trace, &mut rng);
    let mut violations = Vec::new();

    let eval = |a: &DensityElement, b: &DensityElement, v: &mut Vec<(ViolationKind, f64)>| -> f64 {
        match metric.distance(trace, a, b) {
            Ok(d) => d,
            Err(_) => {
                v.push((ViolationKind::Numerical, f64::NAN));
                f64::NAN
            }
        }
    };
    let dxy = eval(&x, &y, &mut violations);
    let dyz = eval(&y, &z, &mut violations);
    let dxz = eval(&x, &z, &mut violations);
    let dyx = eval(&y, &x, &mut violations);
    let dxx = eval(&x, &x, &mut violations);

    for d in [dxy, dyz, dxz, dyx, dxx] {
        if d < 0.0 {
            violations.push((ViolationKind::Negative, d));
        }
    }
    let symmetry_gap = (dxy - dyx).abs();
    if symmetry_gap > tol.symmetry {
        violations.push((ViolationKind::Asymmetric, symmetry_gap));
    }
    if dxx > metric.zero_tolerance() {
        violations.push((ViolationKind::SelfDistance, dxx));
    }
    for (a, b, d) in [(&x, &y, dxy), (&y, &z, dyz), (&x, &z, dxz)] {
        let apart = cstar_distance(a.element(), b.element()).unwrap_or(f64::NAN);
        if apart > tol.indiscernible && !(d > 0.0) {
            violations.push((ViolationKind::Indiscernible, apart));
        }
    }
    // all three orderings of the triangle
    let triangle_excess = [dxz - dxy - dyz, dxy - dxz - dyz, dyz - dxy - dxz]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if triangle_excess > tol.triangle_slack {
        violations.push((ViolationKind::Triangle, triangle_excess));
    }

    TrialOutcome {
        record: TrialRecord {
            seed,
            trial,
            inputs_digest: inputs_digest(&[&x, &y, &z]),
            distances: [dxy, dyz, dxz],
            violations,
        },
        triangle_excess,
        symmetry_gap,
        self_distance: dxx,
    }
}

/// Checks nonnegativity, symmetry, identity of indiscernibles and the
/// triangle inequality on `trials` random triples.
pub fn metric_axiom_suite(
    metric: &Metric,
    trace: &Trace,
    trials: u64,
    seed: u64,
    tol: AxiomTolerances,
) -> Result<AxiomReport> {
    if let Metric::Quantum(l) = metric {
        l.shape().ensure_same(trace.shape())?;
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(metric, trace, seed, i, &tol))
        .collect();

    let mut report = AxiomReport {
        metric: metric.kind(),
        shape: trace.shape().block_dims().to_vec(),
        weights: trace.weights().to_vec(),
        trials,
        seed,
        tolerances: tol,
        worst_triangle_excess: f64::NEG_INFINITY,
        worst_symmetry_gap: 0.0,
        max_self_distance: 0.0,
        failures: Vec::new(),
    };
    for o in outcomes {
        report.worst_triangle_excess = report.worst_triangle_excess.max(o.triangle_excess);
        report.worst_symmetry_gap = report.worst_symmetry_gap.max(o.symmetry_gap);
        report.max_self_distance = report.max_self_distance.max(o.self_distance);
        if !o.record.violations.is_empty() {
            report.failures.push(o.record);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::metrics::seminorm::Seminorm;

    #[test]
    fn bures_on_qubit_is_a_metric() {
        let tau = Trace::unit(&AlgebraShape::new(vec![2]).unwrap());
        let r = metric_axiom_suite(&Metric::Bures, &tau, 300, 1, AxiomTolerances::default()).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());
        assert!(r.worst_triangle_excess < 0.0);
    }

    #[test]
    fn quantum_on_c3_is_a_metric() {
        let tau = Trace::new(AlgebraShape::commutative(3), vec![0.5, 1.0, 2.0]).unwrap();
        let mut rng = trial_rng(7, 0);
        let l = Seminorm::random(3, &mut rng);
        let r = metric_axiom_suite(&Metric::Quantum(l), &tau, 300, 2, AxiomTolerances::default())
            .unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());
    }

    #[test]
    fn suite_is_deterministic() {
        let tau = Trace::unit(&AlgebraShape::new(vec![2, 1]).unwrap());
        let a = metric_axiom_suite(&Metric::CStar, &tau, 50, 3, AxiomTolerances::default()).unwrap();
        let b = metric_axiom_suite(&Metric::CStar, &tau, 50, 3, AxiomTolerances::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_tolerance_is_detected() {
        // negative slack turns every strict triangle into a reported violation
        let tau = Trace::unit(&AlgebraShape::new(vec![2]).unwrap());
        let tol = AxiomTolerances {
            triangle_slack: -10.0,
            ..AxiomTolerances::default()
        };
        let r = metric_axiom_suite(&Metric::CStar, &tau, 20, 4, tol).unwrap();
        assert_eq!(r.failures.len(), 20);
        assert!(r.failures.iter().all(|f| f.violations[0].0 == ViolationKind::Triangle));
    }
}
