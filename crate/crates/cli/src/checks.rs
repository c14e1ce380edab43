//! Seeded agreement checks between the metrics, their oracles and the
//! linear-algebra kernel. Trial `i` of a check draws from
//! `trial_rng(seed, i)`, so every reported violation can be replayed alone.

use num_complex::Complex64;
use qmetric::algebra::{sample_density_with, sample_gaussian_element, sample_hermitian_element};
use qmetric::linalg::{frobenius, CMatrix};
use qmetric::metrics::suite::trial_rng;
use qmetric::{
    bures_commutative_closed_form, bures_distance, cstar_distance, fidelity_2x2_oracle, hermitian_eig,
    matrix_sqrt, mk_distance_bruteforce, mk_distance_lp, state_map, AlgebraShape, Element, Seminorm,
    Trace,
};
use rand::Rng;
use serde::Serialize;

/// Listed violations per check; the count is always complete.
pub const MAX_LISTED: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub trial: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    /// Largest measured gap or residual.
    pub worst: f64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Runs `trial` for `0..trials`; a value above `tolerance`, a NaN or an
/// error counts as a violation.
fn run_check(
    name: &str,
    trials: u64,
    seed: u64,
    tolerance: f64,
    mut trial: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> qmetric::Result<f64>,
) -> CheckSummary {
    let mut summary = CheckSummary {
        name: name.to_string(),
        trials,
        seed,
        tolerance,
        worst: 0.0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let value = trial(&mut rng).unwrap_or(f64::NAN);
        if value.is_nan() || value > tolerance {
            summary.violation_count += 1;
            if summary.violations.len() < MAX_LISTED {
                summary.violations.push(Violation { seed, trial: i, value });
            }
        }
        if value.is_nan() || value > summary.worst {
            summary.worst = if value.is_nan() { f64::INFINITY } else { value };
        }
    }
    summary
}

fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..1.0))).collect()
}

/// `d_{L^B}` on ℂ² with unit weights against `|x₁ − y₁|` and the C*-distance.
pub fn c2_quantum_closed_form(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    let tau = Trace::unit(&AlgebraShape::commutative(2));
    let lb = Seminorm::lip_b();
    run_check("c2_quantum_closed_form", trials, seed, tol, |rng| {
        let x = sample_density_with(&tau, rng);
        let y = sample_density_with(&tau, rng);
        let d = mk_distance_lp(&tau, &lb, &x, &y)?;
        let xs = x.element().to_real_vector()?;
        let ys = y.element().to_real_vector()?;
        let closed = (xs[0] - ys[0]).abs();
        let cs = cstar_distance(x.element(), y.element())?;
        Ok((d - closed).abs().max((d - cs).abs()))
    })
}

/// Bures distance on weighted ℂⁿ, `n = 2, …, 6`, against `Σ w_k √(x_k y_k)`.
pub fn bures_commutative_oracle(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    run_check("bures_commutative_oracle", trials, seed, tol, |rng| {
        let n = 2 + (rng.random_range(0..5usize));
        let tau = Trace::new(AlgebraShape::commutative(n), random_weights(n, rng))?;
        let x = sample_density_with(&tau, rng);
        let y = sample_density_with(&tau, rng);
        Ok((bures_distance(&tau, &x, &y)? - bures_commutative_closed_form(&tau, &x, &y)?).abs())
    })
}

/// Bures distance on M₂ against the determinant formula.
pub fn bures_2x2_oracle(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    let tau = Trace::unit(&AlgebraShape::new(vec![2]).expect("valid shape"));
    run_check("bures_2x2_oracle", trials, seed, tol, |rng| {
        let x = sample_density_with(&tau, rng);
        let y = sample_density_with(&tau, rng);
        Ok((bures_distance(&tau, &x, &y)? - fidelity_2x2_oracle(&x, &y)?).abs())
    })
}

/// Simplex against vertex enumeration on weighted ℂⁿ with a fresh random
/// seminorm per trial.
pub fn lp_vs_bruteforce(n: usize, trials: u64, seed: u64, tol: f64) -> CheckSummary {
    run_check(&format!("lp_vs_bruteforce_c{n}"), trials, seed, tol, |rng| {
        let tau = Trace::new(AlgebraShape::commutative(n), random_weights(n, rng))?;
        let l = Seminorm::random(n, rng);
        let x = sample_density_with(&tau, rng);
        let y = sample_density_with(&tau, rng);
        Ok((mk_distance_lp(&tau, &l, &x, &y)? - mk_distance_bruteforce(&tau, &l, &x, &y)?).abs())
    })
}

/// Eigen-residual `max_i ‖Av_i − λ_i v_i‖ / max(1, ‖A‖)` and unitarity
/// `‖V*V − I‖_F`, the larger of the two, on Hermitian matrices of size
/// `1..=8` and spectral scale `10^{±3}`.
pub fn eigen_residuals(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    run_check("eigen_residuals", trials, seed, tol, |rng| {
        let n = 1 + (rng.random_range(0..8usize));
        let shape = AlgebraShape::new(vec![n])?;
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let a: CMatrix = sample_hermitian_element(&shape, rng).blocks()[0].clone() * Complex64::from(scale);
        let eig = hermitian_eig(&a, 1e-12)?;
        let v = &eig.eigenvectors;
        let norm = eig.spectral_norm().max(1.0);
        let mut residual: f64 = 0.0;
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            let col = v.column(i);
            let r = &a * col - col * Complex64::from(lambda);
            residual = residual.max(r.norm() / norm);
        }
        let unitarity = frobenius(&(v.adjoint() * v - CMatrix::identity(n, n)));
        Ok(residual.max(unitarity))
    })
}

/// `‖(√a)² − a‖ / max(1, ‖a‖)` for random positive `a = g*g` on random
/// block shapes.
pub fn sqrt_squares_back(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    run_check("sqrt_squares_back", trials, seed, tol, |rng| {
        let blocks = 1 + rng.random_range(0..3usize);
        let dims: Vec<usize> = (0..blocks).map(|_| 1 + rng.random_range(0..4usize)).collect();
        let shape = AlgebraShape::new(dims)?;
        let g = sample_gaussian_element(&shape, rng);
        let a = g.adjoint().mul(&g)?.hermitian_part();
        let r = matrix_sqrt(&a)?;
        let back = r.mul(&r)?;
        Ok(cstar_distance(&back, &a)? / a.cstar_norm().max(1.0))
    })
}

/// Reconstructs `x` from `φ_x` evaluated on matrix units,
/// `x_k[i,j] = φ_x(E^k_{ji}) / w_k`, and reports the largest entry error.
/// Exact reconstruction is a left inverse, hence injectivity.
pub fn state_map_reconstruction(trials: u64, seed: u64, tol: f64) -> CheckSummary {
    run_check("state_map_reconstruction", trials, seed, tol, |rng| {
        let blocks = 1 + rng.random_range(0..3usize);
        let dims: Vec<usize> = (0..blocks).map(|_| 1 + rng.random_range(0..3usize)).collect();
        let shape = AlgebraShape::new(dims.clone())?;
        let tau = Trace::new(shape.clone(), random_weights(blocks, rng))?;
        let x = sample_density_with(&tau, rng);
        let phi = state_map(&tau, &x)?;
        let mut worst: f64 = 0.0;
        for (k, &n) in dims.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut units: Vec<CMatrix> = dims.iter().map(|&m| CMatrix::zeros(m, m)).collect();
                    units[k][(j, i)] = Complex64::new(1.0, 0.0);
                    let e = Element::from_blocks(shape.clone(), units)?;
                    let entry = phi.eval(&e)? / tau.weights()[k];
                    worst = worst.max((entry - x.element().blocks()[k][(i, j)]).norm());
                }
            }
        }
        Ok(worst)
    })
}
