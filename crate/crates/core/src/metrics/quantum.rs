//! The state map `a ↦ φ_a = τ(a ·)` and the Monge-Kantorovich (quantum)
//! metric `d_L(x, y) = sup { |φ_x(a) − φ_y(a)| : L(a) ≤ 1 }` on ℂⁿ.
//!
//! For states the supremum may be taken over self-adjoint `a`, which on ℂⁿ
//! are real vectors. With `g_i = w_i (x_i − y_i)` the objective is `⟨g, a⟩`.
//! Both `g` and `L` vanish on constants, so the last coordinate is pinned to
//! zero. The feasible set is symmetric under `a ↦ −a`, so maximizing `⟨g, a⟩`
//! already gives the absolute value.

use num_complex::Complex64;

use crate::algebra::{DensityElement, Element};
use crate::error::{Error, Result};
use crate::metrics::seminorm::{functional_rank, Seminorm};
use crate::metrics::simplex::{maximize_free, LpOutcome};
use crate::Trace;

/// Slack on `|⟨c_j, a⟩| ≤ 1` when accepting an enumerated vertex.
const VERTEX_FEASIBILITY_TOL: f64 = 1e-9;
const SINGULAR_PIVOT_TOL: f64 = 1e-12;

/// `b ↦ τ(a b)` for a density element `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctional {
    density: DensityElement,
}

impl StateFunctional {
    pub fn density(&self) -> &DensityElement {
        &self.density
    }

    pub fn eval(&self, b: &Element) -> Result<Complex64> {
        let ab = self.density.element().mul(b)?;
        self.density.trace().eval(&ab)
    }

    /// On ℂⁿ, `φ_a(b) = Σ_i w_i a_i b_i`; returns the vector `(w_i a_i)`.
    pub fn coefficients(&self) -> Result<Vec<f64>> {
        let a = self.density.element().to_real_vector()?;
        Ok(a
            .iter()
            .zip(self.density.trace().weights())
            .map(|(ai, wi)| ai * wi)
            .collect())
    }
}

pub fn state_map(trace: &Trace, a: &DensityElement) -> Result<StateFunctional> {
    trace.shape().ensure_same(a.shape())?;
    if a.trace() != trace {
        return Err(Error::TraceMismatch);
    }
    Ok(StateFunctional { density: a.clone() })
}

/// Reduced problem data: objective `g` and functionals, both with the last
/// coordinate dropped.
fn reduced_problem(
    trace: &Trace,
    seminorm: &Seminorm,
    x: &DensityElement,
    y: &DensityElement,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if !trace.shape().is_commutative() {
        return Err(Error::NonCommutative(trace.shape().block_dims().to_vec()));
    }
    seminorm.shape().ensure_same(trace.shape())?;
    let phi = state_map(trace, x)?.coefficients()?;
    let psi = state_map(trace, y)?.coefficients()?;
    let n = phi.len();
    let g: Vec<f64> = phi.iter().zip(&psi).take(n - 1).map(|(a, b)| a - b).collect();
    let rows = seminorm
        .functionals()
        .iter()
        .map(|c| c[..n - 1].to_vec())
        .collect();
    Ok((g, rows))
}

/// Quantum metric by dense simplex.
pub fn mk_distance_lp(
    trace: &Trace,
    seminorm: &Seminorm,
    x: &DensityElement,
    y: &DensityElement,
) -> Result<f64> {
    let (g, rows) = reduced_problem(trace, seminorm, x, y)?;
    // the optimum is linear in g; a unit objective keeps reduced costs
    // clear of the pivot tolerance however close x and y are
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let g: Vec<f64> = g.iter().map(|v| v / scale).collect();
    let mut a = Vec::with_capacity(2 * rows.len());
    for r in &rows {
        a.push(r.clone());
        a.push(r.iter().map(|v| -v).collect());
    }
    let b = vec![1.0; a.len()];
    match maximize_free(&g, &a, &b)? {
        LpOutcome::Optimal { value, .. } => Ok(scale * value.max(0.0)),
        LpOutcome::Unbounded => {
            let n = seminorm.dim();
            Err(Error::SeminormKernel {
                rank: functional_rank(n, seminorm.functionals()),
                expected: n - 1,
            })
        }
    }
}

/// Quantum metric by enumerating every vertex of `{ a : |⟨c_j, a⟩| ≤ 1 }`.
/// Only for `n ≤ 4`.
pub fn mk_distance_bruteforce(
    trace: &Trace,
    seminorm: &Seminorm,
    x: &DensityElement,
    y: &DensityElement,
) -> Result<f64> {
    if trace.shape().num_blocks() > 4 {
        return Err(Error::InvalidShape(
            "vertex enumeration is limited to n ≤ 4".into(),
        ));
    }
    let (g, rows) = reduced_problem(trace, seminorm, x, y)?;
    let m = g.len();
    if m == 0 {
        return Ok(0.0);
    }
    let mut best: f64 = 0.0;
    for subset in combinations(rows.len(), m) {
        for signs in 0..(1u32 << m) {
            let mat: Vec<Vec<f64>> = subset.iter().map(|&j| rows[j].clone()).collect();
            let rhs: Vec<f64> = (0..m)
                .map(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let Some(vertex) = solve(mat, rhs) else {
                continue;
            };
            let feasible = rows.iter().all(|r| {
                let v: f64 = r.iter().zip(&vertex).map(|(c, a)| c * a).sum();
                v.abs() <= 1.0 + VERTEX_FEASIBILITY_TOL
            });
            if feasible {
                let obj: f64 = g.iter().zip(&vertex).map(|(gi, ai)| gi * ai).sum();
                best = best.max(obj.abs());
            }
        }
    }
    Ok(best)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < SINGULAR_PIVOT_TOL * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (t, &p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *t -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{commutative_density, sample_density, AlgebraShape};

    fn c2() -> Trace {
        Trace::unit(&AlgebraShape::commutative(2))
    }

    #[test]
    fn state_is_unital_and_matches_inner_product() {
        let tau = c2();
        let x = commutative_density(&tau, &[0.3, 0.7]).unwrap();
        let phi = state_map(&tau, &x).unwrap();
        let one = Element::identity(tau.shape());
        assert!((phi.eval(&one).unwrap().re - 1.0).abs() < 1e-15);
        let probe = Element::from_vector(&[2.0, -5.0]).unwrap();
        assert!((phi.eval(&probe).unwrap().re - (0.3 * 2.0 - 0.7 * 5.0)).abs() < 1e-15);
    }

    #[test]
    fn state_is_positive() {
        let tau = Trace::new(AlgebraShape::new(vec![2, 1]).unwrap(), vec![0.5, 2.0]).unwrap();
        let a = sample_density(&tau, 5);
        let phi = state_map(&tau, &a).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(6);
        for _ in 0..50 {
            let b = crate::algebra::sample_gaussian_element(tau.shape(), &mut rng);
            let bb = b.adjoint().mul(&b).unwrap();
            assert!(phi.eval(&bb).unwrap().re >= 0.0);
        }
    }

    #[test]
    fn lip_b_extreme_points() {
        let tau = c2();
        let l = Seminorm::lip_b();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        let y = commutative_density(&tau, &[0.0, 1.0]).unwrap();
        assert!((mk_distance_lp(&tau, &l, &x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mk_distance_lp(&tau, &l, &x, &x).unwrap(), 0.0);
        assert!((mk_distance_bruteforce(&tau, &l, &x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mk_distance_bruteforce(&tau, &l, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn lip_b_closed_form() {
        let tau = c2();
        let l = Seminorm::lip_b();
        for (x1, y1) in [(0.2, 0.9), (0.5, 0.5), (0.75, 0.25), (0.01, 0.02)] {
            let x = commutative_density(&tau, &[x1, 1.0 - x1]).unwrap();
            let y = commutative_density(&tau, &[y1, 1.0 - y1]).unwrap();
            let d = mk_distance_lp(&tau, &l, &x, &y).unwrap();
            assert!((d - f64::abs(x1 - y1)).abs() < 1e-12, "{x1} {y1} {d}");
        }
    }

    #[test]
    fn nearly_equal_densities_keep_relative_accuracy() {
        let tau = c2();
        let l = Seminorm::lip_b();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        for k in [18, 20, 24] {
            let gap = 4f64.powi(-k);
            let y = commutative_density(&tau, &[1.0 - gap, gap]).unwrap();
            let d = mk_distance_lp(&tau, &l, &x, &y).unwrap();
            assert!((d / gap - 1.0).abs() < 1e-6, "k = {k}: {d} vs {gap}");
        }
    }

    #[test]
    fn noncommutative_rejected() {
        let shape = AlgebraShape::new(vec![2]).unwrap();
        let tau = Trace::unit(&shape);
        let x = sample_density(&tau, 1);
        let l = Seminorm::lip_b();
        assert!(mk_distance_lp(&tau, &l, &x, &x).is_err());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn solve_detects_singular() {
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_none());
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }
}
