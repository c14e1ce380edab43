//! Dense primal simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! Since `b ≥ 0` the slack basis is feasible and no phase one is needed.
//! Entering and leaving variables follow Bland's rule.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-11;
pub const FEASIBILITY_TOL: f64 = 1e-10;

const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Unbounded,
}

/// Solves the LP described in the module docs. `a` is row-major, one row per
/// constraint.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    if let Some(bi) = b.iter().find(|&&bi| bi < -FEASIBILITY_TOL) {
        return Err(Error::NumericalConsistency(format!(
            "simplex requires b ≥ 0, found {bi}"
        )));
    }

    // tableau rows: [A | I | b]; objective row holds reduced costs −c
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n);
        t[i][..n].copy_from_slice(row);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i].max(0.0);
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_PIVOTS {
        // Bland: lowest-index column with negative reduced cost
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -PIVOT_TOL) else {
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[i][width - 1];
                }
            }
            return Ok(LpOutcome::Optimal {
                value: t[m][width - 1],
                x,
            });
        };

        // ratio test, ties broken by lowest basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i][enter];
            if coef > PIVOT_TOL {
                let ratio = t[i][width - 1] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - FEASIBILITY_TOL
                            || (ratio <= lr + FEASIBILITY_TOL && basis[i] < basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Ok(LpOutcome::Unbounded);
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
    }
    Err(Error::SimplexStalled(MAX_PIVOTS))
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let factor = r[col];
        if factor != 0.0 {
            for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            r[col] = 0.0;
        }
    }
    for v in t.iter_mut().flat_map(|r| r.last_mut()) {
        if *v < 0.0 && *v > -FEASIBILITY_TOL {
            *v = 0.0;
        }
    }
}

/// `max cᵀx  s.t.  Ax ≤ b` with `x` free, via the split `x = u − v`.
pub fn maximize_free(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let split_c: Vec<f64> = c.iter().copied().chain(c.iter().map(|v| -v)).collect();
    let split_a: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().copied().chain(row.iter().map(|v| -v)).collect())
        .collect();
    Ok(match maximize(&split_c, &split_a, b)? {
        LpOutcome::Optimal { value, x } => {
            let n = c.len();
            let x = (0..n).map(|j| x[j] - x[n + j]).collect();
            LpOutcome::Optimal { value, x }
        }
        LpOutcome::Unbounded => LpOutcome::Unbounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimum(outcome: LpOutcome) -> (f64, Vec<f64>) {
        match outcome {
            LpOutcome::Optimal { value, x } => (value, x),
            LpOutcome::Unbounded => panic!("unexpected unbounded"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y  s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  → 36 at (2, 6)
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let (v, x) = optimum(maximize(&[3.0, 5.0], &a, &[4.0, 12.0, 18.0]).unwrap());
        assert!((v - 36.0).abs() < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn detects_unbounded() {
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(maximize(&[1.0, 1.0], &a, &[1.0]).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_box() {
        // max x − 2y  s.t. |x| ≤ 1, |y| ≤ 1  → 3 at (1, −1)
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let (v, x) = optimum(maximize_free(&[1.0, -2.0], &a, &[1.0; 4]).unwrap());
        assert!((v - 3.0).abs() < 1e-12);
        assert_eq!(x, vec![1.0, -1.0]);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // several constraints active at the optimum
        let a = vec![
            vec![1.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![2.0, 2.0],
            vec![1.0, 2.0],
        ];
        let (v, _) = optimum(maximize(&[1.0, 1.0], &a, &[1.0, 1.0, 1.0, 2.0, 1.5]).unwrap());
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_objective() {
        let a = vec![vec![1.0]];
        let (v, _) = optimum(maximize(&[0.0], &a, &[1.0]).unwrap());
        assert_eq!(v, 0.0);
    }
}
