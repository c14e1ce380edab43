//! Bures metric `d_B(x, y) = √(1 − τ(|√x √y|))` and two independent oracles.

use crate::algebra::DensityElement;
use crate::error::{Error, Result};
use crate::linalg::{matrix_abs, matrix_sqrt};
use crate::Trace;

/// How far `τ(|√x√y|)` may stray outside `[0, 1]` before it is an error
/// rather than rounding.
pub const CLAMP_TOL: f64 = 1e-8;

fn ensure_certified(trace: &Trace, x: &DensityElement, y: &DensityElement) -> Result<()> {
    trace.shape().ensure_same(x.shape())?;
    trace.shape().ensure_same(y.shape())?;
    if x.trace() != trace || y.trace() != trace {
        return Err(Error::TraceMismatch);
    }
    Ok(())
}

/// `√(1 − f)` with `f` clamped onto `[0, 1]`.
pub(crate) fn distance_from_fidelity(f: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&f) {
        return Err(Error::NumericalConsistency(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    Ok((1.0 - f.clamp(0.0, 1.0)).sqrt())
}

/// `τ(|√x √y|)`.
pub fn fidelity(trace: &Trace, x: &DensityElement, y: &DensityElement) -> Result<f64> {
    ensure_certified(trace, x, y)?;
    let rx = matrix_sqrt(x.element())?;
    let ry = matrix_sqrt(y.element())?;
    let prod = rx.mul(&ry)?;
    Ok(trace.eval(&matrix_abs(&prod)?)?.re)
}

pub fn bures_distance(trace: &Trace, x: &DensityElement, y: &DensityElement) -> Result<f64> {
    distance_from_fidelity(fidelity(trace, x, y)?)
}

/// On ℂⁿ, `τ(|√x√y|) = Σ_k w_k √(x_k y_k)`.
pub fn bures_commutative_closed_form(
    trace: &Trace,
    x: &DensityElement,
    y: &DensityElement,
) -> Result<f64> {
    ensure_certified(trace, x, y)?;
    let xs = x.element().to_real_vector()?;
    let ys = y.element().to_real_vector()?;
    let f: f64 = trace
        .weights()
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(&w, (&a, &b))| w * (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    distance_from_fidelity(f)
}

/// For unit-trace 2x2 density matrices,
/// `τ(|√x√y|)² = Tr(xy) + 2√(det x · det y)`.
pub fn fidelity_2x2_oracle(x: &DensityElement, y: &DensityElement) -> Result<f64> {
    x.shape().ensure_same(y.shape())?;
    if x.shape().block_dims() != [2] || x.trace().weights() != [1.0] || y.trace() != x.trace() {
        return Err(Error::InvalidShape(
            "2x2 fidelity oracle needs a single 2x2 block with unit weight".into(),
        ));
    }
    let a = &x.element().blocks()[0];
    let b = &y.element().blocks()[0];
    let tr_xy = (a * b).trace().re;
    let det = |m: &crate::linalg::CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let dets = (det(a).max(0.0) * det(b).max(0.0)).sqrt();
    let f = (tr_xy + 2.0 * dets).max(0.0).sqrt();
    distance_from_fidelity(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{commutative_density, AlgebraShape};

    fn c2() -> Trace {
        Trace::unit(&AlgebraShape::commutative(2))
    }

    #[test]
    fn self_distance_vanishes() {
        let tau = c2();
        let x = commutative_density(&tau, &[0.3, 0.7]).unwrap();
        assert!(bures_distance(&tau, &x, &x).unwrap() < 1e-7);
        assert_eq!(bures_commutative_closed_form(&tau, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_points_are_at_distance_one() {
        let tau = c2();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        let y = commutative_density(&tau, &[0.0, 1.0]).unwrap();
        assert_eq!(bures_distance(&tau, &x, &y).unwrap(), 1.0);
    }

    #[test]
    fn vertex_to_arbitrary_point() {
        let tau = c2();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        for y1 in [0.1, 0.25, 0.5, 0.9] {
            let y = commutative_density(&tau, &[y1, 1.0 - y1]).unwrap();
            let expected = (1.0 - f64::sqrt(y1)).sqrt();
            assert!((bures_distance(&tau, &x, &y).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_half_point() {
        let tau = c2();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        let y = commutative_density(&tau, &[0.5, 0.5]).unwrap();
        let d = bures_commutative_closed_form(&tau, &x, &y).unwrap();
        assert!((d - 0.541_196_100_146_197).abs() < 1e-12);
    }

    #[test]
    fn oracle_on_commuting_pair() {
        let shape = AlgebraShape::new(vec![2]).unwrap();
        let tau = Trace::unit(&shape);
        let mk = |a: f64| {
            crate::algebra::certify_density(
                &tau,
                &crate::Element::from_real_diagonals(&shape, &[vec![a, 1.0 - a]]).unwrap(),
            )
            .unwrap()
        };
        let (x, y) = (mk(0.2), mk(0.65));
        let expected = (1.0 - (0.2f64 * 0.65).sqrt() - (0.8f64 * 0.35).sqrt()).sqrt();
        assert!((fidelity_2x2_oracle(&x, &y).unwrap() - expected).abs() < 1e-12);
        assert!((bures_distance(&tau, &x, &y).unwrap() - expected).abs() < 1e-12);
        assert!(fidelity_2x2_oracle(&x, &x).unwrap() < 1e-7);
    }

    #[test]
    fn oracle_rejects_other_shapes() {
        let tau = c2();
        let x = commutative_density(&tau, &[1.0, 0.0]).unwrap();
        assert!(fidelity_2x2_oracle(&x, &x).is_err());
    }

    #[test]
    fn trace_mismatch_detected() {
        let shape = AlgebraShape::commutative(2);
        let tau = Trace::unit(&shape);
        let other = Trace::new(shape, vec![0.5, 0.5]).unwrap();
        let x = commutative_density(&tau, &[0.5, 0.5]).unwrap();
        assert!(matches!(bures_distance(&other, &x, &x), Err(Error::TraceMismatch)));
    }

    #[test]
    fn clamp_violation_is_error() {
        assert!(distance_from_fidelity(1.0 + 1e-12).is_ok());
        assert!(distance_from_fidelity(1.0 + 1e-6).is_err());
        assert!(distance_from_fidelity(-1e-6).is_err());
    }
}
