//! Convergence-transfer probes: `x_k = (x + h/k) / τ(x + h/k)` followed along
//! a schedule of `k`, recording every metric's distance to `x`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{
    check_positive, cstar_distance, normalize_to_density, sample_density_with,
    sample_hermitian_element, DensityElement, Element,
};
use crate::error::{Error, Result};
use crate::linalg::TOL_POS;
use crate::metrics::bures::bures_distance;
use crate::metrics::quantum::mk_distance_lp;
use crate::metrics::seminorm::Seminorm;
use crate::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub k: u64,
    pub d_cstar: f64,
    pub d_bures: f64,
    pub d_quantum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
}

/// `k = 1, …, k_max`.
pub fn linear_schedule(k_max: u64) -> Vec<u64> {
    (1..=k_max).collect()
}

/// `k = ⌈10^{j / per_decade}⌉` for `j = 0, …, decades · per_decade`,
/// deduplicated.
pub fn geometric_schedule(decades: u32, per_decade: u32) -> Vec<u64> {
    let per_decade = per_decade.max(1);
    let mut ks: Vec<u64> = (0..=decades * per_decade)
        .map(|j| 10f64.powf(j as f64 / per_decade as f64).round() as u64)
        .collect();
    ks.dedup();
    ks
}

pub fn convergence_transfer_probe(
    trace: &Trace,
    x: &DensityElement,
    h: &Element,
    schedule: &[u64],
    seminorm: Option<&Seminorm>,
) -> Result<ProbeTable> {
    trace.shape().ensure_same(h.shape())?;
    let deviation = h.hermitian_deviation();
    if deviation > TOL_POS * h.max_abs_entry().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let h = h.hermitian_part();
    let mut rows = Vec::with_capacity(schedule.len());
    for &k in schedule {
        if k == 0 {
            return Err(Error::InvalidElement("probe index k must be ≥ 1".into()));
        }
        let perturbed = x.element().add(&h.scale_real(1.0 / k as f64))?;
        let xk = match normalize_to_density(trace, &perturbed) {
            Ok(d) => d,
            Err(Error::NotPositive { min_eigenvalue }) => {
                return Err(Error::ProbeNotPositive { k, min_eigenvalue })
            }
            Err(e) => return Err(e),
        };
        let d_quantum = seminorm
            .map(|l| mk_distance_lp(trace, l, &xk, x))
            .transpose()?;
        rows.push(ProbeRow {
            k,
            d_cstar: cstar_distance(xk.element(), x.element())?,
            d_bures: bures_distance(trace, &xk, x)?,
            d_quantum,
        });
    }
    Ok(ProbeTable { rows })
}

impl ProbeTable {
    /// Indices `k` at which `d_cstar ≤ cstar_threshold` but
    /// `d_bures > bures_bound`.
    pub fn transfer_violations(&self, cstar_threshold: f64, bures_bound: f64) -> Vec<u64> {
        self.rows
            .iter()
            .filter(|r| r.d_cstar <= cstar_threshold && r.d_bures > bures_bound)
            .map(|r| r.k)
            .collect()
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        let mut cols = vec![
            self.rows.iter().map(|r| r.d_cstar).collect::<Vec<_>>(),
            self.rows.iter().map(|r| r.d_bures).collect(),
        ];
        if self.rows.iter().all(|r| r.d_quantum.is_some()) && !self.rows.is_empty() {
            cols.push(self.rows.iter().filter_map(|r| r.d_quantum).collect());
        }
        cols
    }

    /// Every metric column drops below `cross` somewhere and all columns end
    /// below `final_bound`.
    pub fn co_vanishes(&self, cross: f64, final_bound: f64) -> bool {
        !self.rows.is_empty()
            && self.columns().iter().all(|col| {
                col.iter().any(|&d| d <= cross) && col.last().is_some_and(|&d| d <= final_bound)
            })
    }
}

/// Draws a density `x` and a Hermitian direction `h` with `x + h` positive,
/// so `x + h/k` stays positive for every `k ≥ 1`.
pub fn sample_probe_family<R: Rng + ?Sized>(trace: &Trace, rng: &mut R) -> (DensityElement, Element) {
    let x = sample_density_with(trace, rng);
    let raw = sample_hermitian_element(trace.shape(), rng);
    let mut h = raw.scale_real(x.element().cstar_norm() / raw.cstar_norm().max(f64::MIN_POSITIVE));
    loop {
        let sum = x.element().add(&h).expect("same shape");
        let cert = check_positive(&sum, 0.0);
        if cert.min_eigenvalue > 1e-3 * x.element().cstar_norm() {
            return (x, h);
        }
        h = h.scale_real(0.5);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{commutative_density, AlgebraShape};

    #[test]
    fn zero_direction_gives_zero_columns() {
        let tau = Trace::unit(&AlgebraShape::commutative(2));
        let x = commutative_density(&tau, &[0.4, 0.6]).unwrap();
        let h = Element::zero(tau.shape());
        let l = Seminorm::lip_b();
        let table = convergence_transfer_probe(&tau, &x, &h, &linear_schedule(5), Some(&l)).unwrap();
        for r in &table.rows {
            assert_eq!(r.d_cstar, 0.0);
            assert!(r.d_bures < 1e-7);
            assert_eq!(r.d_quantum, Some(0.0));
        }
    }

    #[test]
    fn traceless_direction_on_c2() {
        let tau = Trace::unit(&AlgebraShape::commutative(2));
        let x = commutative_density(&tau, &[0.5, 0.5]).unwrap();
        let h = Element::from_vector(&[0.25, -0.25]).unwrap();
        let table = convergence_transfer_probe(&tau, &x, &h, &linear_schedule(20), None).unwrap();
        for r in &table.rows {
            assert!((r.d_cstar - 0.25 / r.k as f64).abs() < 1e-15);
        }
        let bures: Vec<f64> = table.rows.iter().map(|r| r.d_bures).collect();
        assert!(bures.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn non_positive_perturbation_signals_resample() {
        let tau = Trace::unit(&AlgebraShape::commutative(2));
        let x = commutative_density(&tau, &[0.5, 0.5]).unwrap();
        let h = Element::from_vector(&[2.0, -2.0]).unwrap();
        let err = convergence_transfer_probe(&tau, &x, &h, &[1], None).unwrap_err();
        assert!(matches!(err, Error::ProbeNotPositive { k: 1, .. }));
    }

    #[test]
    fn schedules() {
        assert_eq!(linear_schedule(3), vec![1, 2, 3]);
        assert_eq!(geometric_schedule(2, 2), vec![1, 3, 10, 32, 100]);
    }
}
