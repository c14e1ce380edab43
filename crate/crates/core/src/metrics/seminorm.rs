//! Polyhedral L-seminorms on ℂⁿ: `L(a) = max_j |⟨c_j, a⟩|` on self-adjoint
//! (real) vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Element};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix};

/// Relative threshold below which a Gram eigenvalue counts as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeminormRepr", into = "SeminormRepr")]
pub struct Seminorm {
    shape: AlgebraShape,
    functionals: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeminormRepr {
    shape: AlgebraShape,
    functionals: Vec<Vec<f64>>,
}

impl TryFrom<SeminormRepr> for Seminorm {
    type Error = Error;

    fn try_from(repr: SeminormRepr) -> Result<Self> {
        Seminorm::new(repr.shape, repr.functionals)
    }
}

impl From<Seminorm> for SeminormRepr {
    fn from(s: Seminorm) -> Self {
        SeminormRepr {
            shape: s.shape,
            functionals: s.functionals,
        }
    }
}

impl Seminorm {
    /// Validates that every functional has zero sum and that the common
    /// kernel is exactly the constants (rank `n − 1`).
    pub fn new(shape: AlgebraShape, functionals: Vec<Vec<f64>>) -> Result<Self> {
        if !shape.is_commutative() {
            return Err(Error::NonCommutative(shape.block_dims().to_vec()));
        }
        let n = shape.num_blocks();
        for (j, c) in functionals.iter().enumerate() {
            if c.len() != n {
                return Err(Error::InvalidSeminorm(format!(
                    "functional {j} has length {}, expected {n}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSeminorm(format!("functional {j} is not finite")));
            }
            let sum: f64 = c.iter().sum();
            let mass: f64 = c.iter().map(|v| v.abs()).sum();
            if !mass.is_finite() {
                return Err(Error::InvalidSeminorm(format!("functional {j} overflows")));
            }
            if sum.abs() > 1e-12 * mass.max(1.0) {
                return Err(Error::InvalidSeminorm(format!(
                    "functional {j} does not vanish on the unit (sum {sum:e})"
                )));
            }
        }
        let rank = functional_rank(n, &functionals);
        if rank != n - 1 {
            return Err(Error::SeminormKernel {
                rank,
                expected: n - 1,
            });
        }
        Ok(Seminorm { shape, functionals })
    }

    /// `L^B(x) = |x_1 − x_2|` on ℂ².
    pub fn lip_b() -> Self {
        Seminorm {
            shape: AlgebraShape::commutative(2),
            functionals: vec![vec![1.0, -1.0]],
        }
    }

    /// Between `n − 1` and `n + 2` Gaussian functionals projected onto the
    /// sum-zero hyperplane, resampled until the rank condition holds.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let shape = AlgebraShape::commutative(n);
        if n == 1 {
            return Seminorm {
                shape,
                functionals: Vec::new(),
            };
        }
        loop {
            let count = n - 1 + rng.random_range(0..=3);
            let functionals: Vec<Vec<f64>> = (0..count)
                .map(|_| {
                    let raw: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    let mean = raw.iter().sum::<f64>() / n as f64;
                    raw.into_iter().map(|v| v - mean).collect()
                })
                .collect();
            if let Ok(s) = Seminorm::new(shape.clone(), functionals) {
                return s;
            }
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.num_blocks()
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    pub fn value(&self, a: &[f64]) -> f64 {
        self.functionals
            .iter()
            .map(|c| c.iter().zip(a).map(|(ci, ai)| ci * ai).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// `L` on a self-adjoint element of ℂⁿ (imaginary parts ignored).
    pub fn value_element(&self, a: &Element) -> Result<f64> {
        self.shape.ensure_same(a.shape())?;
        Ok(self.value(&a.to_real_vector()?))
    }
}

/// Rank of the stacked functionals, from the spectrum of their Gram matrix.
pub(crate) fn functional_rank(n: usize, functionals: &[Vec<f64>]) -> usize {
    // rows scaled to unit max-norm keep the Gram entries in range
    let scaled: Vec<Vec<f64>> = functionals
        .iter()
        .filter_map(|c| {
            let m = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (m > 0.0).then(|| c.iter().map(|v| v / m).collect())
        })
        .collect();
    let gram = CMatrix::from_fn(n, n, |i, k| {
        Complex64::new(scaled.iter().map(|c| c[i] * c[k]).sum(), 0.0)
    });
    let eig = hermitian_eig(&gram, 1e-10).expect("Gram matrix is symmetric");
    let top = eig.max_eigenvalue();
    if top <= 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&l| l > RANK_TOL * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_decoding_validates() {
        let l: Seminorm = serde_json::from_str(r#"{"shape":[1,1],"functionals":[[1.0,-1.0]]}"#).unwrap();
        assert_eq!(l, Seminorm::lip_b());
        assert_eq!(serde_json::from_str::<Seminorm>(&serde_json::to_string(&l).unwrap()).unwrap(), l);
        for bad in [
            r#"{"shape":[1,1],"functionals":[[1.0,1.0]]}"#,
            r#"{"shape":[1,1,1],"functionals":[[1.0,-1.0,0.0]]}"#,
            r#"{"shape":[2],"functionals":[]}"#,
            r#"{"shape":[1,1],"functionals":[[1.0,-1.0]],"extra":0}"#,
        ] {
            assert!(serde_json::from_str::<Seminorm>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lip_b_values() {
        let l = Seminorm::lip_b();
        assert_eq!(l.value(&[3.0, 1.0]), 2.0);
        assert_eq!(l.value(&[1.0, 1.0]), 0.0);
        assert_eq!(Seminorm::new(l.shape().clone(), l.functionals().to_vec()).unwrap(), l);
    }

    #[test]
    fn rejects_nonzero_sum() {
        let err = Seminorm::new(AlgebraShape::commutative(2), vec![vec![1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidSeminorm(_)));
    }

    #[test]
    fn huge_functionals_do_not_overflow_the_rank_check() {
        let shape = AlgebraShape::commutative(4);
        let overflow = vec![
            vec![1e308, -1e308, 1e308, -1e308],
            vec![1.0, -1.0, 0.0, 0.0],
            vec![0.0, 1.0, -1.0, 0.0],
        ];
        assert!(Seminorm::new(shape.clone(), overflow).is_err());
        let large = vec![vec![1e200, -1e200, 0.0, 0.0], vec![0.0, 1.0, -1.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]];
        assert!(Seminorm::new(shape, large).is_ok());
    }

    #[test]
    fn rejects_large_kernel() {
        let err = Seminorm::new(
            AlgebraShape::commutative(3),
            vec![vec![1.0, -1.0, 0.0], vec![2.0, -2.0, 0.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::SeminormKernel { rank: 1, expected: 2 }));
    }

    #[test]
    fn rejects_noncommutative_shape() {
        let err = Seminorm::new(AlgebraShape::new(vec![2]).unwrap(), vec![]).unwrap_err();
        assert!(matches!(err, Error::NonCommutative(_)));
    }

    #[test]
    fn random_seminorms_vanish_on_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            let l = Seminorm::random(n, &mut rng);
            assert!(l.value(&vec![2.5; n]) < 1e-12);
            assert_eq!(functional_rank(n, l.functionals()), n - 1);
        }
    }
}
