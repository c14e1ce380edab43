//! Hermitian eigendecomposition and spectral functional calculus.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. Each rotation first
//! strips the phase of the pivot entry with a diagonal unitary and then applies
//! an ordinary real plane rotation, so the accumulated transform stays exactly
//! unitary up to rounding. Functional calculus is done through the spectrum:
//! `f(A) = V diag(f(λ)) V*`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::Element;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Sweep cap for the Jacobi iteration; exceeding it is a hard error.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass, relative to `‖A‖_F`, at which Jacobi stops.
pub const OFF_DIAGONAL_TOL: f64 = 1e-15;

/// Default Hermiticity / positivity tolerance (relative to `max(1, ‖A‖)`).
pub const TOL_POS: f64 = 1e-10;

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − A*‖_F`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `(A + A*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let mut h = m.clone();
    let n = m.nrows();
    for i in 0..n {
        h[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// `V diag(g(λ)) V*`.
    pub fn map_spectrum(&self, mut g: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &fk) in vals.iter().enumerate() {
                    acc += v[(i, k)] * v[(j, k)].conj() * fk;
                }
                if i == j {
                    out[(i, i)] = Complex64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// `tol` bounds the accepted non-Hermiticity: the input must satisfy
/// `‖A − A*‖_F ≤ tol · max(1, ‖A‖_F)`. The Hermitian part is what gets
/// diagonalized.
pub fn hermitian_eig(a: &CMatrix, tol: f64) -> Result<EigenDecomposition> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidElement(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = frobenius(a);
    let deviation = hermitian_deviation(a);
    if deviation > tol * scale.max(1.0) || !deviation.is_finite() {
        return Err(Error::NotHermitian { deviation });
    }

    let n = a.nrows();
    let mut m = hermitian_part(a);
    let mut v = CMatrix::identity(n, n);
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&m);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `m[(p, q)]`, accumulated into `v`.
///
/// The transform is `G = D R` with `D = diag(1, e^{-iφ})` on the (p, q)
/// plane, `φ = arg m[(p, q)]`, and `R` the real rotation for the resulting
/// real symmetric 2x2 problem. `m ← G* m G`, `v ← v G`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / mag;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * gpp + mkq * gqp;
        m[(k, q)] = mkp * gpq + mkq * gqq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = gpp.conj() * mpk + gqp.conj() * mqk;
        m[(q, k)] = gpq.conj() * mpk + gqq.conj() * mqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Closed interval `[lo, hi]` on which a spectral function is defined.
/// `hi` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const NONNEGATIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Domain { lo, hi }
    }
}

/// Applies `f` blockwise through the spectrum of a self-adjoint element.
///
/// Eigenvalues that fall outside `domain` by no more than
/// `TOL_POS · max(1, ‖block‖)` are clamped onto the domain before `f` is
/// evaluated; anything farther out is a [`Error::DomainViolation`].
pub fn matrix_function(a: &Element, domain: Domain, f: impl Fn(f64) -> f64) -> Result<Element> {
    let mut blocks = Vec::with_capacity(a.blocks().len());
    for block in a.blocks() {
        let eig = hermitian_eig(block, TOL_POS)?;
        let slack = TOL_POS * eig.spectral_norm().max(1.0);
        for &l in &eig.eigenvalues {
            if l < domain.lo - slack || l > domain.hi + slack {
                return Err(Error::DomainViolation {
                    eigenvalue: l,
                    lo: domain.lo,
                    hi: domain.hi,
                });
            }
        }
        blocks.push(eig.map_spectrum(|l| f(l.clamp(domain.lo, domain.hi))));
    }
    Element::from_blocks(a.shape().clone(), blocks)
}

/// Unique positive square root of a positive element.
pub fn matrix_sqrt(a: &Element) -> Result<Element> {
    matrix_function(a, Domain::NONNEGATIVE, f64::sqrt)
}

/// `|a| = √(a* a)`.
pub fn matrix_abs(a: &Element) -> Result<Element> {
    let gram = a.adjoint().mul(a)?.hermitian_part();
    matrix_sqrt(&gram)
}
