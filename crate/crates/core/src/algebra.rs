//! Finite-dimensional C*-algebras `⊕_k M_{n_k}(ℂ)`, their elements, weighted
//! traces, and density elements.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, CMatrix, TOL_POS};

/// `|τ(a) − 1|` allowed for a certified density element.
pub const TOL_TRACE: f64 = 1e-12;

/// Largest accepted block dimension; blocks are stored densely.
pub const MAX_BLOCK_DIM: usize = 4096;

/// Block dimensions `(n_1, …, n_K)`. ℂⁿ is `(1, …, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AlgebraShape(Vec<usize>);

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if let Some(pos) = block_dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {pos} has dimension 0")));
        }
        if let Some(pos) = block_dims.iter().position(|&n| n > MAX_BLOCK_DIM) {
            return Err(Error::InvalidShape(format!(
                "block {pos} has dimension {} above {MAX_BLOCK_DIM}",
                block_dims[pos]
            )));
        }
        Ok(AlgebraShape(block_dims))
    }

    /// ℂⁿ as `n` one-dimensional blocks.
    pub fn commutative(n: usize) -> Self {
        assert!(n > 0, "ℂ⁰ is not a unital algebra");
        AlgebraShape(vec![1; n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    /// Complex dimension `Σ n_k²`.
    pub fn total_dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.0.iter().all(|&n| n == 1)
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left: self.0.clone(),
                right: other.0.clone(),
            })
        }
    }
}

impl<'de> Deserialize<'de> for AlgebraShape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dims = Vec::<usize>::deserialize(d)?;
        AlgebraShape::new(dims).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// A block-diagonal complex matrix, one dense block per shape entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

/// Wire form: blocks as row-major arrays of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRepr {
    shape: AlgebraShape,
    blocks: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        if repr.blocks.len() != repr.shape.num_blocks() {
            return Err(Error::InvalidElement(format!(
                "{} blocks for shape {}",
                repr.blocks.len(),
                repr.shape
            )));
        }
        let blocks = repr
            .shape
            .block_dims()
            .iter()
            .zip(&repr.blocks)
            .enumerate()
            .map(|(k, (&n, data))| {
                if data.len() != n * n {
                    return Err(Error::InvalidElement(format!(
                        "block {k} has {} entries, expected {}",
                        data.len(),
                        n * n
                    )));
                }
                Ok(CMatrix::from_row_iterator(
                    n,
                    n,
                    data.iter().map(|&[re, im]| Complex64::new(re, im)),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Element::from_blocks(repr.shape, blocks)
    }
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        let blocks = e
            .blocks
            .iter()
            .map(|b| {
                let n = b.nrows();
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| [b[(i, j)].re, b[(i, j)].im])
                    .collect()
            })
            .collect();
        ElementRepr {
            shape: e.shape,
            blocks,
        }
    }
}

impl Element {
    pub fn from_blocks(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::InvalidElement(format!(
                "{} blocks for shape {shape}",
                blocks.len()
            )));
        }
        for (k, (b, &n)) in blocks.iter().zip(shape.block_dims()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::InvalidElement(format!(
                    "block {k} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidElement(format!("block {k} has a non-finite entry")));
            }
        }
        Ok(Element { shape, blocks })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.block_dims().iter().map(|&n| CMatrix::zeros(n, n)).collect();
        Element {
            shape: shape.clone(),
            blocks,
        }
    }

    /// The unit `1_𝒜`.
    pub fn identity(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&n| CMatrix::identity(n, n))
            .collect();
        Element {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Diagonal blocks with the given real entries.
    pub fn from_real_diagonals(shape: &AlgebraShape, diagonals: &[Vec<f64>]) -> Result<Self> {
        if diagonals.len() != shape.num_blocks() {
            return Err(Error::InvalidElement(format!(
                "{} diagonals for shape {shape}",
                diagonals.len()
            )));
        }
        let blocks = diagonals
            .iter()
            .zip(shape.block_dims())
            .map(|(d, &n)| {
                if d.len() != n {
                    return Err(Error::InvalidElement(format!(
                        "diagonal of length {} for a {n}x{n} block",
                        d.len()
                    )));
                }
                let mut m = CMatrix::zeros(n, n);
                for (i, &v) in d.iter().enumerate() {
                    m[(i, i)] = Complex64::new(v, 0.0);
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Element::from_blocks(shape.clone(), blocks)
    }

    /// The element `(v_1, …, v_n)` of ℂⁿ.
    pub fn from_vector(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        let shape = AlgebraShape::commutative(values.len());
        let diagonals: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Element::from_real_diagonals(&shape, &diagonals)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// Real parts of the 1x1 blocks of a commutative element.
    pub fn to_real_vector(&self) -> Result<Vec<f64>> {
        if !self.shape.is_commutative() {
            return Err(Error::NonCommutative(self.shape.0.clone()));
        }
        Ok(self.blocks.iter().map(|b| b[(0, 0)].re).collect())
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Element> {
        self.shape.ensure_same(&other.shape)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Element {
            shape: self.shape.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, alpha: Complex64) -> Element {
        Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b * alpha).collect(),
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Element {
        self.scale(Complex64::new(alpha, 0.0))
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Element {
        Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Element {
        Element {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(linalg::hermitian_part).collect(),
        }
    }

    /// Largest blockwise `‖a_k − a_k*‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::hermitian_deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Operator norm: max over blocks of `√λ_max(a_k* a_k)`.
    pub fn cstar_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let gram = linalg::hermitian_part(&(b.adjoint() * b));
                let eig = hermitian_eig(&gram, TOL_POS).expect("a*a is Hermitian");
                eig.max_eigenvalue().max(0.0).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `‖a − b‖_𝒜`.
pub fn cstar_distance(a: &Element, b: &Element) -> Result<f64> {
    Ok(a.sub(b)?.cstar_norm())
}

/// A trace `τ(a) = Σ_k w_k · Tr(a_k)` with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TraceRepr", into = "TraceRepr")]
pub struct Trace {
    shape: AlgebraShape,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceRepr {
    shape: AlgebraShape,
    weights: Vec<f64>,
}

impl TryFrom<TraceRepr> for Trace {
    type Error = Error;

    fn try_from(repr: TraceRepr) -> Result<Self> {
        Trace::new(repr.shape, repr.weights)
    }
}

impl From<Trace> for TraceRepr {
    fn from(t: Trace) -> Self {
        TraceRepr {
            shape: t.shape,
            weights: t.weights,
        }
    }
}

impl Trace {
    pub fn new(shape: AlgebraShape, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != shape.num_blocks() {
            return Err(Error::InvalidTrace(format!(
                "{} weights for shape {shape}",
                weights.len()
            )));
        }
        // subnormal weights would make the density norm bound 1/min w infinite
        if let Some(w) = weights.iter().find(|w| !(w.is_normal() && **w > 0.0)) {
            return Err(Error::InvalidTrace(format!(
                "weight {w} is not a positive normal finite number"
            )));
        }
        Ok(Trace { shape, weights })
    }

    /// Unit weights on every block; on ℂⁿ this is `x ↦ Σ x_i`.
    pub fn unit(shape: &AlgebraShape) -> Self {
        Trace {
            shape: shape.clone(),
            weights: vec![1.0; shape.num_blocks()],
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Every density element has `‖a‖ ≤ 1 / min_k w_k`.
    pub fn density_norm_bound(&self) -> f64 {
        1.0 / self.min_weight()
    }

    pub fn eval(&self, a: &Element) -> Result<Complex64> {
        self.shape.ensure_same(a.shape())?;
        Ok(self
            .weights
            .iter()
            .zip(a.blocks())
            .map(|(&w, b)| b.trace() * w)
            .sum())
    }

    /// `√τ(a* a)`.
    pub fn tau_norm(&self, a: &Element) -> Result<f64> {
        self.shape.ensure_same(a.shape())?;
        // τ(a*a) = Σ w_k ‖a_k‖_F², which avoids forming the product
        let sq: f64 = self
            .weights
            .iter()
            .zip(a.blocks())
            .map(|(&w, b)| w * b.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        Ok(sq.sqrt())
    }
}

/// Outcome of [`check_positive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCertificate {
    pub positive: bool,
    /// Smallest eigenvalue of the Hermitian part across all blocks.
    pub min_eigenvalue: f64,
    pub hermitian_deviation: f64,
}

/// `a ∈ 𝒜_+` up to `tol`: Hermitian within `tol · max(1, ‖a‖)` and every
/// eigenvalue `≥ −tol · max(1, ‖a‖)`.
pub fn check_positive(a: &Element, tol: f64) -> PositivityCertificate {
    let deviation = a.hermitian_deviation();
    let mut min_eig = f64::INFINITY;
    let mut norm: f64 = 0.0;
    for b in a.blocks() {
        let eig = hermitian_eig(&linalg::hermitian_part(b), f64::INFINITY)
            .expect("Hermitian part always decomposes");
        min_eig = min_eig.min(eig.min_eigenvalue());
        norm = norm.max(eig.spectral_norm());
    }
    let scale = norm.max(1.0);
    PositivityCertificate {
        positive: deviation <= tol * scale && min_eig >= -tol * scale,
        min_eigenvalue: min_eig,
        hermitian_deviation: deviation,
    }
}

/// A positive element of trace one, certified against a specific trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityElement {
    element: Element,
    trace: Trace,
}

impl DensityElement {
    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.element.shape()
    }

    pub fn into_element(self) -> Element {
        self.element
    }
}

/// `a / τ(a)` for positive `a`, certified as a member of `D_τ(𝒜)`.
///
/// Eigenvalues in `[−tol_pos, 0)` are clamped to zero before normalizing.
pub fn normalize_to_density(trace: &Trace, a: &Element) -> Result<DensityElement> {
    trace.shape.ensure_same(a.shape())?;
    let cert = check_positive(a, TOL_POS);
    if !cert.positive {
        if cert.min_eigenvalue < 0.0 {
            return Err(Error::NotPositive {
                min_eigenvalue: cert.min_eigenvalue,
            });
        }
        return Err(Error::NotHermitian {
            deviation: cert.hermitian_deviation,
        });
    }
    let mut h = a.hermitian_part();
    if cert.min_eigenvalue < 0.0 {
        let blocks = h
            .blocks()
            .iter()
            .map(|b| Ok(hermitian_eig(b, TOL_POS)?.map_spectrum(|l| l.max(0.0))))
            .collect::<Result<Vec<_>>>()?;
        h = Element::from_blocks(h.shape().clone(), blocks)?;
    }
    let value = trace.eval(&h)?.re;
    if !(value > TOL_TRACE) {
        return Err(Error::DegenerateTrace { value });
    }
    let element = h.scale_real(1.0 / value);
    Ok(DensityElement {
        element,
        trace: trace.clone(),
    })
}

/// Certifies an element that is already supposed to be a density.
pub fn certify_density(trace: &Trace, a: &Element) -> Result<DensityElement> {
    trace.shape.ensure_same(a.shape())?;
    let value = trace.eval(a)?;
    if (value.re - 1.0).abs() > TOL_TRACE || value.im.abs() > TOL_TRACE {
        return Err(Error::NumericalConsistency(format!(
            "τ(a) = {value}, expected 1"
        )));
    }
    let cert = check_positive(a, TOL_POS);
    if !cert.positive {
        return Err(Error::NotPositive {
            min_eigenvalue: cert.min_eigenvalue,
        });
    }
    Ok(DensityElement {
        element: a.clone(),
        trace: trace.clone(),
    })
}

/// Density element on ℂⁿ with the given coordinates.
pub fn commutative_density(trace: &Trace, coords: &[f64]) -> Result<DensityElement> {
    certify_density(trace, &Element::from_vector(coords)?)
}

/// Element with independent standard complex Gaussian entries.
pub fn sample_gaussian_element<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            CMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect();
    Element {
        shape: shape.clone(),
        blocks,
    }
}

/// Self-adjoint element `(g + g*) / 2` with Gaussian `g`.
pub fn sample_hermitian_element<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element {
    sample_gaussian_element(shape, rng).hermitian_part()
}

/// `b* b / τ(b* b)` for Gaussian `b` drawn from `rng`.
pub fn sample_density_with<R: Rng + ?Sized>(trace: &Trace, rng: &mut R) -> DensityElement {
    loop {
        let b = sample_gaussian_element(&trace.shape, rng);
        let gram = b.adjoint().mul(&b).expect("same shape").hermitian_part();
        if let Ok(d) = normalize_to_density(trace, &gram) {
            return d;
        }
    }
}

/// Deterministic in `seed`.
pub fn sample_density(trace: &Trace, seed: u64) -> DensityElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_density_with(trace, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> AlgebraShape {
        AlgebraShape::commutative(2)
    }

    #[test]
    fn shape_validation() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
        let s = AlgebraShape::new(vec![2, 1, 3]).unwrap();
        assert_eq!(s.total_dim(), 14);
        assert!(!s.is_commutative());
        assert!(c2().is_commutative());
    }

    #[test]
    fn unit_law() {
        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample_gaussian_element(&shape, &mut rng);
        assert_eq!(a.mul(&Element::identity(&shape)).unwrap(), a);
    }

    #[test]
    fn orthogonal_idempotents() {
        let p = Element::from_vector(&[1.0, 0.0]).unwrap();
        let q = Element::from_vector(&[0.0, 1.0]).unwrap();
        assert_eq!(p.mul(&q).unwrap(), Element::zero(&c2()));
    }

    #[test]
    fn shape_mismatch_is_structural_error() {
        let a = Element::identity(&c2());
        let b = Element::identity(&AlgebraShape::new(vec![2]).unwrap());
        assert!(matches!(a.add(&b), Err(Error::ShapeMismatch { .. })));
        assert!(cstar_distance(&a, &b).is_err());
    }

    #[test]
    fn norms_of_simple_elements() {
        let shape = AlgebraShape::new(vec![2, 3]).unwrap();
        assert!((Element::identity(&shape).cstar_norm() - 1.0).abs() < 1e-15);
        let d = Element::from_real_diagonals(&AlgebraShape::new(vec![2]).unwrap(), &[vec![3.0, -4.0]])
            .unwrap();
        assert!((d.cstar_norm() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn cstar_distance_on_c2() {
        let x = Element::from_vector(&[1.0, 0.0]).unwrap();
        let y = Element::from_vector(&[0.0, 1.0]).unwrap();
        assert_eq!(cstar_distance(&x, &x).unwrap(), 0.0);
        assert!((cstar_distance(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let x = Element::from_vector(&[0.3, 0.7]).unwrap();
        let y = Element::from_vector(&[0.55, 0.45]).unwrap();
        assert!((cstar_distance(&x, &y).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trace_values() {
        let tau = Trace::unit(&c2());
        let x = Element::from_vector(&[1.0, 0.0]).unwrap();
        assert_eq!(tau.eval(&x).unwrap(), Complex64::new(1.0, 0.0));
        let m3 = AlgebraShape::new(vec![3]).unwrap();
        assert_eq!(Trace::unit(&m3).eval(&Element::identity(&m3)).unwrap().re, 3.0);
        assert!((tau.tau_norm(&Element::identity(&c2())).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(tau.tau_norm(&Element::zero(&c2())).unwrap(), 0.0);
    }

    #[test]
    fn trace_rejects_bad_weights() {
        assert!(Trace::new(c2(), vec![1.0]).is_err());
        assert!(Trace::new(c2(), vec![1.0, 0.0]).is_err());
        assert!(Trace::new(c2(), vec![1.0, f64::NAN]).is_err());
        assert!(Trace::new(c2(), vec![1.0, 9.1e-314]).is_err());
    }

    #[test]
    fn oversized_shapes_rejected() {
        assert!(AlgebraShape::new(vec![MAX_BLOCK_DIM]).is_ok());
        assert!(AlgebraShape::new(vec![MAX_BLOCK_DIM + 1]).is_err());
        let wire = r#"{"shape":[9920000000902,1],"blocks":[[[1.0,0.0]],[[2.0,0.0]]]}"#;
        assert!(serde_json::from_str::<Element>(wire).is_err());
    }

    #[test]
    fn positivity_checks() {
        let one = Element::identity(&AlgebraShape::new(vec![2]).unwrap());
        let cert = check_positive(&one, 1e-10);
        assert!(cert.positive);
        assert!((cert.min_eigenvalue - 1.0).abs() < 1e-15);
        let d = Element::from_real_diagonals(&AlgebraShape::new(vec![2]).unwrap(), &[vec![1.0, -0.5]])
            .unwrap();
        assert!(!check_positive(&d, 1e-10).positive);
    }

    #[test]
    fn normalization_examples() {
        let tau = Trace::unit(&c2());
        let half = normalize_to_density(&tau, &Element::identity(&c2())).unwrap();
        assert_eq!(half.element().to_real_vector().unwrap(), vec![0.5, 0.5]);
        let e = normalize_to_density(&tau, &Element::from_vector(&[2.0, 0.0]).unwrap()).unwrap();
        assert_eq!(e.element().to_real_vector().unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn normalization_errors() {
        let tau = Trace::unit(&c2());
        let neg = Element::from_vector(&[1.0, -0.5]).unwrap();
        match normalize_to_density(&tau, &neg) {
            Err(Error::NotPositive { min_eigenvalue }) => assert_eq!(min_eigenvalue, -0.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            normalize_to_density(&tau, &Element::zero(&c2())),
            Err(Error::DegenerateTrace { .. })
        ));
    }

    #[test]
    fn normalization_clamps_tiny_negatives() {
        let tau = Trace::unit(&c2());
        let d = normalize_to_density(&tau, &Element::from_vector(&[1.0, -1e-12]).unwrap()).unwrap();
        assert_eq!(d.element().to_real_vector().unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let tau = Trace::unit(&AlgebraShape::new(vec![2, 1]).unwrap());
        assert_eq!(sample_density(&tau, 42), sample_density(&tau, 42));
        assert_ne!(sample_density(&tau, 42), sample_density(&tau, 43));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = sample_gaussian_element(&shape, &mut rng);
        let s = serde_json::to_string(&a).unwrap();
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);

        let tau = Trace::new(shape, vec![0.1 + 0.2, std::f64::consts::PI]).unwrap();
        let s = serde_json::to_string(&tau).unwrap();
        assert_eq!(serde_json::from_str::<Trace>(&s).unwrap(), tau);
    }

    #[test]
    fn json_wire_format() {
        let a = Element::from_vector(&[1.5, -2.0]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"shape":[1,1],"blocks":[[[1.5,0.0]],[[-2.0,0.0]]]}"#);
        let tau = Trace::unit(&AlgebraShape::new(vec![2]).unwrap());
        assert_eq!(serde_json::to_string(&tau).unwrap(), r#"{"shape":[2],"weights":[1.0]}"#);
    }

    #[test]
    fn json_rejects_malformed() {
        for bad in [
            r#"{"shape":[],"blocks":[]}"#,
            r#"{"shape":[2],"blocks":[[[1,0]]]}"#,
            r#"{"shape":[1,1],"blocks":[[[1,0]]]}"#,
            r#"{"shape":[0],"blocks":[[]]}"#,
            r#"{"shape":[1],"blocks":[[[1,0]]],"extra":1}"#,
        ] {
            assert!(serde_json::from_str::<Element>(bad).is_err(), "{bad}");
        }
        assert!(serde_json::from_str::<Trace>(r#"{"shape":[1],"weights":[-1]}"#).is_err());
        assert!(serde_json::from_str::<Trace>(r#"{"shape":[1,1],"weights":[1]}"#).is_err());
    }
}
