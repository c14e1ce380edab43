//! Exact piecewise-polynomial functions on `[0, 1]`, the Lebesgue trace
//! `ρ(f) = ∫₀¹ f`, and the Bures and uniform distances between them.
//!
//! The sequence `f_n` built by [`make_fn`] has `ρ(f_n) = 1` and
//! `‖f_n − 1‖_∞ = 1` for every `n`, while
//! `d_B(f_n, 1) = √((3 − 2√2) / (3n)) → 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Continuity slack at interior breakpoints.
pub const CONTINUITY_TOL: f64 = 1e-12;
/// A function is nonnegative if its minimum is at least `−NONNEG_TOL`.
pub const NONNEG_TOL: f64 = 1e-12;

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial(Vec<f64>);

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial(coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Polynomial(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.0.len().max(other.0.len());
        let c = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        Polynomial::new(c)
    }

    pub fn scale(&self, alpha: f64) -> Polynomial {
        Polynomial::new(self.0.iter().map(|c| c * alpha).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut c = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.0.len() == 1 {
            return Polynomial::constant(0.0);
        }
        Polynomial::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// `∫_a^b p` through the antiderivative.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let anti = |x: f64| {
            self.0
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * x + c / (i + 1) as f64)
                * x
        };
        anti(b) - anti(a)
    }

    /// Points in the open interval `(a, b)` where `p` changes sign.
    pub fn sign_changes_in(&self, a: f64, b: f64) -> Vec<f64> {
        let inside = |r: f64| r > a && r < b;
        match self.degree() {
            0 => Vec::new(),
            1 => {
                let r = -self.0[0] / self.0[1];
                if inside(r) { vec![r] } else { Vec::new() }
            }
            2 => {
                let (c, b1, a2) = (self.0[0], self.0[1], self.0[2]);
                let disc = b1 * b1 - 4.0 * a2 * c;
                if disc <= 0.0 {
                    return Vec::new();
                }
                let q = -0.5 * (b1 + b1.signum() * disc.sqrt());
                let mut roots = vec![q / a2];
                if q != 0.0 {
                    roots.push(c / q);
                }
                roots.retain(|&r| inside(r));
                roots
            }
            _ => {
                const SEGMENTS: usize = 256;
                let mut roots = Vec::new();
                let step = (b - a) / SEGMENTS as f64;
                let mut lo = a;
                let mut flo = self.eval(lo);
                for i in 1..=SEGMENTS {
                    let hi = if i == SEGMENTS { b } else { a + step * i as f64 };
                    let fhi = self.eval(hi);
                    if flo * fhi < 0.0 {
                        let (mut l, mut h, mut fl) = (lo, hi, flo);
                        for _ in 0..100 {
                            let m = 0.5 * (l + h);
                            let fm = self.eval(m);
                            if fm == 0.0 {
                                l = m;
                                h = m;
                                break;
                            }
                            if fl * fm < 0.0 {
                                h = m;
                            } else {
                                l = m;
                                fl = fm;
                            }
                        }
                        let r = 0.5 * (l + h);
                        if inside(r) {
                            roots.push(r);
                        }
                    }
                    lo = hi;
                    flo = fhi;
                }
                roots
            }
        }
    }

    /// Endpoints plus interior critical points: every extremum of `p` on
    /// `[a, b]` is attained at one of these.
    fn extremum_candidates(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a, b];
        pts.extend(self.derivative().sign_changes_in(a, b));
        pts
    }

    pub fn max_abs_on(&self, a: f64, b: f64) -> f64 {
        self.extremum_candidates(a, b)
            .into_iter()
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }

    /// `(argmin, min)` on `[a, b]`.
    pub fn min_on(&self, a: f64, b: f64) -> (f64, f64) {
        self.extremum_candidates(a, b)
            .into_iter()
            .map(|x| (x, self.eval(x)))
            .fold((a, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }
}

/// Continuous real function on `[0, 1]`, polynomial on each
/// `[breakpoints[i], breakpoints[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewiseFunction {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Polynomial>) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidFunction(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidFunction(format!(
                "{} pieces for {} intervals",
                pieces.len(),
                breakpoints.len() - 1
            )));
        }
        if pieces.iter().any(|p| p.coeffs().iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidFunction("non-finite coefficient".into()));
        }
        for i in 1..pieces.len() {
            let x = breakpoints[i];
            let (l, r) = (pieces[i - 1].eval(x), pieces[i].eval(x));
            if (l - r).abs() > CONTINUITY_TOL * l.abs().max(r.abs()).max(1.0) {
                return Err(Error::InvalidFunction(format!(
                    "discontinuous at x = {x}: {l} vs {r}"
                )));
            }
        }
        Ok(PiecewiseFunction { breakpoints, pieces })
    }

    pub fn constant(c: f64) -> Self {
        PiecewiseFunction {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![Polynomial::constant(c)],
        }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        PiecewiseFunction {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![p],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    fn piece_index(&self, x: f64) -> usize {
        // left-closed intervals; x = 1 belongs to the last piece
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Both functions re-expressed on the union of their breakpoints.
    fn aligned<'a>(
        &'a self,
        other: &'a PiecewiseFunction,
    ) -> (Vec<f64>, Vec<(&'a Polynomial, &'a Polynomial)>) {
        let mut bps: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let pairs = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (&self.pieces[self.piece_index(mid)], &other.pieces[other.piece_index(mid)])
            })
            .collect();
        (bps, pairs)
    }

    fn combine(&self, other: &PiecewiseFunction, op: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        let (breakpoints, pairs) = self.aligned(other);
        let pieces = pairs.into_iter().map(|(p, q)| op(p, q)).collect();
        PiecewiseFunction { breakpoints, pieces }
    }

    pub fn add(&self, other: &PiecewiseFunction) -> Self {
        self.combine(other, Polynomial::add)
    }

    pub fn sub(&self, other: &PiecewiseFunction) -> Self {
        self.combine(other, |p, q| p.add(&q.scale(-1.0)))
    }

    pub fn mul(&self, other: &PiecewiseFunction) -> Self {
        self.combine(other, Polynomial::mul)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        PiecewiseFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(alpha)).collect(),
        }
    }

    fn intervals(&self) -> impl Iterator<Item = (f64, f64, &Polynomial)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (w[0], w[1], p))
    }

    /// `(argmin, min)` over `[0, 1]`.
    pub fn minimum(&self) -> (f64, f64) {
        self.intervals()
            .map(|(a, b, p)| p.min_on(a, b))
            .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    pub fn sup_norm(&self) -> f64 {
        self.intervals().map(|(a, b, p)| p.max_abs_on(a, b)).fold(0.0, f64::max)
    }

    fn ensure_nonnegative(&self) -> Result<()> {
        let (at, value) = self.minimum();
        if value < -NONNEG_TOL {
            return Err(Error::NegativeFunction { value, at });
        }
        Ok(())
    }
}

/// `f_n`: `2nx` on `[0, 1/2n]`, `1` in between, `2nx − 2n + 2` on
/// `[1 − 1/2n, 1]`. For `n = 1` the middle piece is empty.
pub fn make_fn(n: u32) -> Result<PiecewiseFunction> {
    if n == 0 {
        return Err(Error::InvalidFunction("f_n needs n ≥ 1".into()));
    }
    let nf = n as f64;
    let left = Polynomial::new(vec![0.0, 2.0 * nf]);
    let right = Polynomial::new(vec![2.0 - 2.0 * nf, 2.0 * nf]);
    let a = 1.0 / (2.0 * nf);
    let b = 1.0 - a;
    if a < b {
        PiecewiseFunction::new(vec![0.0, a, b, 1.0], vec![left, Polynomial::constant(1.0), right])
    } else {
        PiecewiseFunction::new(vec![0.0, a, 1.0], vec![left, right])
    }
}

/// `ρ(f) = ∫₀¹ f`, exactly per piece.
pub fn lebesgue_trace(f: &PiecewiseFunction) -> f64 {
    f.intervals().map(|(a, b, p)| p.integrate(a, b)).sum()
}

/// `‖f − g‖_∞` on `[0, 1]`.
pub fn uniform_norm_distance(f: &PiecewiseFunction, g: &PiecewiseFunction) -> f64 {
    f.sub(g).sup_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Target absolute error for the whole integral.
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Use the closed-form antiderivative of `√(αx + β)` on pieces of
    /// degree ≤ 1 instead of quadrature.
    pub exact_linear: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            max_intervals: 100_000,
            exact_linear: true,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod estimate and `|K15 − G7|`.
fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive bisection with a length-proportional share of `abs_tol` per
/// interval. Returns the integral and the number of accepted intervals.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, usize)> {
    let total = b - a;
    if total <= 0.0 {
        return Ok((0.0, 0));
    }
    let mut stack = vec![(a, b)];
    let mut sum = 0.0;
    let mut accepted = 0;
    while let Some((l, r)) = stack.pop() {
        let (value, err) = gauss_kronrod_15(&f, l, r);
        let share = spec.abs_tol * (r - l) / total;
        let mid = 0.5 * (l + r);
        if err <= share || !(l < mid && mid < r) {
            sum += value;
            accepted += 1;
            continue;
        }
        if accepted + stack.len() + 2 > spec.max_intervals {
            return Err(Error::QuadratureLimit(spec.max_intervals));
        }
        stack.push((mid, r));
        stack.push((l, mid));
    }
    Ok((sum, accepted))
}

/// `∫_a^b √max(p, 0)`.
pub fn integrate_sqrt(p: &Polynomial, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if spec.exact_linear {
        match p.degree() {
            0 => return Ok(p.coeffs()[0].max(0.0).sqrt() * (b - a)),
            1 => {
                // d/dx (2/3α) (αx + β)^{3/2} = √(αx + β)
                let (beta, alpha) = (p.coeffs()[0], p.coeffs()[1]);
                let anti = |x: f64| (alpha * x + beta).max(0.0).powf(1.5) * 2.0 / (3.0 * alpha);
                return Ok(anti(b) - anti(a));
            }
            _ => {}
        }
    }
    integrate_adaptive(|x| p.eval(x).max(0.0).sqrt(), a, b, spec).map(|(v, _)| v)
}

/// `ρ(√f √g) = ∫₀¹ √(fg)`.
pub fn root_overlap(f: &PiecewiseFunction, g: &PiecewiseFunction, quad: &QuadratureSpec) -> Result<f64> {
    f.ensure_nonnegative()?;
    g.ensure_nonnegative()?;
    let prod = f.mul(g);
    let share = QuadratureSpec {
        abs_tol: quad.abs_tol / prod.pieces.len() as f64,
        ..*quad
    };
    prod.intervals()
        .map(|(a, b, p)| integrate_sqrt(p, a, b, &share))
        .sum()
}

/// `√(1 − ρ(√f √g))`; in the commutative case `|√f √g| = √(fg)`.
pub fn bures_distance_functions(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    quad: &QuadratureSpec,
) -> Result<f64> {
    crate::metrics::bures::distance_from_fidelity(root_overlap(f, g, quad)?)
}

/// `√((3 − 2√2) / (3n))`.
pub fn strict_fineness_closed_form(n: u32) -> f64 {
    ((3.0 - 2.0 * 2f64.sqrt()) / (3.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinenessRow {
    pub n: u32,
    pub bures: f64,
    pub uniform: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictFinenessTable {
    pub rows: Vec<FinenessRow>,
}

/// Rows `(n, d_B(f_n, 1), ‖f_n − 1‖_∞)` for `n` in `range`.
pub fn strict_fineness_rows(range: std::ops::RangeInclusive<u32>) -> Result<StrictFinenessTable> {
    if range.is_empty() || *range.start() == 0 {
        return Err(Error::InvalidFunction(format!(
            "n-range {}..={} is empty or contains 0",
            range.start(),
            range.end()
        )));
    }
    let one = PiecewiseFunction::constant(1.0);
    let quad = QuadratureSpec::default();
    let rows = range
        .map(|n| {
            let f = make_fn(n)?;
            Ok(FinenessRow {
                n,
                bures: bures_distance_functions(&f, &one, &quad)?,
                uniform: uniform_norm_distance(&f, &one),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StrictFinenessTable { rows })
}

pub fn strict_fineness_table(n_max: u32) -> Result<StrictFinenessTable> {
    strict_fineness_rows(1..=n_max)
}

impl StrictFinenessTable {
    /// Problems found: Bures column not strictly decreasing, last Bures
    /// value above its closed form, or a uniform value other than 1.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for w in self.rows.windows(2) {
            if !(w[1].bures < w[0].bures) {
                problems.push(format!(
                    "bures not decreasing at n = {}: {} ≥ {}",
                    w[1].n, w[1].bures, w[0].bures
                ));
            }
        }
        if let Some(last) = self.rows.last() {
            let bound = strict_fineness_closed_form(last.n) + 1e-9;
            if last.bures > bound {
                problems.push(format!("final bures {} exceeds {}", last.bures, bound));
            }
        }
        for r in &self.rows {
            if r.uniform != 1.0 {
                problems.push(format!("uniform distance at n = {} is {}", r.n, r.uniform));
            }
        }
        problems
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,bures,uniform\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, sig12(r.bures), sig12(r.uniform)));
        }
        out
    }
}

/// 12 significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rows `x, f_1(x), …` on an evenly spaced grid of `points ≥ 2` points.
pub fn sample_grid(functions: &[PiecewiseFunction], points: usize) -> Vec<(f64, Vec<f64>)> {
    let points = points.max(2);
    (0..points)
        .map(|i| {
            let x = i as f64 / (points - 1) as f64;
            (x, functions.iter().map(|f| f.eval(x)).collect())
        })
        .collect()
}
