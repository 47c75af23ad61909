//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use phaseless_core::forward::{FieldRole, FieldVector};
use phaseless_core::recover::MeasurementMatrix;
use phaseless_core::scene::{FrequencyGrid, ImageWindowSpec, PointScatterer, Scene, SceneParts};
use phaseless_core::specfun::Dimension;
use phaseless_core::{Complex64, Point};

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = (self.hi - p - e + self.lo) / d;
        let (hi, lo) = two_sum(q1, r);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Power series of `J0` and of the `Y0` correction sum
/// `Σ_{m≥1} (−1)^{m+1} H_m x^m / (m!)²` with `x = t²/4`, in double-double.
pub fn series(t: f64) -> (f64, f64) {
    let (h, l) = two_prod(t, t);
    let x = Dd { hi: h, lo: l }.div_f64(4.0);
    let mut term = Dd::from(1.0);
    let mut j0 = Dd::from(1.0);
    let mut corr = Dd::from(0.0);
    let mut harmonic = Dd::from(0.0);
    for m in 1..400 {
        let mf = m as f64;
        term = term.mul(x).div_f64(mf * mf).neg();
        harmonic = harmonic.add(Dd::from(1.0).div_f64(mf));
        j0 = j0.add(term);
        corr = corr.add(term.mul(harmonic).neg());
        if term.hi.abs() < 1e-34 * j0.hi.abs().max(1e-3) && m > 5 {
            break;
        }
    }
    (j0.to_f64(), corr.to_f64())
}

/// Large-argument Hankel expansion, summed to its smallest term.
pub fn asymptotic(t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..400usize {
        if term > prev || term < 1e-24 {
            break;
        }
        prev = term;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        // a_k(0) carries (−1)^k, hence the extra minus on odd orders.
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q -= sign * term;
        }
        let odd = (2 * k + 1) as f64;
        term *= odd * odd / ((k + 1) as f64 * 8.0 * t);
    }
    let env = (2.0 / (std::f64::consts::PI * t)).sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (s, c) = t.sin_cos();
    let cos_chi = (c + s) * r;
    let sin_chi = (s - c) * r;
    (env * (p * cos_chi - q * sin_chi), env * (p * sin_chi + q * cos_chi))
}

pub fn oracle_j0(t: f64) -> f64 {
    if t <= 25.0 {
        series(t).0
    } else {
        asymptotic(t).0
    }
}

pub fn oracle_y0(t: f64) -> f64 {
    if t <= 25.0 {
        let (j0, corr) = series(t);
        std::f64::consts::FRAC_2_PI * (((t / 2.0).ln() + EULER_GAMMA) * j0 + corr)
    } else {
        asymptotic(t).1
    }
}

/// Error scale: absolute up to 8, envelope `sqrt(2/(πt))` beyond.
pub fn bessel_scale(t: f64) -> f64 {
    if t <= 8.0 {
        1.0
    } else {
        (2.0 / (std::f64::consts::PI * t)).sqrt()
    }
}

/// `M† d` via an explicit dense `Mᵀ (M Mᵀ)⁻¹` with a general inverse.
pub fn dense_pseudoinverse_oracle(m: &MeasurementMatrix, d: &[f64]) -> Option<Vec<f64>> {
    let dense = dense(m);
    let gram = &dense * dense.transpose();
    let inv = gram.try_inverse()?;
    let x = dense.transpose() * inv * DVector::from_column_slice(d);
    Some(x.iter().copied().collect())
}

pub fn dense(m: &MeasurementMatrix) -> DMatrix<f64> {
    let rows = m.materialize();
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j])
}

/// `[I, iI] x` for a stacked real vector `x = [a; b]`.
pub fn recombine(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|r| Complex64::new(x[r], x[n + r])).collect()
}

pub fn field(role: FieldRole, values: Vec<Complex64>) -> FieldVector {
    FieldVector::new(role, values)
}

/// Small deterministic scene builder for tests.
pub fn scene(
    dimension: Dimension,
    receivers: Vec<Point>,
    source: Point,
    scatterers: Vec<PointScatterer>,
    band: FrequencyGrid,
    c0: f64,
) -> Scene {
    let window = ImageWindowSpec {
        center: Point::planar(10.0, 0.0),
        spacing: 0.1,
        half_extent: 3,
    };
    Scene::new(SceneParts {
        dimension,
        coord_dim: 2,
        c0,
        receivers,
        source,
        scatterers,
        band,
        window,
    })
    .expect("valid test scene")
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
