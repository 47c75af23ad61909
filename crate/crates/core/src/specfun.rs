//! Bessel functions of order zero, the Hankel function `H0^(1)` and the
//! free-space Helmholtz Green's function.
//!
//! `J0` and `Y0` use their ascending power series up to `t = 8` and the
//! Hankel asymptotic form `sqrt(2/(πt)) (P0 cos χ ∓ Q0 sin χ)`, `χ = t − π/4`,
//! beyond, with `P0`/`Q0` given by the minimax rational fits of FreeBSD msun
//! `e_j0.c` on `[8, ∞)`. Absolute error is below 1e-13 for `t ≤ 8` and below
//! 1e-15 of the envelope `sqrt(2/(πt))` above.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 8.0;

/// Which free-space Green's function branch a scene uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn from_u8(d: u8) -> Option<Self> {
        match d {
            2 => Some(Dimension::Two),
            3 => Some(Dimension::Three),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// Bessel function of the first kind of order zero, for `t ≥ 0`.
pub fn bessel_j0(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("J0 argument must be finite, got {t}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("J0 argument must be nonnegative, got {t}")));
    }
    Ok(if t <= SERIES_LIMIT {
        j0_series(t)
    } else {
        let (p, q) = pq0(t);
        let (s, c) = shifted_sin_cos(t);
        envelope(t) * (p * c - q * s)
    })
}

/// Bessel function of the second kind of order zero, for `t > 0`.
pub fn bessel_y0(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("Y0 argument must be finite, got {t}")));
    }
    if t <= 0.0 {
        return Err(Error::Domain(format!(
            "Y0 is singular at 0 and undefined below, got {t}"
        )));
    }
    Ok(if t <= SERIES_LIMIT {
        y0_series(t)
    } else {
        let (p, q) = pq0(t);
        let (s, c) = shifted_sin_cos(t);
        envelope(t) * (p * s + q * c)
    })
}

/// `H0^(1)(t) = J0(t) + i Y0(t)` for `t > 0`.
pub fn hankel0_1(t: f64) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "H0^(1) requires a finite positive argument, got {t}"
        )));
    }
    if t <= SERIES_LIMIT {
        return Ok(Complex64::new(j0_series(t), y0_series(t)));
    }
    let (p, q) = pq0(t);
    let (s, c) = shifted_sin_cos(t);
    let a = envelope(t);
    Ok(Complex64::new(a * (p * c - q * s), a * (p * s + q * c)))
}

/// Free-space Green's function of the Helmholtz equation between `x` and `y`
/// at angular frequency `omega` in a medium of speed `c0`.
///
/// 2D: `(i/4) H0^(1)(k|x−y|)`; 3D: `exp(ik|x−y|) / (4π|x−y|)`, `k = ω/c0`.
pub fn green0(x: &Point, y: &Point, omega: f64, c0: f64, dimension: Dimension) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "angular frequency must be positive, got {omega}"
        )));
    }
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Singular(format!(
            "Green's function evaluated at coincident points {x}"
        )));
    }
    Ok(green0_at(r, omega / c0, dimension))
}

/// Green's function at distance `r > 0` and wavenumber `k > 0`.
#[inline]
pub(crate) fn green0_at(r: f64, k: f64, dimension: Dimension) -> Complex64 {
    match dimension {
        Dimension::Three => Complex64::from_polar(1.0 / (4.0 * PI * r), k * r),
        Dimension::Two => {
            let h = hankel0_1(k * r).expect("positive finite argument");
            Complex64::new(-0.25 * h.im, 0.25 * h.re)
        }
    }
}

#[inline]
fn envelope(t: f64) -> f64 {
    (FRAC_2_PI / t).sqrt()
}

/// `(sin(t − π/4), cos(t − π/4))`, avoiding cancellation in whichever of
/// `sin t ± cos t` is small.
fn shifted_sin_cos(t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    let mut plus = s + c;
    let mut minus = s - c;
    let cos2t = (2.0 * t).cos();
    // (s + c)(s − c) = −cos 2t
    if s * c < 0.0 {
        plus = -cos2t / minus;
    } else {
        minus = -cos2t / plus;
    }
    (minus * FRAC_1_SQRT_2, plus * FRAC_1_SQRT_2)
}

fn j0_series(t: f64) -> f64 {
    let x = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        let mf = m as f64;
        term *= x / (mf * mf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

/// `Y0(t) = (2/π)[(ln(t/2) + γ) J0(t) + Σ_{m≥1} (−1)^{m+1} H_m (t²/4)^m / (m!)²]`.
fn y0_series(t: f64) -> f64 {
    let x = 0.25 * t * t;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for m in 1..60 {
        let mf = m as f64;
        term *= -x / (mf * mf);
        harmonic += 1.0 / mf;
        let add = -term * harmonic;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-3) {
            break;
        }
    }
    FRAC_2_PI * (((0.5 * t).ln() + EULER_GAMMA) * j0_series(t) + sum)
}

// Rational fits on [8, ∞) from FreeBSD msun e_j0.c:
//   P0(t) = 1 + R(s²)/S(s²),  Q0(t) = (−1/8 + R(s²)/S(s²)) / t,  s = 1/t.
const PR8: [f64; 6] = [
    0.0,
    -7.031_249_999_999_003_574_84e-02,
    -8.081_670_412_753_497_956_26e+00,
    -2.570_631_056_797_048_472_62e+02,
    -2.485_216_410_094_288_221_44e+03,
    -5.253_043_804_907_295_452_72e+03,
];
const PS8: [f64; 5] = [
    1.165_343_646_196_681_817_17e+02,
    3.833_744_753_641_218_267_15e+03,
    4.059_785_726_484_725_455_52e+04,
    1.167_529_725_643_759_156_81e+05,
    4.762_772_841_467_309_626_75e+04,
];
const QR8: [f64; 6] = [
    0.0,
    7.324_218_749_999_350_519_53e-02,
    1.176_820_646_822_526_938_99e+01,
    5.576_733_802_564_018_560_59e+02,
    8.859_197_207_564_686_323_17e+03,
    3.701_462_677_768_878_347_71e+04,
];
const QS8: [f64; 6] = [
    1.637_760_268_956_898_244_14e+02,
    8.098_344_946_564_498_059_16e+03,
    1.425_382_914_191_204_763_48e+05,
    8.033_092_571_195_143_973_45e+05,
    8.405_015_798_190_605_128_18e+05,
    -3.438_992_935_378_666_152_25e+05,
];

fn pq0(t: f64) -> (f64, f64) {
    let z = 1.0 / (t * t);
    let pr = PR8[0] + z * (PR8[1] + z * (PR8[2] + z * (PR8[3] + z * (PR8[4] + z * PR8[5]))));
    let ps = 1.0 + z * (PS8[0] + z * (PS8[1] + z * (PS8[2] + z * (PS8[3] + z * PS8[4]))));
    let qr = QR8[0] + z * (QR8[1] + z * (QR8[2] + z * (QR8[3] + z * (QR8[4] + z * QR8[5]))));
    let qs = 1.0 + z * (QS8[0] + z * (QS8[1] + z * (QS8[2] + z * (QS8[3] + z * (QS8[4] + z * QS8[5])))));
    (1.0 + pr / ps, (-0.125 + qr / qs) / t)
}
