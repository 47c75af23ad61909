//! Born-approximation forward model: direct arrivals, array response and
//! intensity-only data.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scene::Scene;
use crate::specfun::green0_at;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldRole {
    /// `g0`, incident field at the receivers.
    DirectArrival,
    /// `p`, scattered field at the receivers.
    ArrayResponse,
    /// `g0 + p`.
    Total,
    /// `p̃`, recovered from intensities.
    Recovered,
    /// Anything else migrated as data.
    Other,
}

/// A complex field sampled at every receiver at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldVector {
    pub role: FieldRole,
    pub values: Vec<Complex64>,
}

impl FieldVector {
    pub fn new(role: FieldRole, values: Vec<Complex64>) -> Self {
        FieldVector { role, values }
    }

    pub fn zeros(role: FieldRole, n: usize) -> Self {
        FieldVector::new(role, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// What the per-frequency illumination record holds, which is also the
/// normalization recovery divides by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlluminationKind {
    /// `|f̂(ω)|²` of a known deterministic source.
    FhatSquared,
    /// `2π F̂(ω)`, the expected power of a stochastic source.
    TwoPiFhat,
}

impl IlluminationKind {
    pub fn column(self) -> &'static str {
        match self {
            IlluminationKind::FhatSquared => "fhat_sq",
            IlluminationKind::TwoPiFhat => "twopi_Fhat",
        }
    }
}

/// Intensity measurements `d`, one row of N values per frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityData {
    pub omegas: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub illumination: Vec<f64>,
    pub kind: IlluminationKind,
}

impl IntensityData {
    pub fn receiver_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Checks that the data sit on the scene's frequency grid and array.
    pub fn check_against(&self, scene: &Scene) -> Result<()> {
        let grid = scene.band().samples();
        if self.omegas.len() != grid.len() || self.rows.len() != grid.len() || self.illumination.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "data cover {} frequencies, scene band has {}",
                self.omegas.len(),
                grid.len()
            )));
        }
        for (i, (&w, &g)) in self.omegas.iter().zip(&grid).enumerate() {
            if (w - g).abs() > 1e-12 * g {
                return Err(Error::Mismatch(format!(
                    "frequency {i}: data at {w} rad/s, scene at {g} rad/s"
                )));
            }
        }
        let n = scene.receiver_count();
        if let Some(i) = self.rows.iter().position(|row| row.len() != n) {
            return Err(Error::Mismatch(format!(
                "frequency {i}: {} receivers in data, {n} in scene",
                self.rows[i].len()
            )));
        }
        Ok(())
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "angular frequency must be positive, got {omega}"
        )))
    }
}

fn green_between(a: &Point, b: &Point, k: f64, scene: &Scene, what: &str) -> Result<Complex64> {
    let r = a.dist(b);
    if r == 0.0 {
        return Err(Error::Singular(format!("{what} at {a}")));
    }
    Ok(green0_at(r, k, scene.dimension()))
}

/// `g0_r = G0(x_r, x_s, ω)`.
pub fn direct_arrivals(scene: &Scene, omega: f64) -> Result<FieldVector> {
    check_omega(omega)?;
    let k = omega / scene.c0();
    let xs = scene.source();
    let values = scene
        .receivers()
        .iter()
        .map(|xr| green_between(xr, &xs, k, scene, "source coincides with a receiver"))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldVector::new(FieldRole::DirectArrival, values))
}

/// `p_r = k² Σ_j ρ_j G0(x_r, z_j, ω) G0(x_s, z_j, ω)`.
pub fn array_response(scene: &Scene, omega: f64) -> Result<FieldVector> {
    check_omega(omega)?;
    let k = omega / scene.c0();
    let mut values = vec![Complex64::new(0.0, 0.0); scene.receiver_count()];
    for s in scene.scatterers() {
        let z = s.position;
        let gs = green_between(&scene.source(), &z, k, scene, "scatterer coincides with the source")?;
        let weight = gs * (k * k * s.reflectivity);
        for (v, xr) in values.iter_mut().zip(scene.receivers()) {
            *v += weight * green_between(xr, &z, k, scene, "scatterer coincides with a receiver")?;
        }
    }
    Ok(FieldVector::new(FieldRole::ArrayResponse, values))
}

/// `g0 + p`.
pub fn total_field(scene: &Scene, omega: f64) -> Result<FieldVector> {
    let g0 = direct_arrivals(scene, omega)?;
    let p = array_response(scene, omega)?;
    Ok(FieldVector::new(
        FieldRole::Total,
        g0.values.iter().zip(&p.values).map(|(a, b)| a + b).collect(),
    ))
}

/// Exact intensities `|f̂(ω_i)|² |g0_r + p_r|²`, quadratic term included.
pub fn intensity_data(scene: &Scene, fhat_sq: &[f64]) -> Result<IntensityData> {
    let omegas = scene.band().samples();
    if fhat_sq.len() != omegas.len() {
        return Err(Error::Mismatch(format!(
            "{} illumination values for {} frequencies",
            fhat_sq.len(),
            omegas.len()
        )));
    }
    if let Some(i) = fhat_sq.iter().position(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(Error::Validation(format!(
            "illumination at frequency {i} must be finite and nonnegative, got {}",
            fhat_sq[i]
        )));
    }
    let rows = omegas
        .par_iter()
        .zip(fhat_sq)
        .map(|(&w, &f)| {
            let u = total_field(scene, w)?;
            Ok(u.values.iter().map(|v| f * v.norm_sqr()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(IntensityData {
        omegas,
        rows,
        illumination: fhat_sq.to_vec(),
        kind: IlluminationKind::FhatSquared,
    })
}

/// Intensity data under the unit illumination `f̂ ≡ 1`.
pub fn unit_intensity_data(scene: &Scene) -> Result<IntensityData> {
    intensity_data(scene, &vec![1.0; scene.band().count()])
}

/// `max_r |p_r| / |g0_r|`, the size of the scattered field against the
/// direct arrival. Recovery relies on this being small.
pub fn linearization_residual(scene: &Scene, omega: f64) -> Result<f64> {
    let g0 = direct_arrivals(scene, omega)?;
    let p = array_response(scene, omega)?;
    Ok(g0
        .values
        .iter()
        .zip(&p.values)
        .map(|(g, p)| p.norm() / g.norm())
        .fold(0.0, f64::max))
}

/// `linearization_residual` maximized over the band.
pub fn band_linearization_residual(scene: &Scene) -> Result<f64> {
    scene
        .band()
        .samples()
        .into_iter()
        .map(|w| linearization_residual(scene, w))
        .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
}
