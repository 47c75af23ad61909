//! Recovery of the projected scattered field from intensities.
//!
//! Dropping the quadratic term, the intensities at one frequency satisfy
//! `d / |f̂|² = M [Re(g0 + p); Im(g0 + p)]` where row `r` of the `N × 2N`
//! matrix `M` is `[Re g0_r e_rᵀ, Im g0_r e_rᵀ]`. Since `M Mᵀ = diag |g0|²`
//! the minimum-norm solution is available in closed form and gives
//! `p̃ = d / (|f̂|² conj(g0)) − g0`, which equals
//! `p + conj(g0)⁻¹ ⊙ g0 ⊙ conj(p)` on linearized data.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{direct_arrivals, FieldRole, FieldVector, IntensityData};
use crate::geometry::Point;
use crate::scene::{ImageWindowSpec, Scene};
use crate::specfun::{hankel0_1, Dimension};

/// The linearized measurement operator, stored as the `g0` it is built from.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementMatrix {
    g0: Vec<Complex64>,
}

pub fn build_measurement(g0: &FieldVector) -> Result<MeasurementMatrix> {
    if let Some(r) = g0.values.iter().position(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::Singular(format!(
            "direct arrival vanishes at receiver {r}; measurement matrix is rank deficient"
        )));
    }
    Ok(MeasurementMatrix { g0: g0.values.clone() })
}

impl MeasurementMatrix {
    pub fn rows(&self) -> usize {
        self.g0.len()
    }

    pub fn cols(&self) -> usize {
        2 * self.g0.len()
    }

    pub fn g0(&self) -> &[Complex64] {
        &self.g0
    }

    /// Dense row-major copy. Only meant for small test problems.
    pub fn materialize(&self) -> Vec<Vec<f64>> {
        let n = self.rows();
        (0..n)
            .map(|r| {
                let mut row = vec![0.0; 2 * n];
                row[r] = self.g0[r].re;
                row[n + r] = self.g0[r].im;
                row
            })
            .collect()
    }

    /// Diagonal of `M Mᵀ`.
    pub fn gram_diagonal(&self) -> Vec<f64> {
        self.g0.iter().map(|g| g.norm_sqr()).collect()
    }

    /// `M x` for `x = [Re u; Im u]`.
    pub fn apply(&self, u: &[Complex64]) -> Vec<f64> {
        self.g0.iter().zip(u).map(|(g, u)| (g.conj() * u).re).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredField {
    pub field: FieldVector,
    pub omega: f64,
    /// `max |g0_r| / min |g0_r|`.
    pub conditioning: f64,
    /// `‖M [Re; Im](g0 + p̃) − d / |f̂|²‖`.
    pub residual_norm: f64,
    /// Complex operations spent on the recovery itself.
    pub operations: usize,
}

/// `p̃_r = d_r / (fhat_sq conj(g0_r)) − g0_r`, in O(N).
pub fn recover_ptilde(g0: &FieldVector, d_row: &[f64], fhat_sq: f64, omega: f64) -> Result<RecoveredField> {
    if d_row.len() != g0.len() {
        return Err(Error::Mismatch(format!(
            "{} intensities for {} receivers",
            d_row.len(),
            g0.len()
        )));
    }
    if fhat_sq == 0.0 {
        return Err(Error::DivisionByZero(format!("illumination vanishes at {omega} rad/s")));
    }
    if !fhat_sq.is_finite() || fhat_sq < 0.0 {
        return Err(Error::Validation(format!(
            "illumination must be positive, got {fhat_sq}"
        )));
    }
    let m = build_measurement(g0).map_err(|e| Error::DivisionByZero(e.to_string()))?;

    let mut operations = 0;
    let mut values = Vec::with_capacity(g0.len());
    let mut residual = 0.0;
    let mut gmin = f64::INFINITY;
    let mut gmax: f64 = 0.0;
    for (g, &d) in m.g0.iter().zip(d_row) {
        let u = d / (fhat_sq * g.conj());
        values.push(u - g);
        operations += 2;
        let e = (g.conj() * u).re - d / fhat_sq;
        residual += e * e;
        let a = g.norm();
        gmin = gmin.min(a);
        gmax = gmax.max(a);
    }
    Ok(RecoveredField {
        field: FieldVector::new(FieldRole::Recovered, values),
        omega,
        conditioning: gmax / gmin,
        residual_norm: residual.sqrt(),
        operations,
    })
}

/// Recovers `p̃` at every frequency of the data, dividing by the recorded
/// illumination.
pub fn recover_all(scene: &Scene, data: &IntensityData) -> Result<Vec<RecoveredField>> {
    data.check_against(scene)?;
    data.omegas
        .par_iter()
        .zip(&data.rows)
        .zip(&data.illumination)
        .map(|((&w, row), &f)| {
            let g0 = direct_arrivals(scene, w)?;
            recover_ptilde(&g0, row, f, w)
        })
        .collect()
}

/// `cond M = max_r |g0_r| / min_r |g0_r|`: the source-receiver distance
/// ratio in 3D and the Hankel modulus ratio in 2D.
pub fn condition_number(scene: &Scene, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "angular frequency must be positive, got {omega}"
        )));
    }
    let xs = scene.source();
    let dists: Vec<f64> = scene.receivers().iter().map(|r| r.dist(&xs)).collect();
    match scene.dimension() {
        Dimension::Three => {
            let (lo, hi) = min_max(dists.iter().copied());
            Ok(hi / lo)
        }
        Dimension::Two => {
            let k = omega / scene.c0();
            let moduli = dists
                .iter()
                .map(|&r| hankel0_1(k * r).map(|h| h.norm()))
                .collect::<Result<Vec<_>>>()?;
            let (lo, hi) = min_max(moduli.into_iter());
            Ok(hi / lo)
        }
    }
}

/// High-frequency limit of the 2D condition number, `sqrt(max r / min r)`.
pub fn condition_limit_2d(scene: &Scene) -> f64 {
    let xs = scene.source();
    let (lo, hi) = min_max(scene.receivers().iter().map(|r| r.dist(&xs)));
    (hi / lo).sqrt()
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Outcome of the geometric imaging condition check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub ok: bool,
    /// Zero-based indices of receivers whose cone toward the window
    /// contains the source.
    pub violating_receivers: Vec<usize>,
    pub theta_tol: f64,
}

/// Angular tolerance of the cone membership test, radians.
pub const THETA_TOL: f64 = 1e-6;

/// Flags each receiver `x_r` for which the source lies in the cone of
/// directions from `x_r` to the window. A receiver inside the window sees
/// every direction and is always flagged.
pub fn check_geometric_condition(scene: &Scene, window: &ImageWindowSpec) -> GeometryReport {
    let corners = window.corners();
    let xs = scene.source();
    let violating: Vec<usize> = scene
        .receivers()
        .iter()
        .enumerate()
        .filter(|(_, xr)| source_in_cone(xr, &xs, window, &corners))
        .map(|(i, _)| i)
        .collect();
    GeometryReport {
        ok: violating.is_empty(),
        violating_receivers: violating,
        theta_tol: THETA_TOL,
    }
}

fn source_in_cone(xr: &Point, xs: &Point, window: &ImageWindowSpec, corners: &[Point; 4]) -> bool {
    let zc = window.center.z();
    let scale = window.spacing * window.half_extent.max(1) as f64;
    let in_plane = |p: &Point| (p.z() - zc).abs() <= 1e-12 * scale.max(p.norm());
    if in_plane(xr) {
        if window.contains(xr) {
            return true;
        }
        if in_plane(xs) {
            return angular_interval_test(xr, xs, window, corners);
        }
        return false;
    }
    // Ray from the receiver through the source, intersected with the window plane.
    let dir = *xs - *xr;
    let height = zc - xr.z();
    if dir.z() * height <= 0.0 {
        return false;
    }
    let t = height / dir.z();
    let hit = *xr + dir * t;
    let slack = THETA_TOL * hit.dist(xr);
    let half = window.half_extent as f64 * window.spacing;
    (hit.x() - window.center.x()).abs() <= half + slack && (hit.y() - window.center.y()).abs() <= half + slack
}

fn angular_interval_test(xr: &Point, xs: &Point, window: &ImageWindowSpec, corners: &[Point; 4]) -> bool {
    let angle = |p: &Point| (p.y() - xr.y()).atan2(p.x() - xr.x());
    let base = angle(&window.center);
    let rel = |p: &Point| wrap(angle(p) - base);
    let (lo, hi) = corners
        .iter()
        .map(rel)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
    let s = rel(xs);
    s >= lo - THETA_TOL && s <= hi + THETA_TOL
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{array_response, unit_intensity_data};
    use crate::scene::{preset_scene, FrequencyGrid, PresetCase, SceneParts};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tiny_matrices() {
        let m = build_measurement(&FieldVector::new(FieldRole::DirectArrival, vec![c(1.0, 0.0)])).unwrap();
        assert_eq!(m.materialize(), vec![vec![1.0, 0.0]]);
        let m = build_measurement(&FieldVector::new(FieldRole::DirectArrival, vec![c(0.0, 1.0)])).unwrap();
        assert_eq!(m.materialize(), vec![vec![0.0, 1.0]]);
        assert!(build_measurement(&FieldVector::new(FieldRole::DirectArrival, vec![c(0.0, 0.0)])).is_err());
    }

    #[test]
    fn no_scatterer_recovers_zero() {
        let g0 = FieldVector::new(FieldRole::DirectArrival, vec![c(0.3, -0.4), c(-1.0, 2.0)]);
        let d: Vec<f64> = g0.values.iter().map(|g| 2.5 * g.norm_sqr()).collect();
        let rec = recover_ptilde(&g0, &d, 2.5, 1.0).unwrap();
        for v in &rec.field.values {
            assert!(v.norm() < 1e-15);
        }
        assert_eq!(rec.operations, 4);
        assert!((rec.conditioning - 5f64.sqrt() / 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_illumination_is_an_error() {
        let g0 = FieldVector::new(FieldRole::DirectArrival, vec![c(1.0, 0.0)]);
        assert!(matches!(
            recover_ptilde(&g0, &[1.0], 0.0, 1.0),
            Err(Error::DivisionByZero(_))
        ));
        let g0 = FieldVector::new(FieldRole::DirectArrival, vec![c(0.0, 0.0)]);
        assert!(matches!(
            recover_ptilde(&g0, &[1.0], 1.0, 1.0),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn recovery_on_the_point_preset() {
        let s = preset_scene(PresetCase::Point);
        let data = unit_intensity_data(&s).unwrap();
        let rec = recover_all(&s, &data).unwrap();
        assert_eq!(rec.len(), 100);
        let w = data.omegas[10];
        let p = array_response(&s, w).unwrap();
        let g0 = direct_arrivals(&s, w).unwrap();
        // Exact data: p̃ = p + conj(g0)⁻¹ g0 conj(p) + conj(g0)⁻¹ |p|².
        for ((pt, p), g) in rec[10].field.values.iter().zip(&p.values).zip(&g0.values) {
            let expect = p + g / g.conj() * p.conj() + p.norm_sqr() / g.conj();
            assert!((pt - expect).norm() <= 1e-9 * expect.norm());
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let s = preset_scene(PresetCase::Point);
        let mut data = unit_intensity_data(&s).unwrap();
        data.omegas[7] *= 1.001;
        assert!(matches!(recover_all(&s, &data), Err(Error::Mismatch(_))));
    }

    #[test]
    fn conditioning_is_distance_ratio() {
        let s = preset_scene(PresetCase::Point);
        let c = condition_number(&s, s.band().omega(0)).unwrap();
        assert!((c - 2.41).abs() < 0.01, "{c}");
    }

    #[test]
    fn equidistant_receivers_are_perfectly_conditioned() {
        let receivers = (0..8)
            .map(|i| {
                let a = i as f64 * 0.3;
                Point::planar(a.cos(), a.sin())
            })
            .collect();
        let s = Scene::new(SceneParts {
            dimension: Dimension::Two,
            coord_dim: 2,
            c0: 1.0,
            receivers,
            source: Point::planar(0.0, 0.0),
            scatterers: vec![],
            band: FrequencyGrid::new(1.0, 2.0, 2).unwrap(),
            window: ImageWindowSpec {
                center: Point::planar(5.0, 0.0),
                spacing: 0.1,
                half_extent: 2,
            },
        })
        .unwrap();
        assert!((condition_number(&s, 3.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn geometry_on_presets() {
        let s = preset_scene(PresetCase::Point);
        assert!(check_geometric_condition(&s, s.window()).ok);
        let d = preset_scene(PresetCase::BreakdownD);
        let rep = check_geometric_condition(&d, d.window());
        assert!(!rep.ok);
        assert!(rep.violating_receivers.contains(&250));
    }

    #[test]
    fn source_on_a_corner_ray_is_flagged() {
        let s = preset_scene(PresetCase::Point);
        let w = *s.window();
        let xr = s.receivers()[0];
        let corner = w.corners()[2];
        let src = xr + (corner - xr) * 0.5;
        let moved = s.with_source(src).unwrap();
        let rep = check_geometric_condition(&moved, &w);
        assert!(rep.violating_receivers.contains(&0));
    }

    #[test]
    fn wrap_range() {
        for a in [-7.0, -PI, 0.0, PI, 4.0, 12.0] {
            let w = wrap(a);
            assert!(w > -PI && w <= PI);
            assert!(((a - w) / (2.0 * PI)).fract().abs() < 1e-12 || ((a - w) / (2.0 * PI)).fract().abs() > 1.0 - 1e-12);
        }
    }
}
