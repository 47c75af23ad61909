//! Kirchhoff migration and image diagnostics.
//!
//! The single-frequency functional is
//! `Γ(y) = conj(G0(x_s, y)) Σ_r conj(G0(x_r, y)) field_r`, and broadband
//! images sum it over the band with the uniform weight `Δω`, in ascending
//! frequency order.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{array_response, direct_arrivals, FieldRole, FieldVector};
use crate::geometry::Point;
use crate::recover::{check_geometric_condition, GeometryReport};
use crate::scene::{ImageWindowSpec, Scene};
use crate::specfun::{green0_at, Dimension};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageMeta {
    pub omega_min: f64,
    pub omega_max: f64,
    pub frequencies: usize,
    pub receivers: usize,
    pub scene_hash: String,
}

/// Complex image values on a window, index `iy * side + ix`. Cells that
/// coincide with the source or a receiver hold NaN and are listed in
/// `flagged`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    pub window: ImageWindowSpec,
    pub values: Vec<Complex64>,
    pub flagged: Vec<usize>,
    pub meta: ImageMeta,
}

impl ImageGrid {
    pub fn side(&self) -> usize {
        self.window.side()
    }

    pub fn value(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.side() + ix]
    }

    /// `|Γ|`, NaN on flagged cells.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Cell of largest `|Γ|`, ignoring flagged cells. `None` for an
    /// identically zero image.
    pub fn peak(&self) -> Option<(usize, usize)> {
        let n = self.side();
        let mut best: Option<(usize, f64)> = None;
        for (i, m) in self.magnitudes().into_iter().enumerate() {
            if m.is_finite() && m > best.map_or(0.0, |b| b.1) {
                best = Some((i, m));
            }
        }
        best.map(|(i, _)| (i % n, i / n))
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitudes()
            .into_iter()
            .filter(|m| m.is_finite())
            .fold(0.0, f64::max)
    }
}

/// Minimum distance, relative to the window spacing, below which an image
/// point counts as coinciding with the source or a receiver.
const COINCIDENCE: f64 = 1e-9;

fn flagged_cells(scene: &Scene, window: &ImageWindowSpec, points: &[Point]) -> Vec<bool> {
    let tol = COINCIDENCE * window.spacing;
    points
        .iter()
        .map(|y| y.dist(&scene.source()) <= tol || scene.receivers().iter().any(|r| y.dist(r) <= tol))
        .collect()
}

/// Sums `weight · Γ(y; ω_i)` over `nf` equispaced frequencies
/// `omega_first + i · omega_step`. `fields` is receiver-major:
/// entry `r * nf + i`.
fn migrate_kernel(
    scene: &Scene,
    fields: &[Complex64],
    omega_first: f64,
    omega_step: f64,
    nf: usize,
    weight: f64,
    window: &ImageWindowSpec,
) -> Result<ImageGrid> {
    window.validate()?;
    let points = window.points();
    let flags = flagged_cells(scene, window, &points);
    let c0 = scene.c0();
    let dim = scene.dimension();
    let xs = scene.source();
    let receivers = scene.receivers();
    let omegas: Vec<f64> = (0..nf).map(|i| omega_first + i as f64 * omega_step).collect();

    let values: Vec<Complex64> = points
        .par_iter()
        .zip(&flags)
        .map(|(y, &flag)| {
            if flag {
                return Complex64::new(f64::NAN, f64::NAN);
            }
            let mut inner = vec![Complex64::new(0.0, 0.0); nf];
            match dim {
                Dimension::Three => {
                    for (r, xr) in receivers.iter().enumerate() {
                        let d = xr.dist(y);
                        let amp = 1.0 / (4.0 * std::f64::consts::PI * d);
                        let mut z = Complex64::from_polar(amp, -omega_first * d / c0);
                        let step = Complex64::from_polar(1.0, -omega_step * d / c0);
                        let row = &fields[r * nf..(r + 1) * nf];
                        for (acc, f) in inner.iter_mut().zip(row) {
                            *acc += z * f;
                            z *= step;
                        }
                    }
                }
                Dimension::Two => {
                    for (r, xr) in receivers.iter().enumerate() {
                        let d = xr.dist(y);
                        let row = &fields[r * nf..(r + 1) * nf];
                        for ((acc, f), &w) in inner.iter_mut().zip(row).zip(&omegas) {
                            *acc += green0_at(d, w / c0, dim).conj() * f;
                        }
                    }
                }
            }
            let ds = xs.dist(y);
            let mut total = Complex64::new(0.0, 0.0);
            for (acc, &w) in inner.iter().zip(&omegas) {
                total += green0_at(ds, w / c0, dim).conj() * acc * weight;
            }
            total
        })
        .collect();

    Ok(ImageGrid {
        window: *window,
        values,
        flagged: flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i).collect(),
        meta: ImageMeta {
            omega_min: omega_first,
            omega_max: omegas.last().copied().unwrap_or(omega_first),
            frequencies: nf,
            receivers: receivers.len(),
            scene_hash: scene.hash(),
        },
    })
}

/// `Γ(y) = conj(G0(x_s, y, ω)) Σ_r conj(G0(x_r, y, ω)) field_r`.
pub fn migrate_single(scene: &Scene, field: &FieldVector, omega: f64, window: &ImageWindowSpec) -> Result<ImageGrid> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "angular frequency must be positive, got {omega}"
        )));
    }
    if field.len() != scene.receiver_count() {
        return Err(Error::Mismatch(format!(
            "field has {} entries for {} receivers",
            field.len(),
            scene.receiver_count()
        )));
    }
    migrate_kernel(scene, &field.values, omega, 0.0, 1, 1.0, window)
}

/// `Σ_i Δω Γ(y; ω_i)` over the scene band, one field per band sample.
pub fn migrate_broadband(scene: &Scene, fields: &[FieldVector], window: &ImageWindowSpec) -> Result<ImageGrid> {
    let band = scene.band();
    let nf = band.count();
    if fields.len() != nf {
        return Err(Error::Mismatch(format!(
            "{} fields for {nf} band frequencies",
            fields.len()
        )));
    }
    let n = scene.receiver_count();
    if let Some(i) = fields.iter().position(|f| f.len() != n) {
        return Err(Error::Mismatch(format!(
            "field {i} has {} entries for {n} receivers",
            fields[i].len()
        )));
    }
    let mut layout = vec![Complex64::new(0.0, 0.0); n * nf];
    for (i, f) in fields.iter().enumerate() {
        for (r, v) in f.values.iter().enumerate() {
            layout[r * nf + i] = *v;
        }
    }
    let step = if nf > 1 {
        (band.omega_max() - band.omega_min()) / (nf - 1) as f64
    } else {
        0.0
    };
    migrate_kernel(scene, &layout, band.omega_min(), step, nf, band.delta_omega(), window)
}

/// The array response `p` at every band frequency.
pub fn true_responses(scene: &Scene) -> Result<Vec<FieldVector>> {
    scene
        .band()
        .samples()
        .par_iter()
        .map(|&w| array_response(scene, w))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpuriousReport {
    /// `max |Γ[s]| / max |Γ[p]|` with `s = conj(g0)⁻¹ ⊙ g0 ⊙ conj(p)`.
    pub ratio: f64,
    pub max_spurious: f64,
    pub max_true: f64,
    /// Set when `Γ[p]` vanishes and the ratio is reported as 0.
    pub degenerate: bool,
    pub geometry: GeometryReport,
    pub warning: Option<String>,
}

/// Migrates the part of `p̃` that is not `p` and compares it with the image
/// of `p`.
pub fn spurious_term_image(scene: &Scene) -> Result<SpuriousReport> {
    let geometry = check_geometric_condition(scene, scene.window());
    let warning = (!geometry.ok).then(|| {
        format!(
            "geometric imaging condition fails at {} receivers",
            geometry.violating_receivers.len()
        )
    });
    let omegas = scene.band().samples();
    let pairs = omegas
        .par_iter()
        .map(|&w| {
            let g0 = direct_arrivals(scene, w)?;
            let p = array_response(scene, w)?;
            let s = g0
                .values
                .iter()
                .zip(&p.values)
                .map(|(g, p)| g / g.conj() * p.conj())
                .collect();
            Ok((p, FieldVector::new(FieldRole::Other, s)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (ps, ss): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let max_true = migrate_broadband(scene, &ps, scene.window())?.max_abs();
    let max_spurious = migrate_broadband(scene, &ss, scene.window())?.max_abs();
    let (ratio, degenerate) = if max_true == 0.0 {
        (0.0, true)
    } else {
        (max_spurious / max_true, false)
    };
    Ok(SpuriousReport {
        ratio,
        max_spurious,
        max_true,
        degenerate,
        geometry,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageMetrics {
    pub peak_cell: Option<[usize; 2]>,
    pub peak_m: Option<[f64; 3]>,
    pub peak_abs: f64,
    /// Full width at half maximum along `y` through the peak.
    pub crossrange_fwhm_m: Option<f64>,
    /// Full width at half maximum along `x` through the peak.
    pub range_fwhm_m: Option<f64>,
    pub crossrange_clipped: bool,
    pub range_clipped: bool,
    /// Identically zero image; no peak or widths.
    pub degenerate: bool,
    /// `λ0 L / a`.
    pub rayleigh_estimate_m: f64,
    /// `c0 / (f_max − f_min)`.
    pub range_estimate_m: f64,
    /// Against a reference image, when one is given.
    pub correlation: Option<f64>,
    pub peak_displacement_cells: Option<f64>,
}

pub fn image_metrics(image: &ImageGrid, scene: &Scene) -> ImageMetrics {
    let band = scene.band();
    let bandwidth_hz = band.f_max_hz() - band.f_min_hz();
    let rayleigh = scene.lambda0() * scene.standoff() / scene.aperture();
    let range_estimate = if bandwidth_hz > 0.0 {
        scene.c0() / bandwidth_hz
    } else {
        f64::INFINITY
    };
    let mut metrics = ImageMetrics {
        peak_cell: None,
        peak_m: None,
        peak_abs: 0.0,
        crossrange_fwhm_m: None,
        range_fwhm_m: None,
        crossrange_clipped: false,
        range_clipped: false,
        degenerate: true,
        rayleigh_estimate_m: rayleigh,
        range_estimate_m: range_estimate,
        correlation: None,
        peak_displacement_cells: None,
    };
    let Some((px, py)) = image.peak() else {
        return metrics;
    };
    let n = image.side();
    let mags: Vec<f64> = image
        .magnitudes()
        .into_iter()
        .map(|m| if m.is_finite() { m } else { 0.0 })
        .collect();
    let row: Vec<f64> = (0..n).map(|ix| mags[py * n + ix]).collect();
    let col: Vec<f64> = (0..n).map(|iy| mags[iy * n + px]).collect();
    let spacing = image.window.spacing;
    let (range, range_clipped) = fwhm_line(&row, px, spacing);
    let (cross, cross_clipped) = fwhm_line(&col, py, spacing);
    metrics.peak_cell = Some([px, py]);
    metrics.peak_m = Some(image.window.position(px, py).0);
    metrics.peak_abs = mags[py * n + px];
    metrics.range_fwhm_m = range;
    metrics.crossrange_fwhm_m = cross;
    metrics.range_clipped = range_clipped;
    metrics.crossrange_clipped = cross_clipped;
    metrics.degenerate = false;
    metrics
}

/// Adds correlation and peak displacement against a reference image.
pub fn compare_with_reference(metrics: &mut ImageMetrics, image: &ImageGrid, reference: &ImageGrid) -> Result<()> {
    metrics.correlation = image_correlation(image, reference)?;
    metrics.peak_displacement_cells = match (image.peak(), reference.peak()) {
        (Some(a), Some(b)) => {
            let dx = a.0 as f64 - b.0 as f64;
            let dy = a.1 as f64 - b.1 as f64;
            Some(dx.hypot(dy))
        }
        _ => None,
    };
    Ok(())
}

/// Width of the region around `peak` where `line` stays above half the peak
/// value, with linear interpolation at the crossings. `None` and clipped
/// when the line reaches the window edge before dropping to half.
pub fn fwhm_line(line: &[f64], peak: usize, spacing: f64) -> (Option<f64>, bool) {
    let half = 0.5 * line[peak];
    if !(half > 0.0) {
        return (None, false);
    }
    let mut left = None;
    let mut k = peak;
    while k > 0 {
        if line[k - 1] < half {
            left = Some(k as f64 - (line[k] - half) / (line[k] - line[k - 1]));
            break;
        }
        k -= 1;
    }
    let mut right = None;
    let mut k = peak;
    while k + 1 < line.len() {
        if line[k + 1] < half {
            right = Some(k as f64 + (line[k] - half) / (line[k] - line[k + 1]));
            break;
        }
        k += 1;
    }
    match (left, right) {
        (Some(l), Some(r)) => (Some((r - l) * spacing), false),
        _ => (None, true),
    }
}

/// Normalized inner product of the magnitude layers, skipping cells flagged
/// in either image. `None` when either image is identically zero.
pub fn image_correlation(a: &ImageGrid, b: &ImageGrid) -> Result<Option<f64>> {
    if a.values.len() != b.values.len() {
        return Err(Error::Mismatch(format!(
            "images have {} and {} cells",
            a.values.len(),
            b.values.len()
        )));
    }
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.magnitudes().into_iter().zip(b.magnitudes()) {
        if x.is_finite() && y.is_finite() {
            ab += x * y;
            aa += x * x;
            bb += y * y;
        }
    }
    if aa == 0.0 || bb == 0.0 {
        return Ok(None);
    }
    Ok(Some((ab / (aa.sqrt() * bb.sqrt())).min(1.0)))
}

/// Cells whose magnitude is at least `min_fraction` of the image maximum and
/// no smaller than any of their 8 neighbors, largest first.
pub fn local_maxima(image: &ImageGrid, min_fraction: f64) -> Vec<(usize, usize, f64)> {
    let n = image.side();
    let mags: Vec<f64> = image
        .magnitudes()
        .into_iter()
        .map(|m| if m.is_finite() { m } else { 0.0 })
        .collect();
    let floor = min_fraction * image.max_abs();
    let mut out = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let m = mags[iy * n + ix];
            if m <= 0.0 || m < floor {
                continue;
            }
            let mut is_max = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                    if (dx, dy) == (0, 0) || x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                        continue;
                    }
                    if mags[y as usize * n + x as usize] > m {
                        is_max = false;
                    }
                }
            }
            if is_max {
                out.push((ix, iy, m));
            }
        }
    }
    out.sort_by(|a, b| b.2.total_cmp(&a.2));
    out
}

/// CSV with header `ix,iy,x_m,y_m,re,im,abs`, rows in index order.
pub fn image_csv(image: &ImageGrid) -> String {
    let n = image.side();
    let mut out = String::from("ix,iy,x_m,y_m,re,im,abs\n");
    for iy in 0..n {
        for ix in 0..n {
            let p = image.window.position(ix, iy);
            let v = image.value(ix, iy);
            writeln!(
                out,
                "{ix},{iy},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.x(),
                p.y(),
                v.re,
                v.im,
                v.norm()
            )
            .expect("writing to a String");
        }
    }
    out
}

/// One parsed row of an image CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageCsvRow {
    pub ix: usize,
    pub iy: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub value: Complex64,
    pub abs: f64,
}

/// Parses an image CSV, requiring a full square grid in index order.
pub fn parse_image_csv(text: &str) -> Result<Vec<ImageCsvRow>> {
    let rows = crate::io::parse_records(text, &["ix", "iy", "x_m", "y_m", "re", "im", "abs"], |rec, line| {
        Ok(ImageCsvRow {
            ix: crate::io::field(rec, 0, line)?,
            iy: crate::io::field(rec, 1, line)?,
            x_m: crate::io::field(rec, 2, line)?,
            y_m: crate::io::field(rec, 3, line)?,
            value: Complex64::new(crate::io::field(rec, 4, line)?, crate::io::field(rec, 5, line)?),
            abs: crate::io::field(rec, 6, line)?,
        })
    })?;
    let side = (rows.len() as f64).sqrt().round() as usize;
    if side * side != rows.len() || side.is_multiple_of(2) {
        return Err(Error::parse(
            "image",
            format!("{} rows do not form an odd square grid", rows.len()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.ix != i % side || row.iy != i / side {
            return Err(Error::parse(
                format!("line {}", i + 2),
                format!("expected cell ({}, {})", i % side, i / side),
            ));
        }
    }
    Ok(rows)
}

/// Plain PGM (P2) of `|Γ|`, min-max scaled to 0..=255, first row at the
/// largest `iy`. A constant image maps to 255 when positive and 0 otherwise.
/// Flagged cells are drawn black.
pub fn image_pgm(image: &ImageGrid) -> String {
    let n = image.side();
    let levels = pgm_levels(image);
    let mut out = format!("P2\n{n} {n}\n255\n");
    for iy in (0..n).rev() {
        let line: Vec<String> = (0..n).map(|ix| levels[iy * n + ix].to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Gray levels of `|Γ|` in index order.
fn pgm_levels(image: &ImageGrid) -> Vec<u8> {
    let mags = image.magnitudes();
    let finite = mags.iter().copied().filter(|m| m.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    mags.iter()
        .map(|&m| {
            if !m.is_finite() {
                0
            } else if hi > lo {
                ((m - lo) / (hi - lo) * 255.0).round() as u8
            } else if hi > 0.0 {
                255
            } else {
                0
            }
        })
        .collect()
}

/// Several images side by side in one plain PGM, each scaled on its own,
/// separated by a black gap of `gap` columns. Images must share a side.
pub fn side_by_side_pgm(images: &[&ImageGrid], gap: usize) -> Result<String> {
    let Some(first) = images.first() else {
        return Err(Error::Validation("no images to combine".into()));
    };
    let n = first.side();
    if let Some(i) = images.iter().position(|im| im.side() != n) {
        return Err(Error::Mismatch(format!(
            "image {i} has side {}, image 0 has {n}",
            images[i].side()
        )));
    }
    let panels: Vec<Vec<u8>> = images.iter().map(|im| pgm_levels(im)).collect();
    let width = images.len() * n + (images.len() - 1) * gap;
    let mut out = format!("P2\n{width} {n}\n255\n");
    for iy in (0..n).rev() {
        let mut line = Vec::with_capacity(width);
        for (k, panel) in panels.iter().enumerate() {
            if k > 0 {
                line.extend(std::iter::repeat_n("0".to_string(), gap));
            }
            line.extend((0..n).map(|ix| panel[iy * n + ix].to_string()));
        }
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}
