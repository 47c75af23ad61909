//! Experiment geometry, medium, frequency band and image window.
//!
//! All lengths are stored in meters. Scene documents carry a `unit` field
//! (millimeters by default) that scales every length they contain.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specfun::Dimension;

/// Speed of light used by the optical presets, m/s.
pub const REFERENCE_C0: f64 = 3.0e8;
/// Central frequency of the optical presets, Hz.
pub const REFERENCE_F0_HZ: f64 = 590.0e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointScatterer {
    pub position: Point,
    pub reflectivity: f64,
}

/// Equally spaced sample frequencies spanning `[f_min, f_max]` Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid {
    f_min_hz: f64,
    f_max_hz: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(f_min_hz: f64, f_max_hz: f64, count: usize) -> Result<Self> {
        if !(f_min_hz > 0.0) || !f_min_hz.is_finite() || !f_max_hz.is_finite() {
            return Err(Error::Validation(format!(
                "band limits must be finite and positive, got [{f_min_hz}, {f_max_hz}] Hz"
            )));
        }
        if f_max_hz < f_min_hz {
            return Err(Error::Validation(format!(
                "band has f_max {f_max_hz} Hz below f_min {f_min_hz} Hz"
            )));
        }
        if count == 0 {
            return Err(Error::Validation("band sample count must be at least 1".into()));
        }
        if count > 1 && f_max_hz == f_min_hz {
            return Err(Error::Validation(
                "a band with several samples needs f_max > f_min".into(),
            ));
        }
        Ok(FrequencyGrid {
            f_min_hz,
            f_max_hz,
            count,
        })
    }

    pub fn f_min_hz(&self) -> f64 {
        self.f_min_hz
    }

    pub fn f_max_hz(&self) -> f64 {
        self.f_max_hz
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Angular frequency of sample `i`, rad/s.
    pub fn omega(&self, i: usize) -> f64 {
        if self.count == 1 {
            return 2.0 * PI * self.f_min_hz;
        }
        let step = (self.f_max_hz - self.f_min_hz) / (self.count - 1) as f64;
        2.0 * PI * (self.f_min_hz + i as f64 * step)
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.omega(i)).collect()
    }

    /// Quadrature weight of the Riemann sum over the band. A single-sample
    /// band is a point evaluation with unit weight.
    pub fn delta_omega(&self) -> f64 {
        if self.count == 1 {
            1.0
        } else {
            2.0 * PI * (self.f_max_hz - self.f_min_hz) / (self.count - 1) as f64
        }
    }

    pub fn omega_min(&self) -> f64 {
        2.0 * PI * self.f_min_hz
    }

    pub fn omega_max(&self) -> f64 {
        2.0 * PI * self.f_max_hz
    }

    pub fn omega_center(&self) -> f64 {
        PI * (self.f_min_hz + self.f_max_hz)
    }

    pub fn wavenumber(&self, omega: f64, c0: f64) -> f64 {
        omega / c0
    }

    /// Central wavelength `λ0 = 2π c0 / ω_center`.
    pub fn lambda0(&self, c0: f64) -> f64 {
        2.0 * PI * c0 / self.omega_center()
    }

    /// The same number of samples over a band scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        FrequencyGrid::new(self.f_min_hz * factor, self.f_max_hz * factor, self.count)
    }
}

/// A square grid of image points in the plane `z = center.z`, with
/// `2 * half_extent + 1` points per axis. Axis `x` is range, `y` cross-range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageWindowSpec {
    pub center: Point,
    pub spacing: f64,
    pub half_extent: usize,
}

impl ImageWindowSpec {
    pub const DEFAULT_HALF_EXTENT: usize = 25;
    pub const DEFAULT_SPACING_LAMBDA0: f64 = 0.4;

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::Validation(format!(
                "window spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !self.center.is_finite() {
            return Err(Error::Validation("window center must be finite".into()));
        }
        Ok(())
    }

    /// Points per axis.
    pub fn side(&self) -> usize {
        2 * self.half_extent + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, ix: usize, iy: usize) -> Point {
        let h = self.half_extent as f64;
        self.center + Point::planar((ix as f64 - h) * self.spacing, (iy as f64 - h) * self.spacing)
    }

    /// All image points, row-major with `iy` outer: index `iy * side + ix`.
    pub fn points(&self) -> Vec<Point> {
        let n = self.side();
        (0..n)
            .flat_map(|iy| (0..n).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| self.position(ix, iy))
            .collect()
    }

    pub fn corners(&self) -> [Point; 4] {
        let m = self.side() - 1;
        [
            self.position(0, 0),
            self.position(m, 0),
            self.position(m, m),
            self.position(0, m),
        ]
    }

    /// Grid cell nearest to `p`, if `p` projects inside the window.
    pub fn nearest_cell(&self, p: &Point) -> Option<(usize, usize)> {
        let h = self.half_extent as f64;
        let fx = ((p.x() - self.center.x()) / self.spacing + h).round();
        let fy = ((p.y() - self.center.y()) / self.spacing + h).round();
        let n = self.side() as f64;
        if fx < 0.0 || fy < 0.0 || fx >= n || fy >= n {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn contains(&self, p: &Point) -> bool {
        let r = self.half_extent as f64 * self.spacing * (1.0 + 1e-12);
        (p.x() - self.center.x()).abs() <= r && (p.y() - self.center.y()).abs() <= r
    }
}

/// Unvalidated scene components, for building and editing scenes.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneParts {
    pub dimension: Dimension,
    /// Number of coordinates positions were given with (2 or 3).
    pub coord_dim: usize,
    pub c0: f64,
    pub receivers: Vec<Point>,
    pub source: Point,
    pub scatterers: Vec<PointScatterer>,
    pub band: FrequencyGrid,
    pub window: ImageWindowSpec,
}

/// A validated experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    parts: SceneParts,
}

impl Scene {
    pub fn new(parts: SceneParts) -> Result<Self> {
        validate(&parts)?;
        Ok(Scene { parts })
    }

    pub fn parts(&self) -> &SceneParts {
        &self.parts
    }

    pub fn into_parts(self) -> SceneParts {
        self.parts
    }

    pub fn dimension(&self) -> Dimension {
        self.parts.dimension
    }

    pub fn coord_dim(&self) -> usize {
        self.parts.coord_dim
    }

    pub fn c0(&self) -> f64 {
        self.parts.c0
    }

    pub fn receivers(&self) -> &[Point] {
        &self.parts.receivers
    }

    pub fn receiver_count(&self) -> usize {
        self.parts.receivers.len()
    }

    pub fn source(&self) -> Point {
        self.parts.source
    }

    pub fn scatterers(&self) -> &[PointScatterer] {
        &self.parts.scatterers
    }

    pub fn band(&self) -> &FrequencyGrid {
        &self.parts.band
    }

    pub fn window(&self) -> &ImageWindowSpec {
        &self.parts.window
    }

    pub fn lambda0(&self) -> f64 {
        self.parts.band.lambda0(self.parts.c0)
    }

    /// Largest distance between two receivers.
    pub fn aperture(&self) -> f64 {
        let rx = &self.parts.receivers;
        let mut best: f64 = 0.0;
        for (i, a) in rx.iter().enumerate() {
            for b in &rx[i + 1..] {
                best = best.max(a.dist(b));
            }
        }
        best
    }

    /// Distance from the array centroid to the window center.
    pub fn standoff(&self) -> f64 {
        let rx = &self.parts.receivers;
        let sum = rx.iter().fold(Point::default(), |acc, p| acc + *p);
        let centroid = sum * (1.0 / rx.len() as f64);
        centroid.dist(&self.parts.window.center)
    }

    /// Indices of scatterers lying outside the image window.
    pub fn scatterers_outside_window(&self) -> Vec<usize> {
        self.parts
            .scatterers
            .iter()
            .enumerate()
            .filter(|(_, s)| !self.parts.window.contains(&s.position))
            .map(|(i, _)| i)
            .collect()
    }

    /// Copy with a different scatterer set.
    pub fn with_scatterers(&self, scatterers: Vec<PointScatterer>) -> Result<Scene> {
        let mut parts = self.parts.clone();
        parts.scatterers = scatterers;
        Scene::new(parts)
    }

    pub fn with_band(&self, band: FrequencyGrid) -> Result<Scene> {
        let mut parts = self.parts.clone();
        parts.band = band;
        Scene::new(parts)
    }

    pub fn with_source(&self, source: Point) -> Result<Scene> {
        let mut parts = self.parts.clone();
        parts.source = source;
        Scene::new(parts)
    }

    pub fn with_dimension(&self, dimension: Dimension) -> Result<Scene> {
        let mut parts = self.parts.clone();
        parts.dimension = dimension;
        Scene::new(parts)
    }

    /// SHA-256 of the canonical scene document, hex encoded.
    pub fn hash(&self) -> String {
        crate::io::sha256_hex(emit_scene(self).as_bytes())
    }
}

fn validate(parts: &SceneParts) -> Result<()> {
    if parts.coord_dim != 2 && parts.coord_dim != 3 {
        return Err(Error::Validation(format!(
            "positions need 2 or 3 coordinates, got {}",
            parts.coord_dim
        )));
    }
    if !(parts.c0 > 0.0) || !parts.c0.is_finite() {
        return Err(Error::Validation(format!("c0 must be positive, got {}", parts.c0)));
    }
    if parts.receivers.is_empty() {
        return Err(Error::Validation("at least one receiver is required".into()));
    }
    for (i, r) in parts.receivers.iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::Validation(format!(
                "receiver {} has a non-finite coordinate",
                i + 1
            )));
        }
    }
    if !parts.source.is_finite() {
        return Err(Error::Validation("source has a non-finite coordinate".into()));
    }
    let mut order: Vec<usize> = (0..parts.receivers.len()).collect();
    let key = |i: usize| parts.receivers[i].0;
    order.sort_by(|&a, &b| key(a).partial_cmp(&key(b)).expect("finite coordinates"));
    for w in order.windows(2) {
        if parts.receivers[w[0]] == parts.receivers[w[1]] {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::Validation(format!("receivers {} and {} coincide", a + 1, b + 1)));
        }
    }
    if let Some(i) = parts.receivers.iter().position(|r| *r == parts.source) {
        return Err(Error::Validation(format!("source coincides with receiver {}", i + 1)));
    }
    for (j, s) in parts.scatterers.iter().enumerate() {
        if !s.reflectivity.is_finite() || !s.position.is_finite() {
            return Err(Error::Validation(format!("scatterer {} is not finite", j + 1)));
        }
    }
    parts.window.validate()
}

/// Unit of every length in a scene document.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Meter,
    #[default]
    #[serde(rename = "mm")]
    Millimeter,
    #[serde(rename = "um")]
    Micrometer,
    #[serde(rename = "nm")]
    Nanometer,
}

impl Unit {
    pub fn meters(self) -> f64 {
        match self {
            Unit::Meter => 1.0,
            Unit::Millimeter => 1e-3,
            Unit::Micrometer => 1e-6,
            Unit::Nanometer => 1e-9,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    #[serde(default)]
    unit: Unit,
    dimension: u8,
    c0: f64,
    receivers: ReceiversDoc,
    source: Vec<f64>,
    band: BandDoc,
    #[serde(default)]
    scatterers: Vec<ScattererDoc>,
    window: WindowDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ReceiversDoc {
    Linear(LinearArrayDoc),
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearArrayDoc {
    center: Vec<f64>,
    length: f64,
    count: usize,
    axis: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandDoc {
    f_min_hz: f64,
    f_max_hz: f64,
    count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ScattererDoc {
    Point { pos: Vec<f64>, rho: f64 },
    Disk { disk: DiskDoc },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskDoc {
    center: Vec<f64>,
    radius: f64,
    spacing: f64,
    rho: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spacing_lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_extent: Option<usize>,
}

/// Parses and validates a JSON scene document.
pub fn parse_scene(document: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: SceneDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })?;
    doc.into_scene()
}

impl SceneDoc {
    fn into_scene(self) -> Result<Scene> {
        let unit = self.unit.meters();
        let dimension = Dimension::from_u8(self.dimension)
            .ok_or_else(|| Error::parse("dimension", format!("expected 2 or 3, got {}", self.dimension)))?;
        let coord_dim = self.source.len();
        let point = |field: &str, c: &[f64]| -> Result<Point> {
            if c.len() != coord_dim {
                return Err(Error::parse(
                    field,
                    format!("expected {coord_dim} coordinates like `source`, got {}", c.len()),
                ));
            }
            Point::from_slice(c)
                .map(|p| p * unit)
                .ok_or_else(|| Error::parse(field, "positions need 2 or 3 coordinates"))
        };
        let source = point("source", &self.source)?;

        let receivers = match &self.receivers {
            ReceiversDoc::Explicit(list) => list
                .iter()
                .enumerate()
                .map(|(i, c)| point(&format!("receivers.explicit[{i}]"), c))
                .collect::<Result<Vec<_>>>()?,
            ReceiversDoc::Linear(lin) => {
                let center = point("receivers.linear.center", &lin.center)?;
                if lin.axis.len() != coord_dim {
                    return Err(Error::parse(
                        "receivers.linear.axis",
                        format!("expected {coord_dim} components, got {}", lin.axis.len()),
                    ));
                }
                let axis = Point::from_slice(&lin.axis).expect("length checked");
                linear_array(center, lin.length * unit, lin.count, axis)?
            }
        };

        let band = FrequencyGrid::new(self.band.f_min_hz, self.band.f_max_hz, self.band.count)?;

        let mut scatterers = Vec::new();
        for (i, s) in self.scatterers.iter().enumerate() {
            match s {
                ScattererDoc::Point { pos, rho } => scatterers.push(PointScatterer {
                    position: point(&format!("scatterers[{i}].pos"), pos)?,
                    reflectivity: *rho,
                }),
                ScattererDoc::Disk { disk } => {
                    let center = point(&format!("scatterers[{i}].disk.center"), &disk.center)?;
                    scatterers.extend(disk_scatterer(
                        center,
                        disk.radius * unit,
                        disk.spacing * unit,
                        disk.rho,
                    )?);
                }
            }
        }

        let lambda0 = band.lambda0(self.c0);
        let spacing = match (self.window.spacing, self.window.spacing_lambda0) {
            (Some(_), Some(_)) => {
                return Err(Error::parse(
                    "window",
                    "give either `spacing` or `spacing_lambda0`, not both",
                ))
            }
            (Some(s), None) => s * unit,
            (None, Some(f)) => f * lambda0,
            (None, None) => ImageWindowSpec::DEFAULT_SPACING_LAMBDA0 * lambda0,
        };
        let window = ImageWindowSpec {
            center: point("window.center", &self.window.center)?,
            spacing,
            half_extent: self.window.half_extent.unwrap_or(ImageWindowSpec::DEFAULT_HALF_EXTENT),
        };

        Scene::new(SceneParts {
            dimension,
            coord_dim,
            c0: self.c0,
            receivers,
            source,
            scatterers,
            band,
            window,
        })
    }
}

/// Serializes a scene as a document in meters with explicit receiver and
/// scatterer lists. `parse_scene(&emit_scene(s))` reproduces `s` exactly.
pub fn emit_scene(scene: &Scene) -> String {
    let d = scene.coord_dim();
    let p = scene.parts();
    let doc = SceneDoc {
        unit: Unit::Meter,
        dimension: p.dimension.as_u8(),
        c0: p.c0,
        receivers: ReceiversDoc::Explicit(p.receivers.iter().map(|r| r.coords(d)).collect()),
        source: p.source.coords(d),
        band: BandDoc {
            f_min_hz: p.band.f_min_hz,
            f_max_hz: p.band.f_max_hz,
            count: p.band.count,
        },
        scatterers: p
            .scatterers
            .iter()
            .map(|s| ScattererDoc::Point {
                pos: s.position.coords(d),
                rho: s.reflectivity,
            })
            .collect(),
        window: WindowDoc {
            center: p.window.center.coords(d),
            spacing_lambda0: None,
            spacing: Some(p.window.spacing),
            half_extent: Some(p.window.half_extent),
        },
    };
    serde_json::to_string_pretty(&doc).expect("scene documents always serialize")
}

/// `count` receivers evenly spread over a segment of `length` centered at
/// `center` along `axis`.
pub fn linear_array(center: Point, length: f64, count: usize, axis: Point) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::Validation("linear array needs at least one receiver".into()));
    }
    let norm = axis.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Validation("linear array axis must be a nonzero vector".into()));
    }
    if !(length >= 0.0) || !length.is_finite() || (count > 1 && length == 0.0) {
        return Err(Error::Validation(format!(
            "linear array length must be positive, got {length}"
        )));
    }
    let dir = axis * (1.0 / norm);
    if count == 1 {
        return Ok(vec![center]);
    }
    Ok((0..count)
        .map(|i| {
            let t = -0.5 + i as f64 / (count - 1) as f64;
            center + dir * (t * length)
        })
        .collect())
}

/// Lattice points of pitch `spacing` within `radius` of `center`, in the
/// plane of the center, row-major (`y` outer, `x` inner).
pub fn disk_scatterer(center: Point, radius: f64, spacing: f64, rho: f64) -> Result<Vec<PointScatterer>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Validation(format!(
            "disk radius must be nonnegative, got {radius}"
        )));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::Validation(format!(
            "disk spacing must be positive, got {spacing}"
        )));
    }
    let reach = radius / spacing;
    let limit = reach * reach * (1.0 + 1e-12);
    let k = reach.floor() as i64;
    let mut out = Vec::new();
    for j in -k..=k {
        for i in -k..=k {
            if ((i * i + j * j) as f64) <= limit {
                out.push(PointScatterer {
                    position: center + Point::planar(i as f64 * spacing, j as f64 * spacing),
                    reflectivity: rho,
                });
            }
        }
    }
    Ok(out)
}

/// The optical experiments: one source, 501 receivers on a 1 cm line,
/// 100 frequencies in 430–750 THz, 3D Green's function on planar positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetCase {
    Point,
    TwoPoints,
    Disk,
    BreakdownA,
    BreakdownB,
    BreakdownC,
    BreakdownD,
    Stochastic,
}

impl PresetCase {
    pub const ALL: [PresetCase; 8] = [
        PresetCase::Point,
        PresetCase::TwoPoints,
        PresetCase::Disk,
        PresetCase::BreakdownA,
        PresetCase::BreakdownB,
        PresetCase::BreakdownC,
        PresetCase::BreakdownD,
        PresetCase::Stochastic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetCase::Point => "point",
            PresetCase::TwoPoints => "two_points",
            PresetCase::Disk => "disk",
            PresetCase::BreakdownA => "breakdown_a",
            PresetCase::BreakdownB => "breakdown_b",
            PresetCase::BreakdownC => "breakdown_c",
            PresetCase::BreakdownD => "breakdown_d",
            PresetCase::Stochastic => "stochastic",
        }
    }
}

impl fmt::Display for PresetCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown preset `{s}`")))
    }
}

/// Central wavelength of the optical presets.
pub fn reference_lambda0() -> f64 {
    REFERENCE_C0 / REFERENCE_F0_HZ
}

/// Radius of the disk preset. A uniform disk images mostly through its
/// front and back edges, so how much of it lies above half maximum varies
/// non-monotonically with the radius.
pub fn reference_disk_radius() -> f64 {
    1.75 * reference_lambda0()
}

pub fn preset_scene(case: PresetCase) -> Scene {
    let mm = 1e-3;
    let l0 = reference_lambda0();
    let target = Point::planar(50.0 * mm, 0.0);
    let receivers =
        linear_array(Point::planar(0.0, 0.0), 10.0 * mm, 501, Point::planar(0.0, 1.0)).expect("valid preset array");
    let point = |position: Point, reflectivity: f64| PointScatterer { position, reflectivity };

    let mut source = Point::planar(5.0 * mm, -7.5 * mm);
    let mut window_center = target;
    let scatterers = match case {
        PresetCase::Point | PresetCase::Stochastic => vec![point(target, 1e-15)],
        PresetCase::TwoPoints => vec![
            point(Point::planar(50.0 * mm - 3.0 * l0, -l0), 1e-15),
            point(Point::planar(50.0 * mm + 6.0 * l0, 5.0 * l0), 1e-15),
        ],
        PresetCase::Disk => disk_scatterer(target, reference_disk_radius(), l0 / 4.0, 1e-15).expect("valid disk"),
        PresetCase::BreakdownA => {
            source = Point::planar(50.0 * mm - 10.0 * l0, 0.0);
            vec![point(target, 1e-15)]
        }
        PresetCase::BreakdownB => {
            let near = Point::planar(11.0 * l0, 0.0);
            source = Point::planar(-50.0 * mm, 0.0);
            window_center = near;
            vec![point(near, 1e-15)]
        }
        PresetCase::BreakdownC => {
            source = Point::planar(5.0 * mm, -75.0 * mm);
            vec![point(target, 1e-10)]
        }
        PresetCase::BreakdownD => {
            source = Point::planar(5.0 * mm, 0.0);
            vec![point(target, 1e-15)]
        }
    };

    Scene::new(SceneParts {
        dimension: Dimension::Three,
        coord_dim: 2,
        c0: REFERENCE_C0,
        receivers,
        source,
        scatterers,
        band: FrequencyGrid::new(430e12, 750e12, 100).expect("valid preset band"),
        window: ImageWindowSpec {
            center: window_center,
            spacing: l0 * ImageWindowSpec::DEFAULT_SPACING_LAMBDA0,
            half_extent: ImageWindowSpec::DEFAULT_HALF_EXTENT,
        },
    })
    .expect("presets are valid scenes")
}
