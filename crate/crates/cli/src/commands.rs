use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use phaseless_core::forward::{band_linearization_residual, unit_intensity_data, FieldVector, IntensityData};
use phaseless_core::io::{illumination_csv, intensity_csv, parse_intensity_data, parse_recovered_csv, recovered_csv};
use phaseless_core::migrate::{
    compare_with_reference, image_csv, image_metrics, image_pgm, local_maxima, migrate_broadband, side_by_side_pgm,
    spurious_term_image, true_responses, ImageGrid, ImageMeta, ImageMetrics, SpuriousReport,
};
use phaseless_core::recover::{
    check_geometric_condition, condition_limit_2d, condition_number, recover_all, GeometryReport, RecoveredField,
};
use phaseless_core::scene::{emit_scene, parse_scene, preset_scene, PresetCase, Scene};
use phaseless_core::specfun::Dimension;
use phaseless_core::stochastic::{noisy_power_data, sample_illumination, PowerSpectrum};
use phaseless_core::Error;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::Run;

pub const INTENSITY_FILE: &str = "intensity.csv";
pub const ILLUMINATION_FILE: &str = "illumination.csv";
pub const RESPONSE_FILE: &str = "response.csv";
pub const RECOVERED_FILE: &str = "recovered.csv";

/// Local maxima at or above this fraction of the peak are reported.
const MAXIMA_FRACTION: f64 = 0.5;
/// Noise level of the noisy stochastic experiment.
const EXPERIMENT_NOISE_FRACTION: f64 = 0.1;
/// Frequencies in the condition-number sweep, and how far below the band
/// it starts.
const SWEEP_POINTS: usize = 200;
const SWEEP_DECADES: f64 = 6.0;

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Globals {
    pub scene: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Globals {
    fn out(&self) -> CliResult<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("`--out DIR` is required".into()))
    }

    fn start(&self, command: &str) -> CliResult<Run> {
        Run::start(self.out()?, command, self.seed, self.threads)
    }

    fn seed(&self, what: &str) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage(format!("`--seed` is required for {what}")))
    }

    fn load_scene(&self, run: Option<&mut Run>) -> CliResult<Scene> {
        let path = self
            .scene
            .as_deref()
            .ok_or_else(|| CliError::Usage("`--scene PATH` is required".into()))?;
        let text = read(path)?;
        let scene = parse_scene(&text)?;
        if let Some(run) = run {
            run.input(path, text.as_bytes());
            run.set_scene_hash(scene.hash());
            for i in scene.scatterers_outside_window() {
                run.warn(format!("scatterer {} lies outside the image window", i + 1));
            }
        }
        Ok(scene)
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct ConditionEntry {
    omega_rad_s: f64,
    cond: f64,
}

#[derive(Serialize)]
struct ConditionReport {
    dimension: u8,
    per_frequency: Vec<ConditionEntry>,
    /// High-frequency limit of the 2D condition number.
    limit_2d: Option<f64>,
    max_residual_norm: Option<f64>,
    operations: Option<usize>,
    geometry: GeometryReport,
}

fn condition_report(scene: &Scene, recovered: Option<&[RecoveredField]>) -> CliResult<ConditionReport> {
    let per_frequency = scene
        .band()
        .samples()
        .into_iter()
        .map(|w| {
            Ok(ConditionEntry {
                omega_rad_s: w,
                cond: condition_number(scene, w)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ConditionReport {
        dimension: scene.dimension().as_u8(),
        per_frequency,
        limit_2d: (scene.dimension() == Dimension::Two).then(|| condition_limit_2d(scene)),
        max_residual_norm: recovered.map(|r| r.iter().map(|f| f.residual_norm).fold(0.0, f64::max)),
        operations: recovered.map(|r| r.iter().map(|f| f.operations).sum()),
        geometry: check_geometric_condition(scene, scene.window()),
    })
}

fn geometry_warning(run: &mut Run, report: &GeometryReport) {
    if !report.ok {
        run.warn(format!(
            "geometric imaging condition fails: the source lies in the cone toward the window for {} receiver(s), first {}",
            report.violating_receivers.len(),
            report.violating_receivers[0] + 1
        ));
    }
}

fn spectrum_for(scene: &Scene, correlation_time: Option<f64>) -> CliResult<PowerSpectrum> {
    Ok(match correlation_time {
        Some(t_c) => PowerSpectrum::new(scene.band().omega_center(), t_c)?,
        None => PowerSpectrum::fitted_to_band(scene.band())?,
    })
}

fn stochastic_data(
    scene: &Scene,
    spectrum: &PowerSpectrum,
    seed: u64,
    noise_fraction: f64,
) -> CliResult<IntensityData> {
    let draw = sample_illumination(spectrum, scene.band(), seed);
    Ok(noisy_power_data(scene, &draw, noise_fraction, seed)?)
}

fn write_data(run: &mut Run, data: &IntensityData) -> CliResult<()> {
    run.write(INTENSITY_FILE, intensity_csv(data).as_bytes())?;
    run.write(ILLUMINATION_FILE, illumination_csv(data).as_bytes())
}

pub struct SimulateArgs {
    pub stochastic: bool,
    pub noise_fraction: Option<f64>,
    pub correlation_time: Option<f64>,
    pub with_response: bool,
}

pub fn simulate(g: &Globals, args: &SimulateArgs) -> CliResult<PathBuf> {
    if !args.stochastic && (args.noise_fraction.is_some() || args.correlation_time.is_some()) {
        return Err(CliError::Usage(
            "`--noise-fraction` and `--correlation-time` need `--stochastic`".into(),
        ));
    }
    let seed = if args.stochastic {
        Some(g.seed("stochastic simulation")?)
    } else {
        None
    };
    let mut run = g.start("simulate")?;
    let scene = g.load_scene(Some(&mut run))?;
    let data = match seed {
        Some(seed) => {
            let spectrum = spectrum_for(&scene, args.correlation_time)?;
            stochastic_data(&scene, &spectrum, seed, args.noise_fraction.unwrap_or(0.0))?
        }
        None => unit_intensity_data(&scene)?,
    };
    write_data(&mut run, &data)?;
    if args.with_response {
        let p = true_responses(&scene)?;
        run.write(RESPONSE_FILE, recovered_csv(&data.omegas, &p).as_bytes())?;
    }
    run.finish()
}

pub fn recover(g: &Globals, data_dir: &Path) -> CliResult<PathBuf> {
    let mut run = g.start("recover")?;
    let scene = g.load_scene(Some(&mut run))?;
    let (ipath, lpath) = (data_dir.join(INTENSITY_FILE), data_dir.join(ILLUMINATION_FILE));
    let (itext, ltext) = (read(&ipath)?, read(&lpath)?);
    run.input(&ipath, itext.as_bytes());
    run.input(&lpath, ltext.as_bytes());
    let data = parse_intensity_data(&itext, &ltext)?;
    let recovered = recover_all(&scene, &data)?;
    let fields: Vec<FieldVector> = recovered.iter().map(|r| r.field.clone()).collect();
    run.write(RECOVERED_FILE, recovered_csv(&data.omegas, &fields).as_bytes())?;
    let report = condition_report(&scene, Some(&recovered))?;
    geometry_warning(&mut run, &report.geometry);
    run.write_json("condition.json", &report)?;
    run.finish()
}

#[derive(Serialize)]
struct Maximum {
    cell: [usize; 2],
    position_m: [f64; 3],
    relative: f64,
}

#[derive(Serialize)]
struct ImageReport {
    metrics: ImageMetrics,
    flagged_cells: Vec<usize>,
    local_maxima: Vec<Maximum>,
    meta: ImageMeta,
}

fn image_report(image: &ImageGrid, scene: &Scene, reference: Option<&ImageGrid>) -> CliResult<ImageReport> {
    let mut metrics = image_metrics(image, scene);
    if let Some(r) = reference {
        compare_with_reference(&mut metrics, image, r)?;
    }
    let peak = image.max_abs();
    Ok(ImageReport {
        metrics,
        flagged_cells: image.flagged.clone(),
        local_maxima: local_maxima(image, MAXIMA_FRACTION)
            .into_iter()
            .map(|(ix, iy, m)| Maximum {
                cell: [ix, iy],
                position_m: image.window.position(ix, iy).0,
                relative: m / peak,
            })
            .collect(),
        meta: image.meta.clone(),
    })
}

fn write_image(run: &mut Run, stem: &str, image: &ImageGrid) -> CliResult<()> {
    run.write(&format!("{stem}.csv"), image_csv(image).as_bytes())?;
    run.write(&format!("{stem}.pgm"), image_pgm(image).as_bytes())
}

/// Reads a field file and checks it against the scene grid.
fn load_fields(run: &mut Run, scene: &Scene, path: &Path) -> CliResult<Vec<FieldVector>> {
    let text = read(path)?;
    run.input(path, text.as_bytes());
    let (omegas, fields) = parse_recovered_csv(&text)?;
    let grid = scene.band().samples();
    if omegas.len() != grid.len() {
        return Err(Error::Mismatch(format!(
            "`{}` covers {} frequencies, the scene band has {}",
            path.display(),
            omegas.len(),
            grid.len()
        ))
        .into());
    }
    if let Some(i) = omegas.iter().zip(&grid).position(|(a, b)| (a - b).abs() > 1e-12 * b) {
        return Err(Error::Mismatch(format!(
            "`{}` frequency {i} is {} rad/s, the scene has {} rad/s",
            path.display(),
            omegas[i],
            grid[i]
        ))
        .into());
    }
    Ok(fields)
}

pub fn migrate(g: &Globals, field: &Path, reference: Option<&Path>) -> CliResult<PathBuf> {
    let mut run = g.start("migrate")?;
    let scene = g.load_scene(Some(&mut run))?;
    let fields = load_fields(&mut run, &scene, field)?;
    let image = migrate_broadband(&scene, &fields, scene.window())?;
    let reference = match reference {
        Some(path) => {
            let r = load_fields(&mut run, &scene, path)?;
            Some(migrate_broadband(&scene, &r, scene.window())?)
        }
        None => None,
    };
    write_image(&mut run, "image", &image)?;
    let report = image_report(&image, &scene, reference.as_ref())?;
    if report.metrics.degenerate {
        run.warn("image is identically zero; metrics are degenerate".into());
    }
    run.write_json("metrics.json", &report)?;
    if let Some(r) = &reference {
        write_image(&mut run, "reference", r)?;
        run.write("side_by_side.pgm", side_by_side_pgm(&[r, &image], 3)?.as_bytes())?;
    }
    run.finish()
}

pub fn condition(g: &Globals) -> CliResult<PathBuf> {
    let mut run = g.start("condition")?;
    let scene = g.load_scene(Some(&mut run))?;
    let report = condition_report(&scene, None)?;
    geometry_warning(&mut run, &report.geometry);
    run.write_json("condition.json", &report)?;
    run.finish()
}

/// Prints the report as JSON; also writes it when `--out` is given.
pub fn check_geometry(g: &Globals) -> CliResult<Option<PathBuf>> {
    let scene = g.load_scene(None)?;
    let report = check_geometric_condition(&scene, scene.window());
    println!("{}", serde_json::to_string_pretty(&report)?);
    if g.out.is_none() {
        return Ok(None);
    }
    let mut run = g.start("check-geometry")?;
    g.load_scene(Some(&mut run))?;
    geometry_warning(&mut run, &report);
    run.write_json("geometry.json", &report)?;
    run.finish().map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    #[value(name = "point")]
    Point,
    #[value(name = "two_points")]
    TwoPoints,
    #[value(name = "disk")]
    Disk,
    #[value(name = "stochastic")]
    Stochastic,
    #[value(name = "stochastic_noisy")]
    StochasticNoisy,
    #[value(name = "breakdown_a")]
    BreakdownA,
    #[value(name = "breakdown_b")]
    BreakdownB,
    #[value(name = "breakdown_c")]
    BreakdownC,
    #[value(name = "breakdown_d")]
    BreakdownD,
    #[value(name = "condition_study")]
    ConditionStudy,
    #[value(name = "spurious_term")]
    SpuriousTerm,
}

impl Experiment {
    fn preset(self) -> PresetCase {
        match self {
            Experiment::Point | Experiment::ConditionStudy | Experiment::SpuriousTerm => PresetCase::Point,
            Experiment::TwoPoints => PresetCase::TwoPoints,
            Experiment::Disk => PresetCase::Disk,
            Experiment::Stochastic | Experiment::StochasticNoisy => PresetCase::Stochastic,
            Experiment::BreakdownA => PresetCase::BreakdownA,
            Experiment::BreakdownB => PresetCase::BreakdownB,
            Experiment::BreakdownC => PresetCase::BreakdownC,
            Experiment::BreakdownD => PresetCase::BreakdownD,
        }
    }

    fn name(self) -> String {
        clap::ValueEnum::to_possible_value(&self)
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

#[derive(Serialize)]
struct Linearization {
    band_residual: f64,
    point_baseline: f64,
    ratio_to_baseline: f64,
}

#[derive(Serialize)]
struct StochasticInfo {
    seed: u64,
    omega0_rad_s: f64,
    t_c_s: f64,
    noise_fraction: f64,
}

#[derive(Serialize)]
struct ExperimentReport {
    case: String,
    scene_hash: String,
    true_image: ImageReport,
    recovered_image: ImageReport,
    linearization: Linearization,
    geometry: GeometryReport,
    stochastic: Option<StochasticInfo>,
}

pub fn experiment(g: &Globals, case: Experiment) -> CliResult<PathBuf> {
    if g.scene.is_some() {
        return Err(CliError::Usage(
            "`experiment` runs built-in scenes; drop `--scene`".into(),
        ));
    }
    let stochastic = matches!(case, Experiment::Stochastic | Experiment::StochasticNoisy);
    let seed = if stochastic {
        Some(g.seed("stochastic experiments")?)
    } else {
        None
    };
    let mut run = g.start(&format!("experiment {}", case.name()))?;
    let scene = preset_scene(case.preset());
    run.set_scene_hash(scene.hash());
    run.write("scene.json", emit_scene(&scene).as_bytes())?;
    match case {
        Experiment::ConditionStudy => condition_study(&mut run, &scene)?,
        Experiment::SpuriousTerm => spurious_study(&mut run, &scene)?,
        _ => imaging_experiment(&mut run, &scene, case, seed)?,
    }
    run.finish()
}

fn imaging_experiment(run: &mut Run, scene: &Scene, case: Experiment, seed: Option<u64>) -> CliResult<()> {
    let (data, stochastic) = match seed {
        Some(seed) => {
            let spectrum = PowerSpectrum::reference();
            let noise = if case == Experiment::StochasticNoisy {
                EXPERIMENT_NOISE_FRACTION
            } else {
                0.0
            };
            let info = StochasticInfo {
                seed,
                omega0_rad_s: spectrum.omega0(),
                t_c_s: spectrum.t_c(),
                noise_fraction: noise,
            };
            (stochastic_data(scene, &spectrum, seed, noise)?, Some(info))
        }
        None => (unit_intensity_data(scene)?, None),
    };
    write_data(run, &data)?;

    let recovered = recover_all(scene, &data)?;
    let fields: Vec<FieldVector> = recovered.iter().map(|r| r.field.clone()).collect();
    run.write(RECOVERED_FILE, recovered_csv(&data.omegas, &fields).as_bytes())?;
    let p = true_responses(scene)?;
    run.write(RESPONSE_FILE, recovered_csv(&data.omegas, &p).as_bytes())?;
    let condition = condition_report(scene, Some(&recovered))?;
    geometry_warning(run, &condition.geometry);
    run.write_json("condition.json", &condition)?;

    let true_image = migrate_broadband(scene, &p, scene.window())?;
    let recovered_image = migrate_broadband(scene, &fields, scene.window())?;
    write_image(run, "image_true", &true_image)?;
    write_image(run, "image_recovered", &recovered_image)?;
    run.write(
        "side_by_side.pgm",
        side_by_side_pgm(&[&true_image, &recovered_image], 3)?.as_bytes(),
    )?;

    let band_residual = band_linearization_residual(scene)?;
    let point_baseline = band_linearization_residual(&preset_scene(PresetCase::Point))?;
    let report = ExperimentReport {
        case: case.name(),
        scene_hash: scene.hash(),
        true_image: image_report(&true_image, scene, None)?,
        recovered_image: image_report(&recovered_image, scene, Some(&true_image))?,
        linearization: Linearization {
            band_residual,
            point_baseline,
            ratio_to_baseline: band_residual / point_baseline,
        },
        geometry: condition.geometry,
        stochastic,
    };
    run.write_json("metrics.json", &report)
}

fn condition_study(run: &mut Run, scene: &Scene) -> CliResult<()> {
    let two = scene.with_dimension(Dimension::Two)?;
    let limit = condition_limit_2d(&two);
    let top = scene.band().omega_max();
    let mut csv = String::from("freq_hz,omega_rad_s,cond_2d,cond_3d,limit_2d\n");
    for i in 0..SWEEP_POINTS {
        let w = top * 10f64.powf(-SWEEP_DECADES * (1.0 - i as f64 / (SWEEP_POINTS - 1) as f64));
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            w / (2.0 * PI),
            w,
            condition_number(&two, w)?,
            condition_number(scene, w)?,
            limit
        ));
    }
    run.write("condition_study.csv", csv.as_bytes())
}

#[derive(Serialize)]
struct SpuriousStudy {
    nominal: SpuriousReport,
    doubled_band: SpuriousReport,
    nonincreasing: bool,
}

fn spurious_study(run: &mut Run, scene: &Scene) -> CliResult<()> {
    let nominal = spurious_term_image(scene)?;
    let doubled = spurious_term_image(&scene.with_band(scene.band().scaled(2.0)?)?)?;
    if let Some(w) = &nominal.warning {
        run.warn(w.clone());
    }
    let study = SpuriousStudy {
        nonincreasing: doubled.ratio <= nominal.ratio,
        nominal,
        doubled_band: doubled,
    };
    run.write_json("spurious.json", &study)
}
