//! Stochastic illumination by a stationary Gaussian source.
//!
//! The source autocorrelation is `F(τ) = exp(−iω0τ − πτ²/t_c²)`, whose power
//! spectrum is `F̂(ω) = t_c exp(−(ω − ω0)² t_c² / (4π))`. Frequency samples
//! of the source are independent circular complex Gaussians with
//! `E|f̂(ω_i)|² = 2π F̂(ω_i)`.
//!
//! Every random number comes from a ChaCha8 stream keyed by the user seed
//! and a domain tag, with the stream number set from the (frequency,
//! receiver) pair. Samples therefore do not depend on evaluation order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::forward::{total_field, IlluminationKind, IntensityData};
use crate::scene::{FrequencyGrid, Scene};

const ILLUMINATION: u64 = 1;
const NOISE: u64 = 2;
const TIME_DOMAIN: u64 = 3;

/// Relative level of `F̂` at the band edges used by
/// [`PowerSpectrum::fitted_to_band`].
pub const BAND_EDGE_LEVEL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerSpectrum {
    omega0: f64,
    t_c: f64,
}

impl PowerSpectrum {
    pub fn new(omega0: f64, t_c: f64) -> Result<Self> {
        if !(t_c > 0.0) || !t_c.is_finite() {
            return Err(Error::Validation(format!(
                "correlation time must be positive, got {t_c}"
            )));
        }
        if !omega0.is_finite() {
            return Err(Error::Validation("central frequency must be finite".into()));
        }
        Ok(PowerSpectrum { omega0, t_c })
    }

    /// Centered at 590 THz with `t_c = 15 fs`: the spectrum falls to about
    /// `1e-8 t_c` at 430 and 750 THz.
    pub fn reference() -> Self {
        PowerSpectrum {
            omega0: 2.0 * PI * 590e12,
            t_c: 1.5e-14,
        }
    }

    /// Centered on the band, with `t_c` chosen so that `F̂` drops to
    /// [`BAND_EDGE_LEVEL`]` · t_c` at the band edges.
    pub fn fitted_to_band(grid: &FrequencyGrid) -> Result<Self> {
        let half = 0.5 * (grid.omega_max() - grid.omega_min());
        if !(half > 0.0) {
            return Err(Error::Validation(
                "cannot fit a power spectrum to a single-frequency band".into(),
            ));
        }
        let t_c = (4.0 * PI * (1.0 / BAND_EDGE_LEVEL).ln()).sqrt() / half;
        PowerSpectrum::new(grid.omega_center(), t_c)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    /// `F̂(ω)`.
    pub fn eval(&self, omega: f64) -> f64 {
        let x = (omega - self.omega0) * self.t_c;
        self.t_c * (-x * x / (4.0 * PI)).exp()
    }

    /// `F(τ)`, the inverse transform of `F̂`.
    pub fn autocorrelation(&self, tau: f64) -> Complex64 {
        let s = tau / self.t_c;
        Complex64::from_polar((-PI * s * s).exp(), -self.omega0 * tau)
    }

    /// Frequency beyond which `F̂ < 1e-12 t_c`.
    pub fn effective_omega_max(&self) -> f64 {
        self.omega0 + (4.0 * PI * 1e12f64.ln()).sqrt() / self.t_c
    }
}

/// One realization of the source spectrum on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticDraw {
    pub seed: u64,
    pub omegas: Vec<f64>,
    pub fhat: Vec<Complex64>,
    /// `2π F̂(ω_i)`, the expected value of `|f̂(ω_i)|²`.
    pub twopi_fhat: Vec<f64>,
}

fn stream_rng(seed: u64, tag: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

fn stream_id(freq: usize, receiver: usize) -> u64 {
    ((freq as u64) << 32) | receiver as u64
}

/// Circular complex Gaussian with `E|z|² = power`.
fn complex_gaussian(rng: &mut ChaCha8Rng, power: f64) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b) * (0.5 * power).sqrt()
}

pub fn sample_illumination(spectrum: &PowerSpectrum, grid: &FrequencyGrid, seed: u64) -> StochasticDraw {
    let omegas = grid.samples();
    let power: Vec<f64> = omegas.iter().map(|&w| 2.0 * PI * spectrum.eval(w)).collect();
    sample_with_power(&omegas, &power, seed)
}

/// Draws `f̂(ω_i)` with prescribed second moments `power[i]`.
pub fn sample_with_power(omegas: &[f64], power: &[f64], seed: u64) -> StochasticDraw {
    assert_eq!(omegas.len(), power.len(), "one power value per frequency");
    let fhat = power
        .iter()
        .enumerate()
        .map(|(i, &p)| complex_gaussian(&mut stream_rng(seed, ILLUMINATION, stream_id(i, 0)), p))
        .collect();
    StochasticDraw {
        seed,
        omegas: omegas.to_vec(),
        fhat,
        twopi_fhat: power.to_vec(),
    }
}

fn check_draw(scene: &Scene, draw: &StochasticDraw) -> Result<Vec<f64>> {
    let grid = scene.band().samples();
    let same =
        grid.len() == draw.omegas.len() && grid.iter().zip(&draw.omegas).all(|(a, b)| (a - b).abs() <= 1e-12 * a);
    if !same || draw.fhat.len() != grid.len() || draw.twopi_fhat.len() != grid.len() {
        return Err(Error::Mismatch(
            "illumination draw was sampled on a different frequency grid".into(),
        ));
    }
    Ok(grid)
}

/// Total field times the source sample, `(g0 + p) f̂(ω_i)`, per frequency.
fn illuminated_fields(scene: &Scene, draw: &StochasticDraw) -> Result<Vec<Vec<Complex64>>> {
    let grid = check_draw(scene, draw)?;
    grid.par_iter()
        .zip(&draw.fhat)
        .map(|(&w, &f)| Ok(total_field(scene, w)?.values.iter().map(|u| u * f).collect()))
        .collect()
}

/// Power-spectrum data `|(g0 + p) f̂(ω_i)|²`.
pub fn clean_power_data(scene: &Scene, draw: &StochasticDraw) -> Result<IntensityData> {
    let fields = illuminated_fields(scene, draw)?;
    Ok(IntensityData {
        omegas: draw.omegas.clone(),
        rows: fields
            .iter()
            .map(|row| row.iter().map(|u| u.norm_sqr()).collect())
            .collect(),
        illumination: draw.twopi_fhat.clone(),
        kind: IlluminationKind::TwoPiFhat,
    })
}

/// Receiver noise `η̂_r(ω_i)` shaped like the source spectrum and scaled so
/// that each receiver's noise power is `noise_fraction` times its signal
/// power, summed over the band. Indexed `[frequency][receiver]`.
pub fn scaled_noise(
    scene: &Scene,
    draw: &StochasticDraw,
    noise_fraction: f64,
    seed: u64,
) -> Result<Vec<Vec<Complex64>>> {
    if !(noise_fraction >= 0.0) || !noise_fraction.is_finite() {
        return Err(Error::Validation(format!(
            "noise fraction must be nonnegative, got {noise_fraction}"
        )));
    }
    let fields = illuminated_fields(scene, draw)?;
    noise_for(&fields, &draw.twopi_fhat, noise_fraction, seed)
}

fn noise_for(fields: &[Vec<Complex64>], shape: &[f64], noise_fraction: f64, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let nf = fields.len();
    let n = fields.first().map_or(0, Vec::len);
    let mut eta: Vec<Vec<Complex64>> = (0..nf)
        .map(|i| {
            (0..n)
                .map(|r| complex_gaussian(&mut stream_rng(seed, NOISE, stream_id(i, r)), shape[i]))
                .collect()
        })
        .collect();
    for r in 0..n {
        let signal: f64 = fields.iter().map(|row| row[r].norm_sqr()).sum();
        let noise: f64 = eta.iter().map(|row| row[r].norm_sqr()).sum();
        if signal == 0.0 || noise == 0.0 {
            return Err(Error::DivisionByZero(format!(
                "receiver {r} has zero {} power; cannot scale noise",
                if signal == 0.0 { "signal" } else { "noise" }
            )));
        }
        let scale = (noise_fraction * signal / noise).sqrt();
        for row in eta.iter_mut() {
            row[r] *= scale;
        }
    }
    Ok(eta)
}

/// Power-spectrum data with additive receiver noise,
/// `|(g0 + p) f̂(ω_i) + η̂(ω_i)|²`.
pub fn noisy_power_data(scene: &Scene, draw: &StochasticDraw, noise_fraction: f64, seed: u64) -> Result<IntensityData> {
    if noise_fraction == 0.0 {
        return clean_power_data(scene, draw);
    }
    if !(noise_fraction > 0.0) || !noise_fraction.is_finite() {
        return Err(Error::Validation(format!(
            "noise fraction must be nonnegative, got {noise_fraction}"
        )));
    }
    let fields = illuminated_fields(scene, draw)?;
    let eta = noise_for(&fields, &draw.twopi_fhat, noise_fraction, seed)?;
    Ok(IntensityData {
        omegas: draw.omegas.clone(),
        rows: fields
            .iter()
            .zip(&eta)
            .map(|(u, e)| u.iter().zip(e).map(|(u, e)| (u + e).norm_sqr()).collect())
            .collect(),
        illumination: draw.twopi_fhat.clone(),
        kind: IlluminationKind::TwoPiFhat,
    })
}

/// Empirical autocorrelation spectra from simulated time traces, with the
/// ergodic limit they should approach.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrSpectra {
    pub omegas: Vec<f64>,
    /// `ψ̂(x_r, ω_i)`, indexed `[frequency][receiver]`.
    pub psi_hat: Vec<Vec<Complex64>>,
    /// `F̂(ω_i) |g0_r + p_r|²`.
    pub expected: Vec<Vec<f64>>,
    /// `ψ(x_r, 0)`.
    pub zero_lag: Vec<f64>,
    /// Mean of `|u(x_r, t)|²` over the acquisition window.
    pub mean_power: Vec<f64>,
    /// Largest lag kept in the transform, seconds.
    pub max_lag: f64,
}

/// Simulates time traces `u(x_r, t)` for `t ∈ [−T, T]` on a grid of step
/// `dt`, forms the empirical autocorrelations
/// `ψ(τ) = (1/2T) ∫ conj(u(t)) u(t + τ) dt` for lags up to a few correlation
/// times plus the largest path delay, and transforms them back to the scene
/// band. Only practical at modest `ω0 · T`.
pub fn time_domain_autocorr_oracle(
    scene: &Scene,
    spectrum: &PowerSpectrum,
    acquisition_time: f64,
    dt: f64,
    seed: u64,
) -> Result<AutocorrSpectra> {
    if !(dt > 0.0) || !(acquisition_time > 0.0) {
        return Err(Error::Validation("acquisition time and step must be positive".into()));
    }
    let w_eff = spectrum.effective_omega_max().max(scene.band().omega_max());
    if dt > PI / w_eff {
        return Err(Error::Aliasing(format!(
            "step {dt} s cannot represent {w_eff} rad/s; need dt <= {}",
            PI / w_eff
        )));
    }

    let xs = scene.source();
    let delays: Vec<f64> = scene
        .scatterers()
        .iter()
        .flat_map(|s| {
            let d_s = s.position.dist(&xs);
            scene.receivers().iter().map(move |r| d_s + s.position.dist(r))
        })
        .chain(scene.receivers().iter().map(|r| r.dist(&xs)))
        .collect();
    let spread = if delays.is_empty() {
        0.0
    } else {
        let lo = delays.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = delays.iter().copied().fold(0.0, f64::max);
        (hi - lo) / scene.c0()
    };
    let lags = ((4.0 * spectrum.t_c() + spread) / dt).ceil() as usize;
    let samples = (2.0 * acquisition_time / dt).round() as usize;
    if samples == 0 {
        return Err(Error::Validation("acquisition window holds no samples".into()));
    }
    let m = (samples + 2 * lags + 1).next_power_of_two();
    let period = m as f64 * dt;
    let n = scene.receiver_count();

    // Spectrum of the traces on the periodic grid, ω_j = 2π j / period.
    let mut spectra = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    let floor = 1e-30 * spectrum.t_c();
    #[allow(clippy::needless_range_loop)]
    for j in 1..m / 2 {
        let w = 2.0 * PI * j as f64 / period;
        let fhat_power = spectrum.eval(w);
        if fhat_power < floor {
            continue;
        }
        let f = complex_gaussian(&mut stream_rng(seed, TIME_DOMAIN, j as u64), period * fhat_power);
        let g = total_field(scene, w)?;
        for (r, gr) in g.values.iter().enumerate() {
            spectra[r][j] = gr * f / period;
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    for s in spectra.iter_mut() {
        fft.process(s);
    }

    let omegas = scene.band().samples();
    let mut psi_hat = vec![vec![Complex64::new(0.0, 0.0); n]; omegas.len()];
    let mut zero_lag = vec![0.0; n];
    let mut mean_power = vec![0.0; n];
    for (r, u) in spectra.iter().enumerate() {
        // Acquisition window occupies u[lags .. lags + samples].
        let window = &u[lags..lags + samples];
        mean_power[r] = window.iter().map(|v| v.norm_sqr()).sum::<f64>() / samples as f64;
        let psi = |shift: isize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, v) in window.iter().enumerate() {
                let idx = (lags + t) as isize + shift;
                acc += v.conj() * u[idx as usize];
            }
            acc / samples as f64
        };
        let psis: Vec<Complex64> = (-(lags as isize)..=lags as isize).map(psi).collect();
        zero_lag[r] = psis[lags].re;
        for (i, &w) in omegas.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (q, p) in psis.iter().enumerate() {
                let tau = (q as f64 - lags as f64) * dt;
                acc += p * Complex64::from_polar(1.0, w * tau);
            }
            psi_hat[i][r] = acc * dt;
        }
    }

    let expected = omegas
        .iter()
        .map(|&w| {
            let fw = spectrum.eval(w);
            Ok(total_field(scene, w)?
                .values
                .iter()
                .map(|g| fw * g.norm_sqr())
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    Ok(AutocorrSpectra {
        omegas,
        psi_hat,
        expected,
        zero_lag,
        mean_power,
        max_lag: lags as f64 * dt,
    })
}
