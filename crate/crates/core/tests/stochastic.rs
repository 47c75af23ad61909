mod common;

use std::f64::consts::PI;

use phaseless_core::forward::{total_field, unit_intensity_data, IlluminationKind};
use phaseless_core::scene::{FrequencyGrid, PointScatterer, Scene};
use phaseless_core::specfun::Dimension;
use phaseless_core::stochastic::{
    clean_power_data, noisy_power_data, sample_illumination, sample_with_power, scaled_noise,
    time_domain_autocorr_oracle, PowerSpectrum,
};
use phaseless_core::{Complex64, Error, Point};

const DRAWS: u64 = 100_000;

fn small_scene() -> Scene {
    let rx = (0..4).map(|i| Point::planar(0.0, -0.3 + 0.2 * i as f64)).collect();
    let sc = vec![PointScatterer {
        position: Point::planar(10.0, 0.2),
        reflectivity: 0.05,
    }];
    let band = FrequencyGrid::new(0.8, 1.2, 5).unwrap();
    common::scene(Dimension::Three, rx, Point::planar(-1.0, -1.5), sc, band, 1.0)
}

fn acoustic_scene() -> Scene {
    let band = FrequencyGrid::new(700.0, 1300.0, 25).unwrap();
    common::scene(
        Dimension::Three,
        vec![Point::planar(1.0, 0.0)],
        Point::planar(0.0, 0.0),
        vec![],
        band,
        343.0,
    )
}

#[test]
fn second_moment_matches_the_spectrum() {
    let s = PowerSpectrum::reference();
    let grid = FrequencyGrid::new(580e12, 600e12, 3).unwrap();
    let centre = grid
        .samples()
        .iter()
        .position(|&w| (w - s.omega0()).abs() < 1e-3 * s.omega0());
    let centre = centre.expect("grid contains the central frequency");
    let power: Vec<f64> = grid.samples().iter().map(|&w| 2.0 * PI * s.eval(w)).collect();
    let mut second = [0.0; 3];
    let mut first = [Complex64::new(0.0, 0.0); 3];
    let mut pseudo = [Complex64::new(0.0, 0.0); 3];
    for seed in 0..DRAWS {
        let d = sample_illumination(&s, &grid, seed);
        for i in 0..3 {
            second[i] += d.fhat[i].norm_sqr();
            first[i] += d.fhat[i];
            pseudo[i] += d.fhat[i] * d.fhat[i];
        }
    }
    let n = DRAWS as f64;
    let ratio = second[centre] / n / (2.0 * PI * s.t_c());
    assert!((0.99..=1.01).contains(&ratio), "{ratio}");
    for i in 0..3 {
        assert!((second[i] / n / power[i] - 1.0).abs() < 0.01);
        assert!(first[i].norm() / n < 0.01 * power[i].sqrt());
        // Circular symmetry: E f̂² = 0.
        assert!(pseudo[i].norm() / n < 0.02 * power[i]);
    }
}

#[test]
fn distinct_frequencies_are_uncorrelated() {
    let power = [1.0, 3.0, 0.5];
    let omegas = [1.0, 2.0, 3.0];
    let mut cross = [Complex64::new(0.0, 0.0); 3];
    let mut modulus = [0.0; 3];
    for seed in 0..DRAWS {
        let d = sample_with_power(&omegas, &power, seed);
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            cross[k] += d.fhat[i].conj() * d.fhat[j];
            modulus[k] += (d.fhat[i].norm_sqr() - power[i]) * (d.fhat[j].norm_sqr() - power[j]);
        }
    }
    let n = DRAWS as f64;
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        let scale = (power[i] * power[j]).sqrt();
        assert!(cross[k].norm() / n / scale < 0.01, "pair {k}");
        assert!((modulus[k] / n / (power[i] * power[j])).abs() < 0.01, "pair {k}");
    }
}

#[test]
fn zero_power_gives_zero_samples() {
    let d = sample_with_power(&[1.0, 2.0], &[0.0, 0.0], 7);
    assert!(d.fhat.iter().all(|f| *f == Complex64::new(0.0, 0.0)));
}

#[test]
fn draws_are_reproducible() {
    let s = PowerSpectrum::reference();
    let grid = FrequencyGrid::new(430e12, 750e12, 100).unwrap();
    assert_eq!(sample_illumination(&s, &grid, 42), sample_illumination(&s, &grid, 42));
    assert_ne!(
        sample_illumination(&s, &grid, 42).fhat,
        sample_illumination(&s, &grid, 43).fhat
    );
    // Extending the grid does not disturb the samples already drawn.
    let omegas = grid.samples();
    let power = vec![1.0; 100];
    let short = sample_with_power(&omegas[..50], &power[..50], 5);
    let long = sample_with_power(&omegas, &power, 5);
    assert_eq!(short.fhat[..], long.fhat[..50]);
}

#[test]
fn clean_data_factorizes() {
    let scene = small_scene();
    let s = PowerSpectrum::fitted_to_band(scene.band()).unwrap();
    let draw = sample_illumination(&s, scene.band(), 3);
    let clean = clean_power_data(&scene, &draw).unwrap();
    let unit = unit_intensity_data(&scene).unwrap();
    assert_eq!(clean.kind, IlluminationKind::TwoPiFhat);
    assert_eq!(clean.illumination, draw.twopi_fhat);
    for (i, (row, base)) in clean.rows.iter().zip(&unit.rows).enumerate() {
        for (v, b) in row.iter().zip(base) {
            assert!(*v >= 0.0);
            let expect = draw.fhat[i].norm_sqr() * b;
            assert!((v - expect).abs() <= 1e-14 * expect);
        }
    }
}

#[test]
fn zero_sample_gives_zero_row() {
    let scene = small_scene();
    let omegas = scene.band().samples();
    let mut draw = sample_with_power(&omegas, &[1.0; 5], 1);
    draw.fhat[2] = Complex64::new(0.0, 0.0);
    let clean = clean_power_data(&scene, &draw).unwrap();
    assert!(clean.rows[2].iter().all(|&v| v == 0.0));
}

#[test]
fn clean_data_expectation() {
    // A single row at 10³ draws: the relative standard error is about 3.2%.
    let scene = small_scene();
    let s = PowerSpectrum::fitted_to_band(scene.band()).unwrap();
    let i = 2;
    let w = scene.band().omega(i);
    let u = total_field(&scene, w).unwrap();
    let mut mean = vec![0.0; scene.receiver_count()];
    for seed in 0..1000 {
        let d = clean_power_data(&scene, &sample_illumination(&s, scene.band(), seed)).unwrap();
        for (m, v) in mean.iter_mut().zip(&d.rows[i]) {
            *m += v / 1000.0;
        }
    }
    for (m, u) in mean.iter().zip(&u.values) {
        let expect = 2.0 * PI * s.eval(w) * u.norm_sqr();
        assert!((m / expect - 1.0).abs() < 0.05, "{}", m / expect);
    }
}

#[test]
fn noise_ratio_is_exact() {
    let scene = small_scene();
    let s = PowerSpectrum::fitted_to_band(scene.band()).unwrap();
    let draw = sample_illumination(&s, scene.band(), 11);
    let eta = scaled_noise(&scene, &draw, 0.1, 12).unwrap();
    let fields: Vec<Vec<Complex64>> = draw
        .omegas
        .iter()
        .zip(&draw.fhat)
        .map(|(&w, f)| total_field(&scene, w).unwrap().values.iter().map(|u| u * f).collect())
        .collect();
    for r in 0..scene.receiver_count() {
        let signal: f64 = fields.iter().map(|row| row[r].norm_sqr()).sum();
        let noise: f64 = eta.iter().map(|row| row[r].norm_sqr()).sum();
        assert!((noise / signal - 0.1).abs() < 1e-13);
    }
    let noisy = noisy_power_data(&scene, &draw, 0.1, 12).unwrap();
    for (i, row) in noisy.rows.iter().enumerate() {
        for (r, v) in row.iter().enumerate() {
            let expect = (fields[i][r] + eta[i][r]).norm_sqr();
            assert!((v - expect).abs() <= 1e-14 * expect);
        }
    }
    assert_eq!(
        noisy_power_data(&scene, &draw, 0.0, 12).unwrap(),
        clean_power_data(&scene, &draw).unwrap()
    );
    assert!(matches!(
        noisy_power_data(&scene, &draw, -0.1, 12),
        Err(Error::Validation(_))
    ));
}

#[test]
fn zero_signal_cannot_be_scaled() {
    let scene = small_scene();
    let draw = sample_with_power(&scene.band().samples(), &[0.0; 5], 1);
    assert!(matches!(
        scaled_noise(&scene, &draw, 0.1, 2),
        Err(Error::DivisionByZero(_))
    ));
}

#[test]
fn wrong_grid_is_a_mismatch() {
    let scene = small_scene();
    let draw = sample_with_power(&[1.0, 2.0], &[1.0, 1.0], 1);
    assert!(matches!(clean_power_data(&scene, &draw), Err(Error::Mismatch(_))));
}

#[test]
fn inverse_transform_is_hermitian() {
    // F(τ) = (1/2π) ∫ F̂(ω) e^{−iωτ} dω by the trapezoid rule on a wide grid.
    let s = PowerSpectrum::new(10.0, 1.0).unwrap();
    let n = 8001;
    let (lo, hi) = (s.omega0() - 40.0, s.omega0() + 40.0);
    let h = (hi - lo) / (n - 1) as f64;
    let invert = |tau: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let w = lo + j as f64 * h;
            let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += Complex64::from_polar(weight * s.eval(w), -w * tau);
        }
        acc * h / (2.0 * PI)
    };
    for tau in [0.0, 0.1, 0.37, 0.8, 1.5] {
        let plus = invert(tau);
        let minus = invert(-tau);
        assert!((plus - minus.conj()).norm() < 1e-12);
        assert!((plus - s.autocorrelation(tau)).norm() < 1e-10, "{tau}");
        assert!((plus.re - minus.re).abs() < 1e-12);
    }
    assert!((invert(0.0).re - 1.0).abs() < 1e-12);
}

#[test]
fn effective_band_of_the_reference_spectrum() {
    let s = PowerSpectrum::reference();
    for f_thz in (0..=2000).map(|i| i as f64) {
        let w = 2.0 * PI * f_thz * 1e12;
        assert!(s.eval(w) >= 0.0);
        if !(430.0..=750.0).contains(&f_thz) {
            assert!(s.eval(w) < 1e-3 * s.t_c(), "{f_thz} THz");
        }
    }
    assert!(PowerSpectrum::new(1.0, 0.0).is_err());
}

#[test]
fn zero_lag_is_the_mean_power() {
    let scene = acoustic_scene();
    let s = PowerSpectrum::new(2.0 * PI * 1000.0, 4e-3).unwrap();
    let a = time_domain_autocorr_oracle(&scene, &s, 0.25, 1e-4, 9).unwrap();
    for (z, m) in a.zero_lag.iter().zip(&a.mean_power) {
        assert!((z - m).abs() <= 1e-12 * m);
    }
    assert_eq!(a.omegas, scene.band().samples());
    assert!(a.max_lag >= 4.0 * s.t_c());
}

#[test]
fn oracle_approaches_the_closed_form() {
    // No scatterer, one receiver: ψ̂ → F̂ |G0|².
    let scene = acoustic_scene();
    let s = PowerSpectrum::new(2.0 * PI * 1000.0, 4e-3).unwrap();
    let err = |t: f64| {
        let mut total = 0.0;
        for seed in 0..8 {
            let a = time_domain_autocorr_oracle(&scene, &s, t, 1e-4, seed).unwrap();
            let peak = a.expected.iter().map(|r| r[0]).fold(0.0, f64::max);
            let rms = a
                .psi_hat
                .iter()
                .zip(&a.expected)
                .map(|(p, e)| (p[0] - e[0]).norm_sqr())
                .sum::<f64>()
                / a.omegas.len() as f64;
            total += rms.sqrt() / peak;
        }
        total / 8.0
    };
    let (short, long) = (err(0.25), err(2.0));
    assert!(long < short, "{short} {long}");
    assert!(long < 0.1, "{long}");
}

#[test]
fn coarse_step_is_rejected() {
    let scene = acoustic_scene();
    let s = PowerSpectrum::new(2.0 * PI * 1000.0, 4e-3).unwrap();
    assert!(matches!(
        time_domain_autocorr_oracle(&scene, &s, 0.1, 1e-3, 1),
        Err(Error::Aliasing(_))
    ));
}
