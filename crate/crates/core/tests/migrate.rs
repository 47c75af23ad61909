mod common;

use phaseless_core::forward::{array_response, direct_arrivals, FieldRole, FieldVector};
use phaseless_core::migrate::{
    image_correlation, image_csv, image_metrics, local_maxima, migrate_broadband, migrate_single, parse_image_csv,
    spurious_term_image, true_responses,
};
use phaseless_core::recover::recover_ptilde;
use phaseless_core::scene::{preset_scene, FrequencyGrid, PointScatterer, PresetCase, Scene};
use phaseless_core::specfun::{green0, Dimension};
use phaseless_core::{Complex64, Point};
use proptest::prelude::*;

fn array() -> Vec<Point> {
    (0..9).map(|i| Point::planar(0.0, -0.8 + 0.2 * i as f64)).collect()
}

fn small(dim: Dimension, scatterers: Vec<PointScatterer>) -> Scene {
    let band = FrequencyGrid::new(3.0, 6.0, 7).unwrap();
    common::scene(dim, array(), Point::planar(-1.0, -1.5), scatterers, band, 1.0)
}

fn target() -> Vec<PointScatterer> {
    vec![PointScatterer {
        position: Point::planar(10.1, -0.2),
        reflectivity: 0.01,
    }]
}

fn complex_field(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

/// Recovers from linearized data `fhat_sq · Re(conj(g0)(g0 + 2p))`.
fn recovered_from_linearized(scene: &Scene, fhat_sq: f64) -> Vec<FieldVector> {
    scene
        .band()
        .samples()
        .iter()
        .map(|&w| {
            let g0 = direct_arrivals(scene, w).unwrap();
            let p = array_response(scene, w).unwrap();
            let d: Vec<f64> = g0
                .values
                .iter()
                .zip(&p.values)
                .map(|(g, p)| fhat_sq * (g.conj() * (g + 2.0 * p)).re)
                .collect();
            recover_ptilde(&g0, &d, fhat_sq, w).unwrap().field
        })
        .collect()
}

#[test]
fn one_receiver_is_a_product() {
    let band = FrequencyGrid::new(1.0, 2.0, 2).unwrap();
    let xr = Point::planar(0.0, 0.3);
    let xs = Point::planar(-0.5, 0.0);
    let s = common::scene(Dimension::Three, vec![xr], xs, vec![], band, 1.0);
    let f = Complex64::new(0.25, -2.0);
    let w = 9.0;
    let img = migrate_single(&s, &FieldVector::new(FieldRole::Other, vec![f]), w, s.window()).unwrap();
    for (y, v) in s.window().points().iter().zip(&img.values) {
        let expect = green0(&xs, y, w, 1.0, Dimension::Three).unwrap().conj()
            * green0(&xr, y, w, 1.0, Dimension::Three).unwrap().conj()
            * f;
        assert!((v - expect).norm() <= 1e-14 * expect.norm());
    }
}

#[test]
fn single_sample_band_is_a_single_frequency_image() {
    for dim in [Dimension::Two, Dimension::Three] {
        let band = FrequencyGrid::new(4.0, 4.0, 1).unwrap();
        let s = small(dim, target()).with_band(band).unwrap();
        let w = band.omega(0);
        let p = array_response(&s, w).unwrap();
        let broad = migrate_broadband(&s, std::slice::from_ref(&p), s.window()).unwrap();
        let single = migrate_single(&s, &p, w, s.window()).unwrap();
        for (a, b) in broad.values.iter().zip(&single.values) {
            assert!((a - b * band.delta_omega()).norm() <= 1e-14 * b.norm());
        }
    }
}

#[test]
fn zero_fields_give_zero_image() {
    let s = small(Dimension::Two, vec![]);
    let zeros = vec![FieldVector::zeros(FieldRole::Other, 9); 7];
    let img = migrate_broadband(&s, &zeros, s.window()).unwrap();
    assert_eq!(img.max_abs(), 0.0);
    assert!(migrate_broadband(&s, &zeros[..3], s.window()).is_err());
}

#[test]
fn decomposition_identity_on_linearized_recoveries() {
    for dim in [Dimension::Two, Dimension::Three] {
        let s = small(dim, target());
        let ptilde = recovered_from_linearized(&s, 1.0);
        let p = true_responses(&s).unwrap();
        let spurious: Vec<FieldVector> = s
            .band()
            .samples()
            .iter()
            .zip(&p)
            .map(|(&w, p)| {
                let g0 = direct_arrivals(&s, w).unwrap();
                let v = g0
                    .values
                    .iter()
                    .zip(&p.values)
                    .map(|(g, p)| g / g.conj() * p.conj())
                    .collect();
                FieldVector::new(FieldRole::Other, v)
            })
            .collect();
        let a = migrate_broadband(&s, &ptilde, s.window()).unwrap();
        let b = migrate_broadband(&s, &p, s.window()).unwrap();
        let c = migrate_broadband(&s, &spurious, s.window()).unwrap();
        let scale = a.max_abs();
        for ((a, b), c) in a.values.iter().zip(&b.values).zip(&c.values) {
            // p̃ is formed as a difference of O(|g0|) terms, so the roundoff
            // scale is set by g0 rather than p.
            assert!((a - (b + c)).norm() <= 1e-10 * scale, "{dim:?}");
        }
    }
}

#[test]
fn scaling_the_illumination_changes_nothing() {
    let s = small(Dimension::Three, target());
    let base = migrate_broadband(&s, &recovered_from_linearized(&s, 1.0), s.window()).unwrap();
    for c in [1e-6, 3.7, 1e8] {
        let scaled = migrate_broadband(&s, &recovered_from_linearized(&s, c), s.window()).unwrap();
        assert_eq!(scaled.peak(), base.peak());
        let corr = image_correlation(&scaled, &base).unwrap().unwrap();
        assert!((corr - 1.0).abs() < 1e-9);
        let (ma, mb) = (image_metrics(&scaled, &s), image_metrics(&base, &s));
        assert_eq!(ma.peak_cell, mb.peak_cell);
        for (x, y) in [
            (ma.crossrange_fwhm_m, mb.crossrange_fwhm_m),
            (ma.range_fwhm_m, mb.range_fwhm_m),
        ] {
            match (x, y) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-6 * y),
                (x, y) => assert_eq!(x, y),
            }
        }
    }
}

#[test]
fn self_correlation_is_one() {
    let s = small(Dimension::Three, target());
    let img = migrate_broadband(&s, &true_responses(&s).unwrap(), s.window()).unwrap();
    assert!((image_correlation(&img, &img).unwrap().unwrap() - 1.0).abs() < 1e-15);
    let m = image_metrics(&img, &s);
    if let Some(w) = m.crossrange_fwhm_m {
        assert!(w >= s.window().spacing);
    }
    if let Some(w) = m.range_fwhm_m {
        assert!(w >= s.window().spacing);
    }
}

#[test]
fn no_scatterers_spurious_report_is_degenerate() {
    let s = small(Dimension::Three, vec![]);
    let r = spurious_term_image(&s).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.ratio, 0.0);
    assert!(r.geometry.ok);
    assert!(r.warning.is_none());
}

#[test]
fn breakdown_d_report_carries_a_warning() {
    let s = preset_scene(PresetCase::BreakdownD)
        .with_band(FrequencyGrid::new(430e12, 750e12, 3).unwrap())
        .unwrap();
    let r = spurious_term_image(&s).unwrap();
    assert!(!r.geometry.ok);
    assert!(r.warning.is_some());
}

#[test]
fn point_preset_image_csv_round_trip() {
    let s = preset_scene(PresetCase::Point);
    let img = migrate_broadband(&s, &true_responses(&s).unwrap(), s.window()).unwrap();
    let text = image_csv(&img);
    let rows = parse_image_csv(&text).unwrap();
    assert_eq!(rows.len(), img.values.len());
    for (row, v) in rows.iter().zip(&img.values) {
        assert_eq!(row.value, *v);
        assert_eq!(row.abs, v.norm());
    }
    let (px, py) = img.peak().unwrap();
    assert_eq!((px, py), (25, 25));
    assert_eq!(local_maxima(&img, 0.9)[0].0, 25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn migration_is_linear(
        p in complex_field(9),
        q in complex_field(9),
        (a, b) in (-3.0..3.0f64, -3.0..3.0f64),
        w in 1.0..8.0f64,
        two in any::<bool>(),
    ) {
        let s = small(if two { Dimension::Two } else { Dimension::Three }, vec![]);
        let combo: Vec<Complex64> = p.iter().zip(&q).map(|(p, q)| p * a + q * b).collect();
        let img = |v: Vec<Complex64>| migrate_single(&s, &FieldVector::new(FieldRole::Other, v), w, s.window()).unwrap();
        let (ip, iq, ic) = (img(p), img(q), img(combo));
        let scale = ip.max_abs() * a.abs() + iq.max_abs() * b.abs();
        for ((x, y), z) in ip.values.iter().zip(&iq.values).zip(&ic.values) {
            prop_assert!((x * a + y * b - z).norm() <= 1e-13 * scale.max(1e-300));
        }
    }

    #[test]
    fn matched_filter_wins_at_its_cell(
        cell in (0usize..7, 0usize..7),
        other in complex_field(9),
        w in 1.0..8.0f64,
        two in any::<bool>(),
    ) {
        let dim = if two { Dimension::Two } else { Dimension::Three };
        let s = small(dim, vec![]);
        let y0 = s.window().position(cell.0, cell.1);
        let g: Vec<Complex64> = s.receivers().iter().map(|x| green0(x, &y0, w, 1.0, dim).unwrap()).collect();
        let matched = migrate_single(&s, &FieldVector::new(FieldRole::Other, g.clone()), w, s.window()).unwrap();
        let at = matched.value(cell.0, cell.1).norm();
        let gs = green0(&s.source(), &y0, w, 1.0, dim).unwrap().norm();
        let energy: f64 = g.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((at - gs * energy).abs() <= 1e-12 * at);

        let norm_other: f64 = other.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm_other > 1e-6);
        let rescaled: Vec<Complex64> = other.iter().map(|v| v * (energy.sqrt() / norm_other)).collect();
        let rival = migrate_single(&s, &FieldVector::new(FieldRole::Other, rescaled), w, s.window()).unwrap();
        prop_assert!(rival.value(cell.0, cell.1).norm() <= at * (1.0 + 1e-12));
    }
}
