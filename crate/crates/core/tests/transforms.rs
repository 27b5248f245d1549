use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearsr::ffst::{detect_slope, Band, Cone, ShearletCoefficients, ShearletSystem};
use shearsr::image::{centered, gen_half_plane};
use shearsr::spectral::{dft2, idft2};
use shearsr::wavelet::{dwt2, idwt2};
use shearsr::Plane;

fn random_plane(rows: usize, cols: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Plane::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

#[test]
fn filter_banks_are_tight() {
    for (m, n, j) in [
        (64, 64, 3),
        (96, 128, 3),
        (17, 23, 2),
        (256, 256, 4),
        (40, 40, 1),
    ] {
        let sys = ShearletSystem::new(m, n, j).unwrap();
        assert!(
            sys.tightness_error() <= 1e-12,
            "{m}x{n} J={j}: {}",
            sys.tightness_error()
        );
    }
}

#[test]
fn shearlet_round_trip_and_adjoint() {
    for (m, n, j) in [(17, 23, 2), (64, 64, 3), (256, 256, 4)] {
        let sys = ShearletSystem::new(m, n, j).unwrap();
        for seed in 0..3 {
            let x = random_plane(m, n, seed);
            let c = sys.analyze(&x).unwrap();
            assert!(sys.synthesize(&c).unwrap().max_abs_diff(&x) <= 1e-10);
            // frame energy equals image energy for a Parseval frame
            assert!((c.energy() - x.energy()).abs() <= 1e-10 * x.energy());

            let mut d = shearsr::ffst::ShearletCoefficients::zeros(&sys);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            for p in d.planes_mut() {
                p.data_mut()
                    .iter_mut()
                    .for_each(|v| *v = rng.random::<f64>() - 0.5);
            }
            let lhs = c.dot(&d);
            let s = sys.synthesize(&d).unwrap();
            let rhs: f64 = x.data().iter().zip(s.data()).map(|(a, b)| a * b).sum();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
                "{lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn dwt_round_trip_and_energy() {
    for size in [32, 64, 128] {
        let x = random_plane(size, size, size as u64);
        let w = dwt2(&x).unwrap();
        assert_eq!(w.approx.dims(), (size / 2, size / 2));
        assert!(idwt2(&w).unwrap().max_abs_diff(&x) <= 1e-10);
        assert!((w.energy() - x.energy()).abs() <= 1e-10 * x.energy());
    }
}

#[test]
fn horizontal_edge_lands_in_horizontal_detail() {
    let img = gen_half_plane(64, 0.0).unwrap();
    let w = dwt2(&img).unwrap();
    let [_, horizontal, diagonal] = w.details();
    assert!(horizontal.energy() >= 5.0 * diagonal.energy());
}

#[test]
fn dft_parseval_and_inverse() {
    let x = random_plane(12, 20, 4);
    let spec = dft2(&x);
    let e: f64 = spec.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / 240.0;
    assert!((e - x.energy()).abs() <= 1e-10 * x.energy());
    assert!(idft2(&spec).unwrap().max_abs_diff(&x) < 1e-12);
}

/// Positions along the edge of the half-plane `y > r x` at evenly spaced
/// columns. In each column the row within three pixels of the edge with the
/// most scale-`j` energy is taken, since the response of the even filters
/// vanishes on the discontinuity itself.
fn edge_positions(
    coeffs: &ShearletCoefficients,
    r: f64,
    scale: usize,
    count: usize,
) -> Vec<(usize, usize)> {
    let size = coeffs.dims().0;
    let bands = coeffs.scale_indices(scale);
    let energy = |row: usize, col: usize| -> f64 {
        bands
            .iter()
            .map(|&i| coeffs.planes()[i].get(row, col).powi(2))
            .sum()
    };
    let mid = (size as f64 - 1.0) / 2.0;
    (0..count)
        .map(|i| {
            let col = (mid - 50.0 + 100.0 * i as f64 / (count - 1) as f64).round() as usize;
            let (x, _) = centered(size, 0, col);
            let edge = (mid - r * x).round() as usize;
            let row = (edge - 3..=edge + 3)
                .max_by(|&a, &b| energy(a, col).total_cmp(&energy(b, col)))
                .unwrap();
            (row, col)
        })
        .collect()
}

#[test]
fn shears_localize_edge_slopes() {
    let sys = ShearletSystem::new(256, 256, 4).unwrap();
    for r in [-0.45, 0.3, 0.7] {
        let img = gen_half_plane(256, r).unwrap();
        let coeffs = sys.analyze(&img).unwrap();
        let mut consecutive = 0;
        for (row, col) in edge_positions(&coeffs, r, 3, 10) {
            let est = detect_slope(&coeffs, 3, row, col).unwrap();
            assert!(
                (est.edge_slope() - r).abs() < 2.0 / 8.0,
                "r={r} at ({row},{col}): {est:?}"
            );
            let mut mags: Vec<(f64, Cone, i64)> = coeffs
                .scale_indices(3)
                .into_iter()
                .map(|i| match coeffs.bands()[i] {
                    Band::Shear { cone, shear, .. } => {
                        (coeffs.planes()[i].get(row, col).abs(), cone, shear)
                    }
                    Band::LowPass => unreachable!(),
                })
                .collect();
            mags.sort_by(|a, b| b.0.total_cmp(&a.0));
            if mags[0].1 == mags[1].1 && (mags[0].2 - mags[1].2).abs() == 1 {
                consecutive += 1;
            }
        }
        assert!(consecutive >= 9, "r={r}: {consecutive}/10 consecutive");
    }
}

#[test]
fn detect_slope_examples() {
    let sys = ShearletSystem::new(256, 256, 4).unwrap();
    let coeffs = sys.analyze(&gen_half_plane(256, 0.3).unwrap()).unwrap();
    for (row, col) in edge_positions(&coeffs, 0.3, 2, 5) {
        let est = detect_slope(&coeffs, 2, row, col).unwrap();
        assert_eq!(
            (est.cone, est.shear, est.shear_slope),
            (Cone::Vertical, 1, 0.25)
        );
        // the binary edge leaks into every band, but k = 1, 2 dominate
        let mut mags: Vec<(f64, Band)> = coeffs
            .scale_indices(2)
            .into_iter()
            .map(|i| (coeffs.planes()[i].get(row, col).abs(), coeffs.bands()[i]))
            .collect();
        mags.sort_by(|a, b| b.0.total_cmp(&a.0));
        let top: Vec<Band> = mags[..2].iter().map(|m| m.1).collect();
        for k in [1, 2] {
            assert!(
                top.contains(&Band::Shear {
                    cone: Cone::Vertical,
                    scale: 2,
                    shear: k
                }),
                "{top:?}"
            );
        }
    }

    let coeffs = sys.analyze(&gen_half_plane(256, 5.0).unwrap()).unwrap();
    for row in [64, 96, 128, 160, 192] {
        let (_, y) = centered(256, row, 0);
        let col = (127.5 + y / 5.0).round() as usize;
        let est = detect_slope(&coeffs, 2, row, col).unwrap();
        assert_eq!(est.cone, Cone::Horizontal, "({row},{col})");
        assert!((est.shear_slope - 0.2).abs() < 2.0 / 4.0);
    }
}
