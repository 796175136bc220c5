use std::f64::consts::PI;

use conehull_core::closed_forms::poisson_mass_outside;
use conehull_core::rng::seeded;
use conehull_core::samplers::{
    gnomonic, sample_cauchy_type, sample_halfsphere, sample_poisson_annulus, sample_poisson_hull,
    PoissonParams,
};
use conehull_core::stats::{ks_test, poisson_chi_square};
use conehull_core::{Error, Point};

const DRAWS: usize = 10_000;
const ALPHA: f64 = 0.01;

#[test]
fn first_coordinate_in_three_dimensions() {
    // Density (4/pi) sqrt(1 - t^2) on [0, 1].
    let mut rng = seeded(31);
    let xs: Vec<f64> = (0..DRAWS).map(|_| sample_halfsphere(3, &mut rng)[0]).collect();
    let cdf = |t: f64| 2.0 / PI * (t * (1.0 - t * t).sqrt() + t.asin());
    assert!(ks_test(&xs, cdf).passes(ALPHA));
}

#[test]
fn halfsphere_points_are_unit_and_upper() {
    let mut rng = seeded(2);
    for d in 1..6 {
        for _ in 0..200 {
            let u = sample_halfsphere(d, &mut rng);
            assert_eq!(u.dim(), d + 1);
            assert!((u.norm() - 1.0).abs() < 1e-12);
            assert!(u[0] >= 0.0);
        }
    }
}

#[test]
fn gnomonic_examples() {
    assert_eq!(gnomonic(&Point::new(vec![1.0, 0.0, 0.0])).unwrap(), Point::new(vec![0.0, 0.0]));
    let s = 0.5f64.sqrt();
    let p = gnomonic(&Point::new(vec![s, s, 0.0])).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
    assert!(matches!(gnomonic(&Point::new(vec![0.0, 1.0])), Err(Error::PoleAtEquator)));
}

#[test]
fn cauchy_type_radial_and_angular_laws_in_the_plane() {
    let mut rng = seeded(44);
    let pts: Vec<Point> = (0..DRAWS).map(|_| sample_cauchy_type(2, &mut rng)).collect();
    let radii: Vec<f64> = pts.iter().map(Point::norm).collect();
    assert!(ks_test(&radii, |r| 1.0 - 1.0 / (1.0 + r * r).sqrt()).passes(ALPHA));
    let angles: Vec<f64> = pts.iter().map(|p| p[1].atan2(p[0]) + PI).collect();
    assert!(ks_test(&angles, |a| a / (2.0 * PI)).passes(ALPHA));
}

#[test]
fn truncated_power_radial_law() {
    let p = PoissonParams::new(3, 1.5, 1.0).unwrap();
    let r_in = p.radius_for_mass(50.0);
    let mut rng = seeded(5);
    let mut radii = Vec::new();
    while radii.len() < DRAWS {
        for x in sample_poisson_annulus(&p, r_in, f64::INFINITY, &mut rng).unwrap() {
            radii.push(x.norm() / r_in);
        }
    }
    assert!(ks_test(&radii, |r| 1.0 - r.powf(-1.5)).passes(ALPHA));
}

#[test]
fn bounded_annulus_counts_are_poisson() {
    let p = PoissonParams::new(3, 2.0, 3.0).unwrap();
    let mean = poisson_mass_outside(3, 2.0, 3.0, 1.0) - poisson_mass_outside(3, 2.0, 3.0, 2.0);
    let mut rng = seeded(8);
    let counts: Vec<u64> = (0..DRAWS)
        .map(|_| {
            let pts = sample_poisson_annulus(&p, 1.0, 2.0, &mut rng).unwrap();
            assert!(pts.iter().all(|x| x.norm() > 1.0 && x.norm() <= 2.0));
            pts.len() as u64
        })
        .collect();
    assert!(poisson_chi_square(&counts, mean).passes(ALPHA));
}

#[test]
fn certified_samples_satisfy_their_invariants() {
    let mut rng = seeded(13);
    for (d, gamma) in [(1, 0.5), (2, 1.0), (3, 2.5), (4, 4.0)] {
        let p = PoissonParams::new(d, gamma, 1.0).unwrap();
        for _ in 0..20 {
            let (s, h) = sample_poisson_hull(&p, &mut rng).unwrap();
            assert!(s.certified);
            assert!(s.points.iter().all(|x| x.norm() > s.r_trunc));
            assert!(h.contains_origin() && h.min_offset() >= s.r_trunc);
        }
    }
}

#[test]
fn invalid_radii_are_rejected() {
    let p = PoissonParams::new(2, 1.0, 1.0).unwrap();
    let mut rng = seeded(0);
    assert!(matches!(sample_poisson_annulus(&p, 2.0, 1.0, &mut rng), Err(Error::InvalidRadii { .. })));
    assert!(matches!(sample_poisson_annulus(&p, 0.0, 1.0, &mut rng), Err(Error::InvalidRadii { .. })));
}
