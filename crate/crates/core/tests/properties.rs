use std::f64::consts::{PI, TAU};

use hmeasure::bound::{psi, psi_inverse};
use hmeasure::conformal::{
    inner_radius_sector, mobius_apply, slit_map_chain, MobiusDiskAuto, Sector,
    SlitComplementDomain, SpherePoint,
};
use hmeasure::geometry::{
    distance_to_continuum, hyperbolic_distance, star_continuum, Continuum, Point,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disk_point(max: f64) -> impl Strategy<Value = Point> {
    (0.0..max, 0.0..TAU).prop_map(|(r, t)| Point::from_polar(r, t).unwrap())
}

/// One-sided Hausdorff distance by dense sampling of `a`.
fn directed_hausdorff(a: &Continuum, b: &Continuum) -> f64 {
    a.sample(2000)
        .into_iter()
        .map(|z| b.distance(z))
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn distance_is_one_lipschitz(n in 2usize..9, theta in -PI..PI, z in disk_point(1.0), w in disk_point(1.0)) {
        let e = star_continuum(n, theta);
        let gap = (distance_to_continuum(z, &e) - distance_to_continuum(w, &e)).abs();
        prop_assert!(gap <= (z.z() - w.z()).norm() + 1e-15);
    }

    #[test]
    fn distance_vanishes_on_the_continuum(n in 2usize..9, theta in -PI..PI, t in 0.0..1.0f64, spoke in 0usize..8) {
        let e = star_continuum(n, theta);
        let piece = e.pieces().nth(spoke % e.piece_count()).unwrap();
        let on = Point::from_complex(piece.point_at(t)).unwrap();
        prop_assert!(distance_to_continuum(on, &e) < 1e-12);
    }

    #[test]
    fn star_is_periodic_under_its_rotation(n in 2usize..9, theta in -PI..PI) {
        let a = star_continuum(n, theta);
        let b = star_continuum(n, theta + TAU / n as f64);
        prop_assert!(directed_hausdorff(&a, &b) < 1e-12);
        prop_assert!(directed_hausdorff(&b, &a) < 1e-12);
    }

    #[test]
    fn hyperbolic_distance_symmetric_and_invariant(
        z in disk_point(0.7), w in disk_point(0.7), a in disk_point(0.7), phi in -PI..PI,
    ) {
        let d = hyperbolic_distance(z, w).unwrap();
        prop_assert!((d - hyperbolic_distance(w, z).unwrap()).abs() <= 1e-12);
        let m = MobiusDiskAuto::new(a, phi).unwrap();
        let moved = hyperbolic_distance(mobius_apply(&m, z).unwrap(), mobius_apply(&m, w).unwrap()).unwrap();
        prop_assert!((d - moved).abs() <= 1e-12, "{d} vs {moved}");
    }

    #[test]
    fn psi_strictly_increasing(x1 in 0.0..0.999f64, dx in 1e-9..0.5f64) {
        let x2 = (x1 + dx).min(0.9999999);
        prop_assume!(x2 > x1);
        prop_assert!(psi(x1).unwrap() < psi(x2).unwrap());
    }

    #[test]
    fn sector_radius_is_linear(n in 2usize..12, bisector in -PI..PI, r in 1e-3..10.0f64) {
        let s = Sector::new(n, bisector).unwrap();
        let (one, two) = (inner_radius_sector(&s, r).unwrap(), inner_radius_sector(&s, 2.0 * r).unwrap());
        prop_assert!((two - 2.0 * one).abs() <= 1e-15 * two);
    }
}

#[test]
fn mobius_inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a = Point::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..TAU)).unwrap();
        let m = MobiusDiskAuto::new(a, rng.random_range(-PI..PI)).unwrap();
        let inv = m.inverse();
        for _ in 0..1000 {
            let z = Point::from_polar(
                rng.random_range(0.0..0.99f64).sqrt(),
                rng.random_range(0.0..TAU),
            )
            .unwrap();
            let back = mobius_apply(&inv, mobius_apply(&m, z).unwrap()).unwrap();
            assert!((back.z() - z.z()).norm() < 1e-13, "{z:?} -> {back:?}");
        }
    }
}

#[test]
fn slit_chain_injective_into_the_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for theta in [0.3, PI / 2.0, 2.5] {
        let d = SlitComplementDomain::new(theta).unwrap();
        let mut pairs: Vec<(Complex64, Complex64)> = Vec::with_capacity(10_000);
        while pairs.len() < 10_000 {
            let w =
                Complex64::from_polar(3.0 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI));
            if d.on_slit(w) {
                continue;
            }
            let zeta = slit_map_chain(&d, SpherePoint::Finite(w)).unwrap();
            assert!(zeta.norm() < 1.0, "w = {w} -> {zeta}");
            pairs.push((zeta, w));
        }
        pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if pairs[j].0.re - pairs[i].0.re > 1e-10 {
                    break;
                }
                if (pairs[j].0 - pairs[i].0).norm() < 1e-10 {
                    assert!((pairs[j].1 - pairs[i].1).norm() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn psi_round_trip_grid() {
    for i in 0..1000 {
        let x = i as f64 / 1000.0;
        assert!(
            (psi_inverse(psi(x).unwrap()).unwrap() - x).abs() <= 1e-12,
            "x = {x}"
        );
    }
}
