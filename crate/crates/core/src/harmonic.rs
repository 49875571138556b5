//! Harmonic measure: closed forms for disk arcs and the extremal star, and a
//! walk-on-spheres estimator for general configurations.
//!
//! Every walk draws its randomness from a ChaCha8 stream keyed by
//! `(seed, channel)` and positioned by the sample index, so an estimate is a
//! pure function of its inputs no matter how samples are scheduled across
//! workers.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conformal::MobiusDiskAuto;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Continuum, Point};

/// Abort rate above which an estimate is flagged.
pub const ABORT_RATE_WARNING: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WosParams {
    /// Width of the absorbing shell around the boundary.
    pub epsilon: f64,
    /// Step limit per walk.
    pub max_steps: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for WosParams {
    fn default() -> Self {
        WosParams {
            epsilon: 1e-4,
            max_steps: 1_000_000,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

impl WosParams {
    pub fn with_samples(samples: u64, seed: u64) -> Self {
        WosParams {
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.01) {
            return Err(Error::Domain(format!(
                "epsilon = {} must lie in (0, 0.01)",
                self.epsilon
            )));
        }
        if self.samples == 0 {
            return Err(Error::Domain("samples must be at least 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Monte Carlo harmonic-measure estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hit_e: u64,
    pub hit_circle: u64,
    pub aborted: u64,
}

impl Estimate {
    pub fn from_counts(hit_e: u64, hit_circle: u64, aborted: u64) -> Self {
        let finished = hit_e + hit_circle;
        let (mean, stderr) = if finished == 0 {
            (0.0, 0.0)
        } else {
            let m = hit_e as f64 / finished as f64;
            (m, (m * (1.0 - m) / finished as f64).sqrt())
        };
        Estimate {
            mean,
            stderr,
            samples: finished + aborted,
            hit_e,
            hit_circle,
            aborted,
        }
    }

    pub fn abort_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.aborted as f64 / self.samples as f64
        }
    }

    pub fn abort_warning(&self) -> bool {
        self.abort_rate() > ABORT_RATE_WARNING
    }
}

/// How samples are scheduled. `Parallel` degrades to `Sequential` when the
/// crate is built without the `parallel` feature. Both give identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Continuum,
    Circle,
    Aborted,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    hit_e: u64,
    hit_circle: u64,
    aborted: u64,
}

impl Counts {
    fn record(mut self, exit: Exit) -> Self {
        match exit {
            Exit::Continuum => self.hit_e += 1,
            Exit::Circle => self.hit_circle += 1,
            Exit::Aborted => self.aborted += 1,
        }
        self
    }

    #[cfg(feature = "parallel")]
    fn merge(self, other: Counts) -> Counts {
        Counts {
            hit_e: self.hit_e + other.hit_e,
            hit_circle: self.hit_circle + other.hit_circle,
            aborted: self.aborted + other.aborted,
        }
    }

    fn into_estimate(self) -> Estimate {
        Estimate::from_counts(self.hit_e, self.hit_circle, self.aborted)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Random stream for one walk.
fn walk_rng(seed: u64, channel: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(channel)));
    rng.set_stream(index);
    rng
}

fn run_walks<F>(samples: u64, execution: Execution, walk: F) -> Estimate
where
    F: Fn(u64) -> Exit + Sync,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..samples)
                .into_par_iter()
                .fold(Counts::default, |c, i| c.record(walk(i)))
                .reduce(Counts::default, Counts::merge)
                .into_estimate()
        }
        _ => (0..samples)
            .fold(Counts::default(), |c, i| c.record(walk(i)))
            .into_estimate(),
    }
}

#[inline]
fn unit_step<R: Rng>(rng: &mut R) -> Complex64 {
    let (s, c) = (rng.random::<f64>() * TAU).sin_cos();
    Complex64::new(c, s)
}

fn walk_to_boundary<R: Rng>(
    start: Complex64,
    continuum: &Continuum,
    epsilon: f64,
    max_steps: u64,
    rng: &mut R,
) -> Exit {
    let mut z = start;
    for _ in 0..max_steps {
        let to_e = continuum.distance(z);
        let to_circle = 1.0 - z.norm();
        let radius = to_e.min(to_circle);
        if radius < epsilon {
            return if to_e <= to_circle + 1e-15 {
                Exit::Continuum
            } else {
                Exit::Circle
            };
        }
        z += unit_step(rng) * radius;
    }
    Exit::Aborted
}

/// Estimates the harmonic measure of `continuum` seen from `start` in the
/// component of `U \ E` containing it. `channel` separates the random
/// streams of different marked points sharing one seed.
pub fn wos_estimate_point(
    continuum: &Continuum,
    start: Point,
    channel: u64,
    params: &WosParams,
    execution: Execution,
) -> Result<Estimate> {
    params.validate()?;
    let z0 = start.z();
    let to_e = continuum.distance(z0);
    let to_circle = 1.0 - start.norm();
    if to_e <= params.epsilon || to_circle <= params.epsilon {
        return Err(Error::InvalidStart(format!(
            "start ({}, {}) is within epsilon = {} of the boundary (dist to E {to_e:e}, to circle {to_circle:e})",
            start.re(),
            start.im(),
            params.epsilon
        )));
    }
    Ok(run_walks(params.samples, execution, |i| {
        let mut rng = walk_rng(params.seed, channel, i);
        walk_to_boundary(z0, continuum, params.epsilon, params.max_steps, &mut rng)
    }))
}

/// Estimate of `omega(a_k, E, D_k)` for the 1-based marked point `k`.
pub fn wos_estimate(cfg: &Configuration, k: usize, params: &WosParams) -> Result<Estimate> {
    wos_estimate_with(cfg, k, params, Execution::default())
}

pub fn wos_estimate_with(
    cfg: &Configuration,
    k: usize,
    params: &WosParams,
    execution: Execution,
) -> Result<Estimate> {
    if k == 0 || k > cfg.n() {
        return Err(Error::Domain(format!(
            "k = {k} must lie in 1..={}",
            cfg.n()
        )));
    }
    wos_estimate_point(
        cfg.continuum(),
        cfg.points()[k - 1],
        k as u64,
        params,
        execution,
    )
}

/// Walk-on-spheres in the plain disk, scoring exits through the boundary arc
/// `{|arg w| <= theta}`. Calibrates the estimator against closed forms.
pub fn wos_selfcheck_disk(z: Point, theta: f64, params: &WosParams) -> Result<Estimate> {
    wos_selfcheck_disk_with(z, theta, params, Execution::default())
}

pub fn wos_selfcheck_disk_with(
    z: Point,
    theta: f64,
    params: &WosParams,
    execution: Execution,
) -> Result<Estimate> {
    params.validate()?;
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    if 1.0 - z.norm() <= params.epsilon {
        return Err(Error::InvalidStart(format!(
            "start modulus {} is within epsilon of the circle",
            z.norm()
        )));
    }
    let z0 = z.z();
    Ok(run_walks(params.samples, execution, |i| {
        let mut rng = walk_rng(params.seed, 0, i);
        let mut w = z0;
        for _ in 0..params.max_steps {
            let radius = 1.0 - w.norm();
            if radius < params.epsilon {
                return if w.arg().abs() <= theta {
                    Exit::Continuum
                } else {
                    Exit::Circle
                };
            }
            w += unit_step(&mut rng) * radius;
        }
        Exit::Aborted
    }))
}

/// Harmonic measure at `z` of the arc `{|w| = 1, |arg w| <= theta}` in the
/// unit disk, via the automorphism sending `z` to the origin.
pub fn exact_arc_measure(z: Point, theta: f64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!(
            "theta = {theta} must lie in (0, pi)"
        )));
    }
    if z.norm() == 0.0 {
        return Ok(theta / PI);
    }
    let m = MobiusDiskAuto::new(z, 0.0)?;
    let lo = m.apply_complex(Complex64::from_polar(1.0, -theta));
    let hi = m.apply_complex(Complex64::from_polar(1.0, theta));
    let sweep = (hi.arg() - lo.arg()).rem_euclid(TAU);
    Ok(sweep / 2.0 / PI)
}

/// `omega* = (2/pi) asin((1 - rho^n) / (1 + rho^n))`: the harmonic measure of
/// the star seen from each sector midpoint, for `n >= 2`, `rho` in `(0, 1)`.
/// Evaluated as `1 - (4/pi) atan(rho^(n/2))`, which keeps `1 - omega*` to full
/// relative precision.
pub fn extremal_measure(n: usize, rho: f64) -> f64 {
    1.0 - 4.0 / PI * rho.powf(n as f64 / 2.0).atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn poisson_arc(z: Complex64, theta: f64) -> f64 {
        let q = integrate(
            |t| (1.0 - z.norm_sqr()) / (Complex64::from_polar(1.0, t) - z).norm_sqr(),
            -theta,
            theta,
            1e-13,
            1_000_000,
        )
        .unwrap();
        q.value / TAU
    }

    #[test]
    fn arc_measure_from_origin() {
        assert_eq!(exact_arc_measure(Point::ORIGIN, FRAC_PI_2).unwrap(), 0.5);
        assert_eq!(exact_arc_measure(Point::ORIGIN, PI / 4.0).unwrap(), 0.25);
    }

    #[test]
    fn arc_measure_matches_poisson_quadrature() {
        // mpmath Poisson integral at z = 0.5, theta = pi/2: 0.79516723530086655.
        let v = exact_arc_measure(Point::new(0.5, 0.0).unwrap(), FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(v, 0.795_167_235_300_866_5, epsilon = 1e-14);
        for (re, im) in [(0.5, 0.0), (0.3, 0.4), (-0.6, 0.1), (0.0, -0.9)] {
            for theta in [0.2, PI / 4.0, FRAC_PI_2, 3.0 * PI / 4.0, 3.0] {
                let z = Point::new(re, im).unwrap();
                let exact = exact_arc_measure(z, theta).unwrap();
                let oracle = poisson_arc(z.z(), theta);
                assert!(
                    (exact - oracle).abs() <= 1e-10,
                    "{z:?} {theta}: {exact} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn arc_measure_errors() {
        assert!(matches!(
            exact_arc_measure(Point::new(1.0, 0.0).unwrap(), 1.0),
            Err(Error::OutsideDisk { .. })
        ));
        assert!(exact_arc_measure(Point::ORIGIN, 0.0).is_err());
    }

    #[test]
    fn extremal_measure_values() {
        // mpmath: (2/pi) asin(7/9) and (2/pi) asin(3/5).
        assert_abs_diff_eq!(
            extremal_measure(3, 0.5),
            0.567_306_208_122_429,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            extremal_measure(2, 0.5),
            0.409_665_529_398_266_9,
            epsilon = 1e-15
        );
        assert!(extremal_measure(3, 1.0 - 1e-12) < 1e-5);
        assert!(extremal_measure(3, 1e-6) > 1.0 - 1e-8);
    }

    #[test]
    fn estimate_counts_invariants() {
        let e = Estimate::from_counts(30, 70, 5);
        assert_eq!(e.samples, 105);
        assert_abs_diff_eq!(e.mean, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(e.stderr, (0.21f64 / 100.0).sqrt(), epsilon = 1e-15);
        assert!(e.abort_warning());
        let none = Estimate::from_counts(0, 0, 3);
        assert_eq!((none.mean, none.stderr), (0.0, 0.0));
    }

    #[test]
    fn params_validation() {
        let mut p = WosParams::default();
        assert!(p.validate().is_ok());
        p.epsilon = 0.02;
        assert!(p.validate().is_err());
        p = WosParams::with_samples(0, 1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn selfcheck_small_runs() {
        let params = WosParams::with_samples(200_000, 11);
        for (z, theta) in [(Point::ORIGIN, FRAC_PI_2), (Point::ORIGIN, PI / 4.0)] {
            let e = wos_selfcheck_disk(z, theta, &params).unwrap();
            let exact = exact_arc_measure(z, theta).unwrap();
            assert!((e.mean - exact).abs() <= 3.0 * e.stderr, "{e:?} vs {exact}");
        }
        let z = Point::new(0.5, 0.0).unwrap();
        let e = wos_selfcheck_disk(z, FRAC_PI_2, &params).unwrap();
        let exact = exact_arc_measure(z, FRAC_PI_2).unwrap();
        assert!((e.mean - exact).abs() <= 3.0 * e.stderr, "{e:?} vs {exact}");
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let cfg = Configuration::extremal(3, 0.5, 0.0).unwrap();
        let params = WosParams::with_samples(20_000, 5);
        let a = wos_estimate_with(&cfg, 2, &params, Execution::Sequential).unwrap();
        let b = wos_estimate_with(&cfg, 2, &params, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_starts() {
        let cfg = Configuration::extremal(2, 0.5, 0.0).unwrap();
        assert!(wos_estimate(&cfg, 0, &WosParams::default()).is_err());
        assert!(wos_estimate(&cfg, 3, &WosParams::default()).is_err());
        let e = cfg.continuum();
        let near = Point::new(5e-5, 0.3).unwrap();
        assert!(matches!(
            wos_estimate_point(e, near, 0, &WosParams::default(), Execution::Sequential),
            Err(Error::InvalidStart(_))
        ));
    }

    #[test]
    fn step_limit_counts_aborts() {
        let cfg = Configuration::extremal(2, 0.5, 0.0).unwrap();
        let params = WosParams {
            max_steps: 1,
            samples: 100,
            ..Default::default()
        };
        let e = wos_estimate(&cfg, 1, &params).unwrap();
        assert_eq!(e.aborted, 100);
        assert_eq!(e.hit_e + e.hit_circle, 0);
    }
}
