//! Derivative-free search over bent stars.
//!
//! The search space is the family of polylines made of `n` spokes from the
//! origin to the unit circle, each spoke rotated by an angle offset and bent
//! laterally at a few joints. The zero vector is the star itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bound::{psi, psi_derivative};
use crate::error::{Error, Result};
use crate::geometry::{
    extremal_points, star_angles, verify_configuration, Configuration, Continuum, Point, Segment,
};
use crate::harmonic::{wos_estimate_with, Estimate, Execution, WosParams};

pub const DEFAULT_JOINT_RADII: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];
pub const LATERAL_LIMIT: f64 = 0.2;
/// Grid resolution used to certify that perturbed stars still separate the
/// marked points.
pub const SEPARATION_RESOLUTION: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarPerturbation {
    pub n: usize,
    pub spoke_angle_offsets: Vec<f64>,
    pub joint_radii: Vec<f64>,
    /// `joint_lateral_offsets[spoke][joint]`, displacement perpendicular to
    /// the spoke direction.
    pub joint_lateral_offsets: Vec<Vec<f64>>,
    pub theta: f64,
}

impl StarPerturbation {
    pub fn zero(n: usize, theta: f64) -> Self {
        StarPerturbation {
            n,
            spoke_angle_offsets: vec![0.0; n],
            joint_radii: DEFAULT_JOINT_RADII.to_vec(),
            joint_lateral_offsets: vec![vec![0.0; DEFAULT_JOINT_RADII.len()]; n],
            theta,
        }
    }

    pub fn angle_limit(&self) -> f64 {
        PI / (2.0 * self.n as f64)
    }

    /// Number of free coordinates (angle offsets then lateral offsets).
    pub fn dimension(&self) -> usize {
        self.n * (1 + self.joint_radii.len())
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = self.spoke_angle_offsets.clone();
        for row in &self.joint_lateral_offsets {
            v.extend_from_slice(row);
        }
        v
    }

    /// Same shape as `self`, coordinates taken from `v`.
    pub fn with_vector(&self, v: &[f64]) -> Self {
        assert_eq!(v.len(), self.dimension(), "perturbation vector length");
        let m = self.joint_radii.len();
        StarPerturbation {
            n: self.n,
            spoke_angle_offsets: v[..self.n].to_vec(),
            joint_radii: self.joint_radii.clone(),
            joint_lateral_offsets: v[self.n..].chunks(m).map(<[f64]>::to_vec).collect(),
            theta: self.theta,
        }
    }

    /// Euclidean norm of the coordinate vector.
    pub fn magnitude(&self) -> f64 {
        self.to_vector().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn check_ranges(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPerturbation(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.spoke_angle_offsets.len() != self.n || self.joint_lateral_offsets.len() != self.n {
            return bad("one angle offset and one lateral row per spoke required".into());
        }
        let m = self.joint_radii.len();
        if self.joint_lateral_offsets.iter().any(|row| row.len() != m) {
            return bad(format!("each spoke needs {m} lateral offsets"));
        }
        let mut last = 0.0;
        for &r in &self.joint_radii {
            if !(r > last && r < 1.0) {
                return bad(format!(
                    "joint radii must be ascending in (0, 1), got {:?}",
                    self.joint_radii
                ));
            }
            last = r;
        }
        let limit = self.angle_limit();
        if let Some(a) = self
            .spoke_angle_offsets
            .iter()
            .find(|a| a.is_nan() || a.abs() >= limit)
        {
            return bad(format!("angle offset {a} outside (-{limit}, {limit})"));
        }
        for row in &self.joint_lateral_offsets {
            if let Some(d) = row.iter().find(|d| d.is_nan() || d.abs() >= LATERAL_LIMIT) {
                return bad(format!(
                    "lateral offset {d} outside (-{LATERAL_LIMIT}, {LATERAL_LIMIT})"
                ));
            }
        }
        if !self.theta.is_finite() {
            return bad("rotation must be finite".into());
        }
        Ok(())
    }

    /// Vertices of each spoke: origin, joints, tip on the unit circle.
    fn spoke_vertices(&self) -> Vec<Vec<Complex64>> {
        star_angles(self.n, self.theta)
            .iter()
            .zip(&self.spoke_angle_offsets)
            .zip(&self.joint_lateral_offsets)
            .map(|((base, offset), lateral)| {
                let u = Complex64::from_polar(1.0, base + offset);
                let normal = Complex64::new(-u.im, u.re);
                let mut v = vec![Complex64::new(0.0, 0.0)];
                v.extend(
                    self.joint_radii
                        .iter()
                        .zip(lateral)
                        .map(|(r, d)| u * r + normal * d),
                );
                v.push(u);
                v
            })
            .collect()
    }
}

/// Realizes the perturbation as a polyline continuum.
pub fn realize(p: &StarPerturbation) -> Result<Continuum> {
    p.check_ranges()?;
    let spokes = p.spoke_vertices();
    let mut segments: Vec<Vec<Segment>> = Vec::with_capacity(p.n);
    for vertices in &spokes {
        let mut chain = Vec::with_capacity(vertices.len() - 1);
        for pair in vertices.windows(2) {
            if pair[1].norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidPerturbation(format!(
                    "vertex {} leaves the closed disk",
                    pair[1]
                )));
            }
            let seg = Segment::new(Point::from_complex(pair[0])?, Point::from_complex(pair[1])?)
                .map_err(|e| Error::InvalidPerturbation(e.to_string()))?;
            chain.push(seg);
        }
        segments.push(chain);
    }
    // Spokes may only meet at the origin.
    for i in 0..p.n {
        for j in i + 1..p.n {
            for (a, sa) in segments[i].iter().enumerate() {
                for (b, sb) in segments[j].iter().enumerate() {
                    let piece_a = crate::geometry::Piece::Segment(*sa);
                    let piece_b = crate::geometry::Piece::Segment(*sb);
                    if a == 0 && b == 0 {
                        let (u, v) = (sa.p1().z(), sb.p1().z());
                        let cross = u.re * v.im - u.im * v.re;
                        let dot = u.re * v.re + u.im * v.im;
                        if cross.abs() <= 1e-12 * u.norm() * v.norm() && dot > 0.0 {
                            return Err(Error::InvalidPerturbation(format!(
                                "spokes {i} and {j} overlap at the origin"
                            )));
                        }
                    } else if piece_a.distance_to_piece(&piece_b) <= 1e-9 {
                        return Err(Error::InvalidPerturbation(format!(
                            "spokes {i} and {j} intersect away from the origin"
                        )));
                    }
                }
            }
        }
    }
    Continuum::new(segments.into_iter().flatten().collect(), Vec::new())
}

/// Marked points riding the rotation of the perturbation.
pub fn perturbation_configuration(p: &StarPerturbation, rho: f64) -> Result<Configuration> {
    let continuum = realize(p)?;
    let cfg = Configuration::new(rho, extremal_points(p.n, rho, p.theta), continuum)
        .map_err(|e| Error::InvalidPerturbation(e.to_string()))?;
    let check = verify_configuration(&cfg, SEPARATION_RESOLUTION)
        .map_err(|e| Error::InvalidPerturbation(e.to_string()))?;
    if !check.separated {
        return Err(Error::InvalidPerturbation(
            "marked points are not in distinct components".into(),
        ));
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Objective {
    /// `(1/n) sum psi(omega_k)`.
    MeanPsi,
    /// `max_k omega_k`.
    MaxOmega,
}

impl Objective {
    /// Closed-form value at the star, which is also the theoretical minimum.
    pub fn extremal_value(self, n: usize, rho: f64) -> f64 {
        match self {
            Objective::MeanPsi => -(n as f64) * rho.ln(),
            Objective::MaxOmega => crate::harmonic::extremal_measure(n, rho),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub stderr: f64,
    pub estimates: Vec<Estimate>,
}

/// Objective at a perturbation. The seed in `params` is shared by every
/// evaluation, so the objective is a deterministic function of `p`.
pub fn evaluate_objective(
    p: &StarPerturbation,
    rho: f64,
    objective: Objective,
    params: &WosParams,
) -> Result<ObjectiveValue> {
    evaluate_objective_with(p, rho, objective, params, Execution::default())
}

pub fn evaluate_objective_with(
    p: &StarPerturbation,
    rho: f64,
    objective: Objective,
    params: &WosParams,
    execution: Execution,
) -> Result<ObjectiveValue> {
    let cfg = perturbation_configuration(p, rho)?;
    let estimates = (1..=cfg.n())
        .map(|k| wos_estimate_with(&cfg, k, params, execution))
        .collect::<Result<Vec<_>>>()?;
    let n = estimates.len() as f64;
    let (value, stderr) = match objective {
        Objective::MeanPsi => {
            let mut total = 0.0;
            let mut variance = 0.0;
            for e in &estimates {
                total += psi(e.mean)?;
                variance += (psi_derivative(e.mean) * e.stderr).powi(2);
            }
            (total / n, variance.sqrt() / n)
        }
        Objective::MaxOmega => {
            let worst = estimates
                .iter()
                .max_by(|a, b| a.mean.total_cmp(&b.mean))
                .expect("n >= 2");
            (worst.mean, worst.stderr)
        }
    };
    Ok(ObjectiveValue {
        value,
        stderr,
        estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOptions {
    pub budget: usize,
    pub seed: u64,
    /// Walk parameters for every objective evaluation; `wos.seed` is the
    /// common-random-numbers seed.
    pub wos: WosParams,
    /// Bound on the initial offsets.
    pub initial_spread: f64,
    pub initial_step: f64,
}

impl SearchOptions {
    pub fn new(budget: usize, seed: u64, samples: u64) -> Self {
        SearchOptions {
            budget,
            seed,
            wos: WosParams::with_samples(samples, seed),
            initial_spread: 0.1,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub evaluations: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_params: StarPerturbation,
    pub best_objective: f64,
    pub best_stderr: f64,
    pub history: Vec<HistoryEntry>,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

/// Nelder–Mead coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Nelder–Mead minimization of `f`, spending at most `budget` evaluations.
/// `on_iteration` sees the best value after every completed iteration.
fn nelder_mead<F, H>(
    mut f: F,
    x0: Vec<f64>,
    step: f64,
    budget: usize,
    mut on_iteration: H,
) -> (Vec<f64>, f64, usize, bool)
where
    F: FnMut(&[f64]) -> f64,
    H: FnMut(usize, f64),
{
    let dim = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        f(x)
    };
    let mut simplex = Vec::with_capacity(dim + 1);
    simplex.push(Vertex {
        f: eval(&x0, &mut evaluations),
        x: x0.clone(),
    });
    for i in 0..dim {
        if evaluations >= budget {
            break;
        }
        let mut x = x0.clone();
        x[i] += step;
        simplex.push(Vertex {
            f: eval(&x, &mut evaluations),
            x,
        });
    }
    let sort = |s: &mut Vec<Vertex>| s.sort_by(|a, b| a.f.total_cmp(&b.f));
    sort(&mut simplex);
    on_iteration(evaluations, simplex[0].f);
    if simplex.len() < dim + 1 {
        let best = simplex.swap_remove(0);
        return (best.x, best.f, evaluations, true);
    }

    let mut exhausted = false;
    loop {
        let spread = simplex[dim].f - simplex[0].f;
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.x.iter()
                    .zip(&simplex[0].x)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if evaluations >= budget {
            exhausted = true;
            break;
        }
        if spread.abs() <= 1e-12 && size <= 1e-8 {
            // Collapsed: restart around the best vertex while budget remains.
            if evaluations + dim > budget {
                break;
            }
            let best = simplex[0].x.clone();
            for (i, v) in simplex[1..].iter_mut().enumerate() {
                let mut x = best.clone();
                x[i] += step;
                v.f = eval(&x, &mut evaluations);
                v.x = x;
            }
            sort(&mut simplex);
            on_iteration(evaluations, simplex[0].f);
            continue;
        }
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / dim as f64;
            }
        }
        let worst = &simplex[dim];
        let xr = affine(&centroid, &worst.x, -REFLECT);
        let fr = eval(&xr, &mut evaluations);
        if fr < simplex[0].f {
            if evaluations < budget {
                let xe = affine(&centroid, &worst.x, -EXPAND);
                let fe = eval(&xe, &mut evaluations);
                simplex[dim] = if fe < fr {
                    Vertex { x: xe, f: fe }
                } else {
                    Vertex { x: xr, f: fr }
                };
            } else {
                simplex[dim] = Vertex { x: xr, f: fr };
            }
        } else if fr < simplex[dim - 1].f {
            simplex[dim] = Vertex { x: xr, f: fr };
        } else if evaluations < budget {
            let outside = fr < worst.f;
            let xc = if outside {
                affine(&centroid, &xr, CONTRACT)
            } else {
                affine(&centroid, &worst.x, CONTRACT)
            };
            let fc = eval(&xc, &mut evaluations);
            if fc < fr.min(worst.f) {
                simplex[dim] = Vertex { x: xc, f: fc };
            } else {
                let best = simplex[0].x.clone();
                for v in simplex[1..].iter_mut() {
                    if evaluations >= budget {
                        break;
                    }
                    v.x = affine(&best, &v.x, SHRINK);
                    v.f = eval(&v.x, &mut evaluations);
                }
            }
        }
        sort(&mut simplex);
        on_iteration(evaluations, simplex[0].f);
    }
    let best = simplex.swap_remove(0);
    (best.x, best.f, evaluations, exhausted)
}

/// Searches bent stars (rotation fixed at zero) for the minimum of the
/// objective, starting from a random perturbation drawn from `options.seed`.
pub fn minimize(
    n: usize,
    rho: f64,
    objective: Objective,
    options: &SearchOptions,
) -> Result<SearchResult> {
    if options.budget < 50 {
        return Err(Error::Domain(format!(
            "budget {} must be at least 50",
            options.budget
        )));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} must lie in (0, 1)")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    options.wos.validate()?;
    let template = StarPerturbation::zero(n, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let spread = options.initial_spread.min(template.angle_limit() * 0.9);
    let x0: Vec<f64> = (0..template.dimension())
        .map(|_| rng.random_range(-spread..=spread))
        .collect();

    let mut history = Vec::new();
    let mut iteration = 0;
    let (x, f, evaluations, exhausted) = nelder_mead(
        |x| {
            let p = template.with_vector(x);
            evaluate_objective(&p, rho, objective, &options.wos)
                .map(|v| v.value)
                .unwrap_or(f64::INFINITY)
        },
        x0,
        options.initial_step,
        options.budget,
        |evaluations, best| {
            history.push(HistoryEntry {
                iteration,
                evaluations,
                objective: best,
            });
            iteration += 1;
        },
    );
    let best_params = template.with_vector(&x);
    let best_stderr = if f.is_finite() {
        evaluate_objective(&best_params, rho, objective, &options.wos)?.stderr
    } else {
        f64::INFINITY
    };
    Ok(SearchResult {
        best_params,
        best_objective: f,
        best_stderr,
        history,
        evaluations,
        budget_exhausted: exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::star_continuum;

    fn hausdorff(a: &Continuum, b: &Continuum) -> f64 {
        let one_way = |x: &Continuum, y: &Continuum| {
            x.sample(2001)
                .iter()
                .map(|z| y.distance(*z))
                .fold(0.0, f64::max)
        };
        one_way(a, b).max(one_way(b, a))
    }

    #[test]
    fn zero_perturbation_is_the_star() {
        for theta in [0.0, 0.4] {
            let e = realize(&StarPerturbation::zero(3, theta)).unwrap();
            assert!(hausdorff(&e, &star_continuum(3, theta)) < 1e-12);
        }
        assert_eq!(StarPerturbation::zero(4, 0.0).magnitude(), 0.0);
    }

    #[test]
    fn vector_round_trip() {
        let p = StarPerturbation::zero(3, 0.0);
        let v: Vec<f64> = (0..p.dimension()).map(|i| i as f64 * 0.01).collect();
        assert_eq!(p.with_vector(&v).to_vector(), v);
        assert_eq!(p.with_vector(&v).joint_lateral_offsets[1], vec![0.05, 0.06]);
    }

    #[test]
    fn bent_spoke_still_separates() {
        let mut p = StarPerturbation::zero(3, 0.0);
        p.joint_lateral_offsets[0][1] = 0.1;
        let cfg = perturbation_configuration(&p, 0.5).unwrap();
        assert!(verify_configuration(&cfg, 0.005).unwrap().separated);
    }

    #[test]
    fn out_of_range_perturbations_rejected() {
        let mut p = StarPerturbation::zero(3, 0.0);
        p.spoke_angle_offsets[0] = PI / 6.0;
        assert!(matches!(realize(&p), Err(Error::InvalidPerturbation(_))));
        let mut p = StarPerturbation::zero(3, 0.0);
        p.joint_lateral_offsets[2][0] = -0.25;
        assert!(realize(&p).is_err());
        let mut p = StarPerturbation::zero(3, 0.0);
        p.joint_radii = vec![0.6, 0.3];
        assert!(realize(&p).is_err());
    }

    #[test]
    fn crossing_spokes_rejected() {
        // Two of eight spokes bent toward each other until they cross.
        let mut p = StarPerturbation::zero(8, 0.0);
        p.spoke_angle_offsets[0] = 0.19;
        p.spoke_angle_offsets[1] = -0.19;
        p.joint_lateral_offsets[0] = vec![0.19, 0.19];
        p.joint_lateral_offsets[1] = vec![-0.19, -0.19];
        assert!(matches!(realize(&p), Err(Error::InvalidPerturbation(_))));
    }

    #[test]
    fn nelder_mead_on_quadratic() {
        let mut seen = Vec::new();
        let (x, f, evals, _) = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 0.5).powi(2),
            vec![0.0, 0.0],
            0.1,
            500,
            |_, best| seen.push(best),
        );
        assert!(f < 1e-10, "{f}");
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4);
        assert!(evals <= 500);
        assert!(seen.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn small_budget_bookkeeping() {
        let options = SearchOptions::new(50, 3, 2_000);
        let r = minimize(3, 0.5, Objective::MaxOmega, &options).unwrap();
        assert!(r.history.len() <= 50);
        assert!(r.evaluations <= 50);
        assert!(r
            .history
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective));
        assert!(minimize(3, 0.5, Objective::MaxOmega, &SearchOptions::new(49, 3, 10)).is_err());
    }
}
