//! Planar geometry kernel for continua in the closed unit disk.
//!
//! A [`Continuum`] is a connected finite union of line segments and circular
//! arcs. All distance queries are closed-form, which lets the walk-on-spheres
//! estimator take exact steps.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack allowed on the unit-disk constraint for segment endpoints and arcs.
pub const DISK_SLACK: f64 = 1e-12;
/// Pieces closer than this are considered touching by the connectivity check.
pub const ADJACENCY_TOL: f64 = 1e-9;
/// Tolerance on `|a_k| = rho` for configuration points.
pub const RADIUS_TOL: f64 = 1e-12;
/// Points this close to a continuum are treated as lying on it.
pub const ON_CONTINUUM_TOL: f64 = 1e-12;

/// A point of the complex plane with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(Complex64);

impl Point {
    pub const ORIGIN: Point = Point(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Point(Complex64::new(re, im)))
        } else {
            Err(Error::NonFinite { re, im })
        }
    }

    pub fn from_polar(r: f64, angle: f64) -> Result<Self> {
        let z = Complex64::from_polar(r, angle);
        Self::new(z.re, z.im)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn z(self) -> Complex64 {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        p.0
    }
}

#[inline]
fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

#[inline]
fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

#[inline]
fn modulus(z: Complex64) -> f64 {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// A closed line segment inside the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    p0: Point,
    p1: Point,
    dir: Complex64,
    inv_len2: f64,
}

impl Segment {
    pub fn new(p0: Point, p1: Point) -> Result<Self> {
        if p0 == p1 {
            return Err(Error::InvalidGeometry(format!(
                "degenerate segment at ({}, {})",
                p0.re(),
                p0.im()
            )));
        }
        for p in [p0, p1] {
            if p.norm() > 1.0 + DISK_SLACK {
                return Err(Error::InvalidGeometry(format!(
                    "segment endpoint ({}, {}) outside the closed unit disk",
                    p.re(),
                    p.im()
                )));
            }
        }
        let dir = p1.z() - p0.z();
        Ok(Segment {
            p0,
            p1,
            dir,
            inv_len2: 1.0 / dir.norm_sqr(),
        })
    }

    pub fn p0(&self) -> Point {
        self.p0
    }

    pub fn p1(&self) -> Point {
        self.p1
    }

    pub fn length(&self) -> f64 {
        modulus(self.dir)
    }

    /// Point at parameter `t` in `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Complex64 {
        self.p0.z() + self.dir * t
    }

    #[inline]
    pub fn distance(&self, z: Complex64) -> f64 {
        let w = z - self.p0.z();
        let t = (dot(w, self.dir) * self.inv_len2).clamp(0.0, 1.0);
        modulus(w - self.dir * t)
    }

    /// Parameter of the orthogonal projection of `z` on the carrier line.
    fn project(&self, z: Complex64) -> f64 {
        dot(z - self.p0.z(), self.dir) * self.inv_len2
    }
}

/// Arc of the circle `|z - center| = radius` swept counter-clockwise from
/// `angle0` to `angle1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    center: Point,
    radius: f64,
    angle0: f64,
    angle1: f64,
    e0: Complex64,
    e1: Complex64,
}

impl CircularArc {
    pub fn new(center: Point, radius: f64, angle0: f64, angle1: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "arc radius {radius} must be positive"
            )));
        }
        if !(angle0.is_finite() && angle1.is_finite() && angle0 < angle1) {
            return Err(Error::InvalidGeometry(format!(
                "arc angles must satisfy angle0 < angle1 (got {angle0}, {angle1})"
            )));
        }
        if angle1 - angle0 > TAU + 1e-12 {
            return Err(Error::InvalidGeometry(format!(
                "arc sweep {} exceeds a full turn",
                angle1 - angle0
            )));
        }
        let c = center.z();
        let arc = CircularArc {
            center,
            radius,
            angle0,
            angle1,
            e0: c + Complex64::from_polar(radius, angle0),
            e1: c + Complex64::from_polar(radius, angle1),
        };
        if arc.max_modulus() > 1.0 + DISK_SLACK {
            return Err(Error::InvalidGeometry(format!(
                "arc reaches modulus {} outside the closed unit disk",
                arc.max_modulus()
            )));
        }
        Ok(arc)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angle0(&self) -> f64 {
        self.angle0
    }

    pub fn angle1(&self) -> f64 {
        self.angle1
    }

    pub fn sweep(&self) -> f64 {
        self.angle1 - self.angle0
    }

    pub fn start(&self) -> Complex64 {
        self.e0
    }

    pub fn end(&self) -> Complex64 {
        self.e1
    }

    pub fn point_at(&self, t: f64) -> Complex64 {
        self.center.z() + Complex64::from_polar(self.radius, self.angle0 + t * self.sweep())
    }

    /// Whether the direction `angle` (any real) falls inside the sweep.
    pub fn contains_angle(&self, angle: f64) -> bool {
        let delta = (angle - self.angle0).rem_euclid(TAU);
        delta <= self.sweep() + 1e-15 || TAU - delta <= 1e-15
    }

    fn max_modulus(&self) -> f64 {
        let c = self.center.z();
        let mut best = modulus(self.e0).max(modulus(self.e1));
        if c.norm() == 0.0 {
            best = best.max(self.radius);
        } else if self.contains_angle(c.arg()) {
            best = best.max(modulus(c) + self.radius);
        }
        best
    }

    #[inline]
    pub fn distance(&self, z: Complex64) -> f64 {
        let v = z - self.center.z();
        let r = modulus(v);
        if r == 0.0 {
            return self.radius;
        }
        if self.contains_angle(v.im.atan2(v.re)) {
            (r - self.radius).abs()
        } else {
            modulus(z - self.e0).min(modulus(z - self.e1))
        }
    }
}

/// One building block of a continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment(Segment),
    Arc(CircularArc),
}

impl Piece {
    pub fn distance(&self, z: Complex64) -> f64 {
        match self {
            Piece::Segment(s) => s.distance(z),
            Piece::Arc(a) => a.distance(z),
        }
    }

    pub fn point_at(&self, t: f64) -> Complex64 {
        match self {
            Piece::Segment(s) => s.point_at(t),
            Piece::Arc(a) => a.point_at(t),
        }
    }

    fn endpoints(&self) -> [Complex64; 2] {
        match self {
            Piece::Segment(s) => [s.p0.z(), s.p1.z()],
            Piece::Arc(a) => [a.e0, a.e1],
        }
    }

    /// Minimum distance between two pieces.
    pub fn distance_to_piece(&self, other: &Piece) -> f64 {
        match (self, other) {
            (Piece::Segment(a), Piece::Segment(b)) => segment_segment(a, b),
            (Piece::Segment(s), Piece::Arc(a)) | (Piece::Arc(a), Piece::Segment(s)) => {
                segment_arc(s, a)
            }
            (Piece::Arc(a), Piece::Arc(b)) => arc_arc(a, b),
        }
    }
}

fn endpoint_candidates(a: &Piece, b: &Piece) -> f64 {
    let mut best = f64::INFINITY;
    for e in a.endpoints() {
        best = best.min(b.distance(e));
    }
    for e in b.endpoints() {
        best = best.min(a.distance(e));
    }
    best
}

fn segment_segment(a: &Segment, b: &Segment) -> f64 {
    let (p, q) = (a.p0.z(), b.p0.z());
    let o1 = cross(a.dir, q - p);
    let o2 = cross(a.dir, b.p1.z() - p);
    let o3 = cross(b.dir, p - q);
    let o4 = cross(b.dir, a.p1.z() - q);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    endpoint_candidates(&Piece::Segment(*a), &Piece::Segment(*b))
}

fn segment_arc(s: &Segment, a: &CircularArc) -> f64 {
    let c = a.center.z();
    // Intersections of the segment with the full circle.
    let w = s.p0.z() - c;
    let qa = s.dir.norm_sqr();
    let qb = 2.0 * dot(w, s.dir);
    let qc = w.norm_sqr() - a.radius * a.radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if (0.0..=1.0).contains(&t) {
                let v = s.point_at(t) - c;
                if a.contains_angle(v.arg()) {
                    return 0.0;
                }
            }
        }
    }
    let mut best = endpoint_candidates(&Piece::Segment(*s), &Piece::Arc(*a));
    // Interior critical pair: foot of the perpendicular from the center.
    let t = s.project(c);
    if (0.0..=1.0).contains(&t) {
        let v = s.point_at(t) - c;
        let r = modulus(v);
        if r > 0.0 && a.contains_angle(v.arg()) {
            best = best.min((a.radius - r).abs());
        }
    }
    best
}

fn arc_arc(a: &CircularArc, b: &CircularArc) -> f64 {
    let (c1, c2) = (a.center.z(), b.center.z());
    let (r1, r2) = (a.radius, b.radius);
    let delta = c2 - c1;
    let d = modulus(delta);
    let mut best = endpoint_candidates(&Piece::Arc(*a), &Piece::Arc(*b));
    if d < 1e-15 {
        // Concentric: any common direction realizes |r1 - r2|.
        let overlap = a.contains_angle(b.angle0)
            || a.contains_angle(b.angle1)
            || b.contains_angle(a.angle0)
            || b.contains_angle(a.angle1);
        if overlap {
            best = best.min((r1 - r2).abs());
        }
        return best;
    }
    let u = delta / d;
    if d <= r1 + r2 && d >= (r1 - r2).abs() {
        let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
        let h = (r1 * r1 - along * along).max(0.0).sqrt();
        let perp = Complex64::new(-u.im, u.re);
        for sign in [-1.0, 1.0] {
            let p = c1 + u * along + perp * (sign * h);
            if a.contains_angle((p - c1).arg()) && b.contains_angle((p - c2).arg()) {
                return 0.0;
            }
        }
    }
    // Interior critical pairs lie on the line of centers.
    for s1 in [-1.0, 1.0] {
        let p = c1 + u * (s1 * r1);
        if !a.contains_angle((p - c1).arg()) {
            continue;
        }
        for s2 in [-1.0, 1.0] {
            let q = c2 + u * (s2 * r2);
            if b.contains_angle((q - c2).arg()) {
                best = best.min(modulus(p - q));
            }
        }
    }
    best
}

/// A connected finite union of segments and circular arcs in the closed disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Continuum {
    segments: Vec<Segment>,
    arcs: Vec<CircularArc>,
}

impl Continuum {
    pub fn new(segments: Vec<Segment>, arcs: Vec<CircularArc>) -> Result<Self> {
        if segments.is_empty() && arcs.is_empty() {
            return Err(Error::InvalidGeometry("continuum has no pieces".into()));
        }
        let continuum = Continuum { segments, arcs };
        let groups = continuum.connected_groups();
        if groups != 1 {
            return Err(Error::Disconnected { groups });
        }
        Ok(continuum)
    }

    pub fn from_pieces(pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let mut segments = Vec::new();
        let mut arcs = Vec::new();
        for p in pieces {
            match p {
                Piece::Segment(s) => segments.push(s),
                Piece::Arc(a) => arcs.push(a),
            }
        }
        Self::new(segments, arcs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn arcs(&self) -> &[CircularArc] {
        &self.arcs
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.segments
            .iter()
            .map(|s| Piece::Segment(*s))
            .chain(self.arcs.iter().map(|a| Piece::Arc(*a)))
    }

    pub fn piece_count(&self) -> usize {
        self.segments.len() + self.arcs.len()
    }

    /// Number of groups in the piece adjacency graph.
    fn connected_groups(&self) -> usize {
        let pieces: Vec<Piece> = self.pieces().collect();
        let mut seen = vec![false; pieces.len()];
        let mut groups = 0;
        for start in 0..pieces.len() {
            if seen[start] {
                continue;
            }
            groups += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for j in 0..pieces.len() {
                    if !seen[j] && pieces[i].distance_to_piece(&pieces[j]) <= ADJACENCY_TOL {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        groups
    }

    /// Evenly spaced parameter samples, `per_piece` points on each piece.
    pub fn sample(&self, per_piece: usize) -> Vec<Complex64> {
        let denom = (per_piece.max(2) - 1) as f64;
        self.pieces()
            .flat_map(|p| (0..per_piece.max(2)).map(move |i| p.point_at(i as f64 / denom)))
            .collect()
    }

    #[inline]
    pub fn distance(&self, z: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for s in &self.segments {
            best = best.min(s.distance(z));
        }
        for a in &self.arcs {
            best = best.min(a.distance(z));
        }
        best
    }
}

/// Euclidean distance from `z` to the continuum.
pub fn distance_to_continuum(z: Point, continuum: &Continuum) -> f64 {
    continuum.distance(z.z())
}

/// Directions of the spokes of `{z : (e^{i theta} z)^n in [-1, 0]}`.
pub fn star_angles(n: usize, theta: f64) -> Vec<f64> {
    (0..n)
        .map(|j| (PI + TAU * j as f64) / n as f64 - theta)
        .collect()
}

/// The star `{z : (e^{i theta} z)^n in [-1, 0]}`: `n` unit radial segments.
pub fn star_continuum(n: usize, theta: f64) -> Continuum {
    assert!(n >= 2, "a star needs at least two spokes");
    let segments = star_angles(n, theta)
        .into_iter()
        .map(|a| {
            let tip = Point::from_polar(1.0, a).expect("finite angle");
            Segment::new(Point::ORIGIN, tip).expect("unit spoke")
        })
        .collect();
    Continuum::new(segments, Vec::new()).expect("spokes meet at the origin")
}

/// Marked points `rho * exp(2 pi i (k-1) / n)` rotated by `-theta`.
pub fn extremal_points(n: usize, rho: f64, theta: f64) -> Vec<Point> {
    (0..n)
        .map(|k| Point::from_polar(rho, TAU * k as f64 / n as f64 - theta).expect("finite point"))
        .collect()
}

/// A full problem instance: `n` marked points on `|z| = rho` and a continuum.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    rho: f64,
    points: Vec<Point>,
    continuum: Continuum,
}

impl Configuration {
    pub fn new(rho: f64, points: Vec<Point>, continuum: Continuum) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "need at least two marked points, got {}",
                points.len()
            )));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!("rho = {rho} must lie in (0, 1)")));
        }
        for (index, p) in points.iter().enumerate() {
            if p.norm() >= 1.0 {
                return Err(Error::OutsideDisk { modulus: p.norm() });
            }
            if (p.norm() - rho).abs() > RADIUS_TOL {
                return Err(Error::Domain(format!(
                    "point {index} has modulus {} but rho = {rho}",
                    p.norm()
                )));
            }
            let distance = continuum.distance(p.z());
            if distance <= ON_CONTINUUM_TOL {
                return Err(Error::PointOnContinuum {
                    index,
                    distance,
                    limit: ON_CONTINUUM_TOL,
                });
            }
        }
        Ok(Configuration {
            rho,
            points,
            continuum,
        })
    }

    /// The star configuration with points on the sector bisectors.
    pub fn extremal(n: usize, rho: f64, theta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("n = {n} must be at least 2")));
        }
        Self::new(
            rho,
            extremal_points(n, rho, theta),
            star_continuum(n, theta),
        )
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn continuum(&self) -> &Continuum {
        &self.continuum
    }
}

/// Outcome of the grid flood-fill separation test.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// All marked points lie in pairwise distinct unblocked components.
    pub separated: bool,
    /// Component label of each marked point, `None` if its cell is blocked.
    pub labels: Vec<Option<usize>>,
    pub components: usize,
    pub blocked_cells: usize,
    pub grid_size: usize,
}

/// Certifies on a grid of cell size `resolution` that the marked points sit in
/// distinct components of `U \ E`.
pub fn verify_configuration(cfg: &Configuration, resolution: f64) -> Result<Verification> {
    if !(resolution > 0.0 && resolution <= 0.05) {
        return Err(Error::Domain(format!(
            "resolution {resolution} must lie in (0, 0.05]"
        )));
    }
    let e = cfg.continuum();
    for (index, p) in cfg.points().iter().enumerate() {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: p.norm() });
        }
        let distance = e.distance(p.z());
        if distance <= 2.0 * resolution {
            return Err(Error::PointOnContinuum {
                index,
                distance,
                limit: 2.0 * resolution,
            });
        }
    }

    let size = (2.0 / resolution).ceil() as usize;
    let half_diag = resolution * std::f64::consts::SQRT_2 / 2.0;
    let center = |i: usize| -1.0 + (i as f64 + 0.5) * resolution;
    let mut blocked = vec![false; size * size];
    let mut blocked_cells = 0;
    for iy in 0..size {
        for ix in 0..size {
            let z = Complex64::new(center(ix), center(iy));
            if modulus(z) >= 1.0 || e.distance(z) <= half_diag {
                blocked[iy * size + ix] = true;
                blocked_cells += 1;
            }
        }
    }

    const UNLABELED: usize = usize::MAX;
    let mut label = vec![UNLABELED; size * size];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..size * size {
        if blocked[start] || label[start] != UNLABELED {
            continue;
        }
        label[start] = components;
        queue.push_back(start);
        while let Some(cell) = queue.pop_front() {
            let (ix, iy) = (cell % size, cell / size);
            let mut visit = |nx: usize, ny: usize| {
                let next = ny * size + nx;
                if !blocked[next] && label[next] == UNLABELED {
                    label[next] = components;
                    queue.push_back(next);
                }
            };
            if ix > 0 {
                visit(ix - 1, iy);
            }
            if ix + 1 < size {
                visit(ix + 1, iy);
            }
            if iy > 0 {
                visit(ix, iy - 1);
            }
            if iy + 1 < size {
                visit(ix, iy + 1);
            }
        }
        components += 1;
    }

    let cell_of = |x: f64| (((x + 1.0) / resolution).floor() as usize).min(size - 1);
    let labels: Vec<Option<usize>> = cfg
        .points()
        .iter()
        .map(|p| {
            let cell = cell_of(p.im()) * size + cell_of(p.re());
            (!blocked[cell]).then_some(label[cell])
        })
        .collect();
    let mut distinct: Vec<usize> = labels.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let separated = labels.iter().all(Option::is_some) && distinct.len() == labels.len();

    Ok(Verification {
        separated,
        labels,
        components,
        blocked_cells,
        grid_size: size,
    })
}

/// Hyperbolic distance `log((1+t)/(1-t))`, `t` the pseudo-hyperbolic distance.
pub fn hyperbolic_distance(z: Point, w: Point) -> Result<f64> {
    for p in [z, w] {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: p.norm() });
        }
    }
    let (z, w) = (z.z(), w.z());
    let t = (z - w).norm() / (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    Ok(2.0 * t.atanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> Point {
        Point::new(re, im).unwrap()
    }

    fn seg(a: Point, b: Point) -> Segment {
        Segment::new(a, b).unwrap()
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(matches!(
            Point::new(f64::NAN, 0.0),
            Err(Error::NonFinite { .. })
        ));
        assert!(Point::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn segment_invariants() {
        assert!(Segment::new(p(0.1, 0.1), p(0.1, 0.1)).is_err());
        assert!(Segment::new(p(0.0, 0.0), p(1.1, 0.0)).is_err());
        assert!(Segment::new(p(0.0, 0.0), p(1.0, 0.0)).is_ok());
    }

    #[test]
    fn arc_invariants() {
        assert!(CircularArc::new(p(0.0, 0.0), 0.5, 1.0, 0.5).is_err());
        assert!(CircularArc::new(p(0.0, 0.0), 0.5, 0.0, 7.0).is_err());
        assert!(CircularArc::new(p(0.5, 0.0), 0.6, -0.1, 0.1).is_err());
        assert!(CircularArc::new(p(0.5, 0.0), 0.6, 2.0, 4.0).is_ok());
    }

    #[test]
    fn distance_to_vertical_diameter() {
        let e = Continuum::new(vec![seg(p(0.0, -1.0), p(0.0, 1.0))], vec![]).unwrap();
        assert_eq!(distance_to_continuum(Point::ORIGIN, &e), 0.0);
        assert_abs_diff_eq!(distance_to_continuum(p(0.5, 0.0), &e), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn distance_to_three_star_matches_analytic_value() {
        // Dense sampling with 1e6 points on E gives 0.0598076211362691.
        let e = star_continuum(3, 0.0);
        let d = distance_to_continuum(p(0.3, 0.4), &e);
        assert_abs_diff_eq!(d, 0.059_807_621_136_269_14, epsilon = 1e-7);
        assert_abs_diff_eq!(d, 0.3 * 3f64.sqrt() / 2.0 - 0.2, epsilon = 1e-15);
    }

    #[test]
    fn arc_distance_cases() {
        let a = CircularArc::new(p(0.0, 0.0), 0.5, 0.0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(a.distance(Complex64::new(0.8, 0.0)), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(a.distance(Complex64::new(0.0, 0.0)), 0.5, epsilon = 1e-15);
        // Outside the sweep the nearest point is an endpoint.
        assert_abs_diff_eq!(a.distance(Complex64::new(0.5, -0.5)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn star_continuum_spoke_directions() {
        let two = star_continuum(2, 0.0);
        let tips: Vec<Complex64> = two.segments().iter().map(|s| s.p1().z()).collect();
        assert_abs_diff_eq!(tips[0].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tips[0].im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tips[1].im, -1.0, epsilon = 1e-15);

        let angles = star_angles(3, 0.0);
        for (a, want) in angles.iter().zip([PI / 3.0, PI, 5.0 * PI / 3.0]) {
            assert_abs_diff_eq!(*a, want, epsilon = 1e-15);
        }
        let rotated = star_angles(3, PI / 6.0);
        for (a, b) in rotated.iter().zip(&angles) {
            assert_abs_diff_eq!(*a, b - PI / 6.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn disconnected_continuum_rejected() {
        let s1 = seg(p(0.0, 0.0), p(0.5, 0.0));
        let s2 = seg(p(0.0, 0.5), p(0.5, 0.5));
        assert_eq!(
            Continuum::new(vec![s1, s2], vec![]),
            Err(Error::Disconnected { groups: 2 })
        );
    }

    #[test]
    fn crossing_segments_and_arcs_are_adjacent() {
        let s1 = seg(p(-0.5, 0.0), p(0.5, 0.0));
        let s2 = seg(p(0.0, -0.5), p(0.0, 0.5));
        assert!(Continuum::new(vec![s1, s2], vec![]).is_ok());
        // Arc crossing the segment in its interior.
        let a = CircularArc::new(p(0.0, 0.0), 0.3, -0.8, 0.8).unwrap();
        assert_eq!(Piece::Segment(s1).distance_to_piece(&Piece::Arc(a)), 0.0);
        // Two arcs crossing near (0.25, 0.166).
        let b = CircularArc::new(p(0.5, 0.0), 0.3, 1.0, 3.0).unwrap();
        assert_eq!(Piece::Arc(a).distance_to_piece(&Piece::Arc(b)), 0.0);
        assert!(Continuum::new(vec![], vec![a, b]).is_ok());
    }

    #[test]
    fn piece_distances_against_sampling() {
        let s = seg(p(-0.2, 0.5), p(0.4, 0.6));
        let a = CircularArc::new(p(0.0, -0.1), 0.3, 0.2, 2.5).unwrap();
        let b = CircularArc::new(p(0.2, 0.1), 0.15, -2.5, 0.5).unwrap();
        let pieces = [Piece::Segment(s), Piece::Arc(a), Piece::Arc(b)];
        for (i, x) in pieces.iter().enumerate() {
            for y in &pieces[i + 1..] {
                let brute = (0..=200_000)
                    .map(|k| y.distance(x.point_at(k as f64 / 200_000.0)))
                    .fold(f64::INFINITY, f64::min);
                let exact = x.distance_to_piece(y);
                assert!(exact <= brute + 1e-12, "{exact} > {brute}");
                assert!(brute - exact < 1e-5, "{exact} vs {brute}");
            }
        }
    }

    #[test]
    fn extremal_configurations_are_separated() {
        for n in 2..=8 {
            for r in 1..=9 {
                let rho = r as f64 / 10.0;
                let cfg = Configuration::extremal(n, rho, 0.0).unwrap();
                let v = verify_configuration(&cfg, 0.005).unwrap();
                assert!(v.separated, "n = {n}, rho = {rho}: {v:?}");
            }
        }
    }

    #[test]
    fn diameter_separates_opposite_points() {
        let cfg = Configuration::new(0.5, vec![p(0.5, 0.0), p(-0.5, 0.0)], star_continuum(2, 0.0))
            .unwrap();
        assert!(verify_configuration(&cfg, 0.005).unwrap().separated);
    }

    #[test]
    fn same_sector_points_not_separated() {
        let pts = vec![
            Point::from_polar(0.5, 0.1).unwrap(),
            Point::from_polar(0.5, -0.1).unwrap(),
            Point::from_polar(0.5, PI * 2.0 / 3.0).unwrap(),
        ];
        let cfg = Configuration::new(0.5, pts, star_continuum(3, 0.0)).unwrap();
        let v = verify_configuration(&cfg, 0.005).unwrap();
        assert!(!v.separated);
        assert_eq!(v.labels[0], v.labels[1]);
    }

    #[test]
    fn verify_errors() {
        let near = vec![
            Point::from_polar(0.5, PI / 3.0 + 0.01).unwrap(),
            p(0.5, 0.0),
        ];
        let cfg = Configuration::new(0.5, near, star_continuum(3, 0.0)).unwrap();
        assert!(matches!(
            verify_configuration(&cfg, 0.005),
            Err(Error::PointOnContinuum { index: 0, .. })
        ));
        let cfg = Configuration::extremal(3, 0.5, 0.0).unwrap();
        assert!(verify_configuration(&cfg, 0.1).is_err());
        assert!(matches!(
            Configuration::new(0.5, vec![p(0.0, 0.5), p(0.0, -0.5)], star_continuum(2, 0.0)),
            Err(Error::PointOnContinuum { .. })
        ));
    }

    #[test]
    fn hyperbolic_distance_examples() {
        let d = hyperbolic_distance(Point::ORIGIN, p(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(d, 3f64.ln(), epsilon = 1e-15);
        assert_eq!(hyperbolic_distance(p(0.2, 0.3), p(0.2, 0.3)).unwrap(), 0.0);
        // t = 0.6 / 1.09 for the pair (0.3, -0.3); mpmath: 1.2380784168124468.
        let d = hyperbolic_distance(p(0.3, 0.0), p(-0.3, 0.0)).unwrap();
        assert_abs_diff_eq!(d, 1.238_078_416_812_446_8, epsilon = 1e-14);
        assert!(matches!(
            hyperbolic_distance(p(1.0, 0.0), Point::ORIGIN),
            Err(Error::OutsideDisk { .. })
        ));
    }
}
