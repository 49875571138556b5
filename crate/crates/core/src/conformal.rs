//! Explicit conformal maps: disk automorphisms, the slit-complement chain and
//! inner radii of the canonical domains.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CircularArc, Continuum, Piece, Point, Segment};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Disk automorphism `z -> e^{i phi} (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusDiskAuto {
    a: Complex64,
    phi: f64,
    rotation: Complex64,
}

impl MobiusDiskAuto {
    pub fn new(a: Point, phi: f64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: a.norm() });
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("rotation angle {phi} is not finite")));
        }
        Ok(MobiusDiskAuto {
            a: a.z(),
            phi,
            rotation: Complex64::from_polar(1.0, phi),
        })
    }

    pub fn rotation(phi: f64) -> Result<Self> {
        Self::new(Point::ORIGIN, phi)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    #[inline]
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        self.rotation * (z - self.a) / (ONE - self.a.conj() * z)
    }

    pub fn inverse(&self) -> MobiusDiskAuto {
        let b = -self.a * self.rotation;
        MobiusDiskAuto {
            a: b,
            phi: -self.phi,
            rotation: self.rotation.conj(),
        }
    }

    /// Image of a segment or arc. Möbius maps send circles and lines to
    /// circles and lines, so the image is again a segment or an arc through
    /// the images of the start, midpoint and end.
    pub fn map_piece(&self, piece: &Piece) -> Result<Piece> {
        let [q0, qm, q1] = [0.0, 0.5, 1.0].map(|t| self.apply_complex(piece.point_at(t)));
        let chord = q1 - q0;
        let bend = (qm - q0).re * chord.im - (qm - q0).im * chord.re;
        if bend.abs() <= 1e-13 * chord.norm_sqr() {
            let seg = Segment::new(Point::from_complex(q0)?, Point::from_complex(q1)?)?;
            return Ok(Piece::Segment(seg));
        }
        let center = circumcenter(q0, qm, q1);
        let radius = (q0 - center).norm();
        let a0 = (q0 - center).arg();
        let am = (qm - center).arg();
        let a1 = (q1 - center).arg();
        let tau = 2.0 * PI;
        let to_mid = (am - a0).rem_euclid(tau);
        let to_end = (a1 - a0).rem_euclid(tau);
        let (start, sweep) = if to_mid < to_end {
            (a0, to_end)
        } else {
            (a1, tau - to_end)
        };
        let arc = CircularArc::new(Point::from_complex(center)?, radius, start, start + sweep)?;
        Ok(Piece::Arc(arc))
    }

    pub fn map_continuum(&self, continuum: &Continuum) -> Result<Continuum> {
        let pieces = continuum
            .pieces()
            .map(|p| self.map_piece(&p))
            .collect::<Result<Vec<_>>>()?;
        Continuum::from_pieces(pieces)
    }
}

fn circumcenter(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let (nb, nc) = (b.norm_sqr(), c.norm_sqr());
    a + Complex64::new((c.im * nb - b.im * nc) / d, (b.re * nc - c.re * nb) / d)
}

/// Applies `m` to a point of the closed disk.
pub fn mobius_apply(m: &MobiusDiskAuto, z: Point) -> Result<Point> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    Point::from_complex(m.apply_complex(z.z()))
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

/// The sphere minus the boundary arc `{|w| = 1, |arg w| <= theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitComplementDomain {
    theta: f64,
}

impl SlitComplementDomain {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta < PI {
            Ok(SlitComplementDomain { theta })
        } else {
            Err(Error::Domain(format!(
                "half-angle {theta} must lie in (0, pi)"
            )))
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn on_slit(&self, w: Complex64) -> bool {
        (w.norm() - 1.0).abs() <= 1e-12 && w.arg().abs() <= self.theta + 1e-12
    }
}

/// Inverse Joukowski branch `w2 - sqrt(w2^2 - 1)` with modulus at most one.
/// Evaluated as the reciprocal of the larger root to avoid cancellation.
fn joukowski_inverse(w2: Complex64) -> Complex64 {
    if w2.norm() > 1e100 {
        return 0.5 / w2;
    }
    let s = (w2 * w2 - ONE).sqrt();
    let (plus, minus) = (w2 + s, w2 - s);
    if plus.norm() >= minus.norm() {
        ONE / plus
    } else {
        ONE / minus
    }
}

/// Conformal map of the slit complement onto the unit disk through
/// `w1 = (w-1)/(w+1)`, `w2 = -i w1 ctg(theta/2)` and the inverse Joukowski
/// branch sending `w2 = inf` (that is, `w = -1`) to zero.
pub fn slit_map_chain(d: &SlitComplementDomain, w: SpherePoint) -> Result<Complex64> {
    let cot = 1.0 / (d.theta / 2.0).tan();
    let w1 = match w {
        SpherePoint::Infinity => ONE,
        SpherePoint::Finite(w) => {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::NonFinite { re: w.re, im: w.im });
            }
            if d.on_slit(w) {
                return Err(Error::OnSlit);
            }
            if w == -ONE {
                return Ok(Complex64::new(0.0, 0.0));
            }
            (w - ONE) / (w + ONE)
        }
    };
    Ok(joukowski_inverse(-I * w1 * cot))
}

/// Inner radius of the slit complement at a point `w` of `[-1, 0]`.
pub fn inner_radius_slit_complement(d: &SlitComplementDomain, w: f64) -> Result<f64> {
    if !(-1.0..=0.0).contains(&w) {
        return Err(Error::Domain(format!("w = {w} must lie in [-1, 0]")));
    }
    let half = d.theta / 2.0;
    // w^2 - 2w cos(theta) + 1, written as a sum of non-negative terms on
    // [-1, 0] so it keeps full precision when theta is close to pi.
    let c = half.cos();
    let q = (w + 1.0) * (w + 1.0) - 4.0 * w * c * c;
    Ok((1.0 - w) / half.sin() * q.sqrt())
}

/// Unbounded sector `{|arg z - bisector| < pi / n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    n: usize,
    bisector_angle: f64,
}

impl Sector {
    pub fn new(n: usize, bisector_angle: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "sector count n = {n} must be at least 2"
            )));
        }
        Ok(Sector { n, bisector_angle })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bisector_angle(&self) -> f64 {
        self.bisector_angle
    }
}

/// Inner radius of the sector at the bisector point at distance `r`.
pub fn inner_radius_sector(s: &Sector, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(4.0 * r / s.n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCheck {
    pub geometric_mean: f64,
    pub bound: f64,
}

impl SectorCheck {
    pub fn residual(&self) -> f64 {
        (self.geometric_mean - self.bound).abs()
    }
}

/// Geometric mean of the inner radii of the `n` equal sectors at the points
/// `r e^{2 pi i (k-1)/n}`, together with the bound `4r/n`.
pub fn sector_product_check(n: usize, r: f64) -> Result<SectorCheck> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} must lie in (0, 1)")));
    }
    let mut log_sum = 0.0;
    for k in 0..n {
        let sector = Sector::new(n, 2.0 * PI * k as f64 / n as f64)?;
        log_sum += inner_radius_sector(&sector, r)?.ln();
    }
    Ok(SectorCheck {
        geometric_mean: (log_sum / n as f64).exp(),
        bound: 4.0 * r / n as f64,
    })
}
