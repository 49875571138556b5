//! The Ψ transform, both sides of the extremal inequality, the minmax
//! corollary and the closed-form identities behind the proof.

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::conformal::{
    inner_radius_sector, inner_radius_slit_complement, Sector, SlitComplementDomain,
};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::harmonic::{extremal_measure, wos_estimate_with, Estimate, Execution, WosParams};
use crate::quadrature::integrate;

/// Means at or above `1 - SATURATION` send the left side to `+inf`.
pub const SATURATION: f64 = 1e-9;
/// Width of the noise band, in standard errors.
pub const NOISE_BAND: f64 = 3.0;
pub const QUADRATURE_TOL: f64 = 1e-12;
pub const QUADRATURE_MAX_EVALUATIONS: usize = 1_000_000;

/// `psi(x) = log((1 + sin(pi x / 2)) / (1 - sin(pi x / 2)))` on `[0, 1]`,
/// with `psi(1) = +inf`.
pub fn psi(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("psi is defined on [0, 1], got {x}")));
    }
    if x == 1.0 {
        return Ok(f64::INFINITY);
    }
    if x < 0.5 {
        Ok(2.0 * (PI * x / 2.0).sin().atanh())
    } else {
        // Same function as -2 log tan(pi (1 - x) / 4), free of the
        // cancellation in 1 - sin near x = 1.
        Ok(-2.0 * (PI * (1.0 - x) / 4.0).tan().ln())
    }
}

/// `psi'(x) = pi / cos(pi x / 2)`.
pub fn psi_derivative(x: f64) -> f64 {
    PI / (PI * (1.0 - x) / 2.0).sin()
}

/// `(2/pi) asin(tanh(y / 2))`; maps `+inf` back to 1.
pub fn psi_inverse(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain(format!("psi_inverse needs y >= 0, got {y}")));
    }
    if y.is_infinite() {
        return Ok(1.0);
    }
    if y < 1.0 {
        Ok(2.0 / PI * (y / 2.0).tanh().asin())
    } else {
        Ok(1.0 - 4.0 / PI * (-y / 2.0).exp().atan())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    HoldsWithinNoise,
    ViolationCandidate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "HOLDS",
            Verdict::HoldsWithinNoise => "HOLDS_WITHIN_NOISE",
            Verdict::ViolationCandidate => "VIOLATION_CANDIDATE",
        }
    }
}

pub(crate) fn serialize_extended<S: Serializer>(
    x: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*x)
    }
}

/// Both sides of the inequality for one configuration, with uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub omegas: Vec<Estimate>,
    #[serde(serialize_with = "serialize_extended")]
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    /// Assembles the report from per-point estimates. The left-side error is
    /// propagated to first order through `psi'`.
    pub fn from_estimates(rho: f64, omegas: Vec<Estimate>) -> Result<Self> {
        let n = omegas.len();
        if n < 2 {
            return Err(Error::Domain(format!(
                "need at least two estimates, got {n}"
            )));
        }
        let rhs = -(n as f64) * rho.ln();
        if omegas.iter().any(|e| e.mean >= 1.0 - SATURATION) {
            return Ok(BoundReport {
                omegas,
                lhs: f64::INFINITY,
                lhs_stderr: 0.0,
                rhs,
                margin: f64::INFINITY,
                verdict: Verdict::Holds,
            });
        }
        let mut lhs = 0.0;
        let mut variance = 0.0;
        for e in &omegas {
            lhs += psi(e.mean)?;
            variance += (psi_derivative(e.mean) * e.stderr).powi(2);
        }
        lhs /= n as f64;
        let lhs_stderr = variance.sqrt() / n as f64;
        let margin = lhs - rhs;
        let band = NOISE_BAND * lhs_stderr;
        let verdict = if margin > band {
            Verdict::Holds
        } else if margin < -band {
            Verdict::ViolationCandidate
        } else {
            Verdict::HoldsWithinNoise
        };
        Ok(BoundReport {
            omegas,
            lhs,
            lhs_stderr,
            rhs,
            margin,
            verdict,
        })
    }
}

/// Estimates every `omega_k` and evaluates the inequality.
pub fn check_inequality(cfg: &Configuration, params: &WosParams) -> Result<BoundReport> {
    check_inequality_with(cfg, params, Execution::default())
}

pub fn check_inequality_with(
    cfg: &Configuration,
    params: &WosParams,
    execution: Execution,
) -> Result<BoundReport> {
    let omegas = (1..=cfg.n())
        .map(|k| wos_estimate_with(cfg, k, params, execution))
        .collect::<Result<Vec<_>>>()?;
    BoundReport::from_estimates(cfg.rho(), omegas)
}

/// Lower bound for `max_k omega(a_k*, E, D_k)` over all admissible continua.
pub fn minmax_lower_bound(n: usize, rho: f64) -> f64 {
    extremal_measure(n, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub quadrature: f64,
    pub closed_form: f64,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        (self.quadrature - self.closed_form).abs()
    }
}

/// Integral of `1 / r(G, w)` over `[-1, 0]` by adaptive quadrature, next to
/// its closed form `psi(theta / pi) / 4`.
pub fn integral_identity_check(theta: f64) -> Result<IdentityCheck> {
    let domain = SlitComplementDomain::new(theta)?;
    let q = integrate(
        |w| 1.0 / inner_radius_slit_complement(&domain, w).expect("w within [-1, 0]"),
        -1.0,
        0.0,
        QUADRATURE_TOL,
        QUADRATURE_MAX_EVALUATIONS,
    )?;
    Ok(IdentityCheck {
        quadrature: q.value,
        closed_form: psi(theta / PI)? / 4.0,
    })
}

/// Radial chain at the extremal sectors: `int_rho^1 dr / r(sector, r)`, the
/// bound `-(n/4) log rho`, and the harmonic side `(1/n) sum psi(omega*) / 4`
/// both in closed form and through the slit-domain integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialChain {
    pub radial_integral: f64,
    pub bound: f64,
    pub harmonic_side: f64,
    pub slit_integral: f64,
}

impl RadialChain {
    pub fn residual(&self) -> f64 {
        (self.radial_integral - self.bound)
            .abs()
            .max((self.harmonic_side - self.bound).abs())
    }

    pub fn slit_residual(&self) -> f64 {
        (self.slit_integral - self.bound).abs()
    }
}

pub fn radial_chain_check(n: usize, rho: f64) -> Result<RadialChain> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} must lie in (0, 1)")));
    }
    let sector = Sector::new(n, 0.0)?;
    let radial = integrate(
        |r| 1.0 / inner_radius_sector(&sector, r).expect("r > 0"),
        rho,
        1.0,
        QUADRATURE_TOL * 1e-1,
        QUADRATURE_MAX_EVALUATIONS,
    )?;
    let omega = extremal_measure(n, rho);
    let harmonic_side = (0..n).map(|_| psi(omega)).sum::<Result<f64>>()? / (4.0 * n as f64);
    let slit_integral = integral_identity_check(PI * omega)?.quadrature;
    Ok(RadialChain {
        radial_integral: radial.value,
        bound: -(n as f64) / 4.0 * rho.ln(),
        harmonic_side,
        slit_integral,
    })
}
