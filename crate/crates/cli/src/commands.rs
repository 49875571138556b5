//! The command verbs. Each returns the bytes for standard output; anything
//! time-dependent is left to the caller's error stream.

use std::f64::consts::PI;
use std::path::Path;

use hmeasure::bound::{
    check_inequality, integral_identity_check, psi, psi_inverse, radial_chain_check, BoundReport,
    Verdict,
};
use hmeasure::conformal::sector_product_check;
use hmeasure::geometry::{verify_configuration, Configuration};
use hmeasure::harmonic::{extremal_measure, wos_estimate, Estimate, WosParams};
use hmeasure::search::{minimize, Objective, SearchOptions, SearchResult, SEPARATION_RESOLUTION};
use serde::Serialize;

use crate::error::CliError;
use crate::scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a command produced: the payload and, for verification commands, a
/// failure to report after it.
#[derive(Debug)]
pub struct Outcome {
    pub payload: Vec<u8>,
    pub failure: Option<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(payload: String) -> Self {
        Outcome {
            payload: payload.into_bytes(),
            failure: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WalkArgs {
    pub samples: u64,
    pub epsilon: f64,
    pub seed: u64,
}

impl WalkArgs {
    fn params(&self) -> Result<WosParams, CliError> {
        let params = WosParams {
            epsilon: self.epsilon,
            samples: self.samples,
            seed: self.seed,
            ..WosParams::default()
        };
        params.validate().map_err(|e| {
            let field = if self.samples == 0 {
                "samples"
            } else {
                "epsilon"
            };
            CliError::validation(field, e)
        })?;
        Ok(params)
    }
}

#[derive(Serialize)]
struct Parameters {
    n: usize,
    rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    epsilon: f64,
    max_steps: u64,
    samples: u64,
    seed: u64,
    separation_resolution: f64,
}

#[derive(Serialize)]
struct PointEstimate {
    k: usize,
    #[serde(flatten)]
    estimate: Estimate,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    scene: String,
    parameters: Parameters,
    estimates: Vec<PointEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<BoundReport>,
    seed: u64,
}

fn load_verified(path: &Path) -> Result<Configuration, CliError> {
    let cfg = scene::load(path)?.configuration;
    let check = verify_configuration(&cfg, SEPARATION_RESOLUTION)
        .map_err(|e| CliError::validation("points", e))?;
    if !check.separated {
        return Err(CliError::validation(
            "continuum",
            format!(
                "marked points are not in distinct components of the complement (labels {:?})",
                check.labels
            ),
        ));
    }
    Ok(cfg)
}

fn parameters(cfg: &Configuration, k: Option<usize>, p: &WosParams) -> Parameters {
    Parameters {
        n: cfg.n(),
        rho: cfg.rho(),
        k,
        epsilon: p.epsilon,
        max_steps: p.max_steps,
        samples: p.samples,
        seed: p.seed,
        separation_resolution: SEPARATION_RESOLUTION,
    }
}

fn abort_warnings(estimates: &[PointEstimate]) -> Vec<String> {
    estimates
        .iter()
        .filter(|e| e.estimate.abort_warning())
        .map(|e| {
            format!(
                "omega_{}: {} of {} walks hit the step limit",
                e.k, e.estimate.aborted, e.estimate.samples
            )
        })
        .collect()
}

const ESTIMATE_HEADER: [&str; 7] = [
    "k",
    "mean",
    "stderr",
    "samples",
    "hit_e",
    "hit_circle",
    "aborted",
];

fn estimate_fields(e: &PointEstimate) -> Vec<String> {
    let x = &e.estimate;
    vec![
        e.k.to_string(),
        x.mean.to_string(),
        x.stderr.to_string(),
        x.samples.to_string(),
        x.hit_e.to_string(),
        x.hit_circle.to_string(),
        x.aborted.to_string(),
    ]
}

/// One row per record, header taken from the field names.
fn serialize_csv<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Header plus rows of already formatted fields.
fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn fmt_extended(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        x.to_string()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn estimate(
    path: &Path,
    k: usize,
    walk: WalkArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let cfg = load_verified(path)?;
    if k == 0 || k > cfg.n() {
        return Err(CliError::validation(
            "k",
            format!("k = {k} must lie in 1..={}", cfg.n()),
        ));
    }
    let params = walk.params()?;
    let estimate = wos_estimate(&cfg, k, &params).map_err(|e| CliError::validation("points", e))?;
    let estimates = vec![PointEstimate { k, estimate }];
    let warnings = abort_warnings(&estimates);
    let payload = match format {
        Format::Csv => csv_table(&ESTIMATE_HEADER, estimates.iter().map(estimate_fields)),
        Format::Json => to_json(&RunReport {
            command: "estimate",
            scene: path.display().to_string(),
            parameters: parameters(&cfg, Some(k), &params),
            estimates,
            bound: None,
            seed: params.seed,
        }),
    };
    Ok(Outcome {
        warnings,
        ..Outcome::ok(payload)
    })
}

pub fn check_bound(path: &Path, walk: WalkArgs, format: Format) -> Result<Outcome, CliError> {
    let cfg = load_verified(path)?;
    let params = walk.params()?;
    let report = check_inequality(&cfg, &params).map_err(|e| CliError::validation("points", e))?;
    let estimates: Vec<_> = report
        .omegas
        .iter()
        .enumerate()
        .map(|(i, e)| PointEstimate {
            k: i + 1,
            estimate: *e,
        })
        .collect();
    let warnings = abort_warnings(&estimates);
    let failure = (report.verdict == Verdict::ViolationCandidate).then(|| {
        format!(
            "inequality violated beyond noise: margin {} with lhs stderr {}",
            report.margin, report.lhs_stderr
        )
    });
    let payload = match format {
        Format::Csv => {
            let header: Vec<&str> = ESTIMATE_HEADER
                .iter()
                .copied()
                .chain(["lhs", "lhs_stderr", "rhs", "margin", "verdict"])
                .collect();
            let summary = [
                fmt_extended(report.lhs),
                report.lhs_stderr.to_string(),
                report.rhs.to_string(),
                fmt_extended(report.margin),
                report.verdict.as_str().to_string(),
            ];
            csv_table(
                &header,
                estimates.iter().map(|e| {
                    let mut row = estimate_fields(e);
                    row.extend(summary.iter().cloned());
                    row
                }),
            )
        }
        Format::Json => to_json(&RunReport {
            command: "check-bound",
            scene: path.display().to_string(),
            parameters: parameters(&cfg, None, &params),
            estimates: Vec::new(),
            bound: Some(report),
            seed: params.seed,
        }),
    };
    Ok(Outcome {
        payload: payload.into_bytes(),
        failure,
        warnings,
    })
}

/// Inclusive grid `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| {
        CliError::validation(
            "theta-grid",
            format!("{m} in `{text}` (expected start:stop:step)"),
        )
    };
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("need three fields"));
    };
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
        return Err(bad("need finite start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

pub const INTEGRAL_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

struct Case {
    check: &'static str,
    case: String,
    value: f64,
    reference: f64,
    tol: f64,
}

#[derive(Serialize)]
struct IdentityRow<'a> {
    check: &'a str,
    case: &'a str,
    value: f64,
    reference: f64,
    residual: f64,
    tol: f64,
    pass: bool,
}

impl Case {
    fn residual(&self) -> f64 {
        (self.value - self.reference).abs()
    }

    fn passed(&self) -> bool {
        self.residual() <= self.tol
    }
}

fn rho_grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|i| i as f64 / 20.0)
}

/// Closed-form identity suite. `tol` overrides every per-check tolerance.
pub fn identities(theta_grid: &str, tol: Option<f64>) -> Result<Outcome, CliError> {
    let thetas = parse_grid(theta_grid)?;
    if let Some(&bad) = thetas.iter().find(|t| !(**t > 0.0 && **t < PI)) {
        return Err(CliError::validation(
            "theta-grid",
            format!("theta = {bad} must lie in (0, pi)"),
        ));
    }
    if let Some(t) = tol {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::validation(
                "tol",
                "tolerance must be non-negative",
            ));
        }
    }
    let integral_tol = tol.unwrap_or(INTEGRAL_TOL);
    let closed_tol = tol.unwrap_or(CLOSED_FORM_TOL);
    let internal = |e: hmeasure::Error| CliError::Verification(e.to_string());
    let mut cases = Vec::new();

    for &theta in &thetas {
        let c = integral_identity_check(theta).map_err(internal)?;
        cases.push(Case {
            check: "integral",
            case: format!("theta={theta}"),
            value: c.quadrature,
            reference: c.closed_form,
            tol: integral_tol,
        });
    }
    for i in 0..1000 {
        let x = i as f64 / 1000.0;
        let back = psi_inverse(psi(x).map_err(internal)?).map_err(internal)?;
        cases.push(Case {
            check: "psi_round_trip",
            case: format!("x={x}"),
            value: back,
            reference: x,
            tol: closed_tol,
        });
    }
    for n in 2..=8 {
        for rho in rho_grid() {
            cases.push(Case {
                check: "extremal_measure",
                case: format!("n={n};rho={rho}"),
                value: psi(extremal_measure(n, rho)).map_err(internal)?,
                reference: -(n as f64) * rho.ln(),
                tol: closed_tol,
            });
        }
    }
    for n in 2..=6 {
        for i in 1..=9 {
            let r = i as f64 / 10.0;
            let c = sector_product_check(n, r).map_err(internal)?;
            cases.push(Case {
                check: "sector_product",
                case: format!("n={n};r={r}"),
                value: c.geometric_mean,
                reference: c.bound,
                tol: closed_tol,
            });
        }
    }
    for n in 2..=8 {
        for rho in rho_grid() {
            let c = radial_chain_check(n, rho).map_err(internal)?;
            for (check, value, tol) in [
                ("radial_chain", c.radial_integral, closed_tol),
                ("radial_chain_harmonic", c.harmonic_side, closed_tol),
                ("radial_chain_slit", c.slit_integral, integral_tol),
            ] {
                cases.push(Case {
                    check,
                    case: format!("n={n};rho={rho}"),
                    value,
                    reference: c.bound,
                    tol,
                });
            }
        }
    }

    let failed = cases.iter().filter(|c| !c.passed()).count();
    let s = serialize_csv(cases.iter().map(|c| IdentityRow {
        check: c.check,
        case: &c.case,
        value: c.value,
        reference: c.reference,
        residual: c.residual(),
        tol: c.tol,
        pass: c.passed(),
    }));
    let failure = (failed > 0).then(|| {
        format!(
            "{failed} of {} identity cases exceed tolerance",
            cases.len()
        )
    });
    Ok(Outcome {
        payload: s.into_bytes(),
        failure,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObjectiveArg {
    MeanPsi,
    MaxOmega,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MeanPsi => Objective::MeanPsi,
            ObjectiveArg::MaxOmega => Objective::MaxOmega,
        }
    }
}

pub const SEARCH_SAMPLES: u64 = 20_000;

#[derive(Serialize)]
struct SearchReport<'a> {
    command: &'static str,
    parameters: &'a SearchOptions,
    n: usize,
    rho: f64,
    objective: &'static str,
    extremal_value: f64,
    best_magnitude: f64,
    result: &'a SearchResult,
}

pub fn search(
    n: usize,
    rho: f64,
    objective: ObjectiveArg,
    budget: usize,
    walk: WalkArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(CliError::validation(
            "n",
            format!("n = {n} must be at least 2"),
        ));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(CliError::validation(
            "rho",
            format!("rho = {rho} must lie in (0, 1)"),
        ));
    }
    let mut options = SearchOptions::new(budget, walk.seed, walk.samples);
    options.wos = walk.params()?;
    let result = minimize(n, rho, objective.into(), &options)
        .map_err(|e| CliError::validation("budget", e))?;
    let payload = match format {
        Format::Csv => serialize_csv(&result.history),
        Format::Json => to_json(&SearchReport {
            command: "search",
            parameters: &options,
            n,
            rho,
            objective: match objective {
                ObjectiveArg::MeanPsi => "MEAN_PSI",
                ObjectiveArg::MaxOmega => "MAX_OMEGA",
            },
            extremal_value: Objective::from(objective).extremal_value(n, rho),
            best_magnitude: result.best_params.magnitude(),
            result: &result,
        }),
    };
    Ok(Outcome::ok(payload))
}

pub fn render(path: &Path, out: &Path) -> Result<Outcome, CliError> {
    let cfg = scene::load(path)?.configuration;
    std::fs::write(out, crate::svg::render(&cfg)).map_err(|e| CliError::Io {
        path: out.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(Outcome::ok(String::new()))
}
