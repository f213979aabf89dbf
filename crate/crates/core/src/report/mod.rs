//! Bound evaluators, named experiments and report serialization.

pub mod experiments;
pub mod systole;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::energy::elementary_bound;
use crate::error::{GeometryError, Result};
use crate::scalar::{factorial, line_constant, sphere_volume};

pub use experiments::EXPERIMENTS;
pub use systole::{systole_rp2, SystoleEstimate};

/// A lower bound together with the invariant it is evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundSpec {
    /// `E_p(F) ≥ π^N/(2 N!) ((2N/π) A*)^{p/2}` on `CP^N`, `p ≥ 2`.
    CpnP { n: usize, p: f64, a_star: f64 },
    /// `E_p(F) ≥ σ(n)/4 (√n L*/π)^p` on `RP^n`, `p ≥ 1`.
    RpnP { n: usize, p: f64, l_star: f64 },
    /// `inf E_2 = C_N A*`.
    Infimum { n: usize, a_star: f64 },
    /// `(3π/4) B* ≤ inf E_2 ≤ π B*` on `RP^3`.
    Rp3Interval { b_star: f64 },
    /// `A - (2/π) sys²`.
    Pu { area: f64, systole: f64 },
    /// `n^{p/2} V^{p/n} / (2 Vol^{(p-n)/n})`, `p ≥ n`.
    Elementary { p: f64, n: usize, vol: f64, pvol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundValue {
    Scalar(f64),
    Interval(f64, f64),
}

impl BoundValue {
    pub fn scalar(self) -> Result<f64> {
        match self {
            Self::Scalar(v) => Ok(v),
            Self::Interval(..) => Err(GeometryError::Usage("bound is an interval".into())),
        }
    }
}

impl BoundSpec {
    /// For `p > 2` the complex bound is strict for every map.
    pub fn is_strict(&self) -> bool {
        matches!(self, Self::CpnP { p, .. } if *p > 2.0)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GeometryError::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        let at_least_one = |n: usize| {
            if n >= 1 {
                Ok(())
            } else {
                Err(GeometryError::Domain("dimension must be at least 1".into()))
            }
        };
        match *self {
            Self::CpnP { n, p, a_star } => {
                at_least_one(n)?;
                positive("A*", a_star)?;
                if !(p >= 2.0) {
                    return Err(GeometryError::Domain(format!("the complex bound needs p ≥ 2, got {p}")));
                }
            }
            Self::RpnP { n, p, l_star } => {
                at_least_one(n)?;
                positive("L*", l_star)?;
                if !(p >= 1.0) {
                    return Err(GeometryError::Domain(format!("the real bound needs p ≥ 1, got {p}")));
                }
            }
            Self::Infimum { n, a_star } => {
                at_least_one(n)?;
                positive("A*", a_star)?;
            }
            Self::Rp3Interval { b_star } => positive("B*", b_star)?,
            Self::Pu { area, systole } => {
                positive("area", area)?;
                positive("systole", systole)?;
            }
            Self::Elementary { p, n, vol, pvol } => {
                at_least_one(n)?;
                positive("p", p)?;
                positive("volume", vol)?;
                positive("pullback volume", pvol)?;
            }
        }
        Ok(())
    }
}

pub fn eval_bound(spec: &BoundSpec) -> Result<BoundValue> {
    spec.validate()?;
    Ok(match *spec {
        BoundSpec::CpnP { n, p, a_star } => {
            let nf = n as f64;
            BoundValue::Scalar(PI.powi(n as i32) / (2.0 * factorial::<f64>(n)) * (2.0 * nf / PI * a_star).powf(p / 2.0))
        }
        BoundSpec::RpnP { n, p, l_star } => {
            BoundValue::Scalar(sphere_volume::<f64>(n) / 4.0 * ((n as f64).sqrt() * l_star / PI).powf(p))
        }
        BoundSpec::Infimum { n, a_star } => BoundValue::Scalar(line_constant::<f64>(n) * a_star),
        BoundSpec::Rp3Interval { b_star } => BoundValue::Interval(3.0 * PI / 4.0 * b_star, PI * b_star),
        BoundSpec::Pu { area, systole } => BoundValue::Scalar(area - 2.0 / PI * systole * systole),
        BoundSpec::Elementary { p, n, vol, pvol } => BoundValue::Scalar(elementary_bound(p, n, vol, pvol)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub kind: ToleranceKind,
    pub value: f64,
}

impl Tolerance {
    pub fn absolute(value: f64) -> Self {
        Self {
            kind: ToleranceKind::Absolute,
            value,
        }
    }

    pub fn relative(value: f64) -> Self {
        Self {
            kind: ToleranceKind::Relative,
            value,
        }
    }
}

/// One comparison inside an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub estimate: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, estimate: f64, reference: f64, tolerance: Tolerance) -> Self {
        let abs_error = (estimate - reference).abs();
        let rel_error = if reference != 0.0 {
            abs_error / reference.abs()
        } else {
            abs_error
        };
        let err = match tolerance.kind {
            ToleranceKind::Absolute => abs_error,
            ToleranceKind::Relative => rel_error,
        };
        Self {
            label: label.into(),
            estimate,
            reference,
            abs_error,
            rel_error,
            tolerance,
            pass: err <= tolerance.value,
        }
    }

    pub fn relative(label: impl Into<String>, estimate: f64, reference: f64, tol: f64) -> Self {
        Self::new(label, estimate, reference, Tolerance::relative(tol))
    }

    /// Passes iff `|value| ≤ bound`.
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(label, value, 0.0, Tolerance::absolute(bound))
    }

    /// Passes iff `value ≥ threshold`; the estimate is the shortfall.
    pub fn at_least(label: impl Into<String>, value: f64, threshold: f64) -> Self {
        let shortfall = if value >= threshold { 0.0 } else { threshold - value };
        Self::new(
            format!("{} (shortfall below {threshold:e})", label.into()),
            shortfall,
            0.0,
            Tolerance::absolute(0.0),
        )
    }

    /// Error in units of the tolerance; the headline check maximizes this.
    fn severity(&self) -> f64 {
        let err = match self.tolerance.kind {
            ToleranceKind::Absolute => self.abs_error,
            ToleranceKind::Relative => self.rel_error,
        };
        if err.is_nan() {
            f64::INFINITY
        } else if self.tolerance.value > 0.0 {
            err / self.tolerance.value
        } else if err > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Result of one named experiment; the headline fields repeat its worst check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub inputs: Value,
    pub estimate: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub details: Value,
    #[serde(default)]
    pub error: Option<String>,
}

impl ExperimentReport {
    fn from_checks(name: &str, inputs: Value, checks: Vec<Check>, details: Value, wall: f64) -> Self {
        let worst = checks
            .iter()
            .max_by(|a, b| a.severity().total_cmp(&b.severity()))
            .cloned();
        match worst {
            Some(w) => Self {
                name: name.to_string(),
                inputs,
                estimate: w.estimate,
                reference: w.reference,
                abs_error: w.abs_error,
                rel_error: w.rel_error,
                tolerance: w.tolerance,
                pass: checks.iter().all(|c| c.pass),
                wall_time_s: wall,
                checks,
                details,
                error: None,
            },
            None => Self::failed(name, inputs, "experiment produced no checks".into(), wall),
        }
    }

    fn failed(name: &str, inputs: Value, error: String, wall: f64) -> Self {
        Self {
            name: name.to_string(),
            inputs,
            estimate: f64::NAN,
            reference: f64::NAN,
            abs_error: f64::NAN,
            rel_error: f64::NAN,
            tolerance: Tolerance::absolute(0.0),
            pass: false,
            wall_time_s: wall,
            checks: Vec::new(),
            details: Value::Null,
            error: Some(error),
        }
    }

    /// Copy with the wall time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn default_seed() -> u64 {
    7
}

/// Parameters of one experiment; unspecified fields fall back to the experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    /// Overrides the primary tolerance.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Experiment-specific parameters, e.g. `b_star`, `lambdas`, `map`.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            resolution: None,
            p: None,
            tolerance: None,
            extra: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn resolution_or(&self, default: usize) -> usize {
        self.resolution.unwrap_or(default)
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.extra.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| GeometryError::Usage(format!("parameter {key} must be a number, got {v}"))),
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> Result<String> {
        match self.extra.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(v) => Err(GeometryError::Usage(format!(
                "parameter {key} must be a string, got {v}"
            ))),
        }
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.extra.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| GeometryError::Usage(format!("parameter {key} must hold numbers, got {v}")))
                })
                .collect(),
            Some(v) => Err(GeometryError::Usage(format!("parameter {key} must be a list, got {v}"))),
        }
    }
}

/// Checks plus free-form details returned by an experiment pipeline.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub details: Value,
}

/// Runs a named experiment. Unknown names are usage errors; failures inside the
/// pipeline become failed reports.
pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let pipeline = experiments::lookup(name)?;
    let start = Instant::now();
    let fallback_inputs = serde_json::to_value(config)?;
    let report = match pipeline(config) {
        Ok(o) => {
            let inputs = merge_inputs(&fallback_inputs, o.inputs);
            ExperimentReport::from_checks(name, inputs, o.checks, o.details, start.elapsed().as_secs_f64())
        }
        Err(e) => ExperimentReport::failed(name, fallback_inputs, e.to_string(), start.elapsed().as_secs_f64()),
    };
    Ok(report)
}

fn merge_inputs(config: &Value, extra: Value) -> Value {
    let mut out = config.clone();
    if let (Value::Object(o), Value::Object(e)) = (&mut out, extra) {
        o.extend(e);
    }
    out
}

/// Suite configuration: experiment name to parameter record.
pub type SuiteConfig = BTreeMap<String, ExperimentConfig>;

pub fn read_suite_config(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: SuiteConfig = serde_json::from_str(&text)?;
    for name in cfg.keys() {
        experiments::lookup(name)?;
    }
    Ok(cfg)
}

/// Every experiment with default parameters.
pub fn default_suite() -> SuiteConfig {
    EXPERIMENTS
        .iter()
        .map(|e| (e.name.to_string(), ExperimentConfig::default()))
        .collect()
}

/// Runs the experiments in name order, or concurrently when `parallel` is set.
pub fn run_suite(config: &SuiteConfig, parallel: bool) -> Result<Vec<ExperimentReport>> {
    let entries: Vec<(&String, &ExperimentConfig)> = config.iter().collect();
    if parallel {
        entries.par_iter().map(|(n, c)| run_experiment(n, c)).collect()
    } else {
        entries.iter().map(|(n, c)| run_experiment(n, c)).collect()
    }
}

pub fn write_json<W: Write>(reports: &[ExperimentReport], writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, reports)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    estimate: f64,
    reference: f64,
    abs_error: f64,
    rel_error: f64,
    tolerance_kind: ToleranceKind,
    tolerance: f64,
    pass: bool,
    wall_time_s: f64,
    checks: usize,
    failed_checks: usize,
    inputs: String,
    error: &'a str,
}

/// One row per report.
pub fn write_csv<W: Write>(reports: &[ExperimentReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        w.serialize(CsvRow {
            name: &r.name,
            estimate: r.estimate,
            reference: r.reference,
            abs_error: r.abs_error,
            rel_error: r.rel_error,
            tolerance_kind: r.tolerance.kind,
            tolerance: r.tolerance.value,
            pass: r.pass,
            wall_time_s: r.wall_time_s,
            checks: r.checks.len(),
            failed_checks: r.failed_checks().count(),
            inputs: r.inputs.to_string(),
            error: r.error.as_deref().unwrap_or(""),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let v = eval_bound(&BoundSpec::CpnP {
            n: 2,
            p: 2.0,
            a_star: PI,
        })
        .unwrap()
        .scalar()
        .unwrap();
        assert!((v - PI * PI).abs() < 1e-12);
        let v = eval_bound(&BoundSpec::RpnP {
            n: 3,
            p: 2.0,
            l_star: PI,
        })
        .unwrap()
        .scalar()
        .unwrap();
        assert!((v - 1.5 * PI * PI).abs() < 1e-12);
        match eval_bound(&BoundSpec::Rp3Interval { b_star: 2.0 * PI }).unwrap() {
            BoundValue::Interval(a, b) => {
                assert!((a - 1.5 * PI * PI).abs() < 1e-12);
                assert!((b - 2.0 * PI * PI).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_bound_at_p2_is_the_infimum() {
        for n in 1..=3 {
            let a = eval_bound(&BoundSpec::CpnP { n, p: 2.0, a_star: 1.7 })
                .unwrap()
                .scalar()
                .unwrap();
            let b = eval_bound(&BoundSpec::Infimum { n, a_star: 1.7 })
                .unwrap()
                .scalar()
                .unwrap();
            assert!((a - b).abs() < 1e-12, "{n}: {a} {b}");
        }
    }

    #[test]
    fn bound_domains() {
        assert!(eval_bound(&BoundSpec::CpnP {
            n: 2,
            p: 1.5,
            a_star: PI
        })
        .is_err());
        assert!(eval_bound(&BoundSpec::RpnP {
            n: 2,
            p: 0.5,
            l_star: PI
        })
        .is_err());
        assert!(eval_bound(&BoundSpec::Pu {
            area: -1.0,
            systole: 1.0
        })
        .is_err());
        assert!(BoundSpec::CpnP {
            n: 1,
            p: 3.0,
            a_star: 1.0
        }
        .is_strict());
    }

    #[test]
    fn headline_is_the_worst_check() {
        let checks = vec![
            Check::relative("a", 1.001, 1.0, 0.01),
            Check::relative("b", 1.02, 1.0, 0.01),
            Check::at_most("c", 0.0, 1.0),
        ];
        let r = ExperimentReport::from_checks("x", Value::Null, checks, Value::Null, 0.0);
        assert!(!r.pass);
        assert!((r.estimate - 1.02).abs() < 1e-15);
        assert_eq!(r.pass, r.rel_error <= r.tolerance.value);
    }

    #[test]
    fn at_least_reports_shortfall() {
        assert!(Check::at_least("s", 2.0, 1.0).pass);
        let c = Check::at_least("s", 0.5, 1.0);
        assert!(!c.pass && (c.estimate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_experiment_is_a_usage_error() {
        assert!(matches!(
            run_experiment("nope", &ExperimentConfig::default()),
            Err(GeometryError::Usage(_))
        ));
    }

    #[test]
    fn config_parses_extras() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"seed": 3, "b_star": 6.0, "lambdas": [1, 2]}"#).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.f64_or("b_star", 0.0).unwrap(), 6.0);
        assert_eq!(c.list_or("lambdas", &[]).unwrap(), vec![1.0, 2.0]);
        assert!(c.str_or("b_star", "").is_err());
    }
}
