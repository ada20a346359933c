//! Machine-readable run records, written as JSON.
//!
//! Extended-precision values are stored as shortest round-tripping decimal
//! strings; `inf` marks an unbounded step bound. Diagnostics that only need
//! a few digits are plain numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sertrack::tracker::StageTimes;
use sertrack::{Complex, NewtonReport, Real, StepRecord, TruncatedSeries};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    /// Echo of the effective settings.
    pub config: BTreeMap<String, String>,
    pub stage_seconds: BTreeMap<String, f64>,
    pub step_log: Vec<StepEntry>,
    pub t_final: Option<String>,
    pub final_point: Vec<[String; 2]>,
    /// Max-norm of the homotopy at the final point and parameter.
    pub residual: Option<f64>,
    pub newton: Option<NewtonEntry>,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub t_start: String,
    pub delta_t: String,
    pub curvature: String,
    pub radius: String,
    pub pole: Option<[String; 2]>,
    pub binding: String,
    pub retries: usize,
    pub newton_iterations: usize,
    pub newton_residual: Option<f64>,
    pub corrector_iterations: usize,
    pub corrector_residual: f64,
    pub reduced_pade: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonEntry {
    pub iterations: usize,
    pub stop: String,
    pub update_norms: Vec<f64>,
    pub last_coeff_norms: Vec<f64>,
    pub residual: Option<f64>,
    pub condition: Option<f64>,
    /// `series[i][k]` is coefficient `k` of component `i`.
    pub series: Vec<Vec<[String; 2]>>,
}

impl RunRecord {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            stage_seconds: BTreeMap::new(),
            step_log: Vec::new(),
            t_final: None,
            final_point: Vec::new(),
            residual: None,
            newton: None,
            status: "ok".into(),
            exit_code: 0,
            error: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records contain only finite numbers and strings")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn decimal<R: Real>(x: R) -> String {
    if x.is_infinite() {
        if x.is_sign_negative() { "-inf" } else { "inf" }.to_string()
    } else {
        x.to_decimal()
    }
}

pub fn complex<R: Real>(z: &Complex<R>) -> [String; 2] {
    [decimal(z.re), decimal(z.im)]
}

pub fn step_entry<R: Real>(s: &StepRecord<R>) -> StepEntry {
    StepEntry {
        t_start: decimal(s.t_start),
        delta_t: decimal(s.delta_t),
        curvature: decimal(s.decision.curvature),
        radius: decimal(s.decision.radius),
        pole: s.decision.pole.as_ref().map(complex),
        binding: s.decision.binding.as_str().into(),
        retries: s.retries,
        newton_iterations: s.newton.iterations,
        newton_residual: finite(s.newton.residual_norm),
        corrector_iterations: s.corrector.iterations,
        corrector_residual: s.corrector.residual,
        reduced_pade: s.reduced_pade.clone(),
    }
}

pub fn newton_entry<R: Real>(report: &NewtonReport, series: &[TruncatedSeries<R>]) -> NewtonEntry {
    NewtonEntry {
        iterations: report.iterations,
        stop: format!("{:?}", report.stop).to_lowercase(),
        update_norms: report.update_norms.iter().copied().filter_map(finite).collect(),
        last_coeff_norms: report.last_coeff_norms.iter().copied().filter_map(finite).collect(),
        residual: finite(report.residual_norm),
        condition: finite(report.condition),
        series: series.iter().map(|s| s.coeffs().iter().map(complex).collect()).collect(),
    }
}

pub fn stage_seconds(times: &StageTimes) -> BTreeMap<String, f64> {
    [
        ("newton", times.newton),
        ("curvature", times.curvature),
        ("radius", times.radius),
        ("pade", times.pade),
        ("correct", times.correct),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sertrack::DoubleDouble;

    #[test]
    fn json_round_trip() {
        let mut config = BTreeMap::new();
        config.insert("precision".to_string(), "dd".to_string());
        let mut r = RunRecord::new("track", config);
        r.stage_seconds.insert("newton".into(), 0.25);
        r.final_point.push(complex(&Complex::<DoubleDouble>::from_f64(0.5, -1.0)));
        r.t_final = Some(decimal(DoubleDouble::from_f64(0.75)));
        r.residual = Some(1e-40);
        r.step_log.push(StepEntry {
            t_start: "0".into(),
            delta_t: "0.25".into(),
            curvature: decimal(DoubleDouble::infinity()),
            radius: "1".into(),
            pole: None,
            binding: "radius".into(),
            retries: 0,
            newton_iterations: 4,
            newton_residual: None,
            corrector_iterations: 2,
            corrector_residual: 1e-50,
            reduced_pade: vec![],
        });
        let text = r.to_json();
        assert!(text.contains("\"schema_version\": 1"));
        assert!(text.contains("\"curvature\": \"inf\""));
        assert_eq!(RunRecord::from_json(&text).unwrap(), r);
    }
}
