//! JSON run logs for solver executions.

use crate::error::{Error, Result};
use crate::krylov::solver::{ResidualKind, SolveReport, Termination};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const RUNLOG_VERSION: u32 = 1;

/// Echo of the configuration a run was launched with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precond: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_irn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Image quality metrics attached to restoration runs. PSNR/SNR can be
/// infinite for perfect restorations; infinities survive the JSON round
/// trip via string sentinels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricBlock {
    #[serde(with = "maybe_inf")]
    pub psnr: f64,
    #[serde(with = "maybe_inf")]
    pub snr: f64,
    pub ssim: f64,
}

/// A persisted solver run: configuration echo, residual history, timings,
/// and optional metrics. Serialized as JSON with full f64 round-trip
/// fidelity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub version: u32,
    pub solver: String,
    pub config: ConfigEcho,
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: String,
    pub residual_kind: String,
    pub residual_scale: f64,
    pub b_norm: f64,
    pub final_true_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricBlock>,
}

impl RunLog {
    pub fn from_report(
        solver: impl Into<String>,
        config: ConfigEcho,
        report: &SolveReport,
    ) -> Self {
        RunLog {
            version: RUNLOG_VERSION,
            solver: solver.into(),
            config,
            residual_history: report.residual_history.clone(),
            iterations: report.iterations,
            wall_time_s: report.wall_time,
            termination: termination_name(report.termination),
            residual_kind: match report.residual_kind {
                ResidualKind::True => "true".into(),
                ResidualKind::Preconditioned => "preconditioned".into(),
                ResidualKind::Regularized => "regularized".into(),
            },
            residual_scale: report.residual_scale,
            b_norm: report.b_norm,
            final_true_residual: report.final_true_residual,
            metrics: None,
        }
    }
}

pub fn termination_name(t: Termination) -> String {
    match t {
        Termination::Converged => "converged".into(),
        Termination::MaxIter => "max-iter".into(),
        Termination::Breakdown { exact: true } => "breakdown-exact".into(),
        Termination::Breakdown { exact: false } => "breakdown".into(),
        Termination::Stagnation => "stagnation".into(),
    }
}

pub fn write_runlog(log: &RunLog, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(log)
        .map_err(|e| Error::Format(format!("run log serialization: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn read_runlog(path: &Path) -> Result<RunLog> {
    let text = std::fs::read_to_string(path)?;
    // Version gate before strict decoding.
    let probe: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("run log parse: {e}")))?;
    let found = probe
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Format("run log lacks a version field".into()))?
        as u32;
    if found != RUNLOG_VERSION {
        return Err(Error::Version {
            found,
            expected: RUNLOG_VERSION,
        });
    }
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("run log decode: {e}")))
}

/// f64 (de)serialization that survives infinities as string sentinels.
mod maybe_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad float: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_log() -> RunLog {
        RunLog {
            version: RUNLOG_VERSION,
            solver: "qgmres".into(),
            config: ConfigEcho {
                tol: 1e-6,
                max_iter: 500,
                restart: None,
                precond: Some("sgs".into()),
                lambda: None,
                eps_irn: None,
                seed: Some(7),
            },
            residual_history: (0..300)
                .map(|i| (1.0 + i as f64 * 0.1234567890123456789).recip())
                .collect(),
            iterations: 299,
            wall_time_s: 0.125,
            termination: "converged".into(),
            residual_kind: "true".into(),
            residual_scale: 3.5,
            b_norm: 3.5,
            final_true_residual: 1.23e-7,
            metrics: None,
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let log = sample_log();
        write_runlog(&log, &path).unwrap();
        let back = read_runlog(&path).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn infinite_metrics_survive() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let mut log = sample_log();
        log.metrics = Some(MetricBlock {
            psnr: f64::INFINITY,
            snr: 42.0,
            ssim: 1.0,
        });
        write_runlog(&log, &path).unwrap();
        let back = read_runlog(&path).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn unknown_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        let mut log = sample_log();
        log.version = 99;
        write_runlog(&log, &path).unwrap();
        match read_runlog(&path) {
            Err(Error::Version { found, expected }) => {
                assert_eq!(found, 99);
                assert_eq!(expected, RUNLOG_VERSION);
            }
            other => panic!("expected version error, got {other:?}"),
        }
    }
}
