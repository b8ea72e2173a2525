//! CSV rendering and run manifests.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bell::ViolationScan;
use crate::experiment::TrialRecord;
use crate::furry::Comparison;

/// Shortest representation that parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

pub fn scan_csv(scan: &ViolationScan) -> String {
    let mut out = String::from("theta,lhs,rhs,margin,violated\n");
    for p in &scan.points {
        let r = &p.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            float(p.theta),
            float(r.lhs),
            float(r.rhs),
            float(r.margin),
            r.violated
        );
    }
    out
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str("trial,order,theta_a,phi_a,outcome_a,theta_b,phi_b,outcome_b\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.trial_id,
            r.order.label(),
            float(r.setting_a.theta()),
            float(r.setting_a.phi()),
            r.outcome_a.value(),
            float(r.setting_b.theta()),
            float(r.setting_b.phi()),
            r.outcome_b.value()
        );
    }
    out
}

pub fn comparison_csv(rows: &[Comparison]) -> String {
    let mut out = String::from("theta_a,phi_a,theta_b,phi_b,qm,furry,delta\n");
    for c in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            float(c.axis_a.theta()),
            float(c.axis_a.phi()),
            float(c.axis_b.theta()),
            float(c.axis_b.phi()),
            float(c.qm),
            float(c.furry),
            float(c.delta)
        );
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Sidecar written next to every output file as `<output>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub args: Vec<String>,
    /// Parsed parameters, defaults included.
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub output: String,
    pub checksum: String,
}

pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    name.into()
}
