//! Experiment reports: numeric rows, per-rule pass/fail summaries, and a
//! provenance block echoing the config with a content hash.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// One measurement row. Sorted keys keep the JSON byte-stable run to run.
pub type Row = BTreeMap<String, f64>;

/// Builds a row from `(key, value)` pairs.
pub fn row<const K: usize>(pairs: [(&str, f64); K]) -> Row {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// One summary line; every rule cites the acceptance criterion it checks.
/// `measured: None` records a value that could not be computed and always
/// fails.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRule {
    pub criterion: String,
    pub description: String,
    pub measured: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl SummaryRule {
    /// Passes when `measured <= threshold` (and is finite).
    pub fn le(criterion: &str, description: &str, measured: f64, threshold: f64) -> Self {
        SummaryRule {
            criterion: criterion.to_string(),
            description: description.to_string(),
            measured: measured.is_finite().then_some(measured),
            threshold,
            pass: measured.is_finite() && measured <= threshold,
        }
    }

    /// Passes when `measured >= threshold` (and is finite).
    pub fn ge(criterion: &str, description: &str, measured: f64, threshold: f64) -> Self {
        SummaryRule {
            criterion: criterion.to_string(),
            description: description.to_string(),
            measured: measured.is_finite().then_some(measured),
            threshold,
            pass: measured.is_finite() && measured >= threshold,
        }
    }

    /// Records a boolean check; measured is 1 for true, 0 for false.
    pub fn flag(criterion: &str, description: &str, pass: bool) -> Self {
        SummaryRule {
            criterion: criterion.to_string(),
            description: description.to_string(),
            measured: Some(if pass { 1.0 } else { 0.0 }),
            threshold: 1.0,
            pass,
        }
    }

    /// Records a computation that failed outright.
    pub fn aborted(criterion: &str, description: &str) -> Self {
        SummaryRule {
            criterion: criterion.to_string(),
            description: description.to_string(),
            measured: None,
            threshold: 0.0,
            pass: false,
        }
    }
}

/// Config echo plus a hash of its canonical TOML serialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub content_hash: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub rows: Vec<Row>,
    pub summary: Vec<SummaryRule>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, rows: Vec<Row>, summary: Vec<SummaryRule>) -> Result<Self> {
        let echo = toml::to_string(config)
            .map_err(|e| Error::Config(format!("config does not serialize: {e}")))?;
        Ok(ExperimentReport {
            experiment: config.experiment.name().to_string(),
            rows,
            summary,
            provenance: Provenance { config: config.clone(), content_hash: content_hash(&echo) },
        })
    }

    pub fn passed(&self) -> bool {
        self.summary.iter().all(|rule| rule.pass)
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes to JSON");
        text.push('\n');
        text
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// Writes the rows as CSV over the sorted union of row keys; a key
    /// missing from a row leaves its cell empty.
    pub fn write_rows_csv(&self, path: &Path) -> Result<()> {
        let columns: BTreeSet<&str> =
            self.rows.iter().flat_map(|r| r.keys().map(String::as_str)).collect();
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(&columns)?;
        for row in &self.rows {
            let record: Vec<String> = columns
                .iter()
                .map(|&key| row.get(key).map(|v| format!("{v:.17e}")).unwrap_or_default())
                .collect();
            writer.write_record(&record)?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("report parse ({}): {e}", path.display())))
    }
}

/// FNV-1a, fixed here so hashes are stable across toolchains.
pub fn content_hash(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
            experiment = "t1_check"
            resolutions = [64, 128]
            domain = { kind = "disk", r = 1.0 }
            "#,
        )
        .unwrap()
    }

    #[test]
    fn report_round_trips_through_json() {
        let config = sample_config();
        let rows = vec![row([("n", 64.0), ("residual", 1e-9)]), row([("n", 128.0), ("residual", 2e-10)])];
        let summary = vec![SummaryRule::le("criterion-3", "final residual", 2e-10, 1e-6)];
        let report = ExperimentReport::new(&config, rows, summary).unwrap();
        assert!(report.passed());

        let dir = std::env::temp_dir().join("siolab-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("report.json");
        report.write_json(&path).unwrap();
        let back = ExperimentReport::from_json_file(&path).unwrap();
        assert_eq!(back.experiment, "t1_check");
        assert_eq!(back.rows, report.rows);
        assert_eq!(back.provenance.content_hash, report.provenance.content_hash);
    }

    #[test]
    fn identical_configs_hash_identically() {
        let a = ExperimentReport::new(&sample_config(), vec![], vec![]).unwrap();
        let b = ExperimentReport::new(&sample_config(), vec![], vec![]).unwrap();
        assert_eq!(a.provenance.content_hash, b.provenance.content_hash);
        assert_eq!(a.to_json_string(), b.to_json_string());

        let mut other = sample_config();
        other.seed = 7;
        let c = ExperimentReport::new(&other, vec![], vec![]).unwrap();
        assert_ne!(a.provenance.content_hash, c.provenance.content_hash);
    }

    #[test]
    fn frozen_fnv_vector() {
        // Independently computed FNV-1a of "siolab".
        assert_eq!(content_hash(""), "cbf29ce484222325");
        assert_eq!(content_hash("siolab"), "d6f441d1e77f2881");
    }

    #[test]
    fn csv_uses_the_column_union() {
        let config = sample_config();
        let rows = vec![row([("n", 64.0), ("a", 1.0)]), row([("n", 128.0), ("b", 2.0)])];
        let report = ExperimentReport::new(&config, rows, vec![]).unwrap();
        let dir = std::env::temp_dir().join("siolab-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rows.csv");
        report.write_rows_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b,n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn non_finite_measurements_fail() {
        let rule = SummaryRule::le("criterion-6", "residual", f64::NAN, 1e-4);
        assert!(!rule.pass);
        assert!(rule.measured.is_none());
        let rule = SummaryRule::le("criterion-6", "residual", f64::INFINITY, 1e-4);
        assert!(!rule.pass);
        assert!(SummaryRule::aborted("criterion-6", "mesh failed").measured.is_none());
    }
}
