//! Runs the requested checks and writes the manifest and sweep tables.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use mlnf_core::identities::Check;
use mlnf_core::report::IdentityReport;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, RunConfig};

pub const TOOL: &str = "mlnf-verify";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "MLNF_VERIFY_THREADS";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub jobs: Option<usize>,
    pub reproducible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    /// SHA-256 of the canonical JSON form of the parsed config.
    pub config_hash: String,
    pub started_at: String,
    pub finished_at: String,
    pub passed: bool,
    pub reports: Vec<IdentityReport>,
}

pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    format!("sha256:{:x}", Sha256::digest(canonical))
}

fn timestamp(reproducible: bool) -> String {
    let t = if reproducible { DateTime::<Utc>::UNIX_EPOCH } else { Utc::now() };
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Worker count: `--jobs`, then the environment, then the config, then the machine.
pub fn resolve_jobs(config: &RunConfig, cli: Option<usize>) -> usize {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    cli.filter(|&n| n > 0)
        .or(env)
        .or(config.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn run_one(check: Check, config: &mlnf_core::identities::CheckConfig) -> IdentityReport {
    catch_unwind(AssertUnwindSafe(|| check.run(config))).unwrap_or_else(|panic| {
        let message = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        let mut r = IdentityReport::new(check.name(), config.tolerance(check));
        r.fail(format!("check aborted: {message}"));
        r.finish()
    })
}

/// Executes every requested check, in parallel up to the resolved worker count.
/// Reports keep the order of the config's check list.
pub fn run_suite(config: &RunConfig, options: &RunOptions) -> Result<RunManifest, ConfigError> {
    let checks = config.check_config()?;
    let started_at = timestamp(options.reproducible);
    let jobs = resolve_jobs(config, options.jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ConfigError::Invalid { field: "jobs".into(), message: e.to_string() })?;
    let reports: Vec<IdentityReport> =
        pool.install(|| config.checks.par_iter().map(|&c| run_one(c, &checks)).collect());
    let passed = reports.iter().all(|r| r.converged);
    Ok(RunManifest {
        tool: TOOL.into(),
        tool_version: VERSION.into(),
        config_hash: config_hash(config),
        started_at,
        finished_at: timestamp(options.reproducible),
        passed,
        reports,
    })
}

/// `level,residual` with 17 significant digits, LF line endings.
pub fn sweep_csv(report: &IdentityReport) -> String {
    let mut out = String::from("level,residual\n");
    for p in &report.sweep {
        writeln!(out, "{},{:.16e}", p.level, p.residual).expect("string write");
    }
    out
}

/// Writes `manifest.json` and one `<check>.csv` per report; returns the manifest path.
pub fn write_outputs(dir: &Path, manifest: &RunManifest) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    for r in &manifest.reports {
        fs::write(dir.join(format!("{}.csv", r.name)), sweep_csv(r))?;
    }
    let mut json = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
    json.push('\n');
    let path = dir.join("manifest.json");
    fs::write(&path, json)?;
    Ok(path)
}

pub fn list_checks() -> String {
    let width = Check::ALL.iter().map(|c| c.name().len()).max().unwrap_or(0);
    Check::ALL.iter().map(|c| format!("{:<width$}  {}\n", c.name(), c.description())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    fn vacuum() -> RunConfig {
        parse_config_str(
            r#"{"schema_version": 1, "reference_length": 1e-6, "geometry": {"kind": "vacuum"},
                "ka": [1.0], "checks": ["transversality", "reciprocity"]}"#,
        )
        .unwrap()
    }

    #[test]
    fn reports_follow_config_order() {
        let m = run_suite(&vacuum(), &RunOptions { jobs: Some(2), reproducible: true }).unwrap();
        let names: Vec<&str> = m.reports.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["transversality", "reciprocity"]);
        assert!(m.passed);
        assert_eq!(m.started_at, "1970-01-01T00:00:00Z");
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let mut r = IdentityReport::new("x", 1.0);
        r.push_sweep(0, 1.0 / 3.0);
        r.push_sweep(1, 0.0);
        assert_eq!(sweep_csv(&r), "level,residual\n0,3.3333333333333331e-1\n1,0.0000000000000000e0\n");
    }

    #[test]
    fn hash_depends_on_content() {
        let a = vacuum();
        let mut b = a.clone();
        b.ka = vec![2.0];
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
    }

    #[test]
    fn listing_is_alphabetical() {
        let text = list_checks();
        let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), Check::ALL.len());
    }
}
