//! CSV and manifest writing.
//!
//! CSV files start with a `# schema=1` comment line; all floats use Rust's
//! shortest round-trip formatting. Files are written atomically (temp file
//! plus rename) and the manifest, with one checksum per output, is written
//! last.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use ris_sim::sim::SimResult;

pub const CSV_SCHEMA_LINE: &str = "# schema=1";

/// A rendered output file, not yet on disk.
#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
}

/// Reproducibility record for one run: the resolved configuration, the tool
/// version, and a checksum for every file the run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub outputs: Vec<ManifestEntry>,
    pub runtime_seconds: f64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().unwrap_or_default().to_string_lossy()
    ));
    fs::write(&tmp, contents).with_context(|| format!("io error writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("io error renaming to {}", path.display()))?;
    Ok(())
}

/// Write all outputs, then the manifest. Returns the manifest path.
pub fn write_run(
    out_dir: &Path,
    command: &str,
    config: &RunConfig,
    outputs: &[OutputFile],
    runtime_seconds: f64,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("io error creating {}", out_dir.display()))?;
    let mut entries = Vec::with_capacity(outputs.len());
    for output in outputs {
        let path = out_dir.join(&output.name);
        write_atomic(&path, output.contents.as_bytes())?;
        entries.push(ManifestEntry {
            file: output.name.clone(),
            sha256: sha256_hex(output.contents.as_bytes()),
        });
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config: config.clone(),
        outputs: entries,
        runtime_seconds,
    };
    let manifest_path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).context("manifest serialization")?;
    write_atomic(&manifest_path, text.as_bytes())?;
    Ok(manifest_path)
}

/// ABER sweep rows: `power_dbm,scheme,aber,stderr,union_bound,trials,seed`.
pub fn aber_csv(results: &[SimResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str("power_dbm,scheme,aber,stderr,union_bound,trials,seed\n");
    for result in results {
        for p in &result.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.power_dbm,
                result.scheme,
                p.aber.unwrap_or(f64::NAN),
                p.aber_stderr.unwrap_or(f64::NAN),
                p.union_bound.unwrap_or(f64::NAN),
                p.trials,
                result.seed
            );
        }
    }
    out
}

/// Rate sweep rows: `power_dbm,scheme,rate_bps_hz,stderr,realizations,seed`.
pub fn rate_csv(results: &[SimResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str("power_dbm,scheme,rate_bps_hz,stderr,realizations,seed\n");
    for result in results {
        for p in &result.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.power_dbm,
                result.scheme,
                p.rate.unwrap_or(f64::NAN),
                p.rate_stderr.unwrap_or(f64::NAN),
                p.trials,
                result.seed
            );
        }
    }
    out
}

/// EE sweep rows:
/// `power_dbm,scheme,rate_bps_hz,power_consumed_w,ee_bits_per_joule,realizations,seed`.
pub fn ee_csv(results: &[SimResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str("power_dbm,scheme,rate_bps_hz,power_consumed_w,ee_bits_per_joule,realizations,seed\n");
    for result in results {
        for p in &result.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.power_dbm,
                result.scheme,
                p.rate.unwrap_or(f64::NAN),
                p.power_consumed_w.unwrap_or(f64::NAN),
                p.ee.unwrap_or(f64::NAN),
                p.trials,
                result.seed
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn floats_round_trip_through_display() {
        let v = 0.195_982_816_25_f64;
        let text = format!("{v}");
        assert_eq!(text.parse::<f64>().unwrap(), v);
        let tiny = 1.5039996054065037e-7_f64;
        assert_eq!(format!("{tiny}").parse::<f64>().unwrap(), tiny);
    }
}
