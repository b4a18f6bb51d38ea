//! Artifact persistence: atomic file writes, CSV rendering, and the run
//! manifest.
//!
//! Numbers are rendered with Rust's shortest-round-trip formatting, so a
//! rerun with identical seeds produces byte-identical payloads.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{io_err, WorkbenchError};
use crate::chain::Autocorrelation;
use crate::dicke::Trajectory;
use crate::spectral::Spectrum;

/// Writes artifacts into one run directory, collecting checksums for the
/// manifest. Creation probes writability so runs fail before computing.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
    started: Instant,
}

#[derive(Clone, Debug, Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

/// The manifest written last: config snapshot, file list, timing, version.
#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    kind: &'a str,
    wall_clock_seconds: f64,
    config_toml: &'a str,
    files: &'a [FileEntry],
}

impl ArtifactWriter {
    pub fn create(dir: &Path) -> Result<Self, WorkbenchError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        // probe writability now, not after hours of computation
        let probe = dir.join(".probe");
        std::fs::write(&probe, b"").map_err(io_err(&probe))?;
        std::fs::remove_file(&probe).map_err(io_err(&probe))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Atomically writes one artifact (temp file + rename) and records its
    /// checksum.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), WorkbenchError> {
        let bytes = contents.as_bytes();
        let tmp = self.dir.join(format!("{name}.tmp-{}", std::process::id()));
        let path = self.dir.join(name);
        std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), WorkbenchError> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.write(name, &text)
    }

    /// Names and checksums of everything written so far.
    pub fn file_checksums(&self) -> Vec<(String, String)> {
        self.files.iter().map(|f| (f.name.clone(), f.sha256.clone())).collect()
    }

    /// Writes `manifest.json` listing exactly the emitted files; call last.
    pub fn finish(mut self, kind: &str, config_toml: &str) -> Result<PathBuf, WorkbenchError> {
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            kind,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            config_toml,
            files: &self.files.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let tmp = self.dir.join(format!("manifest.json.tmp-{}", std::process::id()));
        let path = self.dir.join("manifest.json");
        std::fs::write(&tmp, &text).map_err(io_err(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
        Ok(path)
    }
}

/// `t,jx,jy,jz,x,p,lambda` rows, one per retained sample.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,jx,jy,jz,x,p,lambda\n");
    for ((t, s), lam) in traj.times().iter().zip(traj.states()).zip(traj.pulse_values()) {
        let _ = writeln!(out, "{t},{},{},{},{},{},{lam}", s.jx, s.jy, s.jz, s.x, s.p);
    }
    out
}

/// `n,t,<obs>` rows for a stroboscopic series sampled at multiples of
/// `period`.
pub fn strobe_csv(name: &str, series: &[f64], period: f64) -> String {
    let mut out = format!("n,t,{name}\n");
    for (n, v) in series.iter().enumerate() {
        let _ = writeln!(out, "{n},{},{v}", n as f64 * period);
    }
    out
}

/// `n,t,R_<site>...,R_bar` rows; the trailing column averages the listed
/// sites.
pub fn autocorrelation_csv(r: &Autocorrelation, period: f64) -> String {
    let mut out = String::from("n,t");
    for site in r.sites() {
        let _ = write!(out, ",R_{site}");
    }
    out.push_str(",R_bar\n");
    let rbar = r.site_averaged();
    for n in 0..=r.n_periods() {
        let _ = write!(out, "{n},{}", n as f64 * period);
        for series in r.all_series() {
            let _ = write!(out, ",{}", series[n]);
        }
        let _ = writeln!(out, ",{}", rbar[n]);
    }
    out
}

/// `omega,magnitude` rows.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("omega,magnitude\n");
    for (w, m) in spectrum.freqs().iter().zip(spectrum.mags()) {
        let _ = writeln!(out, "{w},{m}");
    }
    out
}
