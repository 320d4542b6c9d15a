use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Diagnostics, FieldSet, SolverError, StepSummary, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    /// Raw little-endian `f64` after the header line.
    Bin,
}

impl SnapshotFormat {
    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Bin => "bin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub t: f64,
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub dx: f64,
    pub dy: f64,
}

impl SnapshotHeader {
    fn line(&self) -> String {
        format!(
            "# t={} nx={} ny={} x_min={} y_min={} dx={} dy={}\n",
            self.t, self.nx, self.ny, self.x_min, self.y_min, self.dx, self.dy
        )
    }

    fn parse(line: &str) -> Result<Self, SolverError> {
        let bad = |m: &str| SolverError::Snapshot(format!("{m} in header {line:?}"));
        let body = line.trim().strip_prefix('#').ok_or_else(|| bad("missing '#'"))?;
        let get = |key: &str| -> Result<&str, SolverError> {
            body.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| bad(&format!("missing {key}")))
        };
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
        Ok(Self {
            t: float(get("t")?)?,
            nx: int(get("nx")?)?,
            ny: int(get("ny")?)?,
            x_min: float(get("x_min")?)?,
            y_min: float(get("y_min")?)?,
            dx: float(get("dx")?)?,
            dy: float(get("dy")?)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    /// Row-major, `x` fastest.
    pub data: Vec<f64>,
}

pub const COMPONENT_NAMES: [&str; 3] = ["h", "q", "p"];

/// Writes one component (0 = h, 1 = q, 2 = p) and returns the file path.
pub fn write_snapshot(dir: &Path, fields: &FieldSet, component: usize, format: SnapshotFormat) -> Result<PathBuf, SolverError> {
    let name = COMPONENT_NAMES
        .get(component)
        .ok_or_else(|| SolverError::InvalidConfig(format!("component {component} out of range")))?;
    let g = fields.grid;
    let header = SnapshotHeader {
        t: fields.t,
        nx: g.nx,
        ny: g.ny,
        x_min: g.x_min,
        y_min: g.y_min,
        dx: g.dx,
        dy: g.dy,
    };
    let data = fields.components()[component];
    let path = dir.join(format!("{name}_t{:.6}.{}", fields.t, format.extension()));
    let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
    out.write_all(header.line().as_bytes())?;
    match format {
        SnapshotFormat::Csv => {
            for r in data.chunks(g.nx) {
                let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        SnapshotFormat::Bin => {
            for v in data {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(path)
}

/// Reads a snapshot; the format follows the file extension.
pub fn read_snapshot(path: &Path) -> Result<Snapshot, SolverError> {
    let bytes = fs::read(path)?;
    let nl = bytes
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| SolverError::Snapshot("no header line".into()))?;
    let header_line = std::str::from_utf8(&bytes[..nl]).map_err(|_| SolverError::Snapshot("header is not UTF-8".into()))?;
    let header = SnapshotHeader::parse(header_line)?;
    let body = &bytes[nl + 1..];
    let expected = header.nx * header.ny;
    let data: Vec<f64> = if path.extension().is_some_and(|e| e == "bin") {
        if body.len() != expected * 8 {
            return Err(SolverError::Snapshot(format!(
                "expected {} payload bytes, found {}",
                expected * 8,
                body.len()
            )));
        }
        body.chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect()
    } else {
        let text = std::str::from_utf8(body).map_err(|_| SolverError::Snapshot("body is not UTF-8".into()))?;
        let mut data = Vec::with_capacity(expected);
        for (r, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            for tok in line.split(',') {
                data.push(
                    tok.trim()
                        .parse()
                        .map_err(|_| SolverError::Snapshot(format!("bad value {tok:?} on row {r}")))?,
                );
            }
        }
        if data.len() != expected {
            return Err(SolverError::Snapshot(format!("expected {expected} values, found {}", data.len())));
        }
        data
    };
    Ok(Snapshot { header, data })
}

pub const DIAGNOSTICS_COLUMNS: &str = "t,linf,l2,hmax,hmin,kx_dom,ky_dom,mode_energy";

pub fn write_diagnostics_csv(path: &Path, d: &Diagnostics) -> Result<(), SolverError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{DIAGNOSTICS_COLUMNS}")?;
    for k in 0..d.len() {
        let (kx, ky, e) = match d.modes[k] {
            Some(m) => (m.kx.to_string(), m.ky.to_string(), m.energy_fraction.to_string()),
            None => ("nan".into(), "nan".into(), "nan".into()),
        };
        writeln!(out, "{},{},{},{},{},{kx},{ky},{e}", d.t[k], d.linf[k], d.l2[k], d.hmax[k], d.hmin[k])?;
    }
    out.flush()?;
    Ok(())
}

/// Everything needed to reproduce and interpret one command's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<StepSummary>,
    #[serde(default)]
    pub results: serde_json::Value,
    #[serde(default)]
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            termination: None,
            steps: None,
            results: serde_json::Value::Null,
            files: Vec::new(),
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), SolverError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| SolverError::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}
