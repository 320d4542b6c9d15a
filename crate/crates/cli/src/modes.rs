use std::path::Path;

use serde::Serialize;
use serde_json::json;

use oblique_core::solver::{dominant_mode, read_snapshot, DominantMode, Grid2D, Manifest};

use crate::error::CliError;
use crate::output::{to_value, OutDir};

#[derive(Debug, Clone, Serialize)]
struct Report {
    snapshot: String,
    t: f64,
    mode: DominantMode,
}

pub fn run(snapshot: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let snap = read_snapshot(snapshot).map_err(|e| CliError::Config(format!("{}: {e}", snapshot.display())))?;
    let h = snap.header;
    let grid = Grid2D::new(
        h.nx,
        h.ny,
        h.x_min,
        h.x_min + h.nx as f64 * h.dx,
        h.y_min,
        h.y_min + h.ny as f64 * h.dy,
    )?;
    let mode = dominant_mode(&snap.data, &grid)?;
    let report = Report {
        snapshot: snapshot.display().to_string(),
        t: h.t,
        mode,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("plain data"));
    if let Some(dir) = out {
        let mut out = OutDir::create(dir)?;
        out.json("modes.json", &report)?;
        let mut manifest = Manifest::new("modes", json!({ "snapshot": report.snapshot }));
        manifest.results = to_value(&report);
        out.finish(manifest)?;
    }
    Ok(())
}
