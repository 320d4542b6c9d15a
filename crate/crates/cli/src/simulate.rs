use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use oblique_core::solver::{
    self as solver, write_diagnostics_csv, write_snapshot, DominantMode, Grid2D, Manifest, Mode, Reconstruction, RunConfig,
    SnapshotFormat, Termination, DEFAULT_CFL, DEFAULT_DIAGNOSTICS_INTERVAL,
};
use oblique_core::swe::SweParams;

use crate::config::{load, set};
use crate::error::CliError;
use crate::output::{to_value, OutDir};
use crate::Common;

/// The paper's full horizon.
pub const LONG_RUN_T_FINAL: f64 = 250.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionArg {
    Componentwise,
    Characteristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FormatArg {
    Csv,
    Bin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: ModeArg,
    pub g: f64,
    pub h0: f64,
    pub eps: f64,
    pub delta: f64,
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub t_final: f64,
    pub cfl_number: f64,
    pub fixed_dt: Option<f64>,
    pub snapshot_times: Vec<f64>,
    pub diagnostics_interval: f64,
    pub reconstruction: ReconstructionArg,
    pub snapshot_format: FormatArg,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let p = SweParams::default();
        let g = Grid2D::paper();
        Self {
            mode: ModeArg::Linear,
            g: p.g,
            h0: p.h0,
            eps: p.eps,
            delta: p.delta,
            nx: g.nx,
            ny: g.ny,
            x_min: g.x_min,
            x_max: g.x_max,
            y_min: g.y_min,
            y_max: g.y_max,
            t_final: 150.0,
            cfl_number: DEFAULT_CFL,
            fixed_dt: None,
            snapshot_times: Vec::new(),
            diagnostics_interval: DEFAULT_DIAGNOSTICS_INTERVAL,
            reconstruction: ReconstructionArg::Componentwise,
            snapshot_format: FormatArg::Csv,
        }
    }
}

impl SimulateConfig {
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let config = RunConfig {
            mode: match self.mode {
                ModeArg::Linear => Mode::Linear,
                ModeArg::Nonlinear => Mode::Nonlinear,
            },
            params: SweParams {
                g: self.g,
                h0: self.h0,
                eps: self.eps,
                delta: self.delta,
            },
            grid: Grid2D::new(self.nx, self.ny, self.x_min, self.x_max, self.y_min, self.y_max)?,
            t_final: self.t_final,
            cfl_number: self.cfl_number,
            snapshot_times: self.snapshot_times.clone(),
            diagnostics_interval: self.diagnostics_interval,
            reconstruction: match self.reconstruction {
                ReconstructionArg::Componentwise => Reconstruction::Componentwise,
                ReconstructionArg::Characteristic => Reconstruction::Characteristic,
            },
            fixed_dt: self.fixed_dt,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct Flags {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_max: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Run to the paper's full horizon t = 250 (hours on the paper grid).
    #[arg(long, conflicts_with = "t_final")]
    long_run: bool,
    #[arg(long)]
    cfl_number: Option<f64>,
    #[arg(long)]
    fixed_dt: Option<f64>,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    #[arg(long)]
    diagnostics_interval: Option<f64>,
    #[arg(long, value_enum)]
    reconstruction: Option<ReconstructionArg>,
    #[arg(long, value_enum)]
    snapshot_format: Option<FormatArg>,
}

#[derive(Debug, Clone, Serialize)]
struct Results {
    relative_mass_drift: f64,
    hmax_overall: f64,
    linf_initial: f64,
    linf_final: f64,
    /// Least-squares growth rate of the perturbation over the last two thirds.
    growth_rate: Option<f64>,
    final_mode: Option<DominantMode>,
    wall_seconds: f64,
}

pub fn merge(common: &Common, flags: &Flags) -> Result<SimulateConfig, CliError> {
    let mut c: SimulateConfig = load(common.config.as_deref(), "simulate")?;
    set(&mut c.mode, &flags.mode);
    set(&mut c.g, &flags.g);
    set(&mut c.h0, &flags.h0);
    set(&mut c.eps, &flags.eps);
    set(&mut c.delta, &flags.delta);
    set(&mut c.nx, &flags.nx);
    set(&mut c.ny, &flags.ny);
    set(&mut c.x_min, &flags.x_min);
    set(&mut c.x_max, &flags.x_max);
    set(&mut c.y_min, &flags.y_min);
    set(&mut c.y_max, &flags.y_max);
    set(&mut c.t_final, &flags.t_final);
    if flags.long_run {
        c.t_final = LONG_RUN_T_FINAL;
    }
    set(&mut c.cfl_number, &flags.cfl_number);
    if flags.fixed_dt.is_some() {
        c.fixed_dt = flags.fixed_dt;
    }
    set(&mut c.snapshot_times, &flags.snapshot_times);
    set(&mut c.diagnostics_interval, &flags.diagnostics_interval);
    set(&mut c.reconstruction, &flags.reconstruction);
    set(&mut c.snapshot_format, &flags.snapshot_format);
    Ok(c)
}

pub fn run(common: &Common, flags: &Flags) -> Result<(), CliError> {
    let config = merge(common, flags)?;
    let run_config = config.run_config()?;
    let format = match config.snapshot_format {
        FormatArg::Csv => SnapshotFormat::Csv,
        FormatArg::Bin => SnapshotFormat::Bin,
    };
    let mut out = OutDir::create(&common.out)?;
    let start = Instant::now();
    let outcome = solver::run(&run_config)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let snap_dir = out.path().join("snapshots");
    std::fs::create_dir_all(&snap_dir)?;
    let mut written = outcome.snapshots.clone();
    if written.last().is_none_or(|s| s.t != outcome.final_fields.t) {
        written.push(outcome.final_fields.clone());
    }
    for fields in &written {
        for component in 0..3 {
            let path = write_snapshot(&snap_dir, fields, component, format)?;
            out.record(&path);
        }
    }
    let diag_path = out.path().join("diagnostics.csv");
    write_diagnostics_csv(&diag_path, &outcome.diagnostics)?;
    out.record(&diag_path);

    let d = &outcome.diagnostics;
    let t_end = d.t.last().copied().unwrap_or(0.0);
    let results = Results {
        relative_mass_drift: d.relative_mass_drift(),
        hmax_overall: d.hmax_overall(),
        linf_initial: d.linf.first().copied().unwrap_or(f64::NAN),
        linf_final: d.linf.last().copied().unwrap_or(f64::NAN),
        growth_rate: d.growth_rate(t_end / 3.0, t_end),
        final_mode: d.modes.last().copied().flatten(),
        wall_seconds,
    };
    println!(
        "t={t_end} after {} steps: linf {:.4e} -> {:.4e}, max h {:.6}, mass drift {:.2e}",
        outcome.steps.steps, results.linf_initial, results.linf_final, results.hmax_overall, results.relative_mass_drift
    );
    if let Some(m) = results.final_mode {
        println!(
            "dominant mode ({}, {}) at {:.1} deg, |k| = {:.4}, energy {:.3}",
            m.kx, m.ky, m.angle_deg, m.wavenumber, m.energy_fraction
        );
    }
    let mut manifest = Manifest::new("simulate", to_value(&config));
    manifest.termination = Some(outcome.termination);
    manifest.steps = Some(outcome.steps);
    manifest.results = to_value(&results);
    out.finish(manifest)?;
    match outcome.termination {
        Termination::Completed => Ok(()),
        Termination::BlowUp(b) => Err(CliError::Runtime(format!(
            "blow-up at t = {} (max |u| = {:e}); partial results written",
            b.t, b.max_abs
        ))),
    }
}

