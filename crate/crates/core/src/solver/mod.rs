//! Periodic 2-D method-of-lines solver for the viscous shallow-water system:
//! WENO5 convection, sixth-order central diffusion, SSP-RK3 in time.

mod io;
mod modes;
mod rhs;
mod stencil;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::swe::{self, State, SweError, SweParams, LINEAR_BASE_DEPTH, NONLINEAR_BASE_DEPTH};

pub use io::{
    read_snapshot, write_diagnostics_csv, write_manifest, write_snapshot, Manifest, Snapshot, SnapshotFormat,
    SnapshotHeader,
};
pub use modes::{dominant_mode, DominantMode, ModeAnalyzer};
pub use rhs::{Rhs, RhsWorkspace};
pub use stencil::{diffusion6, weno5_derivative, DIFFUSION6_WEIGHTS, WENO_EPS};

/// Fields whose magnitude passes this bound end the run as a blow-up.
pub const OVERFLOW_GUARD: f64 = 1e100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Swe(#[from] SweError),
    #[error("field is identically zero after mean removal; no dominant mode")]
    UndefinedMode,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
}

impl From<std::io::Error> for SolverError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Uniform periodic grid with nodes `x_min + i·dx`, `i = 0..nx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
}

/// Fewest cells per direction the seven-point stencils accept.
pub const MIN_CELLS: usize = 7;

impl Grid2D {
    pub fn new(nx: usize, ny: usize, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, SolverError> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(SolverError::InvalidConfig(format!(
                "grid {nx}x{ny} below the {MIN_CELLS}-cell stencil width"
            )));
        }
        if !(x_max > x_min && y_max > y_min) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(SolverError::InvalidConfig("domain bounds must be finite and increasing".into()));
        }
        Ok(Self {
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
        })
    }

    /// `[−30, 30]²` with spacing 0.2.
    pub fn paper() -> Self {
        Self::new(300, 300, -30.0, 30.0, -30.0, 30.0).expect("valid")
    }

    /// Rejects deserialized grids whose spacings disagree with their bounds.
    pub fn validate(&self) -> Result<(), SolverError> {
        let fresh = Self::new(self.nx, self.ny, self.x_min, self.x_max, self.y_min, self.y_max)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        if close(self.dx, fresh.dx) && close(self.dy, fresh.dy) {
            Ok(())
        } else {
            Err(SolverError::InvalidConfig("dx, dy inconsistent with bounds and cell counts".into()))
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy
    }

    pub fn lx(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn ly(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// `(h, q, p)` on a grid, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub grid: Grid2D,
    pub h: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl FieldSet {
    pub fn zeros(grid: Grid2D) -> Self {
        let n = grid.len();
        Self {
            grid,
            h: vec![0.0; n],
            q: vec![0.0; n],
            p: vec![0.0; n],
            t: 0.0,
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> State) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let s = f(grid.x(i), grid.y(j));
                let m = j * grid.nx + i;
                out.h[m] = s.h;
                out.q[m] = s.q;
                out.p[m] = s.p;
            }
        }
        out
    }

    pub fn components(&self) -> [&[f64]; 3] {
        [&self.h, &self.q, &self.p]
    }

    pub fn components_mut(&mut self) -> [&mut [f64]; 3] {
        [&mut self.h, &mut self.q, &mut self.p]
    }

    /// Largest magnitude, or NaN if any entry is NaN or infinite.
    pub fn max_abs(&self) -> f64 {
        let (mut m, mut poison) = (0.0_f64, 0.0_f64);
        for c in self.components() {
            for &v in c {
                let a = v.abs();
                m = if a > m { a } else { m };
                // v·0 is NaN exactly when v is NaN or infinite
                poison += v * 0.0;
            }
        }
        m + poison
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    /// `self ← (1−b)·u + b·(self + dt·l)`, written as an increment of `u`.
    fn blend(&mut self, u: &FieldSet, b: f64, dt: f64, l: &FieldSet) {
        for ((s, u), l) in self.components_mut().into_iter().zip(u.components()).zip(l.components()) {
            for ((s, u), l) in s.iter_mut().zip(u).zip(l) {
                *s = u + b * ((*s - u) + dt * l);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Perturbation `(h′, q′, p′)` under the lake-at-rest linearization.
    Linear,
    /// Full Saint-Venant fluxes in `(h, q, p)`.
    Nonlinear,
}

impl Mode {
    pub fn base_depth(self) -> f64 {
        match self {
            Self::Linear => LINEAR_BASE_DEPTH,
            Self::Nonlinear => NONLINEAR_BASE_DEPTH,
        }
    }

    pub fn initial_state(self, x: f64, y: f64) -> State {
        match self {
            Self::Linear => swe::initial_linear(x, y),
            Self::Nonlinear => swe::initial_nonlinear(x, y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconstruction {
    #[default]
    Componentwise,
    /// Projection onto local characteristic fields before reconstruction
    /// (nonlinear mode only).
    Characteristic,
}

pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_DIAGNOSTICS_INTERVAL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: SweParams,
    pub grid: Grid2D,
    pub t_final: f64,
    #[serde(default = "default_cfl")]
    pub cfl_number: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_interval")]
    pub diagnostics_interval: f64,
    #[serde(default)]
    pub reconstruction: Reconstruction,
    /// Overrides the CFL step everywhere except where clipped to output times.
    #[serde(default)]
    pub fixed_dt: Option<f64>,
}

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

fn default_interval() -> f64 {
    DEFAULT_DIAGNOSTICS_INTERVAL
}

impl RunConfig {
    /// Paper domain and parameters for the given mode and viscosity.
    pub fn paper(mode: Mode, eps: f64, t_final: f64) -> Self {
        Self {
            mode,
            params: SweParams {
                eps,
                ..SweParams::default()
            },
            grid: Grid2D::paper(),
            t_final,
            cfl_number: DEFAULT_CFL,
            snapshot_times: Vec::new(),
            diagnostics_interval: DEFAULT_DIAGNOSTICS_INTERVAL,
            reconstruction: Reconstruction::Componentwise,
            fixed_dt: None,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        self.params.validate()?;
        self.grid.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.cfl_number > 0.0 && self.cfl_number < 1.0) {
            return bad(format!("cfl_number must lie in (0, 1), got {}", self.cfl_number));
        }
        if !(self.diagnostics_interval > 0.0 && self.diagnostics_interval.is_finite()) {
            return bad("diagnostics_interval must be positive".into());
        }
        if self.snapshot_times.iter().any(|t| !(0.0..=self.t_final).contains(t)) {
            return bad("snapshot times must lie in [0, t_final]".into());
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("snapshot times must increase strictly".into());
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("fixed_dt must be positive, got {dt}"));
            }
        }
        if self.reconstruction == Reconstruction::Characteristic && self.mode == Mode::Linear {
            return bad("characteristic reconstruction is available in nonlinear mode only".into());
        }
        Ok(())
    }

    pub fn initial_fields(&self) -> FieldSet {
        FieldSet::from_fn(self.grid, |x, y| self.mode.initial_state(x, y))
    }
}

/// SSP-RK3 step in Shu–Osher form. Returns the blow-up record if a stage
/// value stops being finite or exceeds [`OVERFLOW_GUARD`]; `fields` is then
/// left untouched.
pub fn ssprk3_step(fields: &mut FieldSet, dt: f64, rhs: &Rhs, ws: &mut RhsWorkspace) -> Result<Option<BlowUp>, SolverError> {
    let t0 = fields.t;
    let RhsWorkspace { scratch, l, stage } = ws;
    if stage.grid != fields.grid {
        return Err(SolverError::InvalidConfig("workspace grid differs from field grid".into()));
    }
    for (dst, src) in stage.components_mut().into_iter().zip(fields.components()) {
        dst.copy_from_slice(src);
    }
    for (b, c) in [(1.0, 1.0), (0.25, 0.5), (2.0 / 3.0, 1.0)] {
        rhs.eval_with(stage, l, scratch)?;
        stage.blend(fields, b, dt, l);
        stage.t = t0 + c * dt;
        if let Some(blow) = BlowUp::check(stage, stage.t) {
            return Ok(Some(blow));
        }
    }
    std::mem::swap(fields, stage);
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    /// Time of the offending stage value.
    pub t: f64,
    pub max_abs: f64,
}

impl BlowUp {
    fn check(fields: &FieldSet, t: f64) -> Option<Self> {
        let m = fields.max_abs();
        (m.is_nan() || m > OVERFLOW_GUARD).then_some(Self { t, max_abs: m })
    }
}

/// CFL-limited step `cfl / [λx/dx + λy/dy + 2ρ(1/dx² + 1/dy²)]`.
pub fn step_size(fields: &FieldSet, config: &RunConfig, rhs: &Rhs) -> Result<f64, SolverError> {
    let g = &config.grid;
    let (sx, sy) = rhs.wave_speeds(fields)?;
    let denom = sx / g.dx + sy / g.dy + 2.0 * rhs.viscous_radius() * (1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy));
    let dt = config.cfl_number / denom;
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(SolverError::InvalidConfig(format!("non-positive time step {dt}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: Vec<f64>,
    /// Norms of `h − base depth`; the `l2` norm carries the cell area.
    pub linf: Vec<f64>,
    pub l2: Vec<f64>,
    pub hmax: Vec<f64>,
    pub hmin: Vec<f64>,
    pub modes: Vec<Option<DominantMode>>,
    /// `Σ h · dx·dy` (compensated).
    pub mass: Vec<f64>,
    /// `Σ |h| · dx·dy`, the scale against which mass drift is judged.
    pub mass_scale: Vec<f64>,
}

impl Diagnostics {
    fn record(&mut self, fields: &FieldSet, base: f64, analyzer: &mut ModeAnalyzer) {
        let area = fields.grid.cell_area();
        let (mut linf, mut sq, mut hmax, mut hmin) = (0.0_f64, 0.0, f64::NEG_INFINITY, f64::INFINITY);
        let mut pert = Vec::with_capacity(fields.h.len());
        for &h in &fields.h {
            let d = h - base;
            linf = linf.max(d.abs());
            sq += d * d;
            hmax = hmax.max(h);
            hmin = hmin.min(h);
            pert.push(d);
        }
        self.t.push(fields.t);
        self.linf.push(linf);
        self.l2.push((sq * area).sqrt());
        self.hmax.push(hmax);
        self.hmin.push(hmin);
        self.modes.push(analyzer.analyze(&pert).ok());
        self.mass.push(neumaier_sum(fields.h.iter().copied()) * area);
        self.mass_scale.push(neumaier_sum(fields.h.iter().map(|v| v.abs())) * area);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `max_t |M(t) − M(0)| / max_t Σ|h|·dx·dy`.
    pub fn relative_mass_drift(&self) -> f64 {
        let Some(&m0) = self.mass.first() else { return 0.0 };
        let scale = self.mass_scale.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / scale
    }

    /// Least-squares slope of `ln linf` against `t` over `[t0, t1]`.
    pub fn growth_rate(&self, t0: f64, t1: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .t
            .iter()
            .zip(&self.linf)
            .filter(|(t, v)| (t0..=t1).contains(*t) && **v > 0.0)
            .map(|(t, v)| (*t, v.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mt, my) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
        let (sxy, sxx) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
        Some(sxy / sxx)
    }

    pub fn hmax_overall(&self) -> f64 {
        self.hmax.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowUp(BlowUp),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub snapshots: Vec<FieldSet>,
    pub diagnostics: Diagnostics,
    pub termination: Termination,
    pub steps: StepSummary,
    /// Last accepted fields.
    pub final_fields: FieldSet,
}

/// Runs from the mode's initial data.
pub fn run(config: &RunConfig) -> Result<RunOutcome, SolverError> {
    config.validate()?;
    run_from(config, config.initial_fields())
}

/// Runs from the given fields (their time stamp is reset to zero).
pub fn run_from(config: &RunConfig, mut fields: FieldSet) -> Result<RunOutcome, SolverError> {
    config.validate()?;
    if fields.grid != config.grid {
        return Err(SolverError::InvalidConfig("initial fields live on a different grid".into()));
    }
    fields.t = 0.0;
    let rhs = Rhs::new(config)?;
    let mut ws = RhsWorkspace::new(&config.grid);
    let mut analyzer = ModeAnalyzer::new(&config.grid);
    let base = config.mode.base_depth();
    let mut diagnostics = Diagnostics::default();
    let mut snapshots = Vec::new();
    let mut pending = config.snapshot_times.iter().copied().peekable();
    let mut summary = StepSummary {
        steps: 0,
        dt_min: f64::INFINITY,
        dt_max: 0.0,
    };

    diagnostics.record(&fields, base, &mut analyzer);
    if pending.peek() == Some(&0.0) {
        snapshots.push(fields.clone());
        pending.next();
    }
    let interval = config.diagnostics_interval;
    let mut next_diag = interval;
    let mut termination = Termination::Completed;
    let tol = 1e-12 * config.t_final;

    while fields.t < config.t_final - tol {
        let mut dt = match config.fixed_dt {
            Some(dt) => dt,
            None => step_size(&fields, config, &rhs)?,
        };
        let target = pending.peek().copied().unwrap_or(config.t_final).min(config.t_final);
        let clipped = fields.t + dt >= target - tol;
        if clipped {
            dt = target - fields.t;
        }
        if let Some(b) = ssprk3_step(&mut fields, dt, &rhs, &mut ws)? {
            termination = Termination::BlowUp(b);
            break;
        }
        if clipped {
            fields.t = target;
        }
        summary.steps += 1;
        summary.dt_min = summary.dt_min.min(dt);
        summary.dt_max = summary.dt_max.max(dt);

        if pending.peek().is_some_and(|&s| fields.t >= s - tol) {
            snapshots.push(fields.clone());
            pending.next();
        }
        if fields.t >= next_diag - tol || fields.t >= config.t_final - tol {
            diagnostics.record(&fields, base, &mut analyzer);
            while next_diag <= fields.t + tol {
                next_diag += interval;
            }
        }
    }
    if summary.steps == 0 {
        summary.dt_min = 0.0;
    }
    Ok(RunOutcome {
        snapshots,
        diagnostics,
        termination,
        steps: summary,
        final_fields: fields,
    })
}
