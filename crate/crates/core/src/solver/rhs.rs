use rayon::prelude::*;

use super::stencil::{diffusion_slices_acc, pad_periodic, weno5_reconstruct, weno_flux_slices, weno_flux_slices_uniform};
use super::{FieldSet, Grid2D, Mode, Reconstruction, RunConfig, SolverError};
use crate::matkit::{real_eigenvalues, RealMatrix};
use crate::swe::{advection_matrices, viscosity_matrices, SweError, DEPTH_FLOOR};

const GHOST: usize = 3;

type Mat3 = [[f64; 3]; 3];

fn to_mat3(m: &RealMatrix) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m.get(i, j)))
}

/// Triangular matrices (the paper's viscosity pair) read their spectrum off
/// the diagonal, avoiding root-finder noise at repeated eigenvalues.
fn spectral_radius(m: &RealMatrix) -> Result<f64, SolverError> {
    let n = m.dim();
    let lower = (0..n).all(|i| (i + 1..n).all(|j| m.get(i, j) == 0.0));
    let upper = (0..n).all(|i| (0..i).all(|j| m.get(i, j) == 0.0));
    if lower || upper {
        return Ok((0..n).map(|i| m.get(i, i).abs()).fold(0.0, f64::max));
    }
    real_eigenvalues(m)
        .map(|s| s.radius())
        .map_err(|e| SolverError::InvalidConfig(format!("eigenvalues of a coefficient matrix: {e}")))
}

/// Semi-discrete right-hand side `L(u)` for one configuration.
#[derive(Debug, Clone)]
pub struct Rhs {
    mode: Mode,
    reconstruction: Reconstruction,
    grid: Grid2D,
    g: f64,
    a: Mat3,
    b: Mat3,
    c: Mat3,
    d: Mat3,
    speed_x: f64,
    speed_y: f64,
    viscous_radius: f64,
}

/// Scratch arrays reused across right-hand-side evaluations and steps.
#[derive(Debug, Clone)]
pub struct RhsWorkspace {
    pub(super) scratch: Scratch,
    pub(super) l: FieldSet,
    pub(super) stage: FieldSet,
}

#[derive(Debug, Clone)]
pub(super) struct Scratch {
    fx: [Vec<f64>; 3],
    fy: [Vec<f64>; 3],
    /// `flux_y[c]` row `j` holds the numerical flux at `j + 1/2`.
    flux_y: [Vec<f64>; 3],
    alpha_x: Vec<f64>,
    alpha_y: Vec<f64>,
}

impl RhsWorkspace {
    pub fn new(grid: &Grid2D) -> Self {
        let n = grid.len();
        let z = || vec![0.0; n];
        Self {
            scratch: Scratch {
                fx: [z(), z(), z()],
                fy: [z(), z(), z()],
                flux_y: [z(), z(), z()],
                alpha_x: vec![0.0; grid.ny],
                alpha_y: vec![0.0; grid.nx],
            },
            l: FieldSet::zeros(*grid),
            stage: FieldSet::zeros(*grid),
        }
    }
}

struct RowScratch {
    upad: [Vec<f64>; 3],
    fpad: [Vec<f64>; 3],
    flux: [Vec<f64>; 3],
}

impl RowScratch {
    fn new(nx: usize) -> Self {
        let z = || Vec::with_capacity(nx + 2 * GHOST);
        Self {
            upad: [z(), z(), z()],
            fpad: [z(), z(), z()],
            flux: [vec![0.0; nx + 1], vec![0.0; nx + 1], vec![0.0; nx + 1]],
        }
    }
}

fn row(arr: &[f64], nx: usize, ny: usize, j: isize) -> &[f64] {
    let r = j.rem_euclid(ny as isize) as usize;
    &arr[r * nx..(r + 1) * nx]
}

impl Rhs {
    pub fn new(config: &RunConfig) -> Result<Self, SolverError> {
        let params = &config.params;
        params.validate()?;
        let (a, b) = advection_matrices(params);
        let (c, d) = viscosity_matrices(params);
        let viscous_radius = spectral_radius(&c)?.max(spectral_radius(&d)?);
        Ok(Self {
            mode: config.mode,
            reconstruction: config.reconstruction,
            grid: config.grid,
            g: params.g,
            speed_x: spectral_radius(&a)?,
            speed_y: spectral_radius(&b)?,
            a: to_mat3(&a),
            b: to_mat3(&b),
            c: to_mat3(&c),
            d: to_mat3(&d),
            viscous_radius,
        })
    }

    /// Largest spectral radius among the viscosity matrices.
    pub fn viscous_radius(&self) -> f64 {
        self.viscous_radius
    }

    /// Largest characteristic speeds in `x` and `y`.
    pub fn wave_speeds(&self, u: &FieldSet) -> Result<(f64, f64), SolverError> {
        match self.mode {
            Mode::Linear => Ok((self.speed_x, self.speed_y)),
            Mode::Nonlinear => {
                let (mut sx, mut sy) = (0.0_f64, 0.0_f64);
                for ((&h, &q), &p) in u.h.iter().zip(&u.q).zip(&u.p) {
                    check_depth(h)?;
                    let c = (self.g * h).sqrt();
                    sx = sx.max((q / h).abs() + c);
                    sy = sy.max((p / h).abs() + c);
                }
                Ok((sx, sy))
            }
        }
    }

    /// Writes `L(u)` into `out`.
    pub fn eval(&self, u: &FieldSet, out: &mut FieldSet, ws: &mut RhsWorkspace) -> Result<(), SolverError> {
        self.eval_with(u, out, &mut ws.scratch)
    }

    pub(super) fn eval_with(&self, u: &FieldSet, out: &mut FieldSet, ws: &mut Scratch) -> Result<(), SolverError> {
        let grid = self.grid;
        if u.grid != grid || out.grid != grid {
            return Err(SolverError::InvalidConfig("field grid differs from solver grid".into()));
        }
        let (nx, ny) = (grid.nx, grid.ny);
        self.fill_fluxes(u, ws)?;
        let uc = u.components();

        // y-interface fluxes
        let characteristic = self.reconstruction == Reconstruction::Characteristic;
        if characteristic {
            self.characteristic_y(u, ws);
        } else {
            for c in 0..3 {
                let (fy, uu) = (&ws.fy[c], uc[c]);
                let alpha_y = &ws.alpha_y;
                let uniform = (self.mode == Mode::Linear).then_some(self.speed_y);
                ws.flux_y[c].par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
                    let j = j as isize;
                    let fs: [&[f64]; 6] = std::array::from_fn(|k| row(fy, nx, ny, j - 2 + k as isize));
                    let us: [&[f64]; 6] = std::array::from_fn(|k| row(uu, nx, ny, j - 2 + k as isize));
                    match uniform {
                        Some(a) => weno_flux_slices_uniform(fs, us, a, out),
                        None => weno_flux_slices(fs, us, alpha_y, out),
                    }
                });
            }
        }

        let (inv_dx, inv_dy) = (1.0 / grid.dx, 1.0 / grid.dy);
        let (inv_dx2, inv_dy2) = (inv_dx * inv_dx, inv_dy * inv_dy);
        let ws = &*ws;
        let [oh, oq, op] = out.components_mut();
        oh.par_chunks_mut(nx)
            .zip(oq.par_chunks_mut(nx))
            .zip(op.par_chunks_mut(nx))
            .enumerate()
            .for_each_init(
                || RowScratch::new(nx),
                |s, (j, ((rh, rq), rp))| {
                    let rows: [&mut [f64]; 3] = [rh, rq, rp];
                    let ji = j as isize;
                    for c in 0..3 {
                        pad_periodic(row(uc[c], nx, ny, ji), GHOST, &mut s.upad[c]);
                        pad_periodic(row(&ws.fx[c], nx, ny, ji), GHOST, &mut s.fpad[c]);
                    }
                    let alpha = match self.mode {
                        Mode::Linear => self.speed_x,
                        Mode::Nonlinear => ws.alpha_x[j],
                    };
                    if characteristic {
                        let [f0, f1, f2] = &mut s.flux;
                        characteristic_line(
                            [&s.upad[0], &s.upad[1], &s.upad[2]],
                            [&s.fpad[0], &s.fpad[1], &s.fpad[2]],
                            alpha,
                            self.g,
                            Axis::X,
                            [f0, f1, f2],
                        );
                    } else {
                        for c in 0..3 {
                            let fs: [&[f64]; 6] = std::array::from_fn(|k| &s.fpad[c][k..]);
                            let us: [&[f64]; 6] = std::array::from_fn(|k| &s.upad[c][k..]);
                            weno_flux_slices_uniform(fs, us, alpha, &mut s.flux[c]);
                        }
                    }
                    for (c, out) in rows.into_iter().enumerate() {
                        let fl = &s.flux[c][..nx + 1];
                        let here = row(&ws.flux_y[c], nx, ny, ji);
                        let below = row(&ws.flux_y[c], nx, ny, ji - 1);
                        for i in 0..nx {
                            out[i] = -(fl[i + 1] - fl[i]) * inv_dx - (here[i] - below[i]) * inv_dy;
                        }
                        for d in 0..3 {
                            let cx = self.c[c][d];
                            if cx != 0.0 {
                                let st: [&[f64]; 7] = std::array::from_fn(|k| &s.upad[d][k..]);
                                diffusion_slices_acc(st, inv_dx2, cx, out);
                            }
                            let cy = self.d[c][d];
                            if cy != 0.0 {
                                let st: [&[f64]; 7] = std::array::from_fn(|k| row(uc[d], nx, ny, ji - 3 + k as isize));
                                diffusion_slices_acc(st, inv_dy2, cy, out);
                            }
                        }
                    }
                },
            );
        out.t = u.t;
        Ok(())
    }

    fn fill_fluxes(&self, u: &FieldSet, ws: &mut Scratch) -> Result<(), SolverError> {
        let uc = u.components();
        match self.mode {
            Mode::Linear => {
                for (m, dst) in [(&self.a, &mut ws.fx), (&self.b, &mut ws.fy)] {
                    for (c, out) in dst.iter_mut().enumerate() {
                        let coef = m[c];
                        out.par_chunks_mut(4096).enumerate().for_each(|(k, chunk)| {
                            let off = k * 4096;
                            for (i, o) in chunk.iter_mut().enumerate() {
                                let m = off + i;
                                *o = coef[0] * uc[0][m] + coef[1] * uc[1][m] + coef[2] * uc[2][m];
                            }
                        });
                    }
                }
            }
            Mode::Nonlinear => {
                let g = self.g;
                let (nx, ny) = (self.grid.nx, self.grid.ny);
                if let Some(&h) = u.h.iter().find(|h| !(**h >= DEPTH_FLOOR)) {
                    return Err(SweError::Positivity { h, floor: DEPTH_FLOOR }.into());
                }
                let [fx0, fx1, fx2] = &mut ws.fx;
                let [fy0, fy1, fy2] = &mut ws.fy;
                for m in 0..u.h.len() {
                    let (h, q, p) = (u.h[m], u.q[m], u.p[m]);
                    let (uu, vv) = (q / h, p / h);
                    let pressure = 0.5 * g * h * h;
                    fx0[m] = q;
                    fx1[m] = q * uu + pressure;
                    fx2[m] = q * vv;
                    fy0[m] = p;
                    fy1[m] = p * uu;
                    fy2[m] = p * vv + pressure;
                }
                ws.alpha_x.iter_mut().for_each(|a| *a = 0.0);
                ws.alpha_y.iter_mut().for_each(|a| *a = 0.0);
                for j in 0..ny {
                    for i in 0..nx {
                        let m = j * nx + i;
                        let h = u.h[m];
                        let c = (g * h).sqrt();
                        ws.alpha_x[j] = ws.alpha_x[j].max((u.q[m] / h).abs() + c);
                        ws.alpha_y[i] = ws.alpha_y[i].max((u.p[m] / h).abs() + c);
                    }
                }
            }
        }
        Ok(())
    }

    fn characteristic_y(&self, u: &FieldSet, ws: &mut Scratch) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let uc = u.components();
        let fy = &ws.fy;
        let alpha_y = &ws.alpha_y;
        let columns: Vec<[Vec<f64>; 3]> = (0..nx)
            .into_par_iter()
            .map(|i| {
                let gather = |arr: &[f64]| {
                    let col: Vec<f64> = (0..ny).map(|j| arr[j * nx + i]).collect();
                    let mut padded = Vec::new();
                    pad_periodic(&col, GHOST, &mut padded);
                    padded
                };
                let up = [gather(uc[0]), gather(uc[1]), gather(uc[2])];
                let fp = [gather(&fy[0]), gather(&fy[1]), gather(&fy[2])];
                let mut out = [vec![0.0; ny + 1], vec![0.0; ny + 1], vec![0.0; ny + 1]];
                let [o0, o1, o2] = &mut out;
                characteristic_line(
                    [&up[0], &up[1], &up[2]],
                    [&fp[0], &fp[1], &fp[2]],
                    alpha_y[i],
                    self.g,
                    Axis::Y,
                    [o0, o1, o2],
                );
                out
            })
            .collect();
        for (i, col) in columns.iter().enumerate() {
            for c in 0..3 {
                for j in 0..ny {
                    ws.flux_y[c][j * nx + i] = col[c][j + 1];
                }
            }
        }
    }
}

fn check_depth(h: f64) -> Result<(), SweError> {
    if h >= DEPTH_FLOOR {
        Ok(())
    } else {
        Err(SweError::Positivity { h, floor: DEPTH_FLOOR })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// Interface fluxes along a padded line after projecting onto the
/// eigenvectors of the flux Jacobian at the arithmetic mean state.
/// `out[c][m]` is the flux at `(m − 1) + 1/2`.
fn characteristic_line(u: [&[f64]; 3], f: [&[f64]; 3], alpha: f64, g: f64, axis: Axis, out: [&mut [f64]; 3]) {
    // components reordered to (h, normal momentum, tangential momentum)
    let (n_idx, t_idx) = match axis {
        Axis::X => (1, 2),
        Axis::Y => (2, 1),
    };
    let len = out[0].len();
    let [o0, o1, o2] = out;
    for m in 0..len {
        let (il, ir) = (m + 2, m + 3);
        let hl = u[0][il];
        let hr = u[0][ir];
        let h = 0.5 * (hl + hr);
        let un = 0.5 * (u[n_idx][il] / hl + u[n_idx][ir] / hr);
        let ut = 0.5 * (u[t_idx][il] / hl + u[t_idx][ir] / hr);
        let c = (g * h).sqrt();
        let inv2c = 0.5 / c;
        let project = |k: usize, s: f64| -> [f64; 3] {
            let w = |idx: usize| 0.5 * (f[idx][m + k] + s * alpha * u[idx][m + k]);
            let (v0, vn, vt) = (w(0), w(n_idx), w(t_idx));
            [
                (un + c) * inv2c * v0 - inv2c * vn,
                -ut * v0 + vt,
                -(un - c) * inv2c * v0 + inv2c * vn,
            ]
        };
        let plus: [[f64; 3]; 5] = std::array::from_fn(|k| project(k, 1.0));
        let minus: [[f64; 3]; 5] = std::array::from_fn(|k| project(5 - k, -1.0));
        let w: [f64; 3] = std::array::from_fn(|r| {
            weno5_reconstruct(plus[0][r], plus[1][r], plus[2][r], plus[3][r], plus[4][r])
                + weno5_reconstruct(minus[0][r], minus[1][r], minus[2][r], minus[3][r], minus[4][r])
        });
        let fh = w[0] + w[2];
        let fn_ = (un - c) * w[0] + (un + c) * w[2];
        let ft = ut * (w[0] + w[2]) + w[1];
        o0[m] = fh;
        let (on, ot) = match axis {
            Axis::X => (&mut o1[m], &mut o2[m]),
            Axis::Y => (&mut o2[m], &mut o1[m]),
        };
        *on = fn_;
        *ot = ft;
    }
}
