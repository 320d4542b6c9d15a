use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{Grid2D, SolverError};

/// Strongest Fourier pair `±(kx, ky)` of a real field, in integer index
/// units, with its share of the non-mean energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantMode {
    pub kx: i64,
    pub ky: i64,
    pub energy_fraction: f64,
    /// Direction of the physical wavevector, degrees in `[0, 180)`.
    pub angle_deg: f64,
    /// Physical wavenumber `2π·|(kx/Lx, ky/Ly)|`.
    pub wavenumber: f64,
    /// The pair does not stand out from a flat spectrum.
    pub low_confidence: bool,
}

/// FFT plans and buffers for repeated analyses on one grid.
pub struct ModeAnalyzer {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    fft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    rows: Vec<Complex64>,
    cols: Vec<Complex64>,
}

impl std::fmt::Debug for ModeAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeAnalyzer").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

fn signed(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Energy fraction below which `M` pairs look like white noise: the largest
/// of `M` exponential variates is near `ln M / M`; the margin keeps noise
/// fields flagged with high probability.
fn low_confidence(fraction: f64, pairs: usize) -> bool {
    let m = pairs as f64;
    fraction * m < 4.0 * m.ln() + 10.0
}

impl ModeAnalyzer {
    pub fn new(grid: &Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            lx: grid.lx(),
            ly: grid.ly(),
            fft_x: planner.plan_fft_forward(grid.nx),
            fft_y: planner.plan_fft_forward(grid.ny),
            rows: vec![Complex64::new(0.0, 0.0); grid.len()],
            cols: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Dominant mode of `field` after removing its mean.
    pub fn analyze(&mut self, field: &[f64]) -> Result<DominantMode, SolverError> {
        let (nx, ny) = (self.nx, self.ny);
        if field.len() != nx * ny {
            return Err(SolverError::InvalidConfig(format!(
                "field of {} values on a {nx}x{ny} grid",
                field.len()
            )));
        }
        let mean = field.iter().sum::<f64>() / field.len() as f64;
        for (z, v) in self.rows.iter_mut().zip(field) {
            *z = Complex64::new(v - mean, 0.0);
        }
        self.fft_x.process(&mut self.rows);
        for j in 0..ny {
            for i in 0..nx {
                self.cols[i * ny + j] = self.rows[j * nx + i];
            }
        }
        self.fft_y.process(&mut self.cols);
        let energy = |i: usize, j: usize| self.cols[i * ny + j].norm_sqr();

        let total: f64 = self.cols.iter().skip(1).map(|z| z.norm_sqr()).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(SolverError::UndefinedMode);
        }
        let phys = |kx: i64, ky: i64| {
            let (a, b) = (kx as f64 / self.lx, ky as f64 / self.ly);
            (2.0 * std::f64::consts::PI * (a * a + b * b).sqrt(), a, b)
        };
        let mut best: Option<(f64, i64, i64)> = None;
        let mut pairs = 0usize;
        for i in 0..nx {
            for j in 0..ny {
                if i == 0 && j == 0 {
                    continue;
                }
                let (ci, cj) = ((nx - i) % nx, (ny - j) % ny);
                if (i, j) > (ci, cj) {
                    continue;
                }
                pairs += 1;
                let e = if (ci, cj) == (i, j) {
                    energy(i, j)
                } else {
                    energy(i, j) + energy(ci, cj)
                };
                let (a, b) = ((signed(i, nx), signed(j, ny)), (signed(ci, nx), signed(cj, ny)));
                // representative: larger (ky, kx)
                let (kx, ky) = if (a.1, a.0) >= (b.1, b.0) { a } else { b };
                let better = match best {
                    None => true,
                    Some((be, bx, by)) => {
                        let tol = 1e-12 * be.max(e);
                        if e > be + tol {
                            true
                        } else if e < be - tol {
                            false
                        } else {
                            let (kn, _, _) = phys(kx, ky);
                            let (bn, _, _) = phys(bx, by);
                            kn < bn || (kn == bn && (kx, ky) < (bx, by))
                        }
                    }
                };
                if better {
                    best = Some((e, kx, ky));
                }
            }
        }
        let (e, kx, ky) = best.ok_or(SolverError::UndefinedMode)?;
        let fraction = e / total;
        let (wavenumber, a, b) = phys(kx, ky);
        let mut angle = b.atan2(a).to_degrees();
        if angle < 0.0 {
            angle += 180.0;
        }
        if angle >= 180.0 {
            angle -= 180.0;
        }
        Ok(DominantMode {
            kx,
            ky,
            energy_fraction: fraction,
            angle_deg: angle,
            wavenumber,
            low_confidence: low_confidence(fraction, pairs),
        })
    }
}

/// One-shot [`ModeAnalyzer::analyze`].
pub fn dominant_mode(field: &[f64], grid: &Grid2D) -> Result<DominantMode, SolverError> {
    ModeAnalyzer::new(grid).analyze(field)
}
