//! First-order eigenvalue corrections for `A + δC`.
//!
//! The general route differentiates the characteristic polynomial: with
//! `r_i(δ)` the principal-minor sums of `A + δC` and `r_{i,1} = r_i'(0)`,
//!
//! ```text
//! λ_{ℓ,1} = −(1 / P'(λ_ℓ)) Σ_{i=1}^{N} (−1)^i r_{i,1} λ_ℓ^{N−i}
//! ```
//!
//! Two closed forms (N = 2, 3) and two independent oracles (finite
//! differences on the perturbed spectrum, and left/right eigenvectors) are
//! provided for cross-checking.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matkit::{char_poly, minor, real_eigenvalues, MatError, RealMatrix, Spectrum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("eigenvalues of A are not distinct (min gap {gap:e} < {threshold:e})")]
    RepeatedEigenvalues { gap: f64, threshold: f64 },
    #[error("closed form requires n = {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("step {0:e} outside [1e-8, 1e-3]")]
    StepOutOfRange(f64),
    #[error("ambiguous eigenvalue matching for eigenvalue {index}")]
    AmbiguousMatch { index: usize },
    #[error("eigenvector solve failed for eigenvalue {index}")]
    EigenvectorSolve { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    General,
    ClosedN2,
    ClosedN3,
    FdOracle,
    EigvecOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub base_eigenvalues: Vec<Complex64>,
    /// Index-aligned with `base_eigenvalues`.
    pub corrections: Vec<Complex64>,
    pub method: Method,
}

impl PerturbationResult {
    /// Largest mixed absolute/relative difference between the corrections of
    /// two results over the same base eigenvalues:
    /// `|a − b| / max(1, |a|, |b|)`.
    pub fn discrepancy(&self, other: &Self) -> f64 {
        self.corrections
            .iter()
            .zip(&other.corrections)
            .map(|(a, b)| (a - b).norm() / 1f64.max(a.norm()).max(b.norm()))
            .fold(0.0, f64::max)
    }
}

/// Principal-minor sums of `A` and their first derivatives along `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedCharPoly {
    pub r: Vec<f64>,
    pub r1: Vec<f64>,
}

/// Minimum relative eigenvalue gap below which corrections are refused.
pub const DISTINCT_GAP: f64 = 1e-6;

fn check_same_dim(a: &RealMatrix, c: &RealMatrix) -> Result<(), PerturbError> {
    if a.dim() == c.dim() {
        Ok(())
    } else {
        Err(MatError::DimensionMismatch {
            left: a.dim(),
            right: c.dim(),
        }
        .into())
    }
}

fn distinct_spectrum(a: &RealMatrix) -> Result<Spectrum, PerturbError> {
    let spec = real_eigenvalues(a)?;
    let threshold = DISTINCT_GAP * (1.0 + spec.radius());
    let gap = spec.min_gap();
    if gap < threshold {
        return Err(PerturbError::RepeatedEigenvalues { gap, threshold });
    }
    Ok(spec)
}

/// Derivative at zero of the polynomial interpolating `(nodes[j], values[j])`.
fn interpolated_slope_at_zero(nodes: &[f64], values: &[f64]) -> f64 {
    let mut slope = 0.0;
    for (j, &xj) in nodes.iter().enumerate() {
        // L_j'(0) = Σ_{m≠j} 1/(x_j − x_m) Π_{l≠j,m} (0 − x_l)/(x_j − x_l)
        let mut dl = 0.0;
        for (m, &xm) in nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (xj - xm);
            for (l, &xl) in nodes.iter().enumerate() {
                if l != j && l != m {
                    term *= -xl / (xj - xl);
                }
            }
            dl += term;
        }
        slope += dl * values[j];
    }
    slope
}

/// `r_{i,1}` by exact interpolation: `δ ↦ r_i(A + δC)` has degree at most
/// `i`, so `i + 1` integer nodes around zero determine its slope.
pub fn perturbed_minor_derivatives(
    a: &RealMatrix,
    c: &RealMatrix,
) -> Result<PerturbedCharPoly, PerturbError> {
    check_same_dim(a, c)?;
    let n = a.dim();
    let r = char_poly(a).real_minor_sums();
    let mut r1 = vec![0.0; n + 1];
    // minor sums at every node, shared across orders
    let half = n as i64 / 2;
    let all_nodes: Vec<f64> = (-half..=n as i64 - half).map(|v| v as f64).collect();
    let sums: Vec<Vec<f64>> = all_nodes
        .iter()
        .map(|&d| {
            if d == 0.0 {
                r.clone()
            } else {
                char_poly(&a.add_scaled(c, d).expect("same dim")).real_minor_sums()
            }
        })
        .collect();
    for (i, slot) in r1.iter_mut().enumerate().skip(1) {
        let lo = (half - i as i64 / 2) as usize;
        let nodes = &all_nodes[lo..=lo + i];
        let values: Vec<f64> = (lo..=lo + i).map(|k| sums[k][i]).collect();
        *slot = interpolated_slope_at_zero(nodes, &values);
    }
    Ok(PerturbedCharPoly { r, r1 })
}

pub fn corrections_general(a: &RealMatrix, c: &RealMatrix) -> Result<PerturbationResult, PerturbError> {
    check_same_dim(a, c)?;
    let spec = distinct_spectrum(a)?;
    let pcp = perturbed_minor_derivatives(a, c)?;
    let poly = char_poly(a);
    let n = a.dim();
    let corrections = spec
        .values
        .iter()
        .map(|&lam| {
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 1..=n {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * pcp.r1[i] * lam.powu((n - i) as u32);
            }
            -sum / poly.eval_derivative(lam)
        })
        .collect();
    Ok(PerturbationResult {
        base_eigenvalues: spec.values,
        corrections,
        method: Method::General,
    })
}

pub fn closed_form_n2(a: &RealMatrix, c: &RealMatrix) -> Result<PerturbationResult, PerturbError> {
    check_same_dim(a, c)?;
    if a.dim() != 2 {
        return Err(PerturbError::WrongDimension {
            expected: 2,
            got: a.dim(),
        });
    }
    let spec = distinct_spectrum(a)?;
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let (c11, c12, c21, c22) = (c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1));
    let corrections = spec
        .values
        .iter()
        .map(|&lam| {
            ((c11 + c22) * lam + a12 * c21 - a22 * c11 + a21 * c12 - a11 * c22)
                / (2.0 * lam - (a11 + a22))
        })
        .collect();
    Ok(PerturbationResult {
        base_eigenvalues: spec.values,
        corrections,
        method: Method::ClosedN2,
    })
}

/// `r_{2,1}` for `N = 3` written out element by element.
pub fn r21_n3(a: &RealMatrix, c: &RealMatrix) -> f64 {
    let av = |i: usize, j: usize| a.get(i - 1, j - 1);
    let cv = |i: usize, j: usize| c.get(i - 1, j - 1);
    av(2, 2) * cv(3, 3) + av(3, 3) * cv(2, 2) - av(2, 3) * cv(3, 2) - av(3, 2) * cv(2, 3)
        + av(1, 1) * cv(3, 3)
        + av(3, 3) * cv(1, 1)
        - av(1, 3) * cv(3, 1)
        - av(3, 1) * cv(1, 3)
        + av(1, 1) * cv(2, 2)
        + av(2, 2) * cv(1, 1)
        - av(1, 2) * cv(2, 1)
        - av(2, 1) * cv(1, 2)
}

pub fn closed_form_n3(a: &RealMatrix, c: &RealMatrix) -> Result<PerturbationResult, PerturbError> {
    check_same_dim(a, c)?;
    if a.dim() != 3 {
        return Err(PerturbError::WrongDimension {
            expected: 3,
            got: a.dim(),
        });
    }
    let spec = distinct_spectrum(a)?;
    let r21 = r21_n3(a, c);
    let mut cofactor_sum = 0.0;
    let mut diag_minors = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let m = minor(a, i, j)?;
            cofactor_sum += sign * c.get(i, j) * m;
            if i == j {
                diag_minors += m;
            }
        }
    }
    let (tr_a, tr_c) = (a.trace(), c.trace());
    let corrections = spec
        .values
        .iter()
        .map(|&lam| {
            (tr_c * lam * lam - r21 * lam + cofactor_sum)
                / (3.0 * lam * lam - 2.0 * tr_a * lam + diag_minors)
        })
        .collect();
    Ok(PerturbationResult {
        base_eigenvalues: spec.values,
        corrections,
        method: Method::ClosedN3,
    })
}

/// Divided difference `(λ_ℓ(δ) − λ_ℓ) / δ` with nearest-neighbour matching.
pub fn fd_oracle(a: &RealMatrix, c: &RealMatrix, step: f64) -> Result<PerturbationResult, PerturbError> {
    check_same_dim(a, c)?;
    if !(1e-8..=1e-3).contains(&step) {
        return Err(PerturbError::StepOutOfRange(step));
    }
    let base = distinct_spectrum(a)?;
    let perturbed = real_eigenvalues(&a.add_scaled(c, step)?)?;
    let half_gap = 0.5 * base.min_gap();
    let mut used = vec![false; perturbed.values.len()];
    let mut corrections = Vec::with_capacity(base.values.len());
    for (index, &lam) in base.values.iter().enumerate() {
        let (best, dist) = perturbed
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| (k, (v - lam).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty spectrum");
        // a unique match sits strictly inside half the base gap
        if dist >= half_gap || used[best] {
            return Err(PerturbError::AmbiguousMatch { index });
        }
        used[best] = true;
        corrections.push((perturbed.values[best] - lam) / step);
    }
    Ok(PerturbationResult {
        base_eigenvalues: base.values,
        corrections,
        method: Method::FdOracle,
    })
}

/// Null vector of a complex matrix known to have rank `n − 1`, via full
/// pivoting Gaussian elimination.
fn null_vector(mut m: Vec<Complex64>, n: usize) -> Option<Vec<Complex64>> {
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.norm())).max(f64::MIN_POSITIVE);
    for step in 0..n - 1 {
        let mut best = (step, step, 0.0);
        for r in step..n {
            for cidx in step..n {
                let v = m[r * n + cidx].norm();
                if v > best.2 {
                    best = (r, cidx, v);
                }
            }
        }
        if best.2 <= 1e-13 * scale {
            return None;
        }
        let (pr, pc) = (best.0, best.1);
        if pr != step {
            for j in 0..n {
                m.swap(pr * n + j, step * n + j);
            }
        }
        if pc != step {
            for r in 0..n {
                m.swap(r * n + pc, r * n + step);
            }
            col_perm.swap(pc, step);
        }
        let p = m[step * n + step];
        for r in step + 1..n {
            let f = m[r * n + step] / p;
            for j in step..n {
                let v = m[step * n + j];
                m[r * n + j] -= f * v;
            }
        }
    }
    // last permuted unknown is free
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = Complex64::new(1.0, 0.0);
    for r in (0..n - 1).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in r + 1..n {
            s += m[r * n + j] * x[j];
        }
        x[r] = -s / m[r * n + r];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, &orig) in col_perm.iter().enumerate() {
        out[orig] = x[k];
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// Classical formula `λ_{ℓ,1} = lᵀ C r / lᵀ r` from right and left eigenvectors.
pub fn eigvec_oracle(a: &RealMatrix, c: &RealMatrix) -> Result<PerturbationResult, PerturbError> {
    check_same_dim(a, c)?;
    let spec = distinct_spectrum(a)?;
    let n = a.dim();
    let ac = a.to_complex();
    let act = ac.transpose();
    let cc = c.to_complex();
    let mut corrections = Vec::with_capacity(n);
    for (index, &lam) in spec.values.iter().enumerate() {
        let right = null_vector(ac.shifted_negated(lam).as_slice().to_vec(), n)
            .ok_or(PerturbError::EigenvectorSolve { index })?;
        let left = null_vector(act.shifted_negated(lam).as_slice().to_vec(), n)
            .ok_or(PerturbError::EigenvectorSolve { index })?;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut cr = Complex64::new(0.0, 0.0);
            for j in 0..n {
                cr += cc.get(i, j) * right[j];
            }
            num += left[i] * cr;
            den += left[i] * right[i];
        }
        if den.norm() == 0.0 {
            return Err(PerturbError::EigenvectorSolve { index });
        }
        corrections.push(num / den);
    }
    Ok(PerturbationResult {
        base_eigenvalues: spec.values,
        corrections,
        method: Method::EigvecOracle,
    })
}

/// Finite-difference step keeping the first-order shift `δ·max|λ_ℓ,1|` at 5%
/// of the eigenvalue gap of `A`, capped at 1e-3: large enough to stay off the
/// rounding floor, small enough for the O(δ) error term to dominate.
pub fn suggested_fd_step(a: &RealMatrix, general: &PerturbationResult) -> Result<f64, PerturbError> {
    let gap = distinct_spectrum(a)?.min_gap();
    let big = general.corrections.iter().map(|z| z.norm()).fold(1.0, f64::max);
    Ok((0.05 * gap / big).clamp(1e-8, 1e-3))
}

/// Every method applicable to the dimension of `A`.
pub fn all_methods(a: &RealMatrix, c: &RealMatrix, step: f64) -> Result<Vec<PerturbationResult>, PerturbError> {
    let mut out = vec![corrections_general(a, c)?];
    match a.dim() {
        2 => out.push(closed_form_n2(a, c)?),
        3 => out.push(closed_form_n3(a, c)?),
        _ => {}
    }
    out.push(eigvec_oracle(a, c)?);
    out.push(fd_oracle(a, c, step)?);
    Ok(out)
}
