//! Small dense matrix algebra.
//!
//! Matrices here are tiny (2 to 8 rows), so everything is done with plain
//! row-major storage: determinants by Gaussian elimination, characteristic
//! polynomials from principal-minor sums, and eigenvalues as the roots of that
//! polynomial found by Aberth iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest supported dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("dimension {0} outside supported range {MIN_DIM}..={MAX_DIM}")]
    DimensionOutOfRange(usize),
    #[error("entry count {entries} does not match an {n}x{n} matrix")]
    EntryCount { n: usize, entries: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("root iteration did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },
}

fn check_dim(n: usize) -> Result<(), MatError> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(MatError::DimensionOutOfRange(n))
    }
}

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, MatError> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(MatError::EntryCount {
                n,
                entries: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self, MatError> {
        Self::new(N, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(n: usize) -> Result<Self, MatError> {
        Self::new(n, vec![0.0; n * n])
    }

    pub fn identity(n: usize) -> Result<Self, MatError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self, MatError> {
        let n = values.len();
        let mut m = Self::zeros(n)?;
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    fn same_dim(&self, other: &Self) -> Result<(), MatError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(MatError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self, MatError> {
        self.same_dim(other)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, MatError> {
        self.same_dim(other)?;
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn determinant(&self) -> f64 {
        det_real(&mut self.data.clone(), self.n)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, MatError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n)?.data;
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .expect("non-empty pivot range");
            if a[pivot * n + col].abs() <= 1e-14 * scale {
                return Err(MatError::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f != 0.0 {
                    for j in 0..n {
                        a[r * n + j] -= f * a[col * n + j];
                        inv[r * n + j] -= f * inv[col * n + j];
                    }
                }
            }
        }
        Ok(Self { n, data: inv })
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Lower Cholesky factor, `None` unless the matrix is symmetric positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        if !self.is_symmetric(1e-12 * (1.0 + self.max_abs())) {
            return None;
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = self.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if diag <= 0.0 || !diag.is_finite() {
                return None;
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Some(Self { n, data: l })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl TryFrom<Vec<Vec<f64>>> for RealMatrix {
    type Error = MatError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        let n = rows.len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(n, data)
    }
}

impl From<RealMatrix> for Vec<Vec<f64>> {
    fn from(m: RealMatrix) -> Self {
        m.rows()
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self, MatError> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(MatError::EntryCount {
                n,
                entries: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Result<Self, MatError> {
        Self::new(n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn determinant(&self) -> Complex64 {
        det_complex(&mut self.data.clone(), self.n)
    }

    /// `shift * I - self`
    pub fn shifted_negated(&self, shift: Complex64) -> Self {
        let n = self.n;
        let mut out = Self {
            n,
            data: self.data.iter().map(|v| -v).collect(),
        };
        for i in 0..n {
            out.data[i * n + i] += shift;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Coefficients `r_0..r_N` of `P(λ) = Σ (-1)^i r_i λ^(N-i)`, with `r_0 = 1` and
/// `r_i` the sum of the `i`-rowed principal minors.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<Complex64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Principal-minor sums `r_0..r_N`.
    pub fn minor_sums(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Real parts of the principal-minor sums; exact for real input matrices.
    pub fn real_minor_sums(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    /// Monomial coefficients `a_0..a_N` of `Σ a_m λ^m` (so `a_N = 1`).
    pub fn monomial(&self) -> Vec<Complex64> {
        let n = self.degree();
        (0..=n)
            .map(|m| {
                let i = n - m;
                if i % 2 == 0 {
                    self.coeffs[i]
                } else {
                    -self.coeffs[i]
                }
            })
            .collect()
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        horner(&self.monomial(), lambda)
    }

    pub fn eval_derivative(&self, lambda: Complex64) -> Complex64 {
        let a = self.monomial();
        let d: Vec<Complex64> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| c * m as f64)
            .collect();
        horner(&d, lambda)
    }
}

fn horner(monomial: &[Complex64], z: Complex64) -> Complex64 {
    monomial
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn det_real(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty pivot range");
        let p = a[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in col..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for j in col + 1..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
    }
    det
}

fn det_complex(a: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
            .expect("non-empty pivot range");
        let p = a[pivot * n + col];
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in col..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f.norm() != 0.0 {
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
    }
    det
}

/// Sum of all `size`-rowed principal minors of an `n`×`n` row-major matrix.
fn principal_minor_sum(data: &[Complex64], n: usize, size: usize) -> Complex64 {
    if size == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut sub = Vec::with_capacity(size * size);
    let mut idx = Vec::with_capacity(size);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != size {
            continue;
        }
        idx.clear();
        idx.extend((0..n).filter(|i| mask & (1 << i) != 0));
        sub.clear();
        for &r in &idx {
            for &c in &idx {
                sub.push(data[r * n + c]);
            }
        }
        total += det_complex(&mut sub, size);
    }
    total
}

pub fn char_poly_complex(m: &ComplexMatrix) -> CharPoly {
    let coeffs = (0..=m.n)
        .map(|i| principal_minor_sum(&m.data, m.n, i))
        .collect();
    CharPoly { coeffs }
}

pub fn char_poly(m: &RealMatrix) -> CharPoly {
    char_poly_complex(&m.to_complex())
}

/// Determinant of `m` with row `row` and column `col` removed (0-based).
pub fn minor(m: &RealMatrix, row: usize, col: usize) -> Result<f64, MatError> {
    let n = m.n;
    if row >= n || col >= n {
        return Err(MatError::IndexOutOfRange { row, col, n });
    }
    let mut sub = Vec::with_capacity((n - 1) * (n - 1));
    for r in (0..n).filter(|&r| r != row) {
        for c in (0..n).filter(|&c| c != col) {
            sub.push(m.get(r, c));
        }
    }
    Ok(det_real(&mut sub, n - 1))
}

/// Root-iteration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    /// Bound on the normalized residual `|P(λ)| / (1+|λ|)^N`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

/// Unordered eigenvalues with per-root backward-error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl Spectrum {
    pub fn abscissa(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn radius(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Smallest distance between two eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.values.iter().enumerate() {
            for b in &self.values[i + 1..] {
                gap = gap.min((a - b).norm());
            }
        }
        gap
    }
}

// Irrational phase offset for the initial circle of guesses.
const GUESS_PHASE: f64 = 0.618_033_988_749_894_9;

/// All roots of a monic polynomial given by monomial coefficients `a_0..a_N`
/// (`a_N = 1`), by Aberth iteration.
///
/// The polynomial is first rescaled `λ = s μ` so the coefficients of the
/// monic polynomial in `μ` are of unit size; the reported residuals are
/// `|P̃(μ)| / (1+|μ|)^N` for that rescaled polynomial.
pub fn polynomial_roots(monomial: &[Complex64], cfg: &EigenConfig) -> Result<Spectrum, MatError> {
    let n = monomial.len() - 1;
    if n == 0 {
        return Ok(Spectrum {
            values: vec![],
            residuals: vec![],
            iterations: 0,
        });
    }
    // Fujiwara-style scale: s = max_m |a_m|^(1/(N-m)).
    let scale = (0..n)
        .map(|m| monomial[m].norm().powf(1.0 / (n - m) as f64))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Spectrum {
            values: vec![Complex64::new(0.0, 0.0); n],
            residuals: vec![0.0; n],
            iterations: 0,
        });
    }
    let scaled: Vec<Complex64> = (0..=n)
        .map(|m| monomial[m] / scale.powi((n - m) as i32))
        .collect();
    let deriv: Vec<Complex64> = scaled
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| c * m as f64)
        .collect();

    let radius = 1.0 + scaled[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / n as f64 + GUESS_PHASE;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut max_step = 0.0_f64;
        for j in 0..n {
            let p = horner(&scaled, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let dp = horner(&deriv, z[j]);
            let ratio = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (k, zk) in z.iter().enumerate() {
                if k != j {
                    repulsion += (z[j] - zk).inv();
                }
            }
            let step = if dp.norm() == 0.0 || !ratio.is_finite() {
                // stationary point: nudge off it
                Complex64::new(1e-8 * (1.0 + z[j].norm()), 0.0)
            } else {
                ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion)
            };
            if step.is_finite() {
                z[j] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[j].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let residuals: Vec<f64> = z
        .iter()
        .map(|&mu| horner(&scaled, mu).norm() / (1.0 + mu.norm()).powi(n as i32))
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let values: Vec<Complex64> = z.iter().map(|mu| mu * scale).collect();
    if !(worst <= cfg.tolerance) || values.iter().any(|v| !v.is_finite()) {
        return Err(MatError::NoConvergence {
            iterations,
            worst_residual: worst,
            residuals,
        });
    }
    Ok(Spectrum {
        values,
        residuals,
        iterations,
    })
}

pub fn eigenvalues_with(m: &ComplexMatrix, cfg: &EigenConfig) -> Result<Spectrum, MatError> {
    polynomial_roots(&char_poly_complex(m).monomial(), cfg)
}

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum, MatError> {
    eigenvalues_with(m, &EigenConfig::default())
}

pub fn real_eigenvalues(m: &RealMatrix) -> Result<Spectrum, MatError> {
    eigenvalues(&m.to_complex())
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa(m: &ComplexMatrix) -> Result<f64, MatError> {
    Ok(eigenvalues(m)?.abscissa())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn swe_advection(gh0: f64) -> RealMatrix {
        RealMatrix::from_rows([[0.0, 1.0, 0.0], [gh0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap()
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Brute-force principal-minor sums via Leibniz determinants.
    fn leibniz_det(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 0 {
            return 1.0;
        }
        let mut total = 0.0;
        for col in 0..n {
            let sub: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != col)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * m[0][col] * leibniz_det(&sub);
        }
        total
    }

    fn brute_minor_sums(m: &RealMatrix) -> Vec<f64> {
        let n = m.dim();
        let mut sums = vec![0.0; n + 1];
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<f64>> = idx
                .iter()
                .map(|&r| idx.iter().map(|&c| m.get(r, c)).collect())
                .collect();
            sums[idx.len()] += leibniz_det(&sub);
        }
        sums
    }

    #[test]
    fn char_poly_of_swe_advection() {
        let p = char_poly(&swe_advection(10.0));
        assert_eq!(p.real_minor_sums(), vec![1.0, 0.0, -10.0, 0.0]);
        // λ³ − 10λ
        let mono: Vec<f64> = p.monomial().iter().map(|c| c.re).collect();
        assert_eq!(mono, vec![0.0, -10.0, 0.0, 1.0]);
    }

    #[test]
    fn char_poly_of_identity() {
        let p = char_poly(&RealMatrix::identity(2).unwrap());
        let mono: Vec<f64> = p.monomial().iter().map(|c| c.re).collect();
        assert_eq!(mono, vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn char_poly_matches_enumerated_minors() {
        let m = RealMatrix::from_rows([[2.0, -1.0, 3.0], [4.0, 0.0, -2.0], [1.0, 5.0, -3.0]]).unwrap();
        let brute = brute_minor_sums(&m);
        let fast = char_poly(&m).real_minor_sums();
        for (b, f) in brute.iter().zip(&fast) {
            assert!((b - f).abs() < 1e-12, "{b} vs {f}");
        }
        assert_eq!(brute, vec![1.0, -1.0, 5.0, 70.0]);
    }

    #[test]
    fn dimension_guard() {
        assert_eq!(RealMatrix::zeros(1), Err(MatError::DimensionOutOfRange(1)));
        assert_eq!(RealMatrix::zeros(9), Err(MatError::DimensionOutOfRange(9)));
        assert!(matches!(
            RealMatrix::new(2, vec![1.0; 3]),
            Err(MatError::EntryCount { .. })
        ));
    }

    #[test]
    fn minors() {
        let a = swe_advection(10.0);
        assert_eq!(minor(&a, 2, 2).unwrap(), -10.0);
        assert_eq!(minor(&RealMatrix::identity(3).unwrap(), 0, 0).unwrap(), 1.0);
        assert!(matches!(minor(&a, 3, 0), Err(MatError::IndexOutOfRange { .. })));
    }

    #[test]
    fn minors_match_adjugate() {
        let m = RealMatrix::from_rows([
            [1.0, 2.0, 0.0, -1.0],
            [3.0, -1.0, 2.0, 4.0],
            [0.5, 1.0, 1.0, 0.0],
            [-2.0, 0.0, 3.0, 1.0],
        ])
        .unwrap();
        // adj(M) = det(M) M⁻¹, and adj(M)_{ji} = (−1)^{i+j} M_{ij}
        let det = leibniz_det(&m.rows());
        let inv = m.inverse().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let adj_ji = det * inv.get(j, i);
                let mij = minor(&m, i, j).unwrap();
                assert!((sign * mij - adj_ji).abs() < 1e-10, "({i},{j})");
            }
        }
    }

    #[test]
    fn eigenvalues_of_swe_advection() {
        let spec = real_eigenvalues(&swe_advection(10.0)).unwrap();
        let v = sorted_re(spec.values.clone());
        let r = 10f64.sqrt();
        let want = [-r, 0.0, r];
        for (got, w) in v.iter().zip(want) {
            assert!((got - c(w)).norm() < 1e-12, "{got} vs {w}");
        }
        assert!(spec.residuals.iter().all(|r| *r <= 1e-10));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let spec = real_eigenvalues(&RealMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        let v = sorted_re(spec.values);
        for (got, w) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn repeated_roots_still_meet_residual_bound() {
        let spec = real_eigenvalues(&RealMatrix::identity(4).unwrap()).unwrap();
        for v in &spec.values {
            assert!((v - c(1.0)).norm() < 1e-3);
        }
    }

    #[test]
    fn abscissa_simple_cases() {
        let d = RealMatrix::diagonal(&[-1.0, -2.0]).unwrap().to_complex();
        assert!((spectral_abscissa(&d).unwrap() + 1.0).abs() < 1e-14);
        let z = ComplexMatrix::zeros(3).unwrap();
        assert_eq!(spectral_abscissa(&z).unwrap(), 0.0);
    }

    #[test]
    fn eigen_config_controls_failure() {
        let cfg = EigenConfig {
            tolerance: 1e-10,
            max_iterations: 1,
        };
        let m = RealMatrix::from_rows([[2.0, -1.0, 3.0], [4.0, 0.0, -2.0], [1.0, 5.0, -3.0]]).unwrap();
        let err = eigenvalues_with(&m.to_complex(), &cfg).unwrap_err();
        assert!(matches!(err, MatError::NoConvergence { iterations: 1, .. }));
    }

    #[test]
    fn serde_rows() {
        let m = swe_advection(10.0);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[0.0,1.0,0.0],[10.0,0.0,0.0],[0.0,0.0,0.0]]");
        let back: RealMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<RealMatrix>("[[1.0,2.0],[3.0]]").is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = RealMatrix> {
        (2usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(-3.0f64..3.0, n * n)
                .prop_map(move |d| RealMatrix::new(n, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn trace_and_determinant_from_spectrum(m in matrix_strategy()) {
            let spec = real_eigenvalues(&m).unwrap();
            let sum: Complex64 = spec.values.iter().sum();
            let prod: Complex64 = spec.values.iter().product();
            let tr = m.trace();
            let det = m.determinant();
            let scale = 1.0 + m.max_abs();
            prop_assert!((sum - c(tr)).norm() <= 1e-8 * scale * m.dim() as f64);
            prop_assert!((prod - c(det)).norm() <= 1e-8 * scale.powi(m.dim() as i32));
            prop_assert!(spec.residuals.iter().all(|r| *r <= 1e-10));
        }

        #[test]
        fn transpose_keeps_char_poly(m in matrix_strategy()) {
            let a = char_poly(&m).real_minor_sums();
            let b = char_poly(&m.transpose()).real_minor_sums();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn triangular_char_poly_is_elementary_symmetric(diag in proptest::collection::vec(-4.0f64..4.0, 2..=6), fill in -2.0f64..2.0) {
            let n = diag.len();
            let mut m = RealMatrix::diagonal(&diag).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    m.set(i, j, fill * (i + 2 * j) as f64);
                }
            }
            // e_k(diag) via the product expansion of Π(1 + d_i x)
            let mut e = vec![1.0];
            for d in &diag {
                let mut next = e.clone();
                next.push(0.0);
                for k in 1..next.len() {
                    next[k] += d * e[k - 1];
                }
                e = next;
            }
            let got = char_poly(&m).real_minor_sums();
            for (x, y) in got.iter().zip(&e) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
            }
        }
    }
}
