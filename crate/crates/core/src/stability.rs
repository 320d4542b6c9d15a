//! Plane-wave stability operators and the scans built on them.
//!
//! For `u_t + A u_x + B u_y = C u_xx + D u_yy` and a wave travelling in the
//! direction `(γ, √(1−γ²))` with wavenumber `k`, the growth rates are the
//! real parts of the eigenvalues of
//!
//! ```text
//! Ω(k) = −ik [γA + √(1−γ²) B] − k² [γ² C + (1−γ²) D]
//! ```

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matkit::{
    char_poly_complex, eigenvalues, real_eigenvalues, ComplexMatrix, MatError, RealMatrix, Spectrum,
};
use crate::perturb::{corrections_general, PerturbError};
use crate::swe::{advection_matrices, viscosity_matrices, SweParams};

/// Growth rates in `(−MARGINAL_BAND, MARGINAL_BAND]` are marginal, neither
/// strictly stable nor unstable.
pub const MARGINAL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error("direction parameter {0} outside [0, 1]")]
    InvalidGamma(f64),
    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),
    #[error("eigensolve failed at k = {k}, gamma = {gamma}: {source}")]
    EigenFailure {
        k: f64,
        gamma: f64,
        #[source]
        source: MatError,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sampler budget of {0} attempts exhausted")]
    SamplerBudget(usize),
}

/// Advection pair, viscosity pair and a direction parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliqueSpec {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
    pub gamma: f64,
}

impl ObliqueSpec {
    pub fn new(
        a: RealMatrix,
        b: RealMatrix,
        c: RealMatrix,
        d: RealMatrix,
        gamma: f64,
    ) -> Result<Self, StabilityError> {
        let n = a.dim();
        for m in [&b, &c, &d] {
            if m.dim() != n {
                return Err(MatError::DimensionMismatch {
                    left: n,
                    right: m.dim(),
                }
                .into());
            }
        }
        check_gamma(gamma)?;
        Ok(Self { a, b, c, d, gamma })
    }

    /// Linearized viscous shallow-water system about the lake at rest.
    pub fn shallow_water(params: &SweParams, gamma: f64) -> Result<Self, StabilityError> {
        let (a, b) = advection_matrices(params);
        let (c, d) = viscosity_matrices(params);
        Self::new(a, b, c, d, gamma)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self, StabilityError> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    /// `B ↦ −B`, i.e. the mirror image under `y ↦ −y`; scanning both covers
    /// the full circle of directions.
    pub fn reflected(&self) -> Self {
        Self {
            b: self.b.scale(-1.0),
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

fn check_gamma(gamma: f64) -> Result<(), StabilityError> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(StabilityError::InvalidGamma(gamma))
    }
}

/// `Ω(k) = −ikA − k²C`.
pub fn omega_1d(a: &RealMatrix, c: &RealMatrix, k: f64) -> Result<ComplexMatrix, StabilityError> {
    if a.dim() != c.dim() {
        return Err(MatError::DimensionMismatch {
            left: a.dim(),
            right: c.dim(),
        }
        .into());
    }
    let k2 = k * k;
    let data = a
        .as_slice()
        .iter()
        .zip(c.as_slice())
        .map(|(&av, &cv)| Complex64::new(-k2 * cv, -k * av))
        .collect();
    Ok(ComplexMatrix::new(a.dim(), data)?)
}

pub fn omega_oblique(spec: &ObliqueSpec, k: f64) -> Result<ComplexMatrix, StabilityError> {
    let g = spec.gamma;
    let s = (1.0 - g * g).sqrt();
    let (g2, s2) = (g * g, s * s);
    let k2 = k * k;
    let data = spec
        .a
        .as_slice()
        .iter()
        .zip(spec.b.as_slice())
        .zip(spec.c.as_slice().iter().zip(spec.d.as_slice()))
        .map(|((&av, &bv), (&cv, &dv))| {
            Complex64::new(-k2 * (g2 * cv + s2 * dv), -k * (g * av + s * bv))
        })
        .collect();
    Ok(ComplexMatrix::new(spec.dim(), data)?)
}

fn spectrum_at(spec: &ObliqueSpec, k: f64) -> Result<Spectrum, StabilityError> {
    eigenvalues(&omega_oblique(spec, k)?).map_err(|source| StabilityError::EigenFailure {
        k,
        gamma: spec.gamma,
        source,
    })
}

/// `count` uniform points on `(0, k_max]`.
pub fn positive_k_grid(k_max: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| k_max * i as f64 / count as f64).collect()
}

/// `count` uniform points on `[0, 1]`.
pub fn gamma_grid(count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

pub const DEFAULT_K_MAX: f64 = 10.0;
pub const DEFAULT_K_POINTS: usize = 1000;
pub const DEFAULT_GAMMA_POINTS: usize = 101;

fn check_k_grid(k_grid: &[f64]) -> Result<(), StabilityError> {
    if k_grid.is_empty() {
        return Err(StabilityError::InvalidGrid("empty wavenumber grid".into()));
    }
    if k_grid.iter().any(|k| !k.is_finite() || *k < 0.0) {
        return Err(StabilityError::InvalidGrid(
            "wavenumbers must be finite and nonnegative".into(),
        ));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(StabilityError::InvalidGrid("wavenumbers must increase".into()));
    }
    Ok(())
}

/// Growth rate over a wavenumber grid for one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    pub gamma: f64,
    pub k_grid: Vec<f64>,
    pub sigma: Vec<f64>,
    pub argmax_k: f64,
    pub max_sigma: f64,
}

impl GrowthCurve {
    /// First and last grid wavenumbers with `σ > MARGINAL_BAND`, and whether
    /// every grid point between them is also unstable.
    pub fn positive_interval(&self) -> Option<(f64, f64, bool)> {
        let unstable: Vec<usize> = (0..self.sigma.len())
            .filter(|&i| self.sigma[i] > MARGINAL_BAND)
            .collect();
        let (&first, &last) = (unstable.first()?, unstable.last()?);
        let contiguous = unstable.len() == last - first + 1;
        Some((self.k_grid[first], self.k_grid[last], contiguous))
    }

    pub fn is_stable(&self) -> bool {
        self.sigma.iter().all(|s| *s <= MARGINAL_BAND)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sigma\n");
        for (k, s) in self.k_grid.iter().zip(&self.sigma) {
            out.push_str(&format!("{k},{s}\n"));
        }
        out
    }
}

pub fn growth_curve(spec: &ObliqueSpec, k_grid: &[f64]) -> Result<GrowthCurve, StabilityError> {
    check_k_grid(k_grid)?;
    let sigma: Vec<f64> = k_grid
        .par_iter()
        .map(|&k| Ok(spectrum_at(spec, k)?.abscissa()))
        .collect::<Result<_, StabilityError>>()?;
    let (imax, max_sigma) = sigma
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    Ok(GrowthCurve {
        gamma: spec.gamma,
        k_grid: k_grid.to_vec(),
        sigma,
        argmax_k: k_grid[imax],
        max_sigma,
    })
}

/// Bisection for the wavenumber in `[lo, hi]` where `σ` crosses
/// `MARGINAL_BAND`, given `σ(lo)` above and `σ(hi)` at or below it.
pub fn refine_crossing(spec: &ObliqueSpec, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64, StabilityError> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if spectrum_at(spec, mid)?.abscissa() > MARGINAL_BAND {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Monomial coefficients (constant term first) of the cubic in `ω` obtained by
/// expanding the plane-wave determinant of the viscous shallow-water system
/// term by term, as it is usually written out by hand.
pub fn swe_cubic_coefficients(k: f64, gamma: f64, params: &SweParams) -> [Complex64; 4] {
    let (e, gh, dl) = (params.eps, params.gh0(), params.delta);
    let s3 = (1.0 - gamma * gamma).powf(1.5);
    let i = Complex64::i();
    let (k2, k3, k4, k6) = (k * k, k.powi(3), k.powi(4), k.powi(6));
    [
        e.powi(3) * k6 - dl * k3 * s3 * gh * k * gamma + e * k2 * gh * k2 - i * e * k2 * dl * k3 * s3,
        -i * dl * k3 * s3 + 3.0 * e * e * k4 + gh * k2,
        Complex64::new(3.0 * e * k2, 0.0),
        Complex64::new(1.0, 0.0),
    ]
}

/// Evaluates the hand-expanded characteristic cubic
///
/// ```text
/// ε³k⁶ − Δk³s³(gh₀kγ + iω) + εk²(gh₀k² − iΔk³s³ + 3ω²) + 3ε²k⁴ω + (gh₀k² + ω²)ω
/// ```
///
/// with `s = √(1−γ²)`.
pub fn swe_characteristic_residual(omega: Complex64, k: f64, gamma: f64, params: &SweParams) -> Complex64 {
    let (e, gh, dl) = (params.eps, params.gh0(), params.delta);
    let s3 = (1.0 - gamma * gamma).powf(1.5);
    let i = Complex64::i();
    e.powi(3) * k.powi(6) - dl * k.powi(3) * s3 * (gh * k * gamma + i * omega)
        + e * k * k * (gh * k * k - i * dl * k.powi(3) * s3 + 3.0 * omega * omega)
        + 3.0 * e * e * k.powi(4) * omega
        + (gh * k * k + omega * omega) * omega
}

/// `|det(ωI − Ω)| / (1 + |ω|)^N`.
pub fn determinant_residual(omega: Complex64, operator: &ComplexMatrix) -> f64 {
    operator.shifted_negated(omega).determinant().norm() / (1.0 + omega.norm()).powi(operator.dim() as i32)
}

/// Monomial coefficients of `det(ωI − Ω)` in `ω` from the principal-minor sums of `Ω`.
pub fn determinant_coefficients(operator: &ComplexMatrix) -> Vec<Complex64> {
    char_poly_complex(operator).monomial()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSample {
    pub k: f64,
    pub gamma: f64,
    pub determinant_coeffs: Vec<Complex64>,
    pub expanded_coeffs: Vec<Complex64>,
    /// `max_m |a_m − b_m| / max(1, |a_m|)`.
    pub max_coeff_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicAudit {
    pub params: SweParams,
    pub samples: Vec<AuditSample>,
    pub max_coeff_discrepancy: f64,
    /// Largest normalized `det(ωI − Ω)` residual over all computed roots.
    pub max_root_residual: f64,
    pub roots_checked: usize,
    pub expanded_form_agrees: bool,
}

/// Compares `det(ωI − Ω)` with the hand-expanded cubic coefficient by
/// coefficient at every `(k, γ)` of the given grids and checks every computed
/// root against the determinant.
pub fn characteristic_audit(
    params: &SweParams,
    k_grid: &[f64],
    gammas: &[f64],
) -> Result<CharacteristicAudit, StabilityError> {
    check_k_grid(k_grid)?;
    let base = ObliqueSpec::shallow_water(params, 0.5)?;
    let mut samples = Vec::new();
    let mut max_root_residual = 0.0_f64;
    let mut roots_checked = 0;
    for &gamma in gammas {
        let spec = base.with_gamma(gamma)?;
        let rows: Vec<(AuditSample, f64, usize)> = k_grid
            .par_iter()
            .map(|&k| {
                let op = omega_oblique(&spec, k)?;
                let det = determinant_coefficients(&op);
                let expanded = swe_cubic_coefficients(k, gamma, params).to_vec();
                let disc = det
                    .iter()
                    .zip(&expanded)
                    .map(|(a, b)| (a - b).norm() / 1f64.max(a.norm()))
                    .fold(0.0, f64::max);
                let spectrum = spectrum_at(&spec, k)?;
                let worst = spectrum
                    .values
                    .iter()
                    .map(|&w| determinant_residual(w, &op))
                    .fold(0.0, f64::max);
                Ok((
                    AuditSample {
                        k,
                        gamma,
                        determinant_coeffs: det,
                        expanded_coeffs: expanded,
                        max_coeff_discrepancy: disc,
                    },
                    worst,
                    spectrum.values.len(),
                ))
            })
            .collect::<Result<_, StabilityError>>()?;
        for (sample, worst, count) in rows {
            max_root_residual = max_root_residual.max(worst);
            roots_checked += count;
            samples.push(sample);
        }
    }
    let max_coeff_discrepancy = samples
        .iter()
        .map(|s| s.max_coeff_discrepancy)
        .fold(0.0, f64::max);
    Ok(CharacteristicAudit {
        params: *params,
        samples,
        max_coeff_discrepancy,
        max_root_residual,
        roots_checked,
        expanded_form_agrees: max_coeff_discrepancy <= 1e-10,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "consistent")]
    Consistent,
    /// The hypothesis fails, so the scan says nothing about the conjecture.
    #[serde(rename = "vacuous")]
    Vacuous,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
}

impl Verdict {
    pub fn classify(hypothesis_holds: bool, conclusion_holds: bool) -> Self {
        match (hypothesis_holds, conclusion_holds) {
            (false, _) => Self::Vacuous,
            (true, true) => Self::Consistent,
            (true, false) => Self::Counterexample,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Consistent => "consistent",
            Self::Vacuous => "vacuous",
            Self::Counterexample => "COUNTEREXAMPLE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: f64,
    pub gamma: f64,
    pub sigma: f64,
}

/// Scan summary of one 1-D operator `−ikX − k²Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorScan {
    pub name: String,
    pub max_sigma: f64,
    pub argmax_k: f64,
    pub unstable_points: usize,
    pub marginal_points: usize,
    /// Every eigenvalue real and strictly negative at every grid point.
    pub literally_negative: bool,
}

impl OperatorScan {
    pub fn stable(&self) -> bool {
        self.unstable_points == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionScan {
    pub gamma: f64,
    pub max_sigma: f64,
    pub argmax_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub label: String,
    /// All four 1-D operators free of unstable grid points (real parts).
    pub hypothesis_holds: bool,
    /// The full `(k, γ)` product scan free of unstable grid points.
    pub conclusion_holds: bool,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Hypothesis read literally: all eigenvalues real and negative.
    pub literal_hypothesis_holds: bool,
    pub literal_verdict: Verdict,
    pub operators: Vec<OperatorScan>,
    pub directions: Vec<DirectionScan>,
    pub k_points: usize,
    pub k_max: f64,
}

impl ConjectureReport {
    pub fn direction(&self, gamma: f64) -> Option<&DirectionScan> {
        self.directions.iter().find(|d| (d.gamma - gamma).abs() < 1e-12)
    }
}

fn scan_operator(name: &str, x: &RealMatrix, y: &RealMatrix, k_grid: &[f64]) -> Result<OperatorScan, StabilityError> {
    let spectra: Vec<Spectrum> = k_grid
        .par_iter()
        .map(|&k| {
            eigenvalues(&omega_1d(x, y, k)?).map_err(|source| StabilityError::EigenFailure {
                k,
                gamma: f64::NAN,
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut scan = OperatorScan {
        name: name.to_string(),
        max_sigma: f64::NEG_INFINITY,
        argmax_k: k_grid[0],
        unstable_points: 0,
        marginal_points: 0,
        literally_negative: true,
    };
    for (&k, spectrum) in k_grid.iter().zip(&spectra) {
        if k == 0.0 {
            continue;
        }
        let s = spectrum.abscissa();
        if s > scan.max_sigma {
            scan.max_sigma = s;
            scan.argmax_k = k;
        }
        if s > MARGINAL_BAND {
            scan.unstable_points += 1;
        } else if s > -MARGINAL_BAND {
            scan.marginal_points += 1;
        }
        let imag_tol = 1e-9 * (1.0 + spectrum.radius());
        if spectrum
            .values
            .iter()
            .any(|v| v.im.abs() > imag_tol || v.re >= -MARGINAL_BAND)
        {
            scan.literally_negative = false;
        }
    }
    Ok(scan)
}

/// Checks the four-operator criterion `−ik{A,B} − k²{C,D}` against the full
/// oblique scan.
pub fn conjecture51_check(
    label: &str,
    spec: &ObliqueSpec,
    k_grid: &[f64],
    gammas: &[f64],
) -> Result<ConjectureReport, StabilityError> {
    check_k_grid(k_grid)?;
    if gammas.is_empty() {
        return Err(StabilityError::InvalidGrid("empty direction grid".into()));
    }
    let pairs = [
        ("omega1 (A, C)", &spec.a, &spec.c),
        ("omega2 (A, D)", &spec.a, &spec.d),
        ("omega3 (B, C)", &spec.b, &spec.c),
        ("omega4 (B, D)", &spec.b, &spec.d),
    ];
    let operators = pairs
        .iter()
        .map(|(name, x, y)| scan_operator(name, x, y, k_grid))
        .collect::<Result<Vec<_>, _>>()?;
    let hypothesis_holds = operators.iter().all(OperatorScan::stable);
    let literal_hypothesis_holds = operators.iter().all(|o| o.literally_negative);

    let positive_k: Vec<f64> = k_grid.iter().copied().filter(|k| *k > 0.0).collect();
    let mut directions = Vec::with_capacity(gammas.len());
    let mut witness: Option<Witness> = None;
    for &gamma in gammas {
        let curve = growth_curve(&spec.with_gamma(gamma)?, &positive_k)?;
        if witness.is_none_or(|w| curve.max_sigma > w.sigma) {
            witness = Some(Witness {
                k: curve.argmax_k,
                gamma,
                sigma: curve.max_sigma,
            });
        }
        directions.push(DirectionScan {
            gamma,
            max_sigma: curve.max_sigma,
            argmax_k: curve.argmax_k,
        });
    }
    let conclusion_holds = directions.iter().all(|d| d.max_sigma <= MARGINAL_BAND);
    Ok(ConjectureReport {
        label: label.to_string(),
        hypothesis_holds,
        conclusion_holds,
        verdict: Verdict::classify(hypothesis_holds, conclusion_holds),
        witness: witness.filter(|w| w.sigma > MARGINAL_BAND),
        literal_hypothesis_holds,
        literal_verdict: Verdict::classify(literal_hypothesis_holds, conclusion_holds),
        operators,
        directions,
        k_points: k_grid.len(),
        k_max: *k_grid.last().expect("non-empty"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conjecture53Report {
    pub base_eigenvalues: Vec<f64>,
    pub corrections: Vec<Complex64>,
    pub all_negative: bool,
    pub all_positive: bool,
    pub stable: bool,
    pub max_sigma: f64,
    pub argmax_k: f64,
    /// "all corrections negative ⇔ stable" holds for this pair.
    pub negative_orientation_agrees: bool,
    /// "all corrections positive ⇔ stable" holds for this pair.
    pub positive_orientation_agrees: bool,
}

/// Checks the correction-sign criterion for `Ω(k) = −ikA − k²C` under both
/// sign orientations.
pub fn conjecture53_check(a: &RealMatrix, c: &RealMatrix, k_grid: &[f64]) -> Result<Conjecture53Report, StabilityError> {
    check_k_grid(k_grid)?;
    let spec_a = real_eigenvalues(a)?;
    let tol_a = 1e-9 * (1.0 + spec_a.radius());
    if spec_a.values.iter().any(|v| v.im.abs() > tol_a) {
        return Err(StabilityError::Precondition("A has non-real eigenvalues".into()));
    }
    // defective viscosity matrices have ill-conditioned (but real) eigenvalues
    let spec_c = real_eigenvalues(c)?;
    let tol_c = 1e-4 * (1.0 + spec_c.radius());
    if spec_c.values.iter().any(|v| v.im.abs() > tol_c || v.re <= 0.0) {
        return Err(StabilityError::Precondition(
            "C must have real positive eigenvalues".into(),
        ));
    }
    let pert = corrections_general(a, c)?;
    let all_negative = pert.corrections.iter().all(|v| v.re < 0.0);
    let all_positive = pert.corrections.iter().all(|v| v.re > 0.0);
    let positive_k: Vec<f64> = k_grid.iter().copied().filter(|k| *k > 0.0).collect();
    let sigma: Vec<f64> = positive_k
        .par_iter()
        .map(|&k| {
            eigenvalues(&omega_1d(a, c, k)?)
                .map(|s| s.abscissa())
                .map_err(|source| StabilityError::EigenFailure {
                    k,
                    gamma: 1.0,
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    let (imax, max_sigma) = sigma
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    let stable = max_sigma <= MARGINAL_BAND;
    Ok(Conjecture53Report {
        base_eigenvalues: pert.base_eigenvalues.iter().map(|v| v.re).collect(),
        corrections: pert.corrections,
        all_negative,
        all_positive,
        stable,
        max_sigma,
        argmax_k: positive_k[imax],
        negative_orientation_agrees: all_negative == stable,
        positive_orientation_agrees: all_positive == stable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViscosityClass {
    /// Symmetric positive definite.
    SpdViscosity,
    /// Real positive spectrum, possibly non-symmetric.
    PositiveSpectrumViscosity,
}

/// Minimum eigenvalue gap of sampled advection matrices.
pub const SAMPLE_GAP: f64 = 0.1;
const SAMPLE_BUDGET: usize = 1000;
const SAMPLE_COND_LIMIT: f64 = 30.0;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    RealMatrix::new(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("n in range")
}

fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> Option<(RealMatrix, RealMatrix)> {
    let s = random_matrix(rng, n);
    let inv = s.inverse().ok()?;
    let frob = |m: &RealMatrix| m.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    (frob(&s) * frob(&inv) <= SAMPLE_COND_LIMIT * n as f64).then_some((s, inv))
}

fn similar_to_diagonal(rng: &mut ChaCha8Rng, diag: &[f64]) -> Option<RealMatrix> {
    let (s, inv) = well_conditioned(rng, diag.len())?;
    let d = RealMatrix::diagonal(diag).ok()?;
    s.matmul(&d).ok()?.matmul(&inv).ok()
}

fn advection_sample(rng: &mut ChaCha8Rng, n: usize) -> Option<RealMatrix> {
    let mut eig: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    eig.sort_by(f64::total_cmp);
    if eig.windows(2).any(|w| w[1] - w[0] <= SAMPLE_GAP) {
        return None;
    }
    let a = similar_to_diagonal(rng, &eig)?;
    let spec = real_eigenvalues(&a).ok()?;
    let real = spec.values.iter().all(|v| v.im.abs() < 1e-8);
    (real && spec.min_gap() > SAMPLE_GAP).then_some(a)
}

fn viscosity_sample(rng: &mut ChaCha8Rng, n: usize, class: ViscosityClass) -> Option<RealMatrix> {
    match class {
        ViscosityClass::SpdViscosity => {
            let g = random_matrix(rng, n);
            let c = g
                .matmul(&g.transpose())
                .ok()?
                .add_scaled(&RealMatrix::identity(n).ok()?, 0.2)
                .ok()?;
            c.cholesky().map(|_| c)
        }
        ViscosityClass::PositiveSpectrumViscosity => {
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
            let c = similar_to_diagonal(rng, &diag)?;
            let spec = real_eigenvalues(&c).ok()?;
            spec.values
                .iter()
                .all(|v| v.im.abs() < 1e-8 && v.re > 0.0)
                .then_some(c)
        }
    }
}

fn with_budget<T>(mut draw: impl FnMut() -> Option<T>) -> Result<T, StabilityError> {
    (0..SAMPLE_BUDGET)
        .find_map(|_| draw())
        .ok_or(StabilityError::SamplerBudget(SAMPLE_BUDGET))
}

fn check_sample_dim(n: usize) -> Result<(), StabilityError> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(StabilityError::Precondition(format!("sample dimension {n} not in 2..=4")))
    }
}

/// Seeded admissible pair: `A` with distinct real eigenvalues (gap above
/// [`SAMPLE_GAP`]) and a viscosity matrix of the requested class.
pub fn sample_admissible(seed: u64, n: usize, class: ViscosityClass) -> Result<(RealMatrix, RealMatrix), StabilityError> {
    check_sample_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = with_budget(|| advection_sample(&mut rng, n))?;
    let c = with_budget(|| viscosity_sample(&mut rng, n, class))?;
    Ok((a, c))
}

/// Seeded admissible quadruple `(A, B, C, D)` at the given direction.
pub fn sample_admissible_quadruple(
    seed: u64,
    n: usize,
    class: ViscosityClass,
    gamma: f64,
) -> Result<ObliqueSpec, StabilityError> {
    check_sample_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = with_budget(|| advection_sample(&mut rng, n))?;
    let b = with_budget(|| advection_sample(&mut rng, n))?;
    let c = with_budget(|| viscosity_sample(&mut rng, n, class))?;
    let d = with_budget(|| viscosity_sample(&mut rng, n, class))?;
    ObliqueSpec::new(a, b, c, d, gamma)
}
