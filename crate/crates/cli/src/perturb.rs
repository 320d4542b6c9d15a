use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use oblique_core::matkit::RealMatrix;
use oblique_core::perturb::{all_methods, corrections_general, suggested_fd_step, Method, PerturbationResult};
use oblique_core::solver::Manifest;
use oblique_core::swe::{advection_matrices, viscosity_matrices, SweParams};

use crate::config::{load, parse_matrix, set};
use crate::error::CliError;
use crate::output::{to_value, OutDir};
use crate::Common;

/// Advection/viscosity pair of the linearized shallow-water system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
#[value(rename_all = "lower")]
pub enum SwePair {
    AC,
    AD,
    BC,
    BD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    pub a: Option<RealMatrix>,
    pub c: Option<RealMatrix>,
    /// Used when `a` and `c` are absent.
    pub swe_pair: SwePair,
    pub params: SweParams,
    /// Finite-difference step; chosen from the eigenvalue gap when absent.
    pub fd_step: Option<f64>,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            a: None,
            c: None,
            swe_pair: SwePair::AD,
            params: SweParams::default(),
            fd_step: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Advection matrix, e.g. "0,1;10,0".
    #[arg(long)]
    a: Option<String>,
    /// Viscosity matrix in the same format.
    #[arg(long)]
    c: Option<String>,
    /// Shallow-water pair used when no matrices are given.
    #[arg(long, value_enum)]
    swe_pair: Option<SwePair>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    fd_step: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct Summary {
    n: usize,
    base_eigenvalues: Vec<Complex64>,
    methods: Vec<Method>,
    /// Among the exact methods (general, closed form, eigenvector oracle).
    max_discrepancy: f64,
    /// Finite-difference oracle against the general formula; O(δ).
    fd_discrepancy: f64,
    fd_step: f64,
}

fn merge(common: &Common, flags: &Flags) -> Result<PerturbConfig, CliError> {
    let mut c: PerturbConfig = load(common.config.as_deref(), "perturb")?;
    if let Some(a) = &flags.a {
        c.a = Some(parse_matrix(a)?);
    }
    if let Some(m) = &flags.c {
        c.c = Some(parse_matrix(m)?);
    }
    set(&mut c.swe_pair, &flags.swe_pair);
    if let Some(eps) = flags.eps {
        c.params.eps = eps;
    }
    if let Some(delta) = flags.delta {
        c.params.delta = delta;
    }
    if flags.fd_step.is_some() {
        c.fd_step = flags.fd_step;
    }
    match (&c.a, &c.c) {
        (Some(a), Some(m)) if a.dim() != m.dim() => {
            Err(CliError::Config(format!("A is {0}x{0} but C is {1}x{1}", a.dim(), m.dim())))
        }
        (Some(_), None) | (None, Some(_)) => Err(CliError::Config("give both A and C, or neither".into())),
        _ => {
            c.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(c)
        }
    }
}

fn matrices(c: &PerturbConfig) -> (RealMatrix, RealMatrix) {
    if let (Some(a), Some(m)) = (&c.a, &c.c) {
        return (a.clone(), m.clone());
    }
    let (a, b) = advection_matrices(&c.params);
    let (cx, dy) = viscosity_matrices(&c.params);
    match c.swe_pair {
        SwePair::AC => (a, cx),
        SwePair::AD => (a, dy),
        SwePair::BC => (b, cx),
        SwePair::BD => (b, dy),
    }
}

fn table(results: &[PerturbationResult]) -> String {
    let mut out = String::from("method,index,lambda_re,lambda_im,correction_re,correction_im\n");
    for r in results {
        let name = serde_json::to_value(r.method).expect("enum");
        let name = name.as_str().unwrap_or("unknown");
        for (i, (l, c)) in r.base_eigenvalues.iter().zip(&r.corrections).enumerate() {
            out.push_str(&format!("{name},{i},{},{},{},{}\n", l.re, l.im, c.re, c.im));
        }
    }
    out
}

pub fn run(common: &Common, flags: &Flags) -> Result<(), CliError> {
    let config = merge(common, flags)?;
    let (a, c) = matrices(&config);
    let general = corrections_general(&a, &c)?;
    let fd_step = match config.fd_step {
        Some(s) => s,
        None => suggested_fd_step(&a, &general)?,
    };
    let results = all_methods(&a, &c, fd_step)?;
    let (exact, fd): (Vec<_>, Vec<_>) = results.iter().partition(|r| r.method != Method::FdOracle);
    let mut max_discrepancy = 0.0_f64;
    for (i, x) in exact.iter().enumerate() {
        for y in &exact[i + 1..] {
            max_discrepancy = max_discrepancy.max(x.discrepancy(y));
        }
    }
    let summary = Summary {
        n: a.dim(),
        base_eigenvalues: general.base_eigenvalues.clone(),
        methods: results.iter().map(|r| r.method).collect(),
        max_discrepancy,
        fd_discrepancy: fd.first().map_or(f64::NAN, |f| general.discrepancy(f)),
        fd_step,
    };
    let mut out = OutDir::create(&common.out)?;
    out.text("corrections.csv", &table(&results))?;
    out.json("summary.json", &summary)?;
    for (l, c) in general.base_eigenvalues.iter().zip(&general.corrections) {
        println!("lambda {:>12.6}  correction {:>12.6}{:+.3e}i", l.re, c.re, c.im);
    }
    println!(
        "max discrepancy {:.3e} (exact methods), fd {:.3e} at step {:.1e}",
        summary.max_discrepancy, summary.fd_discrepancy, fd_step
    );
    let mut manifest = Manifest::new("perturb", to_value(&config));
    manifest.results = to_value(&summary);
    out.finish(manifest)
}
