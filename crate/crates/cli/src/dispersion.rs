use clap::Args;
use serde::{Deserialize, Serialize};

use oblique_core::solver::Manifest;
use oblique_core::stability::{
    growth_curve, positive_k_grid, refine_crossing, ObliqueSpec, DEFAULT_K_MAX, DEFAULT_K_POINTS,
};
use oblique_core::swe::SweParams;

use crate::config::{load, set, set_list};
use crate::error::CliError;
use crate::output::{to_value, OutDir};
use crate::Common;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionConfig {
    pub g: f64,
    pub h0: f64,
    pub delta: f64,
    /// One curve per (eps, gamma) pair.
    pub eps: Vec<f64>,
    pub gamma: Vec<f64>,
    pub k_max: f64,
    pub k_points: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        let p = SweParams::default();
        Self {
            g: p.g,
            h0: p.h0,
            delta: p.delta,
            eps: vec![p.eps],
            gamma: vec![0.5],
            k_max: DEFAULT_K_MAX,
            k_points: DEFAULT_K_POINTS,
        }
    }
}

#[derive(Debug, Args)]
pub struct Flags {
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Viscosity; repeat for several curves.
    #[arg(long)]
    eps: Vec<f64>,
    /// Direction parameter in [0, 1]; repeat for several curves.
    #[arg(long)]
    gamma: Vec<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    k_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct CurveSummary {
    eps: f64,
    gamma: f64,
    file: String,
    max_sigma: f64,
    argmax_k: f64,
    /// Unstable wavenumbers `(lower, upper)`; the upper end is refined by bisection.
    positive_interval: Option<(f64, f64)>,
    positive_interval_contiguous: bool,
}

pub fn merge(common: &Common, flags: &Flags) -> Result<DispersionConfig, CliError> {
    let mut c: DispersionConfig = load(common.config.as_deref(), "dispersion")?;
    set(&mut c.g, &flags.g);
    set(&mut c.h0, &flags.h0);
    set(&mut c.delta, &flags.delta);
    set_list(&mut c.eps, &flags.eps);
    set_list(&mut c.gamma, &flags.gamma);
    set(&mut c.k_max, &flags.k_max);
    set(&mut c.k_points, &flags.k_points);
    if c.eps.is_empty() || c.gamma.is_empty() {
        return Err(CliError::Config("need at least one eps and one gamma".into()));
    }
    if !(c.k_max > 0.0 && c.k_max.is_finite()) || c.k_points < 2 {
        return Err(CliError::Config("k_max must be positive and k_points at least 2".into()));
    }
    Ok(c)
}

pub fn run(common: &Common, flags: &Flags) -> Result<(), CliError> {
    let config = merge(common, flags)?;
    let mut out = OutDir::create(&common.out)?;
    let k_grid = positive_k_grid(config.k_max, config.k_points);
    let mut summaries = Vec::new();
    for &eps in &config.eps {
        let params = SweParams {
            g: config.g,
            h0: config.h0,
            eps,
            delta: config.delta,
        };
        params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        for &gamma in &config.gamma {
            let spec = ObliqueSpec::shallow_water(&params, gamma)?;
            let curve = growth_curve(&spec, &k_grid)?;
            let file = format!("growth_eps{eps}_gamma{gamma}.csv");
            out.text(&file, &curve.to_csv())?;
            let interval = curve.positive_interval();
            let positive_interval = match interval {
                Some((lo, last, _)) => {
                    let i = k_grid.iter().position(|&k| k == last).expect("grid point");
                    let hi = match k_grid.get(i + 1) {
                        Some(&next) => refine_crossing(&spec, last, next, 1e-10)?,
                        None => last,
                    };
                    Some((lo, hi))
                }
                None => None,
            };
            summaries.push(CurveSummary {
                eps,
                gamma,
                file,
                max_sigma: curve.max_sigma,
                argmax_k: curve.argmax_k,
                positive_interval,
                positive_interval_contiguous: interval.is_none_or(|i| i.2),
            });
        }
    }
    out.json("summary.json", &summaries)?;
    for s in &summaries {
        let interval = s
            .positive_interval
            .map_or("stable".to_string(), |(lo, hi)| format!("unstable on [{lo:.4}, {hi:.4}]"));
        println!(
            "eps={} gamma={}: max sigma {:.6} at k={:.4}, {interval}",
            s.eps, s.gamma, s.max_sigma, s.argmax_k
        );
    }
    let mut manifest = Manifest::new("dispersion", to_value(&config));
    manifest.results = to_value(&summaries);
    out.finish(manifest)
}
