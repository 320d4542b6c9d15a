use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use oblique_core::matkit::RealMatrix;
use oblique_core::solver::Manifest;
use oblique_core::stability::{
    conjecture51_check, conjecture53_check, gamma_grid, positive_k_grid, sample_admissible,
    sample_admissible_quadruple, Conjecture53Report, ConjectureReport, ObliqueSpec, Verdict, ViscosityClass,
    DEFAULT_GAMMA_POINTS, DEFAULT_K_MAX, DEFAULT_K_POINTS,
};
use oblique_core::swe::SweParams;

use crate::config::{load, parse_matrix, set, set_list};
use crate::error::CliError;
use crate::output::{to_value, OutDir};
use crate::Common;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    /// Symmetric positive definite viscosity.
    Spd,
    /// Real positive spectrum, possibly non-symmetric.
    Positive,
}

impl From<Class> for ViscosityClass {
    fn from(c: Class) -> Self {
        match c {
            Class::Spd => Self::SpdViscosity,
            Class::Positive => Self::PositiveSpectrumViscosity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadruple {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    pub d: RealMatrix,
}

/// Case source, in priority order: explicit matrices, random samples, the
/// shallow-water example at each `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjectureConfig {
    pub matrices: Option<Quadruple>,
    pub random: Option<usize>,
    pub seed: u64,
    pub dim: usize,
    pub class: Class,
    pub g: f64,
    pub h0: f64,
    pub delta: f64,
    pub eps: Vec<f64>,
    pub k_max: f64,
    pub k_points: usize,
    pub gamma_points: usize,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        let p = SweParams::default();
        Self {
            matrices: None,
            random: None,
            seed: 0,
            dim: 2,
            class: Class::Spd,
            g: p.g,
            h0: p.h0,
            delta: p.delta,
            eps: vec![1.0, 5.0],
            k_max: DEFAULT_K_MAX,
            k_points: DEFAULT_K_POINTS,
            gamma_points: DEFAULT_GAMMA_POINTS,
        }
    }
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Explicit advection matrix A, e.g. "0,1;1,0" (needs --b, --c, --d too).
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    /// Number of seeded random cases.
    #[arg(long)]
    random: Option<usize>,
    /// Seed of the first random case; case i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Dimension of random cases (2..=4).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum)]
    class: Option<Class>,
    /// Shallow-water viscosity; repeat for several cases.
    #[arg(long)]
    eps: Vec<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    k_points: Option<usize>,
    #[arg(long)]
    gamma_points: Option<usize>,
}

/// One case: the quadruple scan plus the correction-sign check of each 1-D pair.
#[derive(Debug, Clone, Serialize)]
struct Case {
    label: String,
    four_operator: ConjectureReport,
    correction_sign: Vec<PairCheck>,
}

#[derive(Debug, Clone, Serialize)]
struct PairCheck {
    pair: &'static str,
    /// `None` when the pair violates the preconditions (repeated or complex
    /// advection eigenvalues, non-positive viscosity spectrum).
    report: Option<Conjecture53Report>,
    skipped: Option<String>,
}

#[derive(Debug, Default, Clone, Serialize)]
struct Counts {
    consistent: usize,
    vacuous: usize,
    counterexample: usize,
}

impl Counts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Consistent => self.consistent += 1,
            Verdict::Vacuous => self.vacuous += 1,
            Verdict::Counterexample => self.counterexample += 1,
        }
    }
}

#[derive(Debug, Default, Clone, Serialize)]
struct SignCounts {
    checked: usize,
    skipped: usize,
    positive_orientation_agrees: usize,
    negative_orientation_agrees: usize,
}

#[derive(Debug, Default, Clone, Serialize)]
struct Summary {
    cases: usize,
    four_operator: Counts,
    four_operator_literal: Counts,
    correction_sign: SignCounts,
    counterexamples: Vec<String>,
}

fn merge(common: &Common, flags: &Flags) -> Result<ConjectureConfig, CliError> {
    let mut c: ConjectureConfig = load(common.config.as_deref(), "conjecture")?;
    let given = [&flags.a, &flags.b, &flags.c, &flags.d];
    match given.iter().filter(|m| m.is_some()).count() {
        0 => {}
        4 => {
            let m = |s: &Option<String>| parse_matrix(s.as_deref().expect("checked"));
            c.matrices = Some(Quadruple {
                a: m(&flags.a)?,
                b: m(&flags.b)?,
                c: m(&flags.c)?,
                d: m(&flags.d)?,
            });
        }
        _ => return Err(CliError::Config("explicit cases need all of --a, --b, --c, --d".into())),
    }
    if flags.random.is_some() {
        c.random = flags.random;
    }
    set(&mut c.seed, &flags.seed);
    set(&mut c.dim, &flags.dim);
    set(&mut c.class, &flags.class);
    set_list(&mut c.eps, &flags.eps);
    set(&mut c.delta, &flags.delta);
    set(&mut c.k_max, &flags.k_max);
    set(&mut c.k_points, &flags.k_points);
    set(&mut c.gamma_points, &flags.gamma_points);
    if !(2..=4).contains(&c.dim) {
        return Err(CliError::Config(format!("dim must be 2, 3 or 4, got {}", c.dim)));
    }
    if c.k_points < 2 || c.gamma_points < 2 || !(c.k_max > 0.0) {
        return Err(CliError::Config("scan grids need k_max > 0 and at least 2 points each".into()));
    }
    if let Some(q) = &c.matrices {
        let n = q.a.dim();
        if [&q.b, &q.c, &q.d].iter().any(|m| m.dim() != n) {
            return Err(CliError::Config("A, B, C, D must share one dimension".into()));
        }
    }
    Ok(c)
}

fn pair_checks(spec: &ObliqueSpec, k_grid: &[f64]) -> Vec<PairCheck> {
    [
        ("A,C", &spec.a, &spec.c),
        ("A,D", &spec.a, &spec.d),
        ("B,C", &spec.b, &spec.c),
        ("B,D", &spec.b, &spec.d),
    ]
    .into_iter()
    .map(|(pair, x, y)| match conjecture53_check(x, y, k_grid) {
        Ok(r) => PairCheck {
            pair,
            report: Some(r),
            skipped: None,
        },
        Err(e) => PairCheck {
            pair,
            report: None,
            skipped: Some(e.to_string()),
        },
    })
    .collect()
}

/// Builds `(label, spec, extra 1-D pair)` for every configured case.
fn cases(c: &ConjectureConfig) -> Result<Vec<(String, ObliqueSpec, Option<(RealMatrix, RealMatrix)>)>, CliError> {
    if let Some(q) = &c.matrices {
        let spec = ObliqueSpec::new(q.a.clone(), q.b.clone(), q.c.clone(), q.d.clone(), 0.5)?;
        return Ok(vec![("explicit".into(), spec, None)]);
    }
    if let Some(n) = c.random {
        let class = ViscosityClass::from(c.class);
        return (0..n as u64)
            .map(|i| {
                let seed = c.seed.wrapping_add(i);
                let spec = sample_admissible_quadruple(seed, c.dim, class, 0.5)?;
                let pair = sample_admissible(seed, c.dim, class)?;
                Ok((format!("seed{seed}"), spec, Some(pair)))
            })
            .collect();
    }
    c.eps
        .iter()
        .map(|&eps| {
            let params = SweParams {
                g: c.g,
                h0: c.h0,
                eps,
                delta: c.delta,
            };
            params.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Ok((format!("swe_eps{eps}"), ObliqueSpec::shallow_water(&params, 0.5)?, None))
        })
        .collect()
}

pub fn run(common: &Common, flags: &Flags) -> Result<(), CliError> {
    let config = merge(common, flags)?;
    let k_grid = positive_k_grid(config.k_max, config.k_points);
    let gammas = gamma_grid(config.gamma_points);
    let mut out = OutDir::create(&common.out)?;
    let mut summary = Summary::default();
    for (label, spec, extra) in cases(&config)? {
        let report = conjecture51_check(&label, &spec, &k_grid, &gammas)?;
        let mut correction_sign = pair_checks(&spec, &k_grid);
        if let Some((a, c)) = extra {
            let check = match conjecture53_check(&a, &c, &k_grid) {
                Ok(r) => PairCheck {
                    pair: "sampled A,C",
                    report: Some(r),
                    skipped: None,
                },
                Err(e) => PairCheck {
                    pair: "sampled A,C",
                    report: None,
                    skipped: Some(e.to_string()),
                },
            };
            correction_sign.push(check);
        }
        summary.cases += 1;
        summary.four_operator.add(report.verdict);
        summary.four_operator_literal.add(report.literal_verdict);
        for p in &correction_sign {
            match &p.report {
                Some(r) => {
                    let s = &mut summary.correction_sign;
                    s.checked += 1;
                    s.positive_orientation_agrees += usize::from(r.positive_orientation_agrees);
                    s.negative_orientation_agrees += usize::from(r.negative_orientation_agrees);
                }
                None => summary.correction_sign.skipped += 1,
            }
        }
        if report.verdict == Verdict::Counterexample {
            // matrices verbatim so the case replays via `--config`
            let replay = ConjectureConfig {
                matrices: Some(Quadruple {
                    a: spec.a.clone(),
                    b: spec.b.clone(),
                    c: spec.c.clone(),
                    d: spec.d.clone(),
                }),
                random: None,
                ..config.clone()
            };
            out.json(&format!("counterexamples/{label}.json"), &replay)?;
            summary.counterexamples.push(label.clone());
        }
        println!(
            "{label}: {} (literal reading: {}){}",
            report.verdict,
            report.literal_verdict,
            report
                .witness
                .as_ref()
                .map_or(String::new(), |w| format!(", witness k={:.4} gamma={:.2} sigma={:.4}", w.k, w.gamma, w.sigma)),
        );
        out.json(
            &format!("cases/{label}.json"),
            &Case {
                label: label.clone(),
                four_operator: report,
                correction_sign,
            },
        )?;
    }
    out.json("summary.json", &summary)?;
    let f = &summary.four_operator;
    let s = &summary.correction_sign;
    println!(
        "{} cases: {} consistent, {} vacuous, {} counterexample; correction sign: {}/{} agree (positive orientation), {} skipped",
        summary.cases, f.consistent, f.vacuous, f.counterexample, s.positive_orientation_agrees, s.checked, s.skipped
    );
    let mut manifest = Manifest::new("conjecture", to_value(&config));
    manifest.results = to_value(&summary);
    out.finish(manifest)
}
