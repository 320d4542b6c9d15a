//! Runs one paper regime and prints its diagnostics.
//!
//! Usage: regime_probe <linear|nonlinear> <eps> <t_final> [cfl]

use oblique_core::solver::{run, Mode, RunConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = if args[1] == "linear" { Mode::Linear } else { Mode::Nonlinear };
    let eps: f64 = args[2].parse().unwrap();
    let t_final: f64 = args[3].parse().unwrap();
    let mut config = RunConfig::paper(mode, eps, t_final);
    if let Some(c) = args.get(4) {
        config.cfl_number = c.parse().unwrap();
    }
    config.diagnostics_interval = 2.0;
    let start = std::time::Instant::now();
    let out = run(&config).unwrap();
    let d = &out.diagnostics;
    for k in 0..d.len() {
        let m = d.modes[k].map(|m| format!("({},{}) {:.1}deg e={:.3} low={}", m.kx, m.ky, m.angle_deg, m.energy_fraction, m.low_confidence));
        println!("t={:7.2} linf={:.4e} hmax={:.6} hmin={:.6} mode={:?}", d.t[k], d.linf[k], d.hmax[k], d.hmin[k], m);
    }
    println!("termination {:?} steps {:?}", out.termination, out.steps);
    println!("mass drift {:.3e}", d.relative_mass_drift());
    if mode == Mode::Linear {
        println!("growth [20,60] {:?}", d.growth_rate(20.0, 60.0));
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
}
