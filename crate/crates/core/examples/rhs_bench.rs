//! Times right-hand-side evaluations and SSP-RK3 steps on the paper grid.

use std::time::Instant;

use oblique_core::solver::{ssprk3_step, Mode, Rhs, RhsWorkspace, RunConfig, FieldSet};

fn main() {
    for mode in [Mode::Linear, Mode::Nonlinear] {
        let config = RunConfig::paper(mode, 1.0, 1.0);
        let rhs = Rhs::new(&config).unwrap();
        let mut ws = RhsWorkspace::new(&config.grid);
        let mut fields = config.initial_fields();
        let mut out = FieldSet::zeros(config.grid);
        let reps = 50;
        let start = Instant::now();
        for _ in 0..reps {
            rhs.eval(&fields, &mut out, &mut ws).unwrap();
        }
        let per_rhs = start.elapsed().as_secs_f64() / reps as f64;
        let start = Instant::now();
        for _ in 0..10 {
            ssprk3_step(&mut fields, 1e-3, &rhs, &mut ws).unwrap();
        }
        let per_step = start.elapsed().as_secs_f64() / 10.0;
        println!("{mode:?}: rhs {:.2} ms, step {:.2} ms", per_rhs * 1e3, per_step * 1e3);
    }
}
