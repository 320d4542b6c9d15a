use num_complex::Complex64;
use oblique_core::matkit::eigenvalues;
use oblique_core::solver::{
    diffusion6, run, run_from, ssprk3_step, weno5_derivative, FieldSet, Grid2D, Mode, Rhs, RhsWorkspace, RunConfig,
};
use oblique_core::stability::{omega_oblique, ObliqueSpec};
use oblique_core::swe::{State, SweParams};
use proptest::prelude::*;
use std::f64::consts::PI;

fn max_diff(a: &FieldSet, b: &FieldSet) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .flat_map(|(x, y)| x.iter().zip(y).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

fn small_linear(eps: f64, n: usize, half: f64, t_final: f64) -> RunConfig {
    let mut c = RunConfig::paper(Mode::Linear, eps, t_final);
    c.grid = Grid2D::new(n, n, -half, half, -half, half).unwrap();
    c
}

/// Real part of `v e^{i k·x}` for a complex 3-vector `v`.
fn plane_wave(grid: Grid2D, kx: f64, ky: f64, v: [Complex64; 3], amp: f64) -> FieldSet {
    FieldSet::from_fn(grid, |x, y| {
        let e = Complex64::from_polar(amp, kx * x + ky * y);
        State::new((v[0] * e).re, (v[1] * e).re, (v[2] * e).re)
    })
}

fn project(field: &[f64], grid: &Grid2D, kx: f64, ky: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let ph = kx * grid.x(i) + ky * grid.y(j);
            acc += field[j * grid.nx + i] * Complex64::from_polar(1.0, -ph);
        }
    }
    acc
}

#[test]
fn plane_wave_growth_matches_dispersion_relation() {
    let params = SweParams::default();
    let gamma = 0.5_f64;
    let s = (1.0 - gamma * gamma).sqrt();
    let k = 1.5;
    let (kx, ky) = (k * gamma, k * s);
    // one wavelength of each component fits the periodic box
    let (lx, ly) = (2.0 * PI / kx, 2.0 * PI / ky);
    let grid = Grid2D::new(64, 48, 0.0, lx, 0.0, ly).unwrap();
    let wavelength = 2.0 * PI / k;
    assert!(wavelength / grid.dx.max(grid.dy) >= 20.0);

    let spec = ObliqueSpec::shallow_water(&params, gamma).unwrap();
    let op = omega_oblique(&spec, k).unwrap();
    let spectrum = eigenvalues(&op).unwrap();
    let omega = *spectrum.values.iter().max_by(|a, b| a.re.total_cmp(&b.re)).unwrap();
    assert!(omega.re > 0.3);

    // eigenvector of Ω for ω by nullspace of (Ω − ωI)
    let m = |i: usize, j: usize| op.get(i, j) - if i == j { omega } else { Complex64::new(0.0, 0.0) };
    let r0 = [m(0, 0), m(0, 1), m(0, 2)];
    let r1 = [m(1, 0), m(1, 1), m(1, 2)];
    let v = [
        r0[1] * r1[2] - r0[2] * r1[1],
        r0[2] * r1[0] - r0[0] * r1[2],
        r0[0] * r1[1] - r0[1] * r1[0],
    ];

    let mut config = RunConfig::paper(Mode::Linear, 1.0, 1.0);
    config.grid = grid;
    let fields = plane_wave(grid, kx, ky, v, 1e-3);
    let rhs = Rhs::new(&config).unwrap();
    let mut out = FieldSet::zeros(grid);
    rhs.eval(&fields, &mut out, &mut RhsWorkspace::new(&grid)).unwrap();
    // amplitude of e^{i k·x} in u and in du/dt
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for c in 0..3 {
        let a = project(fields.components()[c], &grid, kx, ky);
        let b = project(out.components()[c], &grid, kx, ky);
        num += a.conj() * b;
        den += a.norm_sqr();
    }
    let measured = num / den;
    assert!(
        (measured.re - omega.re).abs() <= 0.02 * omega.re,
        "measured {measured}, predicted {omega}"
    );
}

#[test]
fn weno_observed_order() {
    let err = |n: usize| {
        let dx = 2.0 * PI / n as f64;
        let u: Vec<f64> = (0..n).map(|i| (i as f64 * dx).sin()).collect();
        let d = weno5_derivative(&u, &u, 1.0, dx);
        (0..n).map(|i| (d[i] - (i as f64 * dx).cos()).abs()).fold(0.0, f64::max)
    };
    let errs: Vec<f64> = [40, 80, 160].iter().map(|&n| err(n)).collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 4.5, "{errs:?}");
    }
}

#[test]
fn weno_step_is_non_oscillatory() {
    let n = 100;
    let u: Vec<f64> = (0..n).map(|i| if (25..75).contains(&i) { 1.0 } else { 0.0 }).collect();
    let d = weno5_derivative(&u, &u, 1.0, 1.0);
    // upwinded step: derivative concentrated at the two jumps, tiny elsewhere
    let tv: f64 = d.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    assert!(tv < 4.5, "total variation {tv}");
    for (i, v) in d.iter().enumerate() {
        if (i as i64 - 25).abs() > 3 && (i as i64 - 75).abs() > 3 {
            assert!(v.abs() < 1e-6, "oscillation {v} at {i}");
        }
    }
}

#[test]
fn diffusion_exact_on_polynomials() {
    let n = 40;
    let dx = 0.1;
    for p in 0..=6 {
        let x = |i: usize| (i as f64 - 20.0) * dx;
        let line: Vec<f64> = (0..n).map(|i| x(i).powi(p)).collect();
        let d = diffusion6(&line, dx);
        for i in 3..n - 3 {
            let want = if p >= 2 { (p * (p - 1)) as f64 * x(i).powi(p - 2) } else { 0.0 };
            let scale = 1.0 + want.abs();
            assert!((d[i] - want).abs() < 1e-9 * scale, "p={p} i={i}: {} vs {want}", d[i]);
        }
    }
}

#[test]
fn diffusion_symbol_sixth_order() {
    let k = 3.0;
    let err = |n: usize| {
        let dx = 2.0 * PI / n as f64;
        let u: Vec<f64> = (0..n).map(|i| (k * i as f64 * dx).sin()).collect();
        let d = diffusion6(&u, dx);
        (0..n).map(|i| (d[i] + k * k * u[i]).abs()).fold(0.0, f64::max)
    };
    let order = (err(32) / err(64)).log2();
    assert!((5.7..6.3).contains(&order), "{order}");
}

#[test]
fn ssprk3_temporal_order() {
    // dt stays inside the diffusive stability limit (~0.0025 on this grid)
    let mut c = small_linear(1.0, 48, 4.8, 0.4);
    let init = FieldSet::from_fn(c.grid, |x, y| State::new(0.01 * (-(x * x + 2.0 * y * y) / 2.0).exp(), 0.0, 0.0));
    let solve = |dt: f64, c: &mut RunConfig| {
        c.fixed_dt = Some(dt);
        run_from(c, init.clone()).unwrap().final_fields
    };
    let reference = solve(0.002 / 32.0, &mut c);
    let errs: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|m| max_diff(&solve(0.002 / m, &mut c), &reference))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((2.7..=3.3).contains(&order), "{errs:?}");
    }
}

#[test]
fn ssprk3_single_step_is_cubic_taylor() {
    // pure diffusion of one Fourier mode: L u = μ u with μ from the stencil
    let mut c = small_linear(1.0, 32, 3.2, 1.0);
    c.params.delta = 0.0;
    let grid = c.grid;
    let k = 2.0 * PI / grid.lx();
    let fields = FieldSet::from_fn(grid, |x, _| State::new(1.0 + 1e-3 * (k * x).cos(), 0.0, 0.0));
    // advective coupling is removed by zeroing g
    c.params.g = 1e-30;
    let rhs = Rhs::new(&c).unwrap();
    let mut ws = RhsWorkspace::new(&grid);
    let mut l = FieldSet::zeros(grid);
    rhs.eval(&fields, &mut l, &mut ws).unwrap();
    let i0 = 0; // x = x_min, cos = 1 up to phase
    let mu = l.h[i0] / (fields.h[i0] - 1.0);
    let dt = 0.01;
    let mut stepped = fields.clone();
    ssprk3_step(&mut stepped, dt, &rhs, &mut ws).unwrap();
    let z = mu * dt;
    let taylor = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
    let got = (stepped.h[i0] - 1.0) / (fields.h[i0] - 1.0);
    assert!((got - taylor).abs() < 1e-9, "{got} vs {taylor}");
}

#[test]
fn halving_cfl_converges_at_third_order() {
    let mut c = small_linear(1.0, 30, 6.0, 10.0);
    let solve = |cfl: f64, c: &mut RunConfig| {
        c.cfl_number = cfl;
        run(c).unwrap().final_fields
    };
    // stiff viscous modes are only asymptotic once cfl is well below the limit
    let (a, b, r) = (solve(0.1, &mut c), solve(0.05, &mut c), solve(0.025, &mut c));
    let order = (max_diff(&a, &b) / max_diff(&b, &r)).log2();
    assert!((2.7..=3.3).contains(&order), "order {order}");
}

#[test]
fn linear_mass_is_conserved() {
    let c = small_linear(1.0, 50, 5.0, 5.0);
    let out = run(&c).unwrap();
    assert!(out.diagnostics.relative_mass_drift() < 1e-10 * 5.0);
}

#[test]
fn nonlinear_mass_is_conserved() {
    let mut c = RunConfig::paper(Mode::Nonlinear, 1.0, 3.0);
    c.grid = Grid2D::new(50, 50, -5.0, 5.0, -5.0, 5.0).unwrap();
    let out = run(&c).unwrap();
    assert!(out.diagnostics.relative_mass_drift() < 1e-10 * 3.0);
}

#[test]
fn lake_at_rest_with_rounding_noise_is_steady() {
    let mut c = RunConfig::paper(Mode::Nonlinear, 1.0, 1.0);
    c.grid = Grid2D::new(40, 40, -4.0, 4.0, -4.0, 4.0).unwrap();
    let fields = FieldSet::from_fn(c.grid, |x, y| {
        let noise = f64::EPSILON * ((13.0 * x + 7.0 * y).sin());
        State::new(1.0 + noise, 0.0, 0.0)
    });
    let rhs = Rhs::new(&c).unwrap();
    let mut out = FieldSet::zeros(c.grid);
    rhs.eval(&fields, &mut out, &mut RhsWorkspace::new(&c.grid)).unwrap();
    assert!(out.max_abs() <= 1e-12, "{}", out.max_abs());
}

#[test]
fn runs_are_deterministic() {
    let c = small_linear(1.0, 30, 3.0, 0.5);
    let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
    assert_eq!(a.final_fields, b.final_fields);
    assert_eq!(a.diagnostics, b.diagnostics);
}

fn diagonal_asymmetry(f: &FieldSet) -> f64 {
    let n = f.grid.nx;
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            worst = worst.max((f.h[j * n + i] - f.h[i * n + j]).abs());
        }
    }
    worst
}

#[test]
fn coupling_breaks_diagonal_mirror_symmetry() {
    // initial data are symmetric under (x, y) ↦ (y, x); only Δ ≠ 0 breaks it
    let mut c = small_linear(1.0, 40, 4.0, 2.0);
    let skew = diagonal_asymmetry(&run(&c).unwrap().final_fields);
    c.params.delta = 0.0;
    let sym = diagonal_asymmetry(&run(&c).unwrap().final_fields);
    assert!(sym < 1e-14, "{sym}");
    assert!(skew > 1e-6, "{skew}");
}

#[test]
fn stable_regime_decays_on_a_small_box() {
    let c = small_linear(5.0, 60, 6.0, 3.0);
    let out = run(&c).unwrap();
    let d = &out.diagnostics;
    assert!(d.linf.last().unwrap() < &d.linf[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn constant_states_stay_constant(
        eps in 0.1f64..6.0,
        delta in -8.0f64..8.0,
        h in 0.5f64..2.0,
        q in -1.0f64..1.0,
        p in -1.0f64..1.0,
        nonlinear in any::<bool>(),
    ) {
        let mode = if nonlinear { Mode::Nonlinear } else { Mode::Linear };
        let mut c = RunConfig::paper(mode, eps, 1.0);
        c.params.delta = delta;
        c.grid = Grid2D::new(12, 10, 0.0, 1.2, 0.0, 1.0).unwrap();
        let f = FieldSet::from_fn(c.grid, |_, _| State::new(h, q, p));
        let rhs = Rhs::new(&c).unwrap();
        let mut out = FieldSet::zeros(c.grid);
        rhs.eval(&f, &mut out, &mut RhsWorkspace::new(&c.grid)).unwrap();
        prop_assert!(out.max_abs() < 1e-12);
    }
}
