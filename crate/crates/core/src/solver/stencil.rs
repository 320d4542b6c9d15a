//! One-dimensional stencils: WENO5-JS with Lax–Friedrichs splitting and the
//! seven-point sixth-order second derivative.
//!
//! The kernels work on "shifted slices": `s[k][m]` holds the value at offset
//! `k` of the stencil belonging to output `m`. A padded periodic row and a set
//! of neighbouring rows of a 2-D array both fit this shape, and the loops
//! vectorize.

pub const WENO_EPS: f64 = 1e-6;

/// Sixth-order central weights for `u''`, offsets −3..=3, before scaling by `1/h²`.
pub const DIFFUSION6_WEIGHTS: [f64; 7] = [
    1.0 / 90.0,
    -3.0 / 20.0,
    3.0 / 2.0,
    -49.0 / 18.0,
    3.0 / 2.0,
    -3.0 / 20.0,
    1.0 / 90.0,
];

/// Fifth-order left-biased reconstruction at `i+1/2` from `v_{i-2..=i+2}`.
#[inline(always)]
pub(crate) fn weno5_reconstruct(v0: f64, v1: f64, v2: f64, v3: f64, v4: f64) -> f64 {
    let d01 = v0 - 2.0 * v1 + v2;
    let d12 = v1 - 2.0 * v2 + v3;
    let d23 = v2 - 2.0 * v3 + v4;
    let e0 = v0 - 4.0 * v1 + 3.0 * v2;
    let e1 = v1 - v3;
    let e2 = 3.0 * v2 - 4.0 * v3 + v4;
    let b0 = 13.0 / 12.0 * d01 * d01 + 0.25 * e0 * e0;
    let b1 = 13.0 / 12.0 * d12 * d12 + 0.25 * e1 * e1;
    let b2 = 13.0 / 12.0 * d23 * d23 + 0.25 * e2 * e2;
    let t0 = WENO_EPS + b0;
    let t1 = WENO_EPS + b1;
    let t2 = WENO_EPS + b2;
    let a0 = 0.1 / (t0 * t0);
    let a1 = 0.6 / (t1 * t1);
    let a2 = 0.3 / (t2 * t2);
    let q0 = 2.0 * v0 - 7.0 * v1 + 11.0 * v2;
    let q1 = -v1 + 5.0 * v2 + 2.0 * v3;
    let q2 = 2.0 * v2 + 5.0 * v3 - v4;
    (a0 * q0 + a1 * q1 + a2 * q2) / (6.0 * (a0 + a1 + a2))
}

/// Split numerical flux at `i+1/2` from `(f, u)` at `i-2..=i+3`.
#[inline(always)]
pub(crate) fn llf_flux(f: [f64; 6], u: [f64; 6], alpha: f64) -> f64 {
    let p = |k: usize| 0.5 * (f[k] + alpha * u[k]);
    let m = |k: usize| 0.5 * (f[k] - alpha * u[k]);
    weno5_reconstruct(p(0), p(1), p(2), p(3), p(4)) + weno5_reconstruct(m(5), m(4), m(3), m(2), m(1))
}

/// Interface fluxes `out[m]` from shifted flux and state slices; `alpha[m]`
/// is the splitting speed for output `m`.
pub(crate) fn weno_flux_slices(f: [&[f64]; 6], u: [&[f64]; 6], alpha: &[f64], out: &mut [f64]) {
    let n = out.len();
    let [f0, f1, f2, f3, f4, f5] = f.map(|s| &s[..n]);
    let [u0, u1, u2, u3, u4, u5] = u.map(|s| &s[..n]);
    let alpha = &alpha[..n];
    for m in 0..n {
        out[m] = llf_flux(
            [f0[m], f1[m], f2[m], f3[m], f4[m], f5[m]],
            [u0[m], u1[m], u2[m], u3[m], u4[m], u5[m]],
            alpha[m],
        );
    }
}

/// Same as [`weno_flux_slices`] with one splitting speed for every output.
pub(crate) fn weno_flux_slices_uniform(f: [&[f64]; 6], u: [&[f64]; 6], alpha: f64, out: &mut [f64]) {
    let n = out.len();
    let [f0, f1, f2, f3, f4, f5] = f.map(|s| &s[..n]);
    let [u0, u1, u2, u3, u4, u5] = u.map(|s| &s[..n]);
    for m in 0..n {
        out[m] = llf_flux(
            [f0[m], f1[m], f2[m], f3[m], f4[m], f5[m]],
            [u0[m], u1[m], u2[m], u3[m], u4[m], u5[m]],
            alpha,
        );
    }
}

/// `Σ_k w_k s[k][m]` scaled by `1/h²` and accumulated into `out` with weight `coef`.
pub(crate) fn diffusion_slices_acc(s: [&[f64]; 7], inv_h2: f64, coef: f64, out: &mut [f64]) {
    let n = out.len();
    let [s0, s1, s2, s3, s4, s5, s6] = s.map(|v| &v[..n]);
    let w = DIFFUSION6_WEIGHTS;
    let scale = coef * inv_h2;
    // difference form: exact zero on constants
    for m in 0..n {
        let c = s3[m];
        let v = w[0] * ((s0[m] - c) + (s6[m] - c)) + w[1] * ((s1[m] - c) + (s5[m] - c)) + w[2] * ((s2[m] - c) + (s4[m] - c));
        out[m] += scale * v;
    }
}

/// Periodic copy of `line` with `ghost` extra cells on each side.
pub(crate) fn pad_periodic(line: &[f64], ghost: usize, out: &mut Vec<f64>) {
    let n = line.len();
    debug_assert!(ghost <= n);
    out.clear();
    out.extend_from_slice(&line[n - ghost..]);
    out.extend_from_slice(line);
    out.extend_from_slice(&line[..ghost]);
}

/// WENO5 approximation of `∂f/∂x` on a periodic line, with `f± = (f ± αu)/2`.
///
/// # Panics
/// If `u` and `f` differ in length or hold fewer than seven points.
pub fn weno5_derivative(u: &[f64], f: &[f64], alpha: f64, dx: f64) -> Vec<f64> {
    let n = u.len();
    assert_eq!(n, f.len(), "state and flux lengths differ");
    assert!(n >= 7, "WENO5 needs at least seven points");
    let (mut up, mut fp) = (Vec::new(), Vec::new());
    pad_periodic(u, 3, &mut up);
    pad_periodic(f, 3, &mut fp);
    // flux[m] sits at interface (m − 1) + 1/2
    let mut flux = vec![0.0; n + 1];
    let fs: [&[f64]; 6] = std::array::from_fn(|k| &fp[k..]);
    let us: [&[f64]; 6] = std::array::from_fn(|k| &up[k..]);
    weno_flux_slices_uniform(fs, us, alpha, &mut flux);
    (0..n).map(|i| (flux[i + 1] - flux[i]) / dx).collect()
}

/// Sixth-order `u''` on a periodic line.
///
/// # Panics
/// If the line holds fewer than seven points.
pub fn diffusion6(line: &[f64], dx: f64) -> Vec<f64> {
    let n = line.len();
    assert!(n >= 7, "the diffusion stencil needs at least seven points");
    let mut padded = Vec::new();
    pad_periodic(line, 3, &mut padded);
    let mut out = vec![0.0; n];
    let s: [&[f64]; 7] = std::array::from_fn(|k| &padded[k..]);
    diffusion_slices_acc(s, 1.0 / (dx * dx), 1.0, &mut out);
    out
}
