//! Flat-bottom Saint-Venant system: fluxes, Jacobians, the lake-at-rest
//! linearization, the viscosity pair and the two initial conditions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matkit::RealMatrix;

/// Depths at or below this value are treated as a solver failure.
pub const DEPTH_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SweError {
    #[error("depth {h:e} at or below floor {floor:e}")]
    Positivity { h: f64, floor: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweParams {
    /// Gravitational acceleration.
    pub g: f64,
    /// Lake-at-rest depth.
    pub h0: f64,
    /// Viscosity scale.
    pub eps: f64,
    /// Off-diagonal coupling in the y-viscosity matrix.
    pub delta: f64,
}

impl Default for SweParams {
    fn default() -> Self {
        Self {
            g: 10.0,
            h0: 1.0,
            eps: 1.0,
            delta: 5.0,
        }
    }
}

impl SweParams {
    pub fn validate(&self) -> Result<(), SweError> {
        let positive = [("g", self.g), ("h0", self.h0), ("eps", self.eps)];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SweError::InvalidParam { name, value });
            }
        }
        if !self.delta.is_finite() {
            return Err(SweError::InvalidParam {
                name: "delta",
                value: self.delta,
            });
        }
        Ok(())
    }

    pub fn gh0(&self) -> f64 {
        self.g * self.h0
    }
}

/// Conserved variables: depth and the two discharges `q = hu`, `p = hv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub h: f64,
    pub q: f64,
    pub p: f64,
}

impl State {
    pub const fn new(h: f64, q: f64, p: f64) -> Self {
        Self { h, q, p }
    }

    fn checked_depth(&self) -> Result<f64, SweError> {
        if self.h > DEPTH_FLOOR {
            Ok(self.h)
        } else {
            Err(SweError::Positivity {
                h: self.h,
                floor: DEPTH_FLOOR,
            })
        }
    }
}

pub fn flux_x(s: State, g: f64) -> Result<[f64; 3], SweError> {
    let h = s.checked_depth()?;
    Ok([s.q, s.q * s.q / h + 0.5 * g * h * h, s.p * s.q / h])
}

pub fn flux_y(s: State, g: f64) -> Result<[f64; 3], SweError> {
    let h = s.checked_depth()?;
    Ok([s.p, s.p * s.q / h, s.p * s.p / h + 0.5 * g * h * h])
}

pub fn jacobian_x(s: State, g: f64) -> Result<RealMatrix, SweError> {
    let h = s.checked_depth()?;
    let (u, v) = (s.q / h, s.p / h);
    Ok(RealMatrix::from_rows([
        [0.0, 1.0, 0.0],
        [g * h - u * u, 2.0 * u, 0.0],
        [-u * v, v, u],
    ])
    .expect("3x3"))
}

pub fn jacobian_y(s: State, g: f64) -> Result<RealMatrix, SweError> {
    let h = s.checked_depth()?;
    let (u, v) = (s.q / h, s.p / h);
    Ok(RealMatrix::from_rows([
        [0.0, 0.0, 1.0],
        [-u * v, v, u],
        [g * h - v * v, 0.0, 2.0 * v],
    ])
    .expect("3x3"))
}

/// Advection matrices `(A, B)` of the system linearized about `(h0, 0, 0)`.
pub fn advection_matrices(params: &SweParams) -> (RealMatrix, RealMatrix) {
    let rest = State::new(params.h0, 0.0, 0.0);
    (
        jacobian_x(rest, params.g).expect("h0 > 0"),
        jacobian_y(rest, params.g).expect("h0 > 0"),
    )
}

/// Viscosity pair `(C, D)`: `C = εI`, `D = εI` plus `Δ` in the first two
/// entries of its last row.
pub fn viscosity_matrices(params: &SweParams) -> (RealMatrix, RealMatrix) {
    let e = params.eps;
    let c = RealMatrix::diagonal(&[e, e, e]).expect("3x3");
    let mut d = c.clone();
    d.set(2, 0, params.delta);
    d.set(2, 1, params.delta);
    (c, d)
}

/// Linear-mode reference state the perturbation is measured against.
pub const LINEAR_BASE_DEPTH: f64 = 1e-2;
/// Nonlinear-mode lake-at-rest depth.
pub const NONLINEAR_BASE_DEPTH: f64 = 1.0;

fn bump(x: f64, y: f64) -> Option<f64> {
    let r2 = x * x + y * y;
    (r2 < 1.0).then(|| (2.0 * (1.0 - r2)).exp())
}

/// Linear-mode initial data `(h', q', p')`.
pub fn initial_linear(x: f64, y: f64) -> State {
    let h = match bump(x, y) {
        Some(b) => LINEAR_BASE_DEPTH * (1.0 + b / 40.0),
        None => LINEAR_BASE_DEPTH,
    };
    State::new(h, 0.0, 0.0)
}

/// Nonlinear-mode initial data `(h, q, p)`.
pub fn initial_nonlinear(x: f64, y: f64) -> State {
    let h = match bump(x, y) {
        Some(b) => NONLINEAR_BASE_DEPTH + b / 4000.0,
        None => NONLINEAR_BASE_DEPTH,
    };
    State::new(h, 0.0, 0.0)
}

/// Jump in `h` across the unit circle: interior formula evaluated at radius
/// one minus the exterior constant, for the linear and nonlinear data.
pub fn disk_boundary_jumps() -> (f64, f64) {
    (LINEAR_BASE_DEPTH / 40.0, 1.0 / 4000.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::real_eigenvalues;
    use proptest::prelude::*;

    #[test]
    fn flux_values() {
        assert_eq!(flux_x(State::new(1.0, 0.0, 0.0), 10.0).unwrap(), [0.0, 5.0, 0.0]);
        assert_eq!(flux_x(State::new(2.0, 2.0, 0.0), 10.0).unwrap(), [2.0, 22.0, 0.0]);
        assert!(matches!(
            flux_x(State::new(1e-9, 0.0, 0.0), 10.0),
            Err(SweError::Positivity { .. })
        ));
        assert!(jacobian_y(State::new(-1.0, 0.0, 0.0), 10.0).is_err());
    }

    #[test]
    fn lake_at_rest_linearization() {
        let params = SweParams::default();
        let (a, b) = advection_matrices(&params);
        let want_a = RealMatrix::from_rows([[0.0, 1.0, 0.0], [10.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let want_b = RealMatrix::from_rows([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]).unwrap();
        assert_eq!(a, want_a);
        assert_eq!(b, want_b);
        let mut eig: Vec<f64> = real_eigenvalues(&a).unwrap().values.iter().map(|v| v.re).collect();
        eig.sort_by(f64::total_cmp);
        let r = 10f64.sqrt();
        for (got, want) in eig.iter().zip([-r, 0.0, r]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn viscosity_pair() {
        let (c, d) = viscosity_matrices(&SweParams {
            eps: 1.0,
            delta: 5.0,
            ..SweParams::default()
        });
        assert_eq!(c, RealMatrix::identity(3).unwrap());
        assert_eq!(d.rows()[2], vec![5.0, 5.0, 1.0]);
        let (c0, d0) = viscosity_matrices(&SweParams {
            eps: 2.0,
            delta: 0.0,
            ..SweParams::default()
        });
        assert_eq!(c0, d0);
        let eig = real_eigenvalues(&d).unwrap();
        for v in &eig.values {
            assert!((v.re - 1.0).abs() < 1e-4 && v.im.abs() < 1e-4);
        }
    }

    #[test]
    fn param_validation() {
        assert!(SweParams::default().validate().is_ok());
        let bad = SweParams {
            eps: 0.0,
            ..SweParams::default()
        };
        assert!(matches!(bad.validate(), Err(SweError::InvalidParam { name: "eps", .. })));
        let negative_delta = SweParams {
            delta: -3.0,
            ..SweParams::default()
        };
        assert!(negative_delta.validate().is_ok());
    }

    #[test]
    fn initial_conditions() {
        let h0 = initial_linear(0.0, 0.0).h;
        assert!((h0 - 0.01 * (1.0 + 2f64.exp() / 40.0)).abs() < 1e-15);
        assert!((h0 - 0.011_847_264).abs() < 1e-9);
        assert_eq!(initial_linear(1.0, 0.0).h, 0.01);
        assert_eq!(initial_linear(0.6, 0.8).h, 0.01);
        assert_eq!(initial_linear(20.0, -3.0), State::new(0.01, 0.0, 0.0));
        assert!((initial_nonlinear(0.0, 0.0).h - (1.0 + 2f64.exp() / 4000.0)).abs() < 1e-15);
        assert_eq!(initial_nonlinear(-1.5, 0.0).h, 1.0);

        // just inside the circle the interior formula approaches base·(1 + 1/40)
        let inside = initial_linear(1.0 - 1e-12, 0.0).h;
        let (jump_lin, jump_nl) = disk_boundary_jumps();
        assert!((inside - 0.01 - jump_lin).abs() < 1e-12);
        let inside_nl = initial_nonlinear(0.0, 1.0 - 1e-12).h;
        assert!((inside_nl - 1.0 - jump_nl).abs() < 1e-12);
    }

    fn state_strategy() -> impl Strategy<Value = State> {
        (0.1f64..3.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(h, q, p)| State::new(h, q, p))
    }

    proptest! {
        #[test]
        fn jacobians_match_central_differences(s in state_strategy()) {
            let g = 9.81;
            let step = 1e-6;
            for (flux, jac) in [
                (flux_x as fn(State, f64) -> Result<[f64; 3], SweError>, jacobian_x(s, g).unwrap()),
                (flux_y, jacobian_y(s, g).unwrap()),
            ] {
                for col in 0..3 {
                    let mut plus = [s.h, s.q, s.p];
                    let mut minus = plus;
                    plus[col] += step;
                    minus[col] -= step;
                    let fp = flux(State::new(plus[0], plus[1], plus[2]), g).unwrap();
                    let fm = flux(State::new(minus[0], minus[1], minus[2]), g).unwrap();
                    for row in 0..3 {
                        let fd = (fp[row] - fm[row]) / (2.0 * step);
                        prop_assert!((fd - jac.get(row, col)).abs() < 1e-6 * (1.0 + fd.abs()));
                    }
                }
            }
        }

        #[test]
        fn fluxes_swap_under_reflection(s in state_strategy()) {
            let fy = flux_y(s, 10.0).unwrap();
            let fx = flux_x(State::new(s.h, s.p, s.q), 10.0).unwrap();
            prop_assert_eq!(fy, [fx[0], fx[2], fx[1]]);
        }

        #[test]
        fn flux_scaling(s in state_strategy(), alpha in 0.2f64..5.0) {
            let g = 10.0;
            let base = flux_x(s, g).unwrap();
            let scaled = flux_x(State::new(alpha * s.h, alpha * s.q, alpha * s.p), g).unwrap();
            let momentum = alpha * s.q * s.q / s.h + 0.5 * g * alpha * alpha * s.h * s.h;
            prop_assert!((scaled[0] - alpha * base[0]).abs() < 1e-12 * (1.0 + scaled[0].abs()));
            prop_assert!((scaled[1] - momentum).abs() < 1e-12 * (1.0 + momentum.abs()));
            prop_assert!((scaled[2] - alpha * base[2]).abs() < 1e-12 * (1.0 + scaled[2].abs()));
        }
    }
}
