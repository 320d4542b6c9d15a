//! Linear stability of oblique viscous hyperbolic systems and a finite
//! difference solver for the viscous shallow-water equations.

pub mod matkit;
pub mod perturb;
pub mod stability;
pub mod swe;
pub mod solver;
