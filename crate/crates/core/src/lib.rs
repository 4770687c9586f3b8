//! Generalized k-Mittag-Leffler functions and fractional kinetic equations.
//!
//! The crate is `no_std` (it needs `alloc` for sampled grids) and is organized
//! bottom-up:
//!
//! - [`specfun`]: gamma, log-gamma, k-gamma and the Pochhammer family.
//! - [`mittag`]: certified series evaluation of `E_{α,β}` and `E^{γ,q}_{k,α,β}`.
//! - [`kinetics`]: closed-form series solutions of the three kinetic equations
//!   `N(t) - N₀ f(t) = -c^ν D^{-ν} N(t)` with Mittag-Leffler forcing.
//! - [`fracops`]: Riemann-Liouville quadrature, residual reports and
//!   numerical Laplace checks used to verify the solutions independently.
//!
//! ```
//! use kmittag::mittag::{ml2, TwoParamMl};
//!
//! let exp = TwoParamMl::new(1.0, 1.0).unwrap();
//! let e = ml2(&exp, 1.0, 1e-14);
//! assert!(e.converged);
//! assert!((e.value - core::f64::consts::E).abs() < 1e-14);
//! ```

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dd;
pub mod error;
pub mod fracops;
pub mod kinetics;
pub mod mittag;
pub mod specfun;

pub use error::{Error, Result};
pub use fracops::{
    laplace_numeric, laplace_step_check, residual_report, rl_integral, ResidualReport,
    SampledFunction,
};
pub use kinetics::{
    corollary_reduction, forcing_value, solve, solve_t1, solve_t2_rederived, solve_t2_stated,
    solve_t3_rederived, solve_t3_stated, CorollaryReduction, Forcing, KineticProblem,
    SolutionSeriesConfig, Theorem, Variant,
};
pub use mittag::{
    kml, kml_with, ml2, ml2_with, reduction_case, MlParameters, ReductionCase, SeriesControl,
    SeriesEvaluation, TwoParamMl,
};
