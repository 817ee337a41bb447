//! Numerics for the three-point integral boundary-value problem
//!
//! ```text
//! u''(t) + f(t, u(t)) = 0,  0 < t < T,
//! u(0) = beta u(eta),  u(T) = alpha int_0^eta u(s) ds.
//! ```
//!
//! Parameters, constants and threshold checks run in exact rational
//! arithmetic when the inputs are exact; curves live on uniform grids in
//! `f64`.

pub mod catalog;
pub mod certifier;
pub mod constants;
pub mod curve;
pub mod error;
pub mod linear;
pub mod nonlinear;
pub mod number;
pub mod presets;
pub mod problem;
pub mod quadrature;
pub mod tolerances;

pub use catalog::{parse_function_spec, FunctionSpec, SampleDomain};
pub use certifier::{certify, search_thresholds, Certificate, SamplingConfig, ThresholdTriple};
pub use constants::Constants;
pub use curve::SolutionCurve;
pub use error::{Error, Result};
pub use linear::{solve_linear, solve_linear_oracle};
pub use nonlinear::{find_solutions, SolveConfig};
pub use number::{Number, Rational};
pub use problem::{validate_hypotheses, Params, Problem};
pub use quadrature::Grid;
