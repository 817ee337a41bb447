//! Fixed-point operator, iteration schemes and the solution search.

pub mod operator;
pub mod picard;
pub mod shooting;
pub mod solutions;

pub use operator::{apply_operator, apply_operator_clamped, cone_membership, forcing, psi, ConeCheck};
pub use picard::{
    dominant_mode, picard_iterate, stabilized_fixed_point, verify_solution, FixedPointResult, IterationOptions,
    Status,
};
pub use shooting::{
    jacobian_central, jacobian_forward, newton_shoot, shooting_residual, Jacobian, NewtonOptions, ShootingOutcome,
    ShootingSolution,
};
pub use solutions::{
    classify_solution, find_solutions, initial_slope, shooting_starts, FoundSolution, Label, PicardStart,
    SearchSummary, SolutionClass, SolutionSet, SolveConfig, Source,
};
