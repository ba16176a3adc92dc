//! Euler solutions of dX = V0(X) dt + √y V(X) dB_H and the substitution
//! y = Y_β that turns them into solutions driven by ggBm.

pub mod checks;
pub mod fields;
pub mod solver;

pub use checks::{
    apriori_bound_check, calibrate_apriori_constant, substitution_identity_check, y_lipschitz_pathwise,
    y_regularity_stat,
};
pub use fields::{builtin_corpus, BuiltinField, HypothesisFlags, VectorFieldSet};
pub use solver::{euler_solve, solve_grey_sde, GreySdeSolver, GreySolution, SolveConfig, SolveMethod};
