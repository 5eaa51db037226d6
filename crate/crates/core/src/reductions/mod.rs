//! Binary CSPs and multi-dimensional knapsack, the constructions that
//! carry gap instances between them and into capacitated vertex cover, and
//! the brute-force solvers used to check those constructions at small scale.

pub mod covering;
pub mod csp;
pub mod cvc;
pub mod mdk;

pub use covering::{
    build_covering_family, csp_to_mdk_covering, min_covering_r, verify_covering_family,
    CoveringReduction, VerifyMode,
};
pub use csp::{
    brute_force_csp, csp_value, parse_csp, planted_csp, random_csp, random_three_regular_edges,
    serialize_csp, Constraint, CspInstance,
};
pub use cvc::{mdk_to_cvc, mdk_to_wcvc, CvcReduction};
pub use mdk::{
    csp_solution_vectors, csp_to_mdk, csp_to_mdk_with_q, parse_mdk, random_mdk, serialize_mdk,
    solve_mdk_exact, verify_mdk, MdkInstance, DEFAULT_MDK_BUDGET,
};
