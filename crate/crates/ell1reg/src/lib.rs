//! l1-regularization of linear operator equations on sequence spaces.
//!
//! The crate works on finite sections of three operator families — the
//! Cesàro averaging operator, compact diagonal operators, and the embedding
//! behind sparsity-promoting denoising — and provides:
//!
//! * exact solution models with analytic tail bounds ([`seq`]),
//! * operators with adjoints, source elements, and column norms
//!   ([`operators`]),
//! * the convergence-rate index functions built from cumulative and
//!   supremum dual growth, with a brute-force oracle for the closed forms
//!   ([`rates`]),
//! * an exact separable threshold solver and an accelerated
//!   proximal-gradient solver for the l1-penalized misfit ([`solver`]),
//! * the discrepancy principle and an a-priori parameter rule ([`param`]),
//! * ill-posedness diagnostics on growing sections ([`diagnostics`]), and
//! * a deterministic scenario harness that measures empirical convergence
//!   rates and compares them against the predicted envelopes
//!   ([`experiment`]).
//!
//! Start with the runnable examples (`cargo run --example ...`); each one
//! demonstrates a single capability end to end.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod operators;
pub mod param;
pub mod rates;
pub mod seq;
pub mod solver;

pub use error::{Error, Result};
pub use experiment::{
    fit_rate_exponent, generate_noise, load_scenario, phi_envelope_check, records_to_csv,
    run_rate_experiment, scenario_from_str, NoiseMode, ParamRule, RateRunRecord, RecordStatus,
    Scenario,
};
pub use operators::{OperatorKind, OperatorSpec, SigmaRule, SourceElement};
pub use param::{a_priori_alpha, discrepancy_select, DiscrepancyConfig, DiscrepancySelection};
pub use rates::{
    holder_exponent, phi1, phi2, sup_bruteforce, sup_closed_form, verify_proof_chain,
    verify_variational_inequality, GrowthKind, PhiEval, ProofChain, RateModel, RatePrediction,
    TailBound,
};
pub use seq::{l0_count, lq_norm, tail_sum, SolutionModel, TruncatedSequence};
pub use solver::{
    lipschitz_estimate, objective, optimality_certificate, solve_auto, solve_fista,
    solve_separable, soft_threshold, FistaOptions, SolverResult, TikhonovProblem,
};
