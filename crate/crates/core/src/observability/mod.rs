//! Lie derivatives of hypergraph dynamics, their Jacobians, and the
//! probabilistic rank test for local weak observability.

mod dynamics;
mod lie;
mod nom;

pub use dynamics::DynamicsSpec;
pub use lie::{eval_jp_naive, eval_jp_recursive, operand_bound, plain_term_count, EvalLimits, RecursionStats, RecursiveJp};
pub use nom::{
    assemble_nom, generic_rank, is_locally_weakly_observable, jacobian_jp, jacobians, node_blocks, node_outputs,
    trial_point, NomEvaluation, NomSampler, Observability, RankConfig, Verdict,
};
