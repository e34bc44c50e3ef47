//! Structure learning for discrete Bayesian networks.
//!
//! The crate is organised around a small set of value types: [`Dag`] for
//! structures, [`Dataset`] and [`FamilyCounts`] for data, [`ScoreKind`] /
//! [`PriorKind`] for posterior scores, and [`Bn`] for fitted networks.
//! Everything is immutable after construction and safe to share across
//! threads; search owns its score cache exclusively per run.

pub mod bn;
pub mod data;
pub mod graph;
pub mod io;
pub mod priors;
pub mod scores;
pub mod search;

pub use bn::{Bn, BnError, Cpt, FitPrior};
pub use data::{count_family, nominal_parameter_count, DataError, Dataset, FamilyCounts, Variable};
pub use graph::{
    census_uniform_prior, enumerate_dags, is_acyclic, shd, shd_dags, ArcMove, Cpdag, Dag,
    GraphError, MoveKind, PairStateProbs, PriorCensus,
};
pub use priors::{PriorError, PriorKind};
pub use scores::{
    effective_params, empirical_entropy, local_bd, local_bdeu, local_bds, local_bic, local_loglik,
    local_score, network_effective_params, network_score, posterior_entropy_bdeu,
    posterior_entropy_bds, LocalScore, ScoreError, ScoreKind,
};
pub use search::{
    delta_score, exhaustive_map, hill_climb, LearnConfig, ScoreCache, SearchError, SearchTrace,
    TraceStep,
};
