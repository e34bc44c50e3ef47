//! Score-based structure search: greedy hill climbing over single-arc moves
//! with a decomposable-score cache, plus an exhaustive oracle for tiny
//! problems.

use std::collections::HashMap;

use thiserror::Error;

use crate::data::{count_family, DataError, Dataset};
use crate::graph::{enumerate_dags, is_acyclic, ArcMove, Dag, GraphError, MoveKind};
use crate::priors::{PriorError, PriorKind};
use crate::scores::{local_score, network_score, ScoreError, ScoreKind};

/// Node cap for the exhaustive search oracle.
pub const EXHAUSTIVE_CAP: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("dataset has no rows")]
    EmptyData,
    #[error("{requested} nodes exceeds the exhaustive-search cap of {limit}")]
    TooLarge { limit: usize, requested: usize },
    #[error("start graph has {graph_nodes} nodes but the dataset has {variables} variables")]
    StartMismatch {
        graph_nodes: usize,
        variables: usize,
    },
}

impl From<DataError> for SearchError {
    fn from(e: DataError) -> Self {
        SearchError::Score(ScoreError::Data(e))
    }
}

/// Search settings. The defaults give plain single-start hill climbing with
/// a strict-improvement threshold small enough to matter only for exact
/// score ties.
#[derive(Debug, Clone)]
pub struct LearnConfig {
    pub max_parents: Option<usize>,
    pub max_iterations: usize,
    /// Minimal log-posterior gain for a move to be accepted. Ties (gain of
    /// exactly zero) never pass, so equal-scoring denser structures lose.
    pub improvement_epsilon: f64,
    pub start: Option<Dag>,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            max_parents: None,
            max_iterations: 10_000,
            improvement_epsilon: 1e-10,
            start: None,
        }
    }
}

/// One accepted move.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    pub mv: ArcMove,
    /// Log-posterior gain of the move (score delta plus prior ratio).
    pub delta: f64,
    /// Running log posterior (network score plus arc-wise log prior).
    pub log_posterior: f64,
}

/// Accepted-move sequence of one hill-climbing run; the log posterior is
/// strictly increasing along the trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    pub steps: Vec<TraceStep>,
    pub iteration_limit_hit: bool,
}

/// Per-run cache of local family scores, keyed by (child, sorted parents).
/// A cache is bound to one scoring rule and one dataset for its lifetime.
pub struct ScoreCache {
    kind: ScoreKind,
    entries: HashMap<(usize, Vec<usize>), f64>,
}

impl ScoreCache {
    pub fn new(kind: ScoreKind) -> ScoreCache {
        ScoreCache {
            kind,
            entries: HashMap::new(),
        }
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Local score of `child` given `parents` (sorted), counting on a miss.
    pub fn local(
        &mut self,
        data: &Dataset,
        child: usize,
        parents: &[usize],
    ) -> Result<f64, ScoreError> {
        let key = (child, parents.to_vec());
        if let Some(&v) = self.entries.get(&key) {
            return Ok(v);
        }
        let counts = count_family(data, child, parents)?;
        let value = local_score(&counts, self.kind)?;
        self.entries.insert(key, value);
        Ok(value)
    }
}

fn with_parent(parents: &[usize], extra: usize) -> Vec<usize> {
    let mut v = parents.to_vec();
    let pos = v.binary_search(&extra).unwrap_or_else(|p| p);
    v.insert(pos, extra);
    v
}

fn without_parent(parents: &[usize], gone: usize) -> Vec<usize> {
    parents.iter().copied().filter(|&p| p != gone).collect()
}

/// Change in the total network score from applying `mv` to `dag`, computed
/// by rescoring only the affected families: the target for additions and
/// deletions, both endpoints for reversals.
pub fn delta_score(
    dag: &Dag,
    mv: &ArcMove,
    data: &Dataset,
    cache: &mut ScoreCache,
) -> Result<f64, SearchError> {
    let (from, to) = (mv.from, mv.to);
    let old_to = dag.parents(to);
    Ok(match mv.kind {
        MoveKind::Add => {
            cache.local(data, to, &with_parent(old_to, from))?
                - cache.local(data, to, old_to)?
        }
        MoveKind::Delete => {
            cache.local(data, to, &without_parent(old_to, from))?
                - cache.local(data, to, old_to)?
        }
        MoveKind::Reverse => {
            let old_from = dag.parents(from);
            cache.local(data, to, &without_parent(old_to, from))?
                - cache.local(data, to, old_to)?
                + cache.local(data, from, &with_parent(old_from, to))?
                - cache.local(data, from, old_from)?
        }
    })
}

/// Candidate moves on `dag` in the fixed enumeration order: target node,
/// then source node, then Add < Delete < Reverse. Only moves that keep the
/// graph acyclic and within the parent limit are produced.
fn candidate_moves(dag: &Dag, max_parents: Option<usize>) -> Vec<ArcMove> {
    let n = dag.node_count();
    let limit = max_parents.unwrap_or(usize::MAX);
    let mut moves = Vec::new();
    for to in 0..n {
        for from in 0..n {
            if from == to {
                continue;
            }
            if dag.has_arc(from, to) {
                moves.push(ArcMove::delete(from, to));
                // reversal: `from` gains a parent; cycle check below
                if dag.parents(from).len() < limit {
                    moves.push(ArcMove::reverse(from, to));
                }
            } else if dag.parents(to).len() < limit && !dag.has_path(to, from) {
                moves.push(ArcMove::add(from, to));
            }
        }
    }
    // reversals need a path check with the arc removed; do it lazily here so
    // the cheap checks above prune most candidates first
    moves.retain(|mv| {
        if mv.kind != MoveKind::Reverse {
            return true;
        }
        dag.apply_move(mv).is_ok()
    });
    moves
}

/// Sweep all candidate moves and return the best (move, gain) pair, ties
/// resolved by enumeration order. The gain includes the prior move ratio.
fn best_move(
    dag: &Dag,
    data: &Dataset,
    prior: &PriorKind,
    cache: &mut ScoreCache,
    max_parents: Option<usize>,
) -> Result<Option<(ArcMove, f64)>, SearchError> {
    let n = dag.node_count();
    let mut best: Option<(ArcMove, f64)> = None;
    for mv in candidate_moves(dag, max_parents) {
        let gain = delta_score(dag, &mv, data, cache)? + prior.log_move_ratio(&mv, n)?;
        if best.as_ref().is_none_or(|(_, b)| gain > *b) {
            best = Some((mv, gain));
        }
    }
    Ok(best)
}

/// Greedy best-improvement hill climbing on the log posterior.
///
/// Starts from `config.start` (default: empty graph) and repeatedly applies
/// the best-scoring valid move until no move improves the log posterior by
/// more than `improvement_epsilon`. Deterministic given its inputs.
pub fn hill_climb(
    data: &Dataset,
    kind: ScoreKind,
    prior: PriorKind,
    config: &LearnConfig,
) -> Result<(Dag, SearchTrace), SearchError> {
    if data.n_rows() == 0 {
        return Err(SearchError::EmptyData);
    }
    let n = data.variable_count();
    let mut dag = match &config.start {
        Some(start) => {
            if start.node_count() != n {
                return Err(SearchError::StartMismatch {
                    graph_nodes: start.node_count(),
                    variables: n,
                });
            }
            start.clone()
        }
        None => Dag::empty(n),
    };

    let mut cache = ScoreCache::new(kind);
    let mut log_posterior =
        network_score(&dag, data, kind)? + prior.log_structure_prior(&dag)?;
    let mut trace = SearchTrace::default();

    for iteration in 0..config.max_iterations {
        let Some((mv, gain)) = best_move(&dag, data, &prior, &mut cache, config.max_parents)?
        else {
            return Ok((dag, trace));
        };
        if gain <= config.improvement_epsilon {
            return Ok((dag, trace));
        }
        dag = dag.apply_move(&mv)?;
        debug_assert!(is_acyclic(&dag));
        log_posterior += gain;
        trace.steps.push(TraceStep {
            iteration,
            mv,
            delta: gain,
            log_posterior,
        });
    }
    trace.iteration_limit_hit = true;
    Ok((dag, trace))
}

/// Global maximum-a-posteriori structure by scoring every DAG on up to
/// [`EXHAUSTIVE_CAP`] nodes. Ties go to the earliest structure in
/// enumeration order, so the empty graph wins an all-tie.
pub fn exhaustive_map(
    data: &Dataset,
    kind: ScoreKind,
    prior: PriorKind,
) -> Result<Dag, SearchError> {
    let n = data.variable_count();
    if n > EXHAUSTIVE_CAP {
        return Err(SearchError::TooLarge {
            limit: EXHAUSTIVE_CAP,
            requested: n,
        });
    }
    let mut best: Option<(Dag, f64)> = None;
    for dag in enumerate_dags(n)? {
        let value = network_score(&dag, data, kind)? + prior.log_structure_prior(&dag)?;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((dag, value));
        }
    }
    Ok(best.expect("enumeration yields at least the empty graph").0)
}
