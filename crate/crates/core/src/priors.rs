//! Graph priors over DAG space: the uniform prior and the marginal uniform
//! prior with its per-arc inclusion probability beta.
//!
//! The marginal uniform prior treats every ordered pair independently with
//! P(i -> j) = P(j -> i) = beta/2 and P(no arc) = 1 - beta, ignoring the
//! acyclicity constraint exactly as its construction does. Search only ever
//! needs prior ratios between neighbouring structures, so the prior enters
//! as constant per-move factors: (beta/2)/(1-beta) for an addition, its
//! reciprocal for a deletion, and 1 for a reversal.

use thiserror::Error;

use crate::graph::{ArcMove, Dag, MoveKind};

#[derive(Debug, Error, PartialEq)]
pub enum PriorError {
    #[error("arc inclusion probability must lie strictly inside (0, 1), got {beta}")]
    BetaOutOfRange { beta: f64 },
    #[error("sparsity constant must be positive, got {c}")]
    InvalidSparsityConstant { c: f64 },
    #[error("marginal uniform priors need at least two nodes, got {n_nodes}")]
    TooFewNodes { n_nodes: usize },
    #[error("{quantity} is not defined under the uniform graph prior")]
    NotApplicable { quantity: &'static str },
}

/// Closed set of graph priors. `MarginalUniformSparse` resolves its beta to
/// `2c/(N-1)` once the node count is known, giving `cN` expected arcs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorKind {
    Uniform,
    MarginalUniform { beta: f64 },
    MarginalUniformSparse { c: f64 },
}

impl PriorKind {
    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Uniform => "u",
            PriorKind::MarginalUniform { .. } => "mu",
            PriorKind::MarginalUniformSparse { .. } => "mu-sparse",
        }
    }

    /// The beta or c hyperparameter, if the prior carries one.
    pub fn parameter(&self) -> Option<f64> {
        match self {
            PriorKind::Uniform => None,
            PriorKind::MarginalUniform { beta } => Some(*beta),
            PriorKind::MarginalUniformSparse { c } => Some(*c),
        }
    }

    /// Effective per-arc inclusion probability for `n_nodes` nodes;
    /// `None` means no per-arc prior (uniform over structures).
    pub fn resolve_beta(&self, n_nodes: usize) -> Result<Option<f64>, PriorError> {
        let beta = match *self {
            PriorKind::Uniform => return Ok(None),
            PriorKind::MarginalUniform { beta } => beta,
            PriorKind::MarginalUniformSparse { c } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(PriorError::InvalidSparsityConstant { c });
                }
                if n_nodes < 2 {
                    return Err(PriorError::TooFewNodes { n_nodes });
                }
                2.0 * c / (n_nodes as f64 - 1.0)
            }
        };
        if n_nodes < 2 {
            return Err(PriorError::TooFewNodes { n_nodes });
        }
        if !(beta.is_finite() && beta > 0.0 && beta < 1.0) {
            return Err(PriorError::BetaOutOfRange { beta });
        }
        Ok(Some(beta))
    }

    /// log P(G_after) - log P(G_before) for a single-arc move.
    pub fn log_move_ratio(&self, mv: &ArcMove, n_nodes: usize) -> Result<f64, PriorError> {
        let Some(beta) = self.resolve_beta(n_nodes)? else {
            return Ok(0.0);
        };
        let add = (beta / 2.0).ln() - (1.0 - beta).ln();
        Ok(match mv.kind {
            MoveKind::Add => add,
            MoveKind::Delete => -add,
            MoveKind::Reverse => 0.0,
        })
    }

    /// Expected number of arcs, `N(N-1) beta / 2`; equals `cN` for the
    /// sparse parameterization.
    pub fn expected_arc_count(&self, n_nodes: usize) -> Result<f64, PriorError> {
        match self.resolve_beta(n_nodes)? {
            Some(beta) => Ok(n_nodes as f64 * (n_nodes as f64 - 1.0) / 2.0 * beta),
            None => Err(PriorError::NotApplicable {
                quantity: "expected arc count",
            }),
        }
    }

    /// Arc-wise log prior of a whole structure: `|A| log(beta/2)` plus
    /// `log(1-beta)` per non-adjacent pair. Constant-shift consistent with
    /// accumulating [`PriorKind::log_move_ratio`] along any move sequence;
    /// zero under the uniform prior.
    pub fn log_structure_prior(&self, dag: &Dag) -> Result<f64, PriorError> {
        let n = dag.node_count();
        if n < 2 {
            return Ok(0.0);
        }
        let Some(beta) = self.resolve_beta(n)? else {
            return Ok(0.0);
        };
        let arcs = dag.arc_count() as f64;
        let pairs = (n * (n - 1) / 2) as f64;
        Ok(arcs * (beta / 2.0).ln() + (pairs - arcs) * (1.0 - beta).ln())
    }
}

impl std::fmt::Display for PriorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.parameter() {
            Some(p) => write!(f, "{}:{}", self.name(), p),
            None => write!(f, "{}", self.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_resolution() {
        let sparse = PriorKind::MarginalUniformSparse { c: 1.0 };
        assert_eq!(sparse.resolve_beta(5).unwrap(), Some(0.5));
        let fixed = PriorKind::MarginalUniform { beta: 0.5 };
        assert_eq!(fixed.resolve_beta(3).unwrap(), Some(0.5));
        assert_eq!(fixed.resolve_beta(100).unwrap(), Some(0.5));
        assert_eq!(PriorKind::Uniform.resolve_beta(3).unwrap(), None);

        let too_dense = PriorKind::MarginalUniformSparse { c: 5.0 };
        assert_eq!(
            too_dense.resolve_beta(3),
            Err(PriorError::BetaOutOfRange { beta: 5.0 })
        );
    }

    #[test]
    fn median_probability_move_ratios() {
        let mu = PriorKind::MarginalUniform { beta: 0.5 };
        let add = mu.log_move_ratio(&ArcMove::add(0, 1), 4).unwrap();
        let del = mu.log_move_ratio(&ArcMove::delete(0, 1), 4).unwrap();
        let rev = mu.log_move_ratio(&ArcMove::reverse(0, 1), 4).unwrap();
        assert_relative_eq!(add, 0.5f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(del, 2f64.ln(), max_relative = 1e-15);
        assert_eq!(rev, 0.0);

        for mv in [ArcMove::add(0, 1), ArcMove::delete(0, 1)] {
            assert_eq!(PriorKind::Uniform.log_move_ratio(&mv, 4).unwrap(), 0.0);
        }
    }

    #[test]
    fn add_and_delete_ratios_cancel() {
        let priors = [
            PriorKind::Uniform,
            PriorKind::MarginalUniform { beta: 0.3 },
            PriorKind::MarginalUniformSparse { c: 1.5 },
        ];
        for prior in priors {
            let add = prior.log_move_ratio(&ArcMove::add(2, 0), 6).unwrap();
            let del = prior.log_move_ratio(&ArcMove::delete(2, 0), 6).unwrap();
            assert_eq!(add + del, 0.0);
        }
    }

    #[test]
    fn expected_arcs() {
        let mu = PriorKind::MarginalUniform { beta: 0.5 };
        assert_relative_eq!(mu.expected_arc_count(10).unwrap(), 22.5);
        let c1 = PriorKind::MarginalUniformSparse { c: 1.0 };
        assert_relative_eq!(c1.expected_arc_count(37).unwrap(), 37.0);
        let c2 = PriorKind::MarginalUniformSparse { c: 2.0 };
        assert_relative_eq!(c2.expected_arc_count(21).unwrap(), 42.0);
        assert_eq!(
            PriorKind::Uniform.expected_arc_count(5),
            Err(PriorError::NotApplicable {
                quantity: "expected arc count"
            })
        );
    }

    #[test]
    fn structure_prior_tracks_move_ratios() {
        let mu = PriorKind::MarginalUniform { beta: 0.4 };
        let empty = Dag::empty(4);
        let one = empty.apply_move(&ArcMove::add(0, 1)).unwrap();
        let two = one.apply_move(&ArcMove::add(2, 3)).unwrap();
        let base = mu.log_structure_prior(&empty).unwrap();
        let ratio01 = mu.log_move_ratio(&ArcMove::add(0, 1), 4).unwrap();
        let ratio23 = mu.log_move_ratio(&ArcMove::add(2, 3), 4).unwrap();
        assert_relative_eq!(
            mu.log_structure_prior(&two).unwrap(),
            base + ratio01 + ratio23,
            max_relative = 1e-12
        );
    }
}
