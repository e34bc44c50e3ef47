//! Marginal likelihoods and penalized likelihoods for discrete families,
//! all on the natural-log scale.
//!
//! The BD family multiplies, per parent configuration, a ratio of gamma
//! functions of prior pseudo-counts and observed counts. The paper's raw
//! values underflow quickly (a single family can score 1e-7), so everything
//! here stays in log space via `ln_gamma`; callers exponentiate only when
//! reporting.

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::data::{count_family, DataError, Dataset, FamilyCounts};
use crate::graph::Dag;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("imaginary sample size must be positive, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("zero prior mass on a cell with positive count (config {config}, level {level})")]
    InvalidPrior { config: u64, level: usize },
    #[error("score undefined on an empty sample")]
    EmptyData,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Natural-log local score of one family.
pub type LocalScore = f64;

/// Closed set of scoring rules. `alpha` is the imaginary sample size of the
/// Dirichlet prior; K2 and the Jeffreys variant fix the per-cell
/// pseudo-counts at 1 and 1/2 and carry no user parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreKind {
    Bdeu { alpha: f64 },
    Bds { alpha: f64 },
    K2,
    BdJeffreys,
    Bic,
    LogLik,
}

impl ScoreKind {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            ScoreKind::Bdeu { alpha } | ScoreKind::Bds { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScoreKind::Bdeu { .. } => "bdeu",
            ScoreKind::Bds { .. } => "bds",
            ScoreKind::K2 => "k2",
            ScoreKind::BdJeffreys => "bd-jeffreys",
            ScoreKind::Bic => "bic",
            ScoreKind::LogLik => "loglik",
        }
    }
}

impl std::fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.alpha() {
            Some(a) => write!(f, "{}:{}", self.name(), a),
            None => write!(f, "{}", self.name()),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), ScoreError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(ScoreError::InvalidAlpha { alpha })
    }
}

/// Generic Bayesian-Dirichlet local score with an arbitrary per-cell prior.
///
/// Returns the log of the product over observed configurations j of
/// `G(a_ij) / G(a_ij + n_ij) * prod_k G(a_ijk + n_ijk) / G(a_ijk)`.
/// Cells with zero prior mass and zero count contribute a factor of one;
/// zero prior mass on a positive count is an error.
pub fn local_bd(
    counts: &FamilyCounts,
    alpha_cell: impl Fn(u64, usize) -> f64,
) -> Result<LocalScore, ScoreError> {
    let mut total = 0.0;
    for (j, cells) in counts.observed() {
        let mut alpha_row = 0.0;
        for (k, &n) in cells.iter().enumerate() {
            let a = alpha_cell(j, k);
            if a == 0.0 {
                if n > 0 {
                    return Err(ScoreError::InvalidPrior { config: j, level: k });
                }
                continue;
            }
            alpha_row += a;
            total += ln_gamma(a + n as f64) - ln_gamma(a);
        }
        let n_ij: u64 = cells.iter().sum();
        total += ln_gamma(alpha_row) - ln_gamma(alpha_row + n_ij as f64);
    }
    Ok(total)
}

/// BDeu: uniform cell prior `a/(r_i q_i)` over the nominal configuration
/// space. Unobserved configurations contribute nothing; their factors cancel.
pub fn local_bdeu(counts: &FamilyCounts, alpha: f64) -> Result<LocalScore, ScoreError> {
    check_alpha(alpha)?;
    let cell = alpha / (counts.child_cardinality() as f64 * counts.nominal_config_count() as f64);
    local_bd(counts, |_, _| cell)
}

/// BDs: piecewise-uniform cell prior `a/(r_i q~_i)` spread over the observed
/// configurations only, so the effective imaginary sample size stays `a`
/// even for sparse data. Coincides with BDeu whenever every configuration is
/// observed.
pub fn local_bds(counts: &FamilyCounts, alpha: f64) -> Result<LocalScore, ScoreError> {
    check_alpha(alpha)?;
    if counts.observed_config_count() == 0 {
        return Ok(0.0);
    }
    let cell = alpha / (counts.child_cardinality() as f64 * counts.observed_config_count() as f64);
    local_bd(counts, |_, _| cell)
}

/// Multinomial log-likelihood at the maximum-likelihood estimates, with the
/// `0 log 0 = 0` convention.
pub fn local_loglik(counts: &FamilyCounts) -> LocalScore {
    let mut total = 0.0;
    for (_, cells) in counts.observed() {
        let n_ij: u64 = cells.iter().sum();
        for &n in cells {
            if n > 0 {
                total += n as f64 * (n as f64 / n_ij as f64).ln();
            }
        }
    }
    total
}

/// Schwarz criterion in the maximizing convention:
/// log-likelihood minus `(r_i - 1) q_i / 2 * ln n`.
pub fn local_bic(counts: &FamilyCounts) -> Result<LocalScore, ScoreError> {
    if counts.total() == 0 {
        return Err(ScoreError::EmptyData);
    }
    let penalty = (counts.child_cardinality() as f64 - 1.0)
        * counts.nominal_config_count() as f64
        / 2.0
        * (counts.total() as f64).ln();
    Ok(local_loglik(counts) - penalty)
}

/// Effective parameter count of one family: positive cells minus observed
/// configurations, summed over observed configurations. Zero exactly when
/// the family is deterministic (one positive cell per configuration).
pub fn effective_params(counts: &FamilyCounts) -> u64 {
    let positive: usize = counts
        .observed()
        .map(|(_, cells)| FamilyCounts::positive_cells(cells))
        .sum();
    (positive - counts.observed_config_count()) as u64
}

/// Network-level effective parameter count: sum of [`effective_params`] over
/// all families. The difference between two networks differing by one arc is
/// the effective degrees of freedom of that comparison.
pub fn network_effective_params(dag: &Dag, data: &Dataset) -> Result<u64, ScoreError> {
    check_alignment(dag, data)?;
    let mut total = 0;
    for node in 0..dag.node_count() {
        total += effective_params(&count_family(data, node, dag.parents(node))?);
    }
    Ok(total)
}

fn posterior_entropy(counts: &FamilyCounts, cell: f64) -> f64 {
    let r = counts.child_cardinality() as f64;
    let mut h = 0.0;
    for (_, cells) in counts.observed() {
        let n_ij: u64 = cells.iter().sum();
        for &n in cells {
            let p = (cell + n as f64) / (r * cell + n_ij as f64);
            h -= p * p.ln();
        }
    }
    h
}

/// Conditional entropy of the Dirichlet-posterior estimates under the BDeu
/// cell prior, summed over observed configurations.
pub fn posterior_entropy_bdeu(counts: &FamilyCounts, alpha: f64) -> Result<f64, ScoreError> {
    check_alpha(alpha)?;
    let cell = alpha / (counts.child_cardinality() as f64 * counts.nominal_config_count() as f64);
    Ok(posterior_entropy(counts, cell))
}

/// Same entropy with the BDs cell prior `a/(r_i q~_i)`.
pub fn posterior_entropy_bds(counts: &FamilyCounts, alpha: f64) -> Result<f64, ScoreError> {
    check_alpha(alpha)?;
    if counts.observed_config_count() == 0 {
        return Ok(0.0);
    }
    let cell = alpha / (counts.child_cardinality() as f64 * counts.observed_config_count() as f64);
    Ok(posterior_entropy(counts, cell))
}

/// Plug-in Shannon entropy of the empirical conditional frequencies, with
/// `0 log 0 = 0`.
pub fn empirical_entropy(counts: &FamilyCounts) -> Result<f64, ScoreError> {
    if counts.total() == 0 {
        return Err(ScoreError::EmptyData);
    }
    let mut h = 0.0;
    for (_, cells) in counts.observed() {
        let n_ij: u64 = cells.iter().sum();
        for &n in cells {
            if n > 0 {
                let p = n as f64 / n_ij as f64;
                h -= p * p.ln();
            }
        }
    }
    Ok(h)
}

/// Local score of one family under the selected rule.
pub fn local_score(counts: &FamilyCounts, kind: ScoreKind) -> Result<LocalScore, ScoreError> {
    match kind {
        ScoreKind::Bdeu { alpha } => local_bdeu(counts, alpha),
        ScoreKind::Bds { alpha } => local_bds(counts, alpha),
        ScoreKind::K2 => local_bd(counts, |_, _| 1.0),
        ScoreKind::BdJeffreys => local_bd(counts, |_, _| 0.5),
        ScoreKind::Bic => local_bic(counts),
        ScoreKind::LogLik => Ok(local_loglik(counts)),
    }
}

fn check_alignment(dag: &Dag, data: &Dataset) -> Result<(), ScoreError> {
    if dag.node_count() != data.variable_count() {
        return Err(ScoreError::Data(DataError::NodeMismatch {
            graph_nodes: dag.node_count(),
            variables: data.variable_count(),
        }));
    }
    Ok(())
}

/// Decomposable network score: sum of local scores over all families.
pub fn network_score(dag: &Dag, data: &Dataset, kind: ScoreKind) -> Result<f64, ScoreError> {
    check_alignment(dag, data)?;
    let mut total = 0.0;
    for node in 0..dag.node_count() {
        let counts = count_family(data, node, dag.parents(node))?;
        total += local_score(&counts, kind)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::testdata::{nonsingular_rows, singular_rows, xzwy_dataset};
    use crate::data::Variable;
    use approx::assert_relative_eq;

    const X: usize = 0;
    const Z: usize = 1;
    const W: usize = 2;
    const Y: usize = 3;

    /// Marginal tally of a single variable with the given per-level counts.
    fn tally(counts: &[u64]) -> FamilyCounts {
        let r = counts.len();
        let mut rows = Vec::new();
        for (level, c) in counts.iter().enumerate() {
            for _ in 0..*c {
                rows.push(vec![level]);
            }
        }
        let data = Dataset::new(vec![Variable::indexed("V", r)], rows).unwrap();
        count_family(&data, 0, &[]).unwrap()
    }

    #[test]
    fn generic_bd_closed_forms() {
        // K2-style prior, counts (1,1): G(2)/G(4) = 1/6
        let c = tally(&[1, 1]);
        assert_relative_eq!(
            local_bd(&c, |_, _| 1.0).unwrap(),
            (1.0f64 / 6.0).ln(),
            max_relative = 1e-12
        );
        // Jeffreys prior, counts (1,0): G(1)/G(2) * G(3/2)/G(1/2) = 1/2
        let c = tally(&[1, 0]);
        assert_relative_eq!(
            local_bd(&c, |_, _| 0.5).unwrap(),
            0.5f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn empty_counts_score_zero() {
        let data = Dataset::new(vec![Variable::indexed("V", 2)], vec![]).unwrap();
        let c = count_family(&data, 0, &[]).unwrap();
        assert_eq!(local_bd(&c, |_, _| 1.0).unwrap(), 0.0);
        assert_eq!(local_bdeu(&c, 1.0).unwrap(), 0.0);
        assert_eq!(local_bds(&c, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_prior_mass_on_positive_count_is_rejected() {
        let c = tally(&[2, 1]);
        let err = local_bd(&c, |_, k| if k == 1 { 0.0 } else { 1.0 }).unwrap_err();
        assert_eq!(err, ScoreError::InvalidPrior { config: 0, level: 1 });
        // zero mass on an empty cell is fine
        let c = tally(&[2, 0]);
        assert!(local_bd(&c, |_, k| if k == 1 { 0.0 } else { 1.0 }).is_ok());
    }

    // Expected values below are frozen from tools/fixture_oracle.py, which
    // evaluates the defining gamma products at 60 digits.

    #[test]
    fn nonsingular_family_scores() {
        let data = xzwy_dataset(nonsingular_rows());
        let zw = count_family(&data, X, &[Z, W]).unwrap();
        let zwy = count_family(&data, X, &[Z, W, Y]).unwrap();

        assert_relative_eq!(
            local_bdeu(&zw, 1.0).unwrap().exp(),
            3.90625e-7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            local_bdeu(&zwy, 1.0).unwrap().exp(),
            3.7210886297820454e-8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            local_bds(&zw, 1.0).unwrap().exp(),
            3.90625e-7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            local_bds(&zwy, 1.0).unwrap().exp(),
            3.90625e-7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singular_family_scores() {
        let data = xzwy_dataset(singular_rows());
        let zw = count_family(&data, X, &[Z, W]).unwrap();
        let zwy = count_family(&data, X, &[Z, W, Y]).unwrap();

        assert_relative_eq!(
            local_bdeu(&zw, 1.0).unwrap().exp(),
            0.032625390625,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            local_bdeu(&zwy, 1.0).unwrap().exp(),
            0.04412917148919753,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            local_bds(&zwy, 1.0).unwrap().exp(),
            0.032625390625,
            max_relative = 1e-12
        );
    }

    #[test]
    fn entropies_match_frozen_values() {
        let data = xzwy_dataset(nonsingular_rows());
        let zw = count_family(&data, X, &[Z, W]).unwrap();
        let zwy = count_family(&data, X, &[Z, W, Y]).unwrap();
        assert_relative_eq!(
            empirical_entropy(&zw).unwrap(),
            2.5460566731792513,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            empirical_entropy(&zwy).unwrap(),
            2.5460566731792513,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            posterior_entropy_bdeu(&zw, 1.0).unwrap(),
            2.5801326067041362,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            posterior_entropy_bdeu(&zwy, 1.0).unwrap(),
            2.5641419115246225,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            posterior_entropy_bds(&zwy, 1.0).unwrap(),
            2.5801326067041362,
            max_relative = 1e-12
        );

        let singular = xzwy_dataset(singular_rows());
        let zw = count_family(&singular, X, &[Z, W]).unwrap();
        let zwy = count_family(&singular, X, &[Z, W, Y]).unwrap();
        assert_eq!(empirical_entropy(&zw).unwrap(), 0.0);
        assert_relative_eq!(
            posterior_entropy_bdeu(&zw, 1.0).unwrap(),
            0.6520945179774638,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            posterior_entropy_bdeu(&zwy, 1.0).unwrap(),
            0.3921564531189279,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            posterior_entropy_bds(&zwy, 1.0).unwrap(),
            0.6520945179774638,
            max_relative = 1e-12
        );
    }

    #[test]
    fn posterior_entropy_of_uniform_family_is_q_ln2() {
        // two configs, counts (1,1) each: entropy q~ * ln 2 at any alpha
        let vars = vec![Variable::indexed("C", 2), Variable::indexed("P", 2)];
        let rows = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let data = Dataset::new(vars, rows).unwrap();
        let c = count_family(&data, 0, &[1]).unwrap();
        for alpha in [0.01, 1.0, 100.0] {
            assert_relative_eq!(
                posterior_entropy_bds(&c, alpha).unwrap(),
                2.0 * 2f64.ln(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn effective_parameter_counts() {
        let nonsingular = xzwy_dataset(nonsingular_rows());
        let zwy = count_family(&nonsingular, X, &[Z, W, Y]).unwrap();
        assert_eq!(effective_params(&zwy), 4); // 8 positive cells - 4 configs

        let singular = xzwy_dataset(singular_rows());
        let zwy = count_family(&singular, X, &[Z, W, Y]).unwrap();
        assert_eq!(effective_params(&zwy), 0); // deterministic family
    }

    #[test]
    fn bic_values() {
        let balanced = tally(&[5, 5]);
        assert_relative_eq!(
            local_bic(&balanced).unwrap(),
            10.0 * 0.5f64.ln() - 0.5 * 10f64.ln(),
            max_relative = 1e-12
        );
        let deterministic = tally(&[10, 0]);
        assert_relative_eq!(
            local_bic(&deterministic).unwrap(),
            -0.5 * 10f64.ln(),
            max_relative = 1e-12
        );

        // single-level child: no free parameters, perfect likelihood
        let one_level = tally(&[4]);
        assert_eq!(local_bic(&one_level).unwrap(), 0.0);

        let empty = {
            let data = Dataset::new(vec![Variable::indexed("V", 2)], vec![]).unwrap();
            count_family(&data, 0, &[]).unwrap()
        };
        assert_eq!(local_bic(&empty), Err(ScoreError::EmptyData));
        assert_eq!(empirical_entropy(&empty), Err(ScoreError::EmptyData));
    }

    #[test]
    fn network_score_decomposes() {
        let data = xzwy_dataset(nonsingular_rows());
        let dag = Dag::from_arcs(4, &[(Z, X), (W, X)]).unwrap();
        let kind = ScoreKind::Bdeu { alpha: 1.0 };
        let total = network_score(&dag, &data, kind).unwrap();
        let mut by_hand = 0.0;
        for node in 0..4 {
            let c = count_family(&data, node, dag.parents(node)).unwrap();
            by_hand += local_score(&c, kind).unwrap();
        }
        assert_relative_eq!(total, by_hand, max_relative = 1e-15);
        // frozen from tools/fixture_oracle.py: product of the four families
        assert_relative_eq!(total, -42.6107956984f64, max_relative = 1e-9);
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        let c = tally(&[1, 1]);
        assert!(matches!(
            local_bdeu(&c, 0.0),
            Err(ScoreError::InvalidAlpha { .. })
        ));
        assert!(matches!(
            local_bds(&c, -1.0),
            Err(ScoreError::InvalidAlpha { .. })
        ));
    }
}
