//! Parameterized Bayesian networks: conditional probability tables, fitting
//! from data, ancestral sampling and predictive log-likelihood.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::{count_family, DataError, Dataset, Variable};
use crate::graph::{Dag, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum BnError {
    #[error("imaginary sample size must be positive, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("node {node}: CPT row {config} sums to {sum}, expected 1")]
    RowNotNormalized { node: usize, config: usize, sum: f64 },
    #[error("node {node}: CPT shape does not match its parents and cardinalities")]
    ShapeMismatch { node: usize },
    #[error("variable mismatch between network and dataset: {detail}")]
    SchemaMismatch { detail: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Conditional probability table of one node: one probability row per
/// configuration of the (sorted) parent set, indexed mixed-radix with the
/// earliest parent most significant — the same keying the counting layer
/// uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child_cardinality: usize,
    parent_cardinalities: Vec<usize>,
    table: Vec<Vec<f64>>,
}

const ROW_SUM_TOLERANCE: f64 = 1e-12;

impl Cpt {
    pub fn new(
        node: usize,
        child_cardinality: usize,
        parent_cardinalities: Vec<usize>,
        table: Vec<Vec<f64>>,
    ) -> Result<Cpt, BnError> {
        let q: usize = parent_cardinalities.iter().product();
        if table.len() != q {
            return Err(BnError::ShapeMismatch { node });
        }
        for (config, row) in table.iter().enumerate() {
            if row.len() != child_cardinality {
                return Err(BnError::ShapeMismatch { node });
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(BnError::RowNotNormalized {
                    node,
                    config,
                    sum: f64::NAN,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(BnError::RowNotNormalized { node, config, sum });
            }
        }
        Ok(Cpt {
            child_cardinality,
            parent_cardinalities,
            table,
        })
    }

    pub fn uniform(child_cardinality: usize, parent_cardinalities: Vec<usize>) -> Cpt {
        let q: usize = parent_cardinalities.iter().product();
        Cpt {
            child_cardinality,
            parent_cardinalities,
            table: vec![vec![1.0 / child_cardinality as f64; child_cardinality]; q],
        }
    }

    pub fn child_cardinality(&self) -> usize {
        self.child_cardinality
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cardinalities
    }

    pub fn config_count(&self) -> usize {
        self.table.len()
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.table[config]
    }
}

/// Cell-prior choice for parameter fitting. `CellUniform` spreads the
/// imaginary sample over the nominal configuration space (the estimator the
/// simulation protocol pairs with every score); `ObservedUniform` spreads it
/// over observed configurations only, mirroring the sparse score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitPrior {
    CellUniform,
    ObservedUniform,
}

/// A structure plus one CPT per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Bn {
    dag: Dag,
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
}

impl Bn {
    pub fn new(dag: Dag, variables: Vec<Variable>, cpts: Vec<Cpt>) -> Result<Bn, BnError> {
        if dag.node_count() != variables.len() || cpts.len() != variables.len() {
            return Err(BnError::Data(DataError::NodeMismatch {
                graph_nodes: dag.node_count(),
                variables: variables.len(),
            }));
        }
        for (node, cpt) in cpts.iter().enumerate() {
            if cpt.child_cardinality() != variables[node].cardinality() {
                return Err(BnError::ShapeMismatch { node });
            }
            let expected: Vec<usize> = dag
                .parents(node)
                .iter()
                .map(|&p| variables[p].cardinality())
                .collect();
            if cpt.parent_cardinalities() != expected.as_slice() {
                return Err(BnError::ShapeMismatch { node });
            }
        }
        Ok(Bn {
            dag,
            variables,
            cpts,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn node_count(&self) -> usize {
        self.variables.len()
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    /// Dirichlet-posterior parameter estimates with imaginary sample size
    /// `alpha` and the cell-uniform prior: each probability is
    /// `(a* + n_ijk) / (r_i a* + n_ij)` with `a* = alpha / (r_i q_i)`.
    /// Unobserved configurations get the uniform row.
    pub fn fit(dag: &Dag, data: &Dataset, alpha: f64) -> Result<Bn, BnError> {
        Bn::fit_with(dag, data, alpha, FitPrior::CellUniform)
    }

    pub fn fit_with(
        dag: &Dag,
        data: &Dataset,
        alpha: f64,
        prior: FitPrior,
    ) -> Result<Bn, BnError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(BnError::InvalidAlpha { alpha });
        }
        if dag.node_count() != data.variable_count() {
            return Err(BnError::Data(DataError::NodeMismatch {
                graph_nodes: dag.node_count(),
                variables: data.variable_count(),
            }));
        }
        let variables = data.variables().to_vec();
        let mut cpts = Vec::with_capacity(variables.len());
        for node in 0..variables.len() {
            let counts = count_family(data, node, dag.parents(node))?;
            let r = counts.child_cardinality();
            let q = counts.nominal_config_count();
            let cell = match prior {
                FitPrior::CellUniform => alpha / (r as f64 * q as f64),
                FitPrior::ObservedUniform => {
                    alpha / (r as f64 * counts.observed_config_count().max(1) as f64)
                }
            };
            let parent_cards: Vec<usize> = dag
                .parents(node)
                .iter()
                .map(|&p| variables[p].cardinality())
                .collect();
            let mut table = vec![vec![1.0 / r as f64; r]; q as usize];
            for (config, cells) in counts.observed() {
                let n_ij: u64 = cells.iter().sum();
                let denom = r as f64 * cell + n_ij as f64;
                table[config as usize] = cells
                    .iter()
                    .map(|&n| (cell + n as f64) / denom)
                    .collect();
            }
            cpts.push(Cpt {
                child_cardinality: r,
                parent_cardinalities: parent_cards,
                table,
            });
        }
        Ok(Bn {
            dag: dag.clone(),
            variables,
            cpts,
        })
    }

    fn config_index(&self, node: usize, values: &[usize]) -> usize {
        let mut config = 0;
        for &p in self.dag.parents(node) {
            config = config * self.variables[p].cardinality() + values[p];
        }
        config
    }

    /// Draws `n` rows by ancestral sampling in topological order using
    /// stream 0 of the seeded generator; see [`Bn::sample_stream`].
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        self.sample_stream(n, seed, 0)
    }

    /// Ancestral sampling from an explicit counter-based generator stream,
    /// so replicate r of an experiment can use stream r of one master seed.
    /// One generator per run, consumed row-major (each row draws every node
    /// in topological order).
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let order = self
            .dag
            .topological_order()
            .expect("a Bn structure is acyclic by construction");
        let width = self.node_count();
        let mut rows = Vec::with_capacity(n);
        let mut values = vec![0usize; width];
        for _ in 0..n {
            for &node in &order {
                let row = self.cpts[node].row(self.config_index(node, &values));
                values[node] = draw_categorical(&mut rng, row);
            }
            rows.push(values.clone());
        }
        Dataset::new(self.variables.clone(), rows)
            .expect("sampled levels lie within declared cardinalities")
    }

    /// Sum over rows and nodes of the log conditional probability of the
    /// observed level given the observed parent configuration. Returns
    /// negative infinity only if some looked-up probability is exactly zero,
    /// which cannot happen for fitted networks with positive alpha.
    pub fn predictive_loglik(&self, test: &Dataset) -> Result<f64, BnError> {
        if test.variables() != self.variables.as_slice() {
            return Err(BnError::SchemaMismatch {
                detail: format!(
                    "expected variables {:?}",
                    self.variables.iter().map(|v| &v.name).collect::<Vec<_>>()
                ),
            });
        }
        let width = self.node_count();
        let mut total = 0.0;
        let mut values = vec![0usize; width];
        for row in 0..test.n_rows() {
            for (node, value) in values.iter_mut().enumerate() {
                *value = test.value(row, node);
            }
            for node in 0..width {
                let p = self.cpts[node].row(self.config_index(node, &values))[values[node]];
                total += p.ln();
            }
        }
        Ok(total)
    }
}

fn draw_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (level, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return level;
        }
    }
    probs.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn binary_vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::indexed(*n, 2)).collect()
    }

    #[test]
    fn fit_posterior_estimates() {
        // counts (2,1), alpha = 1, no parents: a* = 1/2, row (0.625, 0.375)
        let data = Dataset::new(
            binary_vars(&["A"]),
            vec![vec![0], vec![0], vec![1]],
        )
        .unwrap();
        let bn = Bn::fit(&Dag::empty(1), &data, 1.0).unwrap();
        assert_relative_eq!(bn.cpt(0).row(0)[0], 0.625, max_relative = 1e-12);
        assert_relative_eq!(bn.cpt(0).row(0)[1], 0.375, max_relative = 1e-12);
    }

    #[test]
    fn unobserved_configurations_get_uniform_rows() {
        // B | A with A always 0: config A=1 never observed
        let data = Dataset::new(
            binary_vars(&["A", "B"]),
            vec![vec![0, 0], vec![0, 1], vec![0, 0]],
        )
        .unwrap();
        let dag = Dag::from_arcs(2, &[(0, 1)]).unwrap();
        let bn = Bn::fit(&dag, &data, 1.0).unwrap();
        assert_eq!(bn.cpt(1).row(1), &[0.5, 0.5]);

        let empty = Dataset::new(binary_vars(&["A", "B"]), vec![]).unwrap();
        let bn = Bn::fit(&dag, &empty, 1.0).unwrap();
        assert_eq!(bn.cpt(1).row(0), &[0.5, 0.5]);
        assert_eq!(bn.cpt(0).row(0), &[0.5, 0.5]);
    }

    #[test]
    fn fit_rows_normalize() {
        let data = Dataset::new(
            binary_vars(&["A", "B"]),
            vec![vec![0, 0], vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]],
        )
        .unwrap();
        let dag = Dag::from_arcs(2, &[(0, 1)]).unwrap();
        for prior in [FitPrior::CellUniform, FitPrior::ObservedUniform] {
            let bn = Bn::fit_with(&dag, &data, 2.5, prior).unwrap();
            for node in 0..2 {
                for config in 0..bn.cpt(node).config_count() {
                    let sum: f64 = bn.cpt(node).row(config).iter().sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampling_matches_marginal_and_is_deterministic() {
        let bn = Bn::new(
            Dag::empty(1),
            binary_vars(&["A"]),
            vec![Cpt::uniform(2, vec![])],
        )
        .unwrap();
        let sample = bn.sample(10_000, 42);
        let zeros = sample.column(0).iter().filter(|&&v| v == 0).count();
        let freq = zeros as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02, "freq = {freq}");

        assert_eq!(bn.sample(100, 7), bn.sample(100, 7));
        assert_ne!(bn.sample(100, 7), bn.sample(100, 8));
        assert_ne!(bn.sample_stream(100, 7, 0), bn.sample_stream(100, 7, 1));
    }

    #[test]
    fn deterministic_cpts_force_the_configuration() {
        let one_hot = Cpt::new(0, 2, vec![], vec![vec![0.0, 1.0]]).unwrap();
        let copy = Cpt::new(1, 2, vec![2], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let bn = Bn::new(
            Dag::from_arcs(2, &[(0, 1)]).unwrap(),
            binary_vars(&["A", "B"]),
            vec![one_hot, copy],
        )
        .unwrap();
        let sample = bn.sample(50, 3);
        for row in 0..50 {
            assert_eq!(sample.value(row, 0), 1);
            assert_eq!(sample.value(row, 1), 1);
        }
    }

    #[test]
    fn predictive_loglik_totals() {
        let bn = Bn::new(
            Dag::empty(1),
            binary_vars(&["A"]),
            vec![Cpt::uniform(2, vec![])],
        )
        .unwrap();
        let test = Dataset::new(binary_vars(&["A"]), vec![vec![0]; 10]).unwrap();
        assert_relative_eq!(
            bn.predictive_loglik(&test).unwrap(),
            10.0 * 0.5f64.ln(),
            max_relative = 1e-12
        );

        // additivity over disjoint test sets
        let first = Dataset::new(binary_vars(&["A"]), vec![vec![0]; 4]).unwrap();
        let second = Dataset::new(binary_vars(&["A"]), vec![vec![1]; 6]).unwrap();
        let mut both = first.clone();
        both.append(&second).unwrap();
        assert_relative_eq!(
            bn.predictive_loglik(&both).unwrap(),
            bn.predictive_loglik(&first).unwrap() + bn.predictive_loglik(&second).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn predictive_loglik_checks_schema() {
        let bn = Bn::new(
            Dag::empty(1),
            binary_vars(&["A"]),
            vec![Cpt::uniform(2, vec![])],
        )
        .unwrap();
        let wrong_name = Dataset::new(binary_vars(&["B"]), vec![vec![0]]).unwrap();
        assert!(matches!(
            bn.predictive_loglik(&wrong_name),
            Err(BnError::SchemaMismatch { .. })
        ));
        let wrong_levels =
            Dataset::new(vec![Variable::indexed("A", 3)], vec![vec![2]]).unwrap();
        assert!(matches!(
            bn.predictive_loglik(&wrong_levels),
            Err(BnError::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn cpt_validation() {
        assert!(matches!(
            Cpt::new(0, 2, vec![], vec![vec![0.4, 0.5]]),
            Err(BnError::RowNotNormalized { .. })
        ));
        assert!(matches!(
            Cpt::new(0, 2, vec![2], vec![vec![0.5, 0.5]]),
            Err(BnError::ShapeMismatch { .. })
        ));
        assert!(Cpt::new(0, 2, vec![], vec![vec![0.5, 0.5]]).is_ok());
    }

    #[test]
    fn bn_validation_rejects_inconsistent_shapes() {
        let dag = Dag::from_arcs(2, &[(0, 1)]).unwrap();
        let bad = Bn::new(
            dag,
            binary_vars(&["A", "B"]),
            vec![Cpt::uniform(2, vec![]), Cpt::uniform(2, vec![])],
        );
        assert!(matches!(bad, Err(BnError::ShapeMismatch { node: 1 })));
    }

    #[test]
    fn chain_copy_network_samples_identical_columns() {
        let root = Cpt::uniform(2, vec![]);
        let copy = Cpt::new(1, 2, vec![2], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let bn = Bn::new(
            Dag::from_arcs(2, &[(0, 1)]).unwrap(),
            binary_vars(&["A", "B"]),
            vec![root, copy],
        )
        .unwrap();
        let sample = bn.sample(200, 9);
        assert_eq!(sample.column(0), sample.column(1));
    }
}
