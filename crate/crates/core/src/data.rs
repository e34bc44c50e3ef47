//! Categorical datasets and the contingency counting every score consumes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::Dag;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("parent-configuration count overflows 64 bits for node {node}")]
    ConfigOverflow { node: usize },
    #[error("node index {index} out of range for {limit} variables")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("row {row}, variable {variable}: level index {value} exceeds cardinality {cardinality}")]
    LevelOutOfRange {
        row: usize,
        variable: usize,
        value: usize,
        cardinality: usize,
    },
    #[error("variable {variable:?} declares duplicate level {level:?}")]
    DuplicateLevel { variable: String, level: String },
    #[error("variable {variable:?} has no levels")]
    EmptyLevels { variable: String },
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("graph has {graph_nodes} nodes but the dataset has {variables} variables")]
    NodeMismatch {
        graph_nodes: usize,
        variables: usize,
    },
}

/// A named categorical variable with a declared, ordered level set.
///
/// Cardinalities always come from the declaration, never from the values
/// observed in a sample; scores depend on the nominal cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub levels: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Result<Variable, DataError> {
        let name = name.into();
        if levels.is_empty() {
            return Err(DataError::EmptyLevels { variable: name });
        }
        for (i, lvl) in levels.iter().enumerate() {
            if levels[..i].contains(lvl) {
                return Err(DataError::DuplicateLevel {
                    variable: name,
                    level: lvl.clone(),
                });
            }
        }
        Ok(Variable { name, levels })
    }

    /// Binary variable named `name` with levels `0`, `1`, ... up to `r`.
    pub fn indexed(name: impl Into<String>, r: usize) -> Variable {
        Variable {
            name: name.into(),
            levels: (0..r).map(|k| k.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }
}

/// Complete-data categorical sample: one level index per variable per row.
/// Stored column-major; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    variables: Vec<Variable>,
    columns: Vec<Vec<u32>>,
    n_rows: usize,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>, rows: Vec<Vec<usize>>) -> Result<Dataset, DataError> {
        let width = variables.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DataError::RowLength {
                    row: r,
                    expected: width,
                    got: row.len(),
                });
            }
            for (v, &value) in row.iter().enumerate() {
                if value >= variables[v].cardinality() {
                    return Err(DataError::LevelOutOfRange {
                        row: r,
                        variable: v,
                        value,
                        cardinality: variables[v].cardinality(),
                    });
                }
                columns[v].push(value as u32);
            }
        }
        Ok(Dataset {
            variables,
            n_rows: rows.len(),
            columns,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn value(&self, row: usize, variable: usize) -> usize {
        self.columns[variable][row] as usize
    }

    pub fn column(&self, variable: usize) -> &[u32] {
        &self.columns[variable]
    }

    /// Concatenates the rows of `other` onto this dataset; schemas must match.
    pub fn append(&mut self, other: &Dataset) -> Result<(), DataError> {
        if self.variables != other.variables {
            return Err(DataError::NodeMismatch {
                graph_nodes: other.variables.len(),
                variables: self.variables.len(),
            });
        }
        for (col, extra) in self.columns.iter_mut().zip(&other.columns) {
            col.extend_from_slice(extra);
        }
        self.n_rows += other.n_rows;
        Ok(())
    }
}

/// Contingency statistics for one child-given-parents family.
///
/// Only parent configurations that actually occur are stored; the nominal
/// configuration count can exceed the sample size by many orders of
/// magnitude. Configuration keys are mixed-radix indices over the parents in
/// sorted node order, earliest parent most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyCounts {
    child_cardinality: usize,
    nominal_config_count: u64,
    observed: BTreeMap<u64, Vec<u64>>,
    total: u64,
}

impl FamilyCounts {
    /// r_i: number of child states.
    pub fn child_cardinality(&self) -> usize {
        self.child_cardinality
    }

    /// q_i: product of parent cardinalities (1 for no parents).
    pub fn nominal_config_count(&self) -> u64 {
        self.nominal_config_count
    }

    /// q~_i: number of parent configurations observed at least once.
    pub fn observed_config_count(&self) -> usize {
        self.observed.len()
    }

    /// n: total number of rows counted.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Observed configurations in ascending key order, each with its count
    /// vector of length r_i.
    pub fn observed(&self) -> impl Iterator<Item = (u64, &[u64])> {
        self.observed.iter().map(|(&j, c)| (j, c.as_slice()))
    }

    pub fn config_counts(&self, config: u64) -> Option<&[u64]> {
        self.observed.get(&config).map(Vec::as_slice)
    }

    /// n_ij for one observed configuration.
    pub fn row_total(&self, config: u64) -> u64 {
        self.observed
            .get(&config)
            .map(|c| c.iter().sum())
            .unwrap_or(0)
    }

    /// r~_ij: positive cells in one observed configuration's count vector.
    pub fn positive_cells(counts: &[u64]) -> usize {
        counts.iter().filter(|&&c| c > 0).count()
    }
}

/// Counts the child's levels within every observed configuration of the
/// parent set. Parents are taken in sorted node order with the earliest
/// parent as the most significant mixed-radix digit.
pub fn count_family(
    data: &Dataset,
    child: usize,
    parents: &[usize],
) -> Result<FamilyCounts, DataError> {
    let width = data.variable_count();
    if child >= width {
        return Err(DataError::IndexOutOfRange {
            index: child,
            limit: width,
        });
    }
    let mut sorted_parents = parents.to_vec();
    sorted_parents.sort_unstable();
    sorted_parents.dedup();
    let mut nominal: u64 = 1;
    for &p in &sorted_parents {
        if p >= width {
            return Err(DataError::IndexOutOfRange {
                index: p,
                limit: width,
            });
        }
        nominal = nominal
            .checked_mul(data.variables()[p].cardinality() as u64)
            .ok_or(DataError::ConfigOverflow { node: child })?;
    }

    let r = data.variables()[child].cardinality();
    let mut observed: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for row in 0..data.n_rows() {
        let mut config: u64 = 0;
        for &p in &sorted_parents {
            config = config * data.variables()[p].cardinality() as u64 + data.value(row, p) as u64;
        }
        let cells = observed.entry(config).or_insert_with(|| vec![0; r]);
        cells[data.value(row, child)] += 1;
    }

    Ok(FamilyCounts {
        child_cardinality: r,
        nominal_config_count: nominal,
        observed,
        total: data.n_rows() as u64,
    })
}

/// Nominal parameter count of a structure over these variables:
/// sum over nodes of (r_i - 1) * q_i.
pub fn nominal_parameter_count(variables: &[Variable], dag: &Dag) -> Result<u64, DataError> {
    if dag.node_count() != variables.len() {
        return Err(DataError::NodeMismatch {
            graph_nodes: dag.node_count(),
            variables: variables.len(),
        });
    }
    let mut total: u64 = 0;
    for (i, var) in variables.iter().enumerate() {
        let mut q: u64 = 1;
        for &p in dag.parents(i) {
            q = q
                .checked_mul(variables[p].cardinality() as u64)
                .ok_or(DataError::ConfigOverflow { node: i })?;
        }
        let params = q
            .checked_mul(var.cardinality() as u64 - 1)
            .ok_or(DataError::ConfigOverflow { node: i })?;
        total = total
            .checked_add(params)
            .ok_or(DataError::ConfigOverflow { node: i })?;
    }
    Ok(total)
}

#[cfg(test)]
pub(crate) mod testdata {
    use super::*;

    /// 12-row four-variable sample in which all four parent configurations
    /// of (Z, W) occur but only four of the eight (Z, W, Y) configurations do.
    /// Variable order: X, Z, W, Y.
    pub fn nonsingular_rows() -> Vec<Vec<usize>> {
        let mut rows = Vec::new();
        let push = |rows: &mut Vec<Vec<usize>>, r: &[usize], times: usize| {
            for _ in 0..times {
                rows.push(r.to_vec());
            }
        };
        push(&mut rows, &[0, 0, 0, 0], 2);
        push(&mut rows, &[1, 0, 0, 0], 1);
        push(&mut rows, &[0, 1, 0, 0], 1);
        push(&mut rows, &[1, 1, 0, 0], 2);
        push(&mut rows, &[0, 0, 1, 0], 1);
        push(&mut rows, &[1, 0, 1, 0], 2);
        push(&mut rows, &[0, 1, 1, 1], 2);
        push(&mut rows, &[1, 1, 1, 1], 1);
        rows
    }

    /// Singular variant: X is a deterministic function of (Z, W).
    pub fn singular_rows() -> Vec<Vec<usize>> {
        let mut rows = Vec::new();
        for _ in 0..3 {
            rows.push(vec![0, 0, 0, 0]);
            rows.push(vec![1, 1, 0, 0]);
            rows.push(vec![1, 0, 1, 0]);
            rows.push(vec![0, 1, 1, 1]);
        }
        rows
    }

    pub fn xzwy_dataset(rows: Vec<Vec<usize>>) -> Dataset {
        let vars = ["X", "Z", "W", "Y"]
            .iter()
            .map(|n| Variable::indexed(*n, 2))
            .collect();
        Dataset::new(vars, rows).unwrap()
    }
}
