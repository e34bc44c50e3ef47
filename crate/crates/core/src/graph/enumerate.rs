//! Exhaustive enumeration of labeled DAGs on few nodes, and the arc-state
//! census of the uniform distribution over that space.

use std::collections::BTreeMap;

use super::{Dag, GraphError};

/// Hard cap for exhaustive enumeration; 5 nodes already yield 29281 DAGs.
pub const ENUMERATION_CAP: usize = 5;

/// Every labeled DAG on `n <= 5` nodes, exactly once, in a deterministic
/// order (the empty graph first). Enumerates by depth-first decisions over
/// ordered node pairs, pruning any branch that would close a directed cycle.
pub fn enumerate_dags(n: usize) -> Result<Vec<Dag>, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyNodeSet);
    }
    if n > ENUMERATION_CAP {
        return Err(GraphError::TooLarge {
            limit: ENUMERATION_CAP,
            requested: n,
        });
    }
    let mut pairs = Vec::with_capacity(n * (n - 1));
    for from in 0..n {
        for to in 0..n {
            if from != to {
                pairs.push((from, to));
            }
        }
    }
    let mut out = Vec::new();
    let mut current = Dag::empty(n);
    extend(&pairs, 0, &mut current, &mut out);
    Ok(out)
}

fn extend(pairs: &[(usize, usize)], k: usize, current: &mut Dag, out: &mut Vec<Dag>) {
    if k == pairs.len() {
        out.push(current.clone());
        return;
    }
    // leave the pair absent first, so sparser graphs come earlier
    extend(pairs, k + 1, current, out);
    let (from, to) = pairs[k];
    if !current.has_arc(to, from) && !current.has_path(to, from) {
        let with_arc = current
            .apply_move(&super::ArcMove::add(from, to))
            .expect("pruned branch cannot be cyclic");
        let mut with_arc = with_arc;
        extend(pairs, k + 1, &mut with_arc, out);
    }
}

/// Probabilities of the three states of one ordered node pair under the
/// uniform distribution over DAGs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStateProbs {
    pub forward: f64,
    pub backward: f64,
    pub absent: f64,
}

/// Exact arc-state frequencies and pairwise arc correlations over the
/// uniform distribution on all DAGs with `n` nodes.
///
/// Correlations use the signed arc encoding per unordered pair `{i, j}`,
/// `i < j`: `+1` for `i -> j`, `-1` for `j -> i`, `0` for absent. Under this
/// encoding pairs sharing no endpoint are exactly uncorrelated.
#[derive(Debug, Clone)]
pub struct PriorCensus {
    pub node_count: usize,
    pub n_dags: u64,
    /// Keyed by ordered pair `(i, j)`, `i != j`.
    pub arc_probs: BTreeMap<(usize, usize), PairStateProbs>,
    /// Keyed by two canonical unordered pairs, lexicographically ordered.
    pub arc_pair_correlation: BTreeMap<((usize, usize), (usize, usize)), f64>,
}

pub fn census_uniform_prior(n: usize) -> Result<PriorCensus, GraphError> {
    let dags = enumerate_dags(n)?;
    let m = dags.len() as u64;

    let mut forward_counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for from in 0..n {
        for to in 0..n {
            if from != to {
                forward_counts.insert((from, to), 0);
            }
        }
    }
    for dag in &dags {
        for (from, to) in dag.arcs() {
            *forward_counts.get_mut(&(from, to)).unwrap() += 1;
        }
    }
    let mut arc_probs = BTreeMap::new();
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let fwd = forward_counts[&(from, to)] as f64 / m as f64;
            let bwd = forward_counts[&(to, from)] as f64 / m as f64;
            arc_probs.insert(
                (from, to),
                PairStateProbs {
                    forward: fwd,
                    backward: bwd,
                    absent: 1.0 - fwd - bwd,
                },
            );
        }
    }

    let mut unordered = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            unordered.push((i, j));
        }
    }
    let signed = |dag: &Dag, (i, j): (usize, usize)| -> i64 {
        if dag.has_arc(i, j) {
            1
        } else if dag.has_arc(j, i) {
            -1
        } else {
            0
        }
    };
    let mut arc_pair_correlation = BTreeMap::new();
    for (a, &p1) in unordered.iter().enumerate() {
        for &p2 in &unordered[a + 1..] {
            let (mut s1, mut s2, mut s12, mut sq1, mut sq2) = (0i64, 0i64, 0i64, 0i64, 0i64);
            for dag in &dags {
                let v1 = signed(dag, p1);
                let v2 = signed(dag, p2);
                s1 += v1;
                s2 += v2;
                s12 += v1 * v2;
                sq1 += v1 * v1;
                sq2 += v2 * v2;
            }
            let mf = m as f64;
            let (e1, e2) = (s1 as f64 / mf, s2 as f64 / mf);
            let cov = s12 as f64 / mf - e1 * e2;
            let var1 = sq1 as f64 / mf - e1 * e1;
            let var2 = sq2 as f64 / mf - e2 * e2;
            arc_pair_correlation.insert((p1, p2), cov / (var1 * var2).sqrt());
        }
    }

    Ok(PriorCensus {
        node_count: n,
        n_dags: m,
        arc_probs,
        arc_pair_correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_known_sequence() {
        assert_eq!(enumerate_dags(1).unwrap().len(), 1);
        assert_eq!(enumerate_dags(2).unwrap().len(), 3);
        assert_eq!(enumerate_dags(3).unwrap().len(), 25);
        assert_eq!(enumerate_dags(4).unwrap().len(), 543);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_starts_empty() {
        let dags = enumerate_dags(3).unwrap();
        assert_eq!(dags[0], Dag::empty(3));
        let distinct: HashSet<Vec<Vec<usize>>> =
            dags.iter().map(|d| d.parent_sets().to_vec()).collect();
        assert_eq!(distinct.len(), dags.len());
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_dags(6).unwrap_err(),
            GraphError::TooLarge {
                limit: 5,
                requested: 6
            }
        );
        assert_eq!(enumerate_dags(0).unwrap_err(), GraphError::EmptyNodeSet);
    }

    #[test]
    fn two_node_census_is_exactly_a_third_each() {
        let census = census_uniform_prior(2).unwrap();
        assert_eq!(census.n_dags, 3);
        let p = census.arc_probs[&(0, 1)];
        assert!((p.forward - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.backward - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.absent - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn states_partition_for_every_pair() {
        let census = census_uniform_prior(4).unwrap();
        for p in census.arc_probs.values() {
            assert!((p.forward + p.backward + p.absent - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_pairs_are_uncorrelated() {
        let census = census_uniform_prior(4).unwrap();
        let rho = census.arc_pair_correlation[&((0, 1), (2, 3))];
        assert!(rho.abs() < 1e-10, "rho = {rho}");
        // pairs sharing a node are correlated
        let shared = census.arc_pair_correlation[&((0, 1), (1, 2))];
        assert!(shared.abs() > 0.05, "shared-node correlation = {shared}");
    }
}
