//! Completed PDAGs (equivalence-class representatives) and the structural
//! Hamming distance between them.

use std::collections::BTreeSet;

use super::{Dag, GraphError};

/// Partially directed graph with compelled arcs directed and reversible arcs
/// undirected. Undirected edges are stored canonically with the smaller
/// endpoint first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cpdag {
    node_count: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

impl Cpdag {
    pub fn new(
        node_count: usize,
        directed: BTreeSet<(usize, usize)>,
        undirected: BTreeSet<(usize, usize)>,
    ) -> Result<Cpdag, GraphError> {
        if node_count == 0 {
            return Err(GraphError::EmptyNodeSet);
        }
        let undirected: BTreeSet<(usize, usize)> = undirected
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        for &(a, b) in directed.iter().chain(undirected.iter()) {
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            let hi = a.max(b);
            if hi >= node_count {
                return Err(GraphError::ParentOutOfRange {
                    node: a.min(b),
                    parent: hi,
                    node_count,
                });
            }
        }
        for &(a, b) in &directed {
            if undirected.contains(&(a.min(b), a.max(b))) {
                return Err(GraphError::OverlappingEdgeSets { a, b });
            }
        }
        Ok(Cpdag {
            node_count,
            directed,
            undirected,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn directed_arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    /// State of the unordered pair `(a, b)` with `a < b`:
    /// 0 absent, 1 arc a->b, 2 arc b->a, 3 undirected.
    fn pair_state(&self, a: usize, b: usize) -> u8 {
        if self.directed.contains(&(a, b)) {
            1
        } else if self.directed.contains(&(b, a)) {
            2
        } else if self.undirected.contains(&(a, b)) {
            3
        } else {
            0
        }
    }
}

impl Dag {
    /// Completed PDAG of this DAG's Markov-equivalence class: skeleton plus
    /// v-structures, closed under the orientation rules, with every
    /// non-compelled arc left undirected.
    pub fn to_cpdag(&self) -> Cpdag {
        let n = self.node_count();
        let mut adjacent = vec![vec![false; n]; n];
        for (from, to) in self.arcs() {
            adjacent[from][to] = true;
            adjacent[to][from] = true;
        }

        let mut directed: BTreeSet<(usize, usize)> = BTreeSet::new();
        // v-structures: a -> b <- c with a, c non-adjacent are compelled
        for b in 0..n {
            let ps = self.parents(b);
            for (i, &a) in ps.iter().enumerate() {
                for &c in &ps[i + 1..] {
                    if !adjacent[a][c] {
                        directed.insert((a, b));
                        directed.insert((c, b));
                    }
                }
            }
        }

        let mut undirected: BTreeSet<(usize, usize)> = self
            .arcs()
            .filter(|&(from, to)| !directed.contains(&(from, to)))
            .map(|(from, to)| (from.min(to), from.max(to)))
            .collect();

        // orientation-rule closure
        loop {
            let mut oriented: Option<(usize, usize)> = None;
            'scan: for &(a, b) in &undirected {
                for (x, y) in [(a, b), (b, a)] {
                    if rule_applies(n, &directed, &undirected, &adjacent, x, y) {
                        oriented = Some((x, y));
                        break 'scan;
                    }
                }
            }
            match oriented {
                Some((x, y)) => {
                    undirected.remove(&(x.min(y), x.max(y)));
                    directed.insert((x, y));
                }
                None => break,
            }
        }

        Cpdag {
            node_count: n,
            directed,
            undirected,
        }
    }
}

/// Orientation rules for closing a v-structure pattern into the completed
/// PDAG: returns true if the undirected edge x - y must become x -> y.
fn rule_applies(
    n: usize,
    directed: &BTreeSet<(usize, usize)>,
    undirected: &BTreeSet<(usize, usize)>,
    adjacent: &[Vec<bool>],
    x: usize,
    y: usize,
) -> bool {
    // R1: z -> x, x - y, z not adjacent to y  =>  x -> y
    for z in 0..n {
        if directed.contains(&(z, x)) && !adjacent[z][y] {
            return true;
        }
    }
    // R2: x -> w -> y with x - y  =>  x -> y
    for w in 0..n {
        if directed.contains(&(x, w)) && directed.contains(&(w, y)) {
            return true;
        }
    }
    // R3: x - z1, x - z2, z1 -> y, z2 -> y, z1 not adjacent to z2  =>  x -> y
    let linked: Vec<usize> = (0..n)
        .filter(|&z| undirected.contains(&(x.min(z), x.max(z))) && directed.contains(&(z, y)))
        .collect();
    for (i, &z1) in linked.iter().enumerate() {
        for &z2 in &linked[i + 1..] {
            if !adjacent[z1][z2] {
                return true;
            }
        }
    }
    false
}

/// Structural Hamming distance between two CPDAGs: the number of unordered
/// node pairs whose edge state (absent, either direction, undirected)
/// differs. Each insert, delete, direction flip or direct/undirect change
/// moves exactly one pair, so this equals the minimal edit count.
pub fn shd(a: &Cpdag, b: &Cpdag) -> Result<usize, GraphError> {
    if a.node_count != b.node_count {
        return Err(GraphError::DimensionMismatch {
            left: a.node_count,
            right: b.node_count,
        });
    }
    let n = a.node_count;
    let mut dist = 0;
    for i in 0..n {
        for j in i + 1..n {
            if a.pair_state(i, j) != b.pair_state(i, j) {
                dist += 1;
            }
        }
    }
    Ok(dist)
}

/// DAG-level SHD variant: identical pair-state comparison applied directly to
/// the arc sets, without equivalence-class conversion. Useful for sensitivity
/// checks against the CPDAG-based distance.
pub fn shd_dags(a: &Dag, b: &Dag) -> Result<usize, GraphError> {
    if a.node_count() != b.node_count() {
        return Err(GraphError::DimensionMismatch {
            left: a.node_count(),
            right: b.node_count(),
        });
    }
    let state = |g: &Dag, i: usize, j: usize| -> u8 {
        if g.has_arc(i, j) {
            1
        } else if g.has_arc(j, i) {
            2
        } else {
            0
        }
    };
    let n = a.node_count();
    let mut dist = 0;
    for i in 0..n {
        for j in i + 1..n {
            if state(a, i, j) != state(b, i, j) {
                dist += 1;
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, arcs: &[(usize, usize)]) -> Dag {
        Dag::from_arcs(n, arcs).unwrap()
    }

    #[test]
    fn chain_becomes_fully_undirected() {
        let c = dag(3, &[(0, 1), (1, 2)]).to_cpdag();
        assert!(c.directed_arcs().is_empty());
        assert_eq!(
            c.undirected_edges().iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );
    }

    #[test]
    fn collider_stays_directed() {
        let c = dag(3, &[(0, 2), (1, 2)]).to_cpdag();
        assert!(c.undirected_edges().is_empty());
        assert_eq!(
            c.directed_arcs().iter().copied().collect::<Vec<_>>(),
            vec![(0, 2), (1, 2)]
        );
    }

    #[test]
    fn single_node_is_empty() {
        let c = dag(1, &[]).to_cpdag();
        assert!(c.directed_arcs().is_empty() && c.undirected_edges().is_empty());
        assert_eq!(c.node_count(), 1);
    }

    #[test]
    fn collider_tail_is_compelled_by_closure() {
        // 0 -> 2 <- 1 plus 2 -> 3: the arc 2 -> 3 is compelled (reversing it
        // would create a new v-structure at 2).
        let c = dag(4, &[(0, 2), (1, 2), (2, 3)]).to_cpdag();
        assert!(c.directed_arcs().contains(&(2, 3)));
        assert!(c.undirected_edges().is_empty());
    }

    #[test]
    fn equivalent_dags_share_a_cpdag() {
        let a = dag(3, &[(0, 1), (1, 2)]);
        let b = dag(3, &[(1, 0), (1, 2)]);
        let c = dag(3, &[(2, 1), (1, 0)]);
        assert_eq!(a.to_cpdag(), b.to_cpdag());
        assert_eq!(a.to_cpdag(), c.to_cpdag());
    }

    #[test]
    fn shd_identity_and_examples() {
        let chain = dag(3, &[(0, 1), (1, 2)]).to_cpdag();
        assert_eq!(shd(&chain, &chain).unwrap(), 0);

        // chain vs single arc + isolated node: one adjacency differs
        let single = dag(3, &[(0, 1)]).to_cpdag();
        assert_eq!(shd(&chain, &single).unwrap(), 1);
        assert_eq!(shd(&single, &chain).unwrap(), 1);

        // collider vs empty graph: two adjacencies differ
        let collider = dag(3, &[(0, 2), (1, 2)]).to_cpdag();
        let empty = dag(3, &[]).to_cpdag();
        assert_eq!(shd(&collider, &empty).unwrap(), 2);
    }

    #[test]
    fn shd_rejects_mismatched_sizes() {
        let a = dag(2, &[]).to_cpdag();
        let b = dag(3, &[]).to_cpdag();
        assert_eq!(
            shd(&a, &b),
            Err(GraphError::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn dag_level_variant_distinguishes_equivalent_dags() {
        let a = dag(2, &[(0, 1)]);
        let b = dag(2, &[(1, 0)]);
        assert_eq!(shd_dags(&a, &b).unwrap(), 1);
        assert_eq!(shd(&a.to_cpdag(), &b.to_cpdag()).unwrap(), 0);
    }

    #[test]
    fn cpdag_constructor_validates() {
        let dir: BTreeSet<_> = [(0, 1)].into_iter().collect();
        let und: BTreeSet<_> = [(1, 0)].into_iter().collect();
        assert_eq!(
            Cpdag::new(2, dir, und),
            Err(GraphError::OverlappingEdgeSets { a: 0, b: 1 })
        );
    }
}
