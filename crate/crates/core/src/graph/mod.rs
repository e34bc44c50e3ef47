//! Directed acyclic graphs over dense 0-based node indices.
//!
//! Nodes carry no names here; the data layer owns naming. Parent sets are
//! stored sorted so every iteration order is deterministic.

mod cpdag;
mod enumerate;

pub use cpdag::{shd, shd_dags, Cpdag};
pub use enumerate::{census_uniform_prior, enumerate_dags, PairStateProbs, PriorCensus};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("parent {parent} of node {node} out of range for {node_count} nodes")]
    ParentOutOfRange {
        node: usize,
        parent: usize,
        node_count: usize,
    },
    #[error("move would create a directed cycle")]
    Cyclic,
    #[error("arc {from} -> {to} already present")]
    ArcAlreadyPresent { from: usize, to: usize },
    #[error("arc {from} -> {to} not present")]
    ArcMissing { from: usize, to: usize },
    #[error("node counts differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{requested} nodes exceeds the exhaustive-enumeration cap of {limit}")]
    TooLarge { limit: usize, requested: usize },
    #[error("graph must have at least one node")]
    EmptyNodeSet,
    #[error("pair {a}, {b} appears in both the directed and undirected edge sets")]
    OverlappingEdgeSets { a: usize, b: usize },
}

/// Kind of single-arc search move. `Add < Delete < Reverse` is the
/// tie-breaking order used by move enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    Add,
    Delete,
    Reverse,
}

impl std::fmt::Display for MoveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MoveKind::Add => write!(f, "add"),
            MoveKind::Delete => write!(f, "delete"),
            MoveKind::Reverse => write!(f, "reverse"),
        }
    }
}

/// A single-arc change: add, delete or reverse the arc `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArcMove {
    pub kind: MoveKind,
    pub from: usize,
    pub to: usize,
}

impl ArcMove {
    pub fn add(from: usize, to: usize) -> Self {
        ArcMove {
            kind: MoveKind::Add,
            from,
            to,
        }
    }

    pub fn delete(from: usize, to: usize) -> Self {
        ArcMove {
            kind: MoveKind::Delete,
            from,
            to,
        }
    }

    pub fn reverse(from: usize, to: usize) -> Self {
        ArcMove {
            kind: MoveKind::Reverse,
            from,
            to,
        }
    }
}

impl std::fmt::Display for ArcMove {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} -> {}", self.kind, self.from, self.to)
    }
}

/// Directed acyclic graph stored as one sorted parent set per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

impl Dag {
    /// Graph with `n` nodes and no arcs.
    pub fn empty(n: usize) -> Dag {
        Dag {
            parents: vec![Vec::new(); n],
        }
    }

    /// Builds a DAG from parent sets, validating bounds, self-loops and
    /// acyclicity. Parent sets are sorted and deduplicated.
    pub fn from_parent_sets(mut parents: Vec<Vec<usize>>) -> Result<Dag, GraphError> {
        if parents.is_empty() {
            return Err(GraphError::EmptyNodeSet);
        }
        let n = parents.len();
        for (node, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            ps.dedup();
            for &p in ps.iter() {
                if p == node {
                    return Err(GraphError::SelfLoop { node });
                }
                if p >= n {
                    return Err(GraphError::ParentOutOfRange {
                        node,
                        parent: p,
                        node_count: n,
                    });
                }
            }
        }
        let dag = Dag { parents };
        if !is_acyclic(&dag) {
            return Err(GraphError::Cyclic);
        }
        Ok(dag)
    }

    /// Builds a DAG from an arc list.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Dag, GraphError> {
        let mut parents = vec![Vec::new(); n.max(1)];
        if n == 0 {
            return Err(GraphError::EmptyNodeSet);
        }
        for &(from, to) in arcs {
            if to >= n {
                return Err(GraphError::ParentOutOfRange {
                    node: to,
                    parent: from,
                    node_count: n,
                });
            }
            parents[to].push(from);
        }
        Dag::from_parent_sets(parents)
    }

    /// Builds a graph without validating acyclicity. Intended for
    /// enumeration-style callers that filter with [`is_acyclic`] afterwards;
    /// bounds and self-loops are still the caller's responsibility.
    pub fn new_unchecked(parents: Vec<Vec<usize>>) -> Dag {
        Dag { parents }
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    /// Sorted parent set of `node`.
    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.parents[to].binary_search(&from).is_ok()
    }

    /// Arcs in (target-major) deterministic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(to, ps)| ps.iter().map(move |&from| (from, to)))
    }

    pub fn arc_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// True iff a directed path `from -> ... -> to` exists (including the
    /// trivial path when `from == to`).
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        // walk ancestors of `to`
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![to];
        while let Some(u) = stack.pop() {
            if u == from {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.parents[u].iter().copied());
        }
        false
    }

    /// A topological order, or `None` if the graph is cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.node_count();
        let mut remaining: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (to, ps) in self.parents.iter().enumerate() {
            for &from in ps {
                children[from].push(to);
            }
        }
        // smallest-index-first queue keeps the order deterministic
        let mut ready: Vec<usize> = (0..n).filter(|&i| remaining[i] == 0).collect();
        ready.sort_unstable_by(|a, b| b.cmp(a));
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &c in &children[u] {
                remaining[c] -= 1;
                if remaining[c] == 0 {
                    let pos = ready.binary_search_by(|x| c.cmp(x)).unwrap_or_else(|p| p);
                    ready.insert(pos, c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Applies a single-arc move, rejecting moves that violate their
    /// preconditions or would introduce a cycle. The input graph is not
    /// modified.
    pub fn apply_move(&self, mv: &ArcMove) -> Result<Dag, GraphError> {
        let n = self.node_count();
        if mv.from == mv.to {
            return Err(GraphError::SelfLoop { node: mv.from });
        }
        if mv.from >= n || mv.to >= n {
            return Err(GraphError::ParentOutOfRange {
                node: mv.to.min(n - 1),
                parent: mv.from.max(mv.to),
                node_count: n,
            });
        }
        let present = self.has_arc(mv.from, mv.to);
        match mv.kind {
            MoveKind::Add => {
                if present {
                    return Err(GraphError::ArcAlreadyPresent {
                        from: mv.from,
                        to: mv.to,
                    });
                }
                // a path to -> ... -> from would close a cycle
                if self.has_path(mv.to, mv.from) {
                    return Err(GraphError::Cyclic);
                }
                let mut out = self.clone();
                insert_sorted(&mut out.parents[mv.to], mv.from);
                Ok(out)
            }
            MoveKind::Delete => {
                if !present {
                    return Err(GraphError::ArcMissing {
                        from: mv.from,
                        to: mv.to,
                    });
                }
                let mut out = self.clone();
                out.parents[mv.to].retain(|&p| p != mv.from);
                Ok(out)
            }
            MoveKind::Reverse => {
                if !present {
                    return Err(GraphError::ArcMissing {
                        from: mv.from,
                        to: mv.to,
                    });
                }
                let mut out = self.clone();
                out.parents[mv.to].retain(|&p| p != mv.from);
                // any remaining path from -> to makes the reversed arc cyclic
                if out.has_path(mv.from, mv.to) {
                    return Err(GraphError::Cyclic);
                }
                insert_sorted(&mut out.parents[mv.from], mv.to);
                Ok(out)
            }
        }
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// True iff a topological order exists. Pure; accepts graphs built with
/// [`Dag::new_unchecked`].
pub fn is_acyclic(dag: &Dag) -> bool {
    dag.topological_order().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acyclicity_basics() {
        let chain = Dag::from_arcs(2, &[(0, 1)]).unwrap();
        assert!(is_acyclic(&chain));

        let two_cycle = Dag::new_unchecked(vec![vec![1], vec![0]]);
        assert!(!is_acyclic(&two_cycle));

        let triangle = Dag::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_acyclic(&triangle));
    }

    #[test]
    fn from_parent_sets_rejects_bad_graphs() {
        assert_eq!(
            Dag::from_parent_sets(vec![vec![0]]),
            Err(GraphError::SelfLoop { node: 0 })
        );
        assert_eq!(
            Dag::from_parent_sets(vec![vec![3], vec![]]),
            Err(GraphError::ParentOutOfRange {
                node: 0,
                parent: 3,
                node_count: 2
            })
        );
        assert_eq!(
            Dag::from_parent_sets(vec![vec![1], vec![2], vec![0]]),
            Err(GraphError::Cyclic)
        );
        assert_eq!(Dag::from_parent_sets(vec![]), Err(GraphError::EmptyNodeSet));
    }

    #[test]
    fn apply_move_add_and_reverse() {
        let chain = Dag::from_arcs(3, &[(0, 1)]).unwrap();
        let extended = chain.apply_move(&ArcMove::add(1, 2)).unwrap();
        assert!(extended.has_arc(0, 1) && extended.has_arc(1, 2));

        let reversed = chain.apply_move(&ArcMove::reverse(0, 1)).unwrap();
        assert!(reversed.has_arc(1, 0) && !reversed.has_arc(0, 1));
    }

    #[test]
    fn apply_move_rejects_cycles_and_bad_preconditions() {
        let chain = Dag::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            chain.apply_move(&ArcMove::add(2, 0)),
            Err(GraphError::Cyclic)
        );
        assert_eq!(
            chain.apply_move(&ArcMove::add(0, 1)),
            Err(GraphError::ArcAlreadyPresent { from: 0, to: 1 })
        );
        assert_eq!(
            chain.apply_move(&ArcMove::delete(2, 0)),
            Err(GraphError::ArcMissing { from: 2, to: 0 })
        );
        // reversing 0 -> 1 while the path 0 -> 2 -> 1 remains closes a cycle
        let triangle = Dag::from_arcs(3, &[(0, 1), (0, 2), (2, 1)]).unwrap();
        assert_eq!(
            triangle.apply_move(&ArcMove::reverse(0, 1)),
            Err(GraphError::Cyclic)
        );
        // but reversing the transitive arc of 0 -> 1 -> 2, 0 -> 2 is legal
        let transitive = Dag::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(transitive.apply_move(&ArcMove::reverse(0, 1)).is_ok());
    }

    #[test]
    fn reverse_of_isolated_arc_keeps_other_arcs() {
        let dag = Dag::from_arcs(4, &[(0, 1), (2, 3)]).unwrap();
        let out = dag.apply_move(&ArcMove::reverse(2, 3)).unwrap();
        assert!(out.has_arc(0, 1) && out.has_arc(3, 2));
        assert_eq!(out.arc_count(), 2);
    }

    #[test]
    fn topological_order_is_deterministic_and_valid() {
        let dag = Dag::from_arcs(4, &[(2, 0), (3, 0), (0, 1)]).unwrap();
        let order = dag.topological_order().unwrap();
        assert_eq!(order, vec![2, 3, 0, 1]);
    }

    #[test]
    fn path_queries() {
        let dag = Dag::from_arcs(4, &[(0, 1), (1, 2)]).unwrap();
        assert!(dag.has_path(0, 2));
        assert!(!dag.has_path(2, 0));
        assert!(!dag.has_path(0, 3));
        assert!(dag.has_path(3, 3));
    }
}
