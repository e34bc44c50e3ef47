//! Exhaustive validation of the equivalence-class machinery on small graphs
//! against independent brute-force definitions: two DAGs are equivalent iff
//! they share skeleton and v-structures, and an arc is compelled iff it has
//! the same orientation in every member of its class.

use std::collections::{BTreeSet, HashMap};

use bnsl::{enumerate_dags, shd, Cpdag, Dag};

type Skeleton = BTreeSet<(usize, usize)>;
type VStructures = BTreeSet<(usize, usize, usize)>;

fn skeleton(dag: &Dag) -> Skeleton {
    dag.arcs().map(|(f, t)| (f.min(t), f.max(t))).collect()
}

fn v_structures(dag: &Dag) -> VStructures {
    let skel = skeleton(dag);
    let mut out = BTreeSet::new();
    for b in 0..dag.node_count() {
        let ps = dag.parents(b);
        for (i, &a) in ps.iter().enumerate() {
            for &c in &ps[i + 1..] {
                if !skel.contains(&(a.min(c), a.max(c))) {
                    out.insert((a.min(c), b, a.max(c)));
                }
            }
        }
    }
    out
}

/// Equivalence classes of all DAGs on `n` nodes keyed by the brute-force
/// class invariant (skeleton, v-structures).
fn classes(n: usize) -> HashMap<(Skeleton, VStructures), Vec<Dag>> {
    let mut map: HashMap<(Skeleton, VStructures), Vec<Dag>> = HashMap::new();
    for dag in enumerate_dags(n).unwrap() {
        map.entry((skeleton(&dag), v_structures(&dag)))
            .or_default()
            .push(dag);
    }
    map
}

/// Brute-force completed PDAG of a class: arcs oriented identically in every
/// member are compelled, the rest of the skeleton is reversible.
fn oracle_cpdag(members: &[Dag]) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    let mut directed = BTreeSet::new();
    let mut undirected = BTreeSet::new();
    for &(a, b) in &skeleton(&members[0]) {
        let forward = members.iter().all(|g| g.has_arc(a, b));
        let backward = members.iter().all(|g| g.has_arc(b, a));
        if forward {
            directed.insert((a, b));
        } else if backward {
            directed.insert((b, a));
        } else {
            undirected.insert((a, b));
        }
    }
    (directed, undirected)
}

#[test]
fn cpdag_matches_the_compelled_arc_oracle_exhaustively() {
    for n in 1..=4 {
        let mut class_count = 0;
        for members in classes(n).values() {
            class_count += 1;
            let (directed, undirected) = oracle_cpdag(members);
            let expected = Cpdag::new(n, directed, undirected).unwrap();
            for dag in members {
                assert_eq!(
                    dag.to_cpdag(),
                    expected,
                    "n = {n}, dag arcs {:?}",
                    dag.arcs().collect::<Vec<_>>()
                );
            }
        }
        // every class produced one distinct representative
        let distinct: BTreeSet<String> = classes(n)
            .values()
            .map(|m| format!("{:?}", m[0].to_cpdag()))
            .collect();
        assert_eq!(distinct.len(), class_count, "classes collide at n = {n}");
    }
}

#[test]
fn cpdag_equality_coincides_with_class_membership() {
    // to_cpdag(g1) == to_cpdag(g2) exactly when skeletons and v-structures
    // agree, checked over all DAG pairs on up to 4 nodes via class keys.
    for n in 1..=4 {
        let dags = enumerate_dags(n).unwrap();
        for g1 in &dags {
            for g2 in &dags {
                let same_class = skeleton(g1) == skeleton(g2)
                    && v_structures(g1) == v_structures(g2);
                assert_eq!(
                    g1.to_cpdag() == g2.to_cpdag(),
                    same_class,
                    "n = {n}: {:?} vs {:?}",
                    g1.arcs().collect::<Vec<_>>(),
                    g2.arcs().collect::<Vec<_>>()
                );
            }
        }
    }
}

/// Minimal number of single-pair edit operations (insert, delete, flip,
/// direct, undirect) between two CPDAGs on 3 nodes, found by breadth-first
/// search over all 4^3 pair-state vectors.
fn bfs_edit_distance(a: &Cpdag, b: &Cpdag) -> usize {
    fn encode(c: &Cpdag) -> [u8; 3] {
        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        let mut out = [0u8; 3];
        for (slot, &(i, j)) in pairs.iter().enumerate() {
            out[slot] = if c.directed_arcs().contains(&(i, j)) {
                1
            } else if c.directed_arcs().contains(&(j, i)) {
                2
            } else if c.undirected_edges().contains(&(i, j)) {
                3
            } else {
                0
            };
        }
        out
    }
    // single edits: within one pair, every state change is one operation
    let start = encode(a);
    let goal = encode(b);
    let mut dist: HashMap<[u8; 3], usize> = HashMap::from([(start, 0)]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        if state == goal {
            return dist[&state];
        }
        let d = dist[&state];
        for slot in 0..3 {
            for next_state in 0..4u8 {
                if next_state == state[slot] {
                    continue;
                }
                let mut next = state;
                next[slot] = next_state;
                if !dist.contains_key(&next) {
                    dist.insert(next, d + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    unreachable!("state space is connected");
}

#[test]
fn shd_equals_brute_force_edit_distance_on_three_nodes() {
    let dags = enumerate_dags(3).unwrap();
    let cpdags: Vec<Cpdag> = dags.iter().map(Dag::to_cpdag).collect();
    for a in &cpdags {
        for b in &cpdags {
            assert_eq!(shd(a, b).unwrap(), bfs_edit_distance(a, b));
        }
    }
}

#[test]
fn shd_metric_axioms_on_small_cpdag_space() {
    for n in 2..=4 {
        let mut representatives: Vec<Cpdag> = Vec::new();
        for members in classes(n).values() {
            representatives.push(members[0].to_cpdag());
        }
        for a in &representatives {
            for b in &representatives {
                let d_ab = shd(a, b).unwrap();
                let d_ba = shd(b, a).unwrap();
                assert_eq!(d_ab, d_ba, "symmetry");
                assert_eq!(d_ab == 0, a == b, "identity of indiscernibles");
            }
        }
    }
}
