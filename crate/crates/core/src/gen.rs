//! Random instances with known width, and decompositions from elimination
//! orders.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Graph, TreeDecomposition};

/// A graph with a decomposition of width at most the requested bound.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub graph: Graph,
    pub td: TreeDecomposition,
    /// A nonempty terminal set (sorted).
    pub terminals: Vec<usize>,
}

/// Random connected partial `k`-tree on `n` vertices.
///
/// A `k`-tree is grown by attaching each new vertex to a random clique of
/// size at most `k` inside an existing bag; each non-spanning edge is then
/// kept with a random density. One edge to the attachment clique is always
/// kept, so the result is connected. Vertex labels are shuffled.
pub fn random_partial_ktree(n: usize, k: usize, seed: u64) -> RandomInstance {
    assert!(n >= 1 && k >= 1, "need n >= 1 and k >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density: f64 = rng.gen_range(0.3..=0.9);

    let mut label: Vec<usize> = (1..=n).collect();
    label.shuffle(&mut rng);

    let first = (k + 1).min(n);
    let mut bags: Vec<Vec<usize>> = vec![(0..first).collect()];
    let mut tree_edges = Vec::new();
    let mut edges = Vec::new();
    for v in 1..first {
        let anchor = rng.gen_range(0..v);
        for u in 0..v {
            if u == anchor || rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    for v in first..n {
        let host = rng.gen_range(0..bags.len());
        let mut clique = bags[host].clone();
        if clique.len() > k {
            let drop = rng.gen_range(0..clique.len());
            clique.remove(drop);
        }
        let anchor = clique[rng.gen_range(0..clique.len())];
        for &u in &clique {
            if u == anchor || rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
        clique.push(v);
        bags.push(clique);
        tree_edges.push((host, bags.len() - 1));
    }

    let relabel = |v: usize| label[v];
    let edges: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| (relabel(u), relabel(v))).collect();
    let graph = Graph::new(n, &edges).expect("generated edges are simple");
    let td = TreeDecomposition::new(
        bags.into_iter().map(|b| b.into_iter().map(relabel).collect()).collect(),
        tree_edges,
    );

    let t = rng.gen_range(1..=n);
    let mut terminals: Vec<usize> = label.choose_multiple(&mut rng, t).copied().collect();
    terminals.sort_unstable();
    RandomInstance { graph, td, terminals }
}

/// Decomposition from an elimination order (a permutation of `1..=n`).
///
/// Bag `i` holds the `i`-th eliminated vertex and its later neighbours in the
/// fill-in graph; it is attached to the bag of the earliest of those
/// neighbours, or to the next bag if it has none.
pub fn elimination_td(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    assert_eq!(order.len(), n, "order must list every vertex once");
    let mut pos = vec![usize::MAX; n + 1];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n + 1];
    for &(u, v) in g.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut bags = Vec::with_capacity(n);
    let mut tree_edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] > i).collect();
        for (a, &x) in later.iter().enumerate() {
            for &y in &later[a + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        match later.iter().map(|&w| pos[w]).min() {
            Some(p) => tree_edges.push((i, p)),
            None if i + 1 < n => tree_edges.push((i, i + 1)),
            None => {}
        }
        let mut bag = later;
        bag.push(v);
        bags.push(bag);
    }
    TreeDecomposition::new(bags, tree_edges)
}

/// Greedy minimum-degree elimination order.
pub fn min_degree_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n + 1];
    for &(u, v) in g.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut alive: Vec<bool> = vec![true; n + 1];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (1..=n).filter(|&v| alive[v]).min_by_key(|&v| adj[v].len()).expect("vertex left");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (a, &x) in nb.iter().enumerate() {
            adj[x].remove(&v);
            for &y in &nb[a + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Decomposition from the minimum-degree heuristic.
pub fn heuristic_td(g: &Graph) -> TreeDecomposition {
    elimination_td(g, &min_degree_order(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::graph::named;
    use crate::instance::validate_td;

    #[test]
    fn random_instances_are_valid() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 12);
            let k = 1 + (seed as usize % 4);
            let inst = random_partial_ktree(n, k, seed);
            let w = validate_td(&inst.td, &inst.graph).unwrap();
            assert!(w <= k);
            assert!(inst.graph.is_connected());
            assert!(!inst.terminals.is_empty());
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = random_partial_ktree(9, 3, 7);
        let b = random_partial_ktree(9, 3, 7);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.td, b.td);
        assert_eq!(a.terminals, b.terminals);
    }

    #[test]
    fn named_graph_decompositions() {
        let cases = [
            (named::complete(4), 3),
            (named::complete(5), 4),
            (named::complete_bipartite(3, 3), 3),
            (named::cycle(5), 2),
            (named::path(6), 1),
        ];
        for (g, w) in cases {
            assert_eq!(validate_td(&heuristic_td(&g), &g), Ok(w));
        }
        let p = named::petersen();
        let w = validate_td(&heuristic_td(&p), &p).unwrap();
        assert!((4..=5).contains(&w));
    }

    #[test]
    fn disconnected_graphs_still_give_trees() {
        let g = Graph::new(4, &[(1, 2)]).unwrap();
        let td = elimination_td(&g, &[1, 2, 3, 4]);
        assert_eq!(validate_td(&td, &g), Ok(1));
    }
}
