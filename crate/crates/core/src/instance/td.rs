use super::graph::Graph;

/// Tree decomposition: bags (sorted vertex lists) and edges between bag
/// indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> TreeDecomposition {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        TreeDecomposition { bags, tree_edges }
    }

    /// Largest bag size minus one (`-1` is reported as 0 for empty input).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub(crate) fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// First violated decomposition property, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("decomposition has no bags")]
    NoBags,
    #[error("tree edge ({0}, {1}) refers to a missing bag")]
    BadTreeEdge(usize, usize),
    #[error("bag {bag} contains vertex {vertex}, which is not in the graph")]
    UnknownVertex { bag: usize, vertex: usize },
    #[error("bag tree is not connected: bags {0} and {1} are in different components")]
    DisconnectedTree(usize, usize),
    #[error("bag tree has a cycle through edge ({0}, {1})")]
    TreeCycle(usize, usize),
    #[error("vertex {0} is in no bag")]
    MissingVertex(usize),
    #[error("edge ({0}, {1}) is not covered by any bag")]
    UncoveredEdge(usize, usize),
    #[error("bags containing vertex {vertex} are disconnected: bags {a} and {b}")]
    DisconnectedVertex { vertex: usize, a: usize, b: usize },
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Width of `td` as a decomposition of `g`, or the first violation found.
pub fn validate_td(td: &TreeDecomposition, g: &Graph) -> Result<usize, Violation> {
    let nb = td.bags.len();
    if nb == 0 {
        return Err(Violation::NoBags);
    }
    for (i, bag) in td.bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v == 0 || v > g.n()) {
            return Err(Violation::UnknownVertex { bag: i, vertex: v });
        }
    }
    let mut dsu = Dsu::new(nb);
    for &(a, b) in &td.tree_edges {
        if a >= nb || b >= nb {
            return Err(Violation::BadTreeEdge(a, b));
        }
        if !dsu.union(a, b) {
            return Err(Violation::TreeCycle(a, b));
        }
    }
    if let Some(b) = (1..nb).find(|&b| dsu.find(b) != dsu.find(0)) {
        return Err(Violation::DisconnectedTree(0, b));
    }

    let mut holders = vec![Vec::new(); g.n() + 1];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders[v].push(i);
        }
    }
    if let Some(v) = g.vertices().find(|&v| holders[v].is_empty()) {
        return Err(Violation::MissingVertex(v));
    }
    for &(u, v) in g.edges() {
        let covered = td.bags.iter().any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
        if !covered {
            return Err(Violation::UncoveredEdge(u, v));
        }
    }
    for v in g.vertices() {
        let mut dsu = Dsu::new(nb);
        for &(a, b) in &td.tree_edges {
            if td.bags[a].binary_search(&v).is_ok() && td.bags[b].binary_search(&v).is_ok() {
                dsu.union(a, b);
            }
        }
        let first = holders[v][0];
        if let Some(&other) = holders[v].iter().find(|&&b| dsu.find(b) != dsu.find(first)) {
            return Err(Violation::DisconnectedVertex { vertex: v, a: first, b: other });
        }
    }
    Ok(td.width())
}
