//! Nice tree decompositions.
//!
//! Node ids are assigned in post-order, so every child has a smaller id than
//! its parent and every subtree occupies a contiguous id range.
//!
//! The decomposition also fixes the global vertex and edge orders used by all
//! sign computations. Edges are ordered by the id of their introduce node.
//! Vertices are ordered by the id of their (unique) forget node by default:
//! with that order every vertex forgotten below a node precedes every vertex
//! of the node's bag, which the join recurrences rely on.

use super::graph::Graph;
use super::td::{validate_td, TreeDecomposition, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(usize),
    /// Edge id in the graph.
    IntroduceEdge(usize),
    ForgetVertex(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Bag vertices, sorted by the global vertex order.
    pub bag: Vec<usize>,
}

/// How the global vertex order is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// By forget time (post-order id of the forget node).
    #[default]
    ForgetTime,
    /// By ascending vertex id.
    Ascending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
    vertex_rank: Vec<usize>,
    edge_rank: Vec<usize>,
    policy: OrderPolicy,
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, children: Vec<usize>, bag: Vec<usize>) -> usize {
        let id = self.nodes.len();
        for &c in &children {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(NiceNode {
            kind,
            parent: None,
            children,
            bag,
        });
        id
    }

    fn bag(&self, id: usize) -> &[usize] {
        &self.nodes[id].bag
    }

    fn introduce(&mut self, top: usize, v: usize) -> usize {
        let mut bag = self.bag(top).to_vec();
        let pos = bag.binary_search(&v).unwrap_err();
        bag.insert(pos, v);
        self.push(NodeKind::IntroduceVertex(v), vec![top], bag)
    }

    fn forget(&mut self, top: usize, v: usize) -> usize {
        let bag: Vec<usize> = self.bag(top).iter().copied().filter(|&w| w != v).collect();
        self.push(NodeKind::ForgetVertex(v), vec![top], bag)
    }

    /// Chain from a node whose bag is `from` to a node whose bag is `to`.
    fn chain(&mut self, mut top: usize, to: &[usize]) -> usize {
        let from = self.bag(top).to_vec();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            top = self.forget(top, v);
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            top = self.introduce(top, v);
        }
        top
    }

    fn introduce_edges(&mut self, mut top: usize, edges: &[usize]) -> usize {
        for &e in edges {
            let bag = self.bag(top).to_vec();
            top = self.push(NodeKind::IntroduceEdge(e), vec![top], bag);
        }
        top
    }
}

/// Nice decomposition with the default (forget-time) vertex order.
pub fn make_nice(td: &TreeDecomposition, g: &Graph) -> Result<NiceDecomposition, Violation> {
    make_nice_with(td, g, OrderPolicy::default())
}

pub fn make_nice_with(
    td: &TreeDecomposition,
    g: &Graph,
    policy: OrderPolicy,
) -> Result<NiceDecomposition, Violation> {
    validate_td(td, g)?;
    let nb = td.bags.len();
    let adj = td.neighbours();

    // Root the bag tree at bag 0.
    let mut parent = vec![usize::MAX; nb];
    let mut depth = vec![0usize; nb];
    let mut children = vec![Vec::new(); nb];
    let mut order = vec![0];
    parent[0] = 0;
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        let mut next: Vec<usize> = adj[b].iter().copied().filter(|&c| parent[c] == usize::MAX).collect();
        next.sort_unstable();
        for c in next {
            parent[c] = b;
            depth[c] = depth[b] + 1;
            children[b].push(c);
            order.push(c);
        }
        i += 1;
    }

    // Host each edge at the highest bag containing both endpoints.
    let mut hosted = vec![Vec::new(); nb];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let host = (0..nb)
            .filter(|&b| td.bags[b].binary_search(&u).is_ok() && td.bags[b].binary_search(&v).is_ok())
            .min_by_key(|&b| (depth[b], b))
            .expect("validated decomposition covers every edge");
        hosted[host].push(e);
    }

    let mut bld = Builder { nodes: Vec::new() };
    let mut acc: Vec<Option<usize>> = vec![None; nb];
    let mut stack = vec![(0usize, 0usize)];
    let mut top_of_root = None;
    while let Some(&mut (b, ref mut next_child)) = stack.last_mut() {
        if *next_child < children[b].len() {
            let c = children[b][*next_child];
            *next_child += 1;
            stack.push((c, 0));
            continue;
        }
        stack.pop();
        let mut top = match acc[b] {
            Some(t) => t,
            None => {
                let mut t = bld.push(NodeKind::Leaf, vec![], vec![]);
                for &v in &td.bags[b] {
                    t = bld.introduce(t, v);
                }
                t
            }
        };
        top = bld.introduce_edges(top, &hosted[b]);
        if b == 0 {
            top_of_root = Some(top);
            continue;
        }
        let p = parent[b];
        let chained = bld.chain(top, &td.bags[p]);
        acc[p] = Some(match acc[p] {
            None => chained,
            Some(prev) => {
                let bag = td.bags[p].clone();
                bld.push(NodeKind::Join, vec![prev, chained], bag)
            }
        });
    }
    let mut root = top_of_root.expect("root bag processed");
    for v in td.bags[0].clone() {
        root = bld.forget(root, v);
    }

    let mut nodes = bld.nodes;
    let mut vertex_rank = vec![usize::MAX; g.n() + 1];
    let mut edge_rank = vec![usize::MAX; g.m()];
    let mut next_vertex = 0;
    let mut next_edge = 0;
    for node in &nodes {
        match node.kind {
            NodeKind::ForgetVertex(v) if policy == OrderPolicy::ForgetTime => {
                vertex_rank[v] = next_vertex;
                next_vertex += 1;
            }
            NodeKind::IntroduceEdge(e) => {
                edge_rank[e] = next_edge;
                next_edge += 1;
            }
            _ => {}
        }
    }
    if policy == OrderPolicy::Ascending {
        for v in g.vertices() {
            vertex_rank[v] = v - 1;
        }
    }
    for node in &mut nodes {
        node.bag.sort_unstable_by_key(|&v| vertex_rank[v]);
    }
    Ok(NiceDecomposition {
        nodes,
        root,
        vertex_rank,
        edge_rank,
        policy,
    })
}

impl NiceDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn policy(&self) -> OrderPolicy {
        self.policy
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn max_bag(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    /// Position of `v` in the global vertex order.
    pub fn vertex_rank(&self, v: usize) -> usize {
        self.vertex_rank[v]
    }

    /// Position of edge `e` in the global edge order.
    pub fn edge_rank(&self, e: usize) -> usize {
        self.edge_rank[e]
    }

    /// Position of `v` in the bag of `node`.
    pub fn bag_position(&self, node: usize, v: usize) -> Option<usize> {
        let r = self.vertex_rank[v];
        self.nodes[node].bag.binary_search_by_key(&r, |&w| self.vertex_rank[w]).ok()
    }

    /// Node ids of the subtree rooted at `id` (a contiguous range).
    pub fn subtree(&self, id: usize) -> std::ops::RangeInclusive<usize> {
        let mut lo = id;
        while let Some(&c) = self.nodes[lo].children.first() {
            lo = c;
        }
        lo..=id
    }

    /// `V_x`: vertices in the bags of the subtree, sorted by vertex order.
    pub fn subtree_vertices(&self, id: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.subtree(id).flat_map(|i| self.nodes[i].bag.iter().copied()).collect();
        vs.sort_unstable_by_key(|&v| self.vertex_rank[v]);
        vs.dedup();
        vs
    }

    /// `E_x`: edges introduced in the subtree, sorted by edge order.
    pub fn subtree_edges(&self, id: usize) -> Vec<usize> {
        let mut es: Vec<usize> = self
            .subtree(id)
            .filter_map(|i| match self.nodes[i].kind {
                NodeKind::IntroduceEdge(e) => Some(e),
                _ => None,
            })
            .collect();
        es.sort_unstable_by_key(|&e| self.edge_rank[e]);
        es
    }

    /// The underlying (non-nice) decomposition: one bag per node.
    pub fn to_td(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (i, p)))
            .collect();
        TreeDecomposition::new(bags, edges)
    }

    /// Checks every niceness invariant; returns a description of the first
    /// failure.
    pub fn check(&self, g: &Graph) -> Result<(), String> {
        if let Err(v) = validate_td(&self.to_td(), g) {
            return Err(format!("not a tree decomposition: {v}"));
        }
        let root = &self.nodes[self.root];
        if !root.bag.is_empty() || root.parent.is_some() {
            return Err("root must have an empty bag and no parent".into());
        }
        let mut introduced = vec![0usize; g.m()];
        for (id, node) in self.nodes.iter().enumerate() {
            if id != self.root && node.parent.is_none() {
                return Err(format!("node {id} has no parent"));
            }
            if let Some(p) = node.parent {
                if p <= id || !self.nodes[p].children.contains(&id) {
                    return Err(format!("node {id} has inconsistent parent {p}"));
                }
            }
            if node.bag.windows(2).any(|w| self.vertex_rank[w[0]] >= self.vertex_rank[w[1]]) {
                return Err(format!("bag of node {id} is not sorted by vertex order"));
            }
            let child_bag = |k: usize| -> Result<&Vec<usize>, String> {
                if node.children.len() != k {
                    return Err(format!("node {id} has {} children", node.children.len()));
                }
                Ok(&self.nodes[node.children[0]].bag)
            };
            let sorted = |b: &[usize]| {
                let mut b = b.to_vec();
                b.sort_unstable();
                b
            };
            match node.kind {
                NodeKind::Leaf => {
                    if !node.children.is_empty() || !node.bag.is_empty() {
                        return Err(format!("leaf {id} must have an empty bag and no children"));
                    }
                }
                NodeKind::IntroduceVertex(v) => {
                    let cb = child_bag(1)?;
                    let mut expect = cb.clone();
                    expect.push(v);
                    if cb.contains(&v) || sorted(&expect) != sorted(&node.bag) {
                        return Err(format!("introduce node {id} does not add exactly vertex {v}"));
                    }
                }
                NodeKind::ForgetVertex(v) => {
                    let cb = child_bag(1)?;
                    let expect: Vec<usize> = cb.iter().copied().filter(|&w| w != v).collect();
                    if !cb.contains(&v) || sorted(&expect) != sorted(&node.bag) {
                        return Err(format!("forget node {id} does not drop exactly vertex {v}"));
                    }
                }
                NodeKind::IntroduceEdge(e) => {
                    let cb = child_bag(1)?;
                    let (u, v) = g.edge(e);
                    if cb != &node.bag || !node.bag.contains(&u) || !node.bag.contains(&v) {
                        return Err(format!("edge node {id} is malformed"));
                    }
                    introduced[e] += 1;
                }
                NodeKind::Join => {
                    if node.children.len() != 2 {
                        return Err(format!("join {id} has {} children", node.children.len()));
                    }
                    for &c in &node.children {
                        if self.nodes[c].bag != node.bag {
                            return Err(format!("join {id} child {c} has a different bag"));
                        }
                    }
                }
            }
        }
        if let Some(e) = introduced.iter().position(|&c| c != 1) {
            return Err(format!("edge {e} introduced {} times", introduced[e]));
        }
        Ok(())
    }
}
