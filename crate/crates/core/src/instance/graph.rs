use super::InstanceError;

/// Simple undirected graph on vertices `1..=n`; edge ids are positions in
/// `edges`, and every edge is stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalising each edge to `u < v`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph, InstanceError> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(InstanceError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(InstanceError::Loop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(InstanceError::DuplicateEdge(e.0, e.1));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    /// Incidence entry `a_{v,e}`: `+1` at the smaller endpoint, `-1` at the
    /// larger one, `0` otherwise.
    pub fn incidence(&self, v: usize, e: usize) -> i32 {
        let (a, b) = self.edges[e];
        if v == a {
            1
        } else if v == b {
            -1
        } else {
            0
        }
    }

    /// Neighbour lists indexed by vertex id (index 0 unused).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1];
        seen[1] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}

/// Small named graphs used by examples and tests.
pub mod named {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).expect("valid")
    }

    pub fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (1..=n).map(|u| (u, u % n + 1)).collect();
        Graph::new(n, &e).expect("valid")
    }

    pub fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|u| (u, u + 1)).collect();
        Graph::new(n, &e).expect("valid")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut e = Vec::new();
        for u in 1..=a {
            for v in a + 1..=a + b {
                e.push((u, v));
            }
        }
        Graph::new(a + b, &e).expect("valid")
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i + 1, (i + 1) % 5 + 1));
            e.push((i + 1, i + 6));
            e.push((i + 6, (i + 2) % 5 + 6));
        }
        Graph::new(10, &e).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_and_rejects() {
        let g = Graph::new(3, &[(2, 1), (3, 2)]).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (2, 3)]);
        assert_eq!(g.incidence(1, 0), 1);
        assert_eq!(g.incidence(2, 0), -1);
        assert_eq!(g.incidence(3, 0), 0);
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(InstanceError::Loop(1)));
        assert_eq!(Graph::new(3, &[(1, 2), (2, 1)]), Err(InstanceError::DuplicateEdge(1, 2)));
        assert!(matches!(Graph::new(3, &[(1, 4)]), Err(InstanceError::VertexOutOfRange { .. })));
    }

    #[test]
    fn named_graphs() {
        assert_eq!(named::complete(5).m(), 10);
        assert_eq!(named::cycle(5).m(), 5);
        assert_eq!(named::complete_bipartite(3, 3).m(), 9);
        let p = named::petersen();
        assert_eq!(p.m(), 15);
        assert!(p.adjacency().iter().skip(1).all(|a| a.len() == 3));
        assert!(p.is_connected());
        assert!(!Graph::new(3, &[(1, 2)]).unwrap().is_connected());
    }
}
