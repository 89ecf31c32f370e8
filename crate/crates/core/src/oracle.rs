//! Brute-force reference counters, independent of the DP machinery.
//!
//! These enumerate objects directly and are only meant for small inputs; each
//! entry point enforces a size cap.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::instance::{Graph, NiceDecomposition};

pub const STEINER_MAX_EDGES: usize = 20;
pub const STEINER_MAX_VERTICES: usize = 16;
pub const HAMILTONIAN_MAX_VERTICES: usize = 14;
pub const STATE_MAX_VERTICES: usize = 8;
pub const STATE_MAX_EDGES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{what} is {size}, oracle limit is {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("terminal set is empty")]
    NoTerminals,
}

fn cap(what: &'static str, size: usize, cap: usize) -> Result<(), OracleError> {
    if size > cap {
        return Err(OracleError::TooLarge { what, size, cap });
    }
    Ok(())
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// Number of trees in `g` that contain every terminal, indexed by edge count
/// (entries `0..n`). A single vertex counts as a tree with no edges.
pub fn brute_count_steiner(g: &Graph, terminals: &[usize]) -> Result<Vec<u64>, OracleError> {
    if terminals.is_empty() {
        return Err(OracleError::NoTerminals);
    }
    cap("edge count", g.m(), STEINER_MAX_EDGES)?;
    cap("vertex count", g.n(), STEINER_MAX_VERTICES)?;
    let n = g.n();
    let mut counts = vec![0u64; n.max(1)];
    let mut k = terminals.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() == 1 {
        counts[0] = 1;
    }
    let m = g.m();
    'subsets: for x in 1usize..1 << m {
        let mut uf = UnionFind((0..=n).collect());
        let mut touched = vec![false; n + 1];
        for e in (0..m).filter(|e| x >> e & 1 == 1) {
            let (u, v) = g.edge(e);
            touched[u] = true;
            touched[v] = true;
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                continue 'subsets;
            }
            uf.0[ru] = rv;
        }
        if k.iter().any(|&t| !touched[t]) {
            continue;
        }
        let vs: Vec<usize> = (1..=n).filter(|&v| touched[v]).collect();
        let r = uf.find(vs[0]);
        if vs.iter().all(|&v| uf.find(v) == r) {
            counts[x.count_ones() as usize] += 1;
        }
    }
    Ok(counts)
}

/// Same quantity as [`brute_count_steiner`], computed per vertex set: the
/// trees with vertex set `Y ⊇ K` are the spanning trees of `G[Y]`, counted
/// by the matrix-tree theorem. Reaches graphs with many edges.
pub fn kirchhoff_count_steiner(g: &Graph, terminals: &[usize]) -> Result<Vec<BigInt>, OracleError> {
    if terminals.is_empty() {
        return Err(OracleError::NoTerminals);
    }
    let n = g.n();
    cap("vertex count", n, STEINER_MAX_VERTICES)?;
    let must: usize = terminals.iter().map(|&t| 1 << (t - 1)).sum();
    let mut counts = vec![BigInt::zero(); n.max(1)];
    let adj = g.adjacency();
    for y in 1usize..1 << n {
        if y & must != must {
            continue;
        }
        let vs: Vec<usize> = bits(y).map(|i| i + 1).collect();
        // Laplacian of G[Y] without its first row and column
        let k = vs.len() - 1;
        let mut lap = vec![vec![BigInt::zero(); k]; k];
        for (i, &v) in vs.iter().enumerate().skip(1) {
            for &w in &adj[v] {
                if y >> (w - 1) & 1 == 0 {
                    continue;
                }
                lap[i - 1][i - 1] += 1;
                if let Some(j) = vs.iter().position(|&x| x == w).filter(|&j| j > 0) {
                    lap[i - 1][j - 1] -= 1;
                }
            }
        }
        counts[k] += determinant(lap);
    }
    Ok(counts)
}

/// Fraction-free (Bareiss) determinant.
fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        sign
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// Number of Hamiltonian cycles (as edge sets), by path counting over
/// vertex subsets.
pub fn brute_count_hamiltonian(g: &Graph) -> Result<u128, OracleError> {
    let n = g.n();
    cap("vertex count", n, HAMILTONIAN_MAX_VERTICES)?;
    if n < 3 {
        return Ok(0);
    }
    let adj = adjacency_masks(g);
    // paths from vertex 0 (id 1); bit i is vertex i + 1
    let full = (1usize << n) - 1;
    let mut paths = vec![0u128; (1 << n) * n];
    paths[n] = 1; // mask {0}, end 0
    for mask in 1..=full {
        if mask & 1 == 0 {
            continue;
        }
        for end in 0..n {
            let c = paths[mask * n + end];
            if c == 0 {
                continue;
            }
            let mut next = adj[end] & !mask;
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                paths[(mask | 1 << w) * n + w] += c;
            }
        }
    }
    let closing: u128 = (1..n).filter(|&v| adj[v] & 1 == 1).map(|v| paths[full * n + v]).sum();
    Ok(closing / 2)
}

/// Same count by enumerating permutations; for cross-checking on tiny graphs.
pub fn permutation_count_hamiltonian(g: &Graph) -> Result<u128, OracleError> {
    let n = g.n();
    cap("vertex count", n, 9)?;
    if n < 3 {
        return Ok(0);
    }
    let adj = adjacency_masks(g);
    fn rec(adj: &[usize], path: &mut Vec<usize>, used: usize, n: usize) -> u128 {
        let last = *path.last().expect("nonempty");
        if path.len() == n {
            return u128::from(adj[last] & 1 == 1);
        }
        let mut total = 0;
        for w in 1..n {
            if used >> w & 1 == 0 && adj[last] >> w & 1 == 1 {
                path.push(w);
                total += rec(adj, path, used | 1 << w, n);
                path.pop();
            }
        }
        total
    }
    Ok(rec(&adj, &mut vec![0], 1, n) / 2)
}

fn adjacency_masks(g: &Graph) -> Vec<usize> {
    let mut adj = vec![0usize; g.n()];
    for &(u, v) in g.edges() {
        adj[u - 1] |= 1 << (v - 1);
        adj[v - 1] |= 1 << (u - 1);
    }
    adj
}

/// How the maps from chosen edges to vertices are read in the state
/// definitions: as bijections onto the vertex set, or as injections into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapReading {
    #[default]
    Bijection,
    Injection,
}

/// Steiner state key: (size of the chosen vertex set, code per bag position).
/// Codes: 0 = not chosen, 1 = chosen, 2 = in `S2` only, 3 = in `S1` only,
/// 4 = in both.
pub type SteinerKey = (usize, Vec<u8>);

/// Hamiltonian state key: `(degree, s1, s2)` per bag position.
pub type HamiltonianKey = Vec<(u8, u8, u8)>;

/// Local view of a subtree: vertices indexed by position in the global
/// vertex order, edges by position in the global edge order.
struct Local {
    /// `V_x` sorted by vertex order.
    vertices: Vec<usize>,
    /// Mask of bag vertices and their local indices in bag order.
    bag_mask: usize,
    bag_local: Vec<usize>,
    /// Endpoints (local) and incidence signs of `E_x` in edge order.
    edges: Vec<[(usize, i128); 2]>,
}

impl Local {
    fn new(g: &Graph, nd: &NiceDecomposition, node: usize) -> Result<Local, OracleError> {
        let vertices = nd.subtree_vertices(node);
        let es = nd.subtree_edges(node);
        cap("subtree vertex count", vertices.len(), STATE_MAX_VERTICES)?;
        cap("subtree edge count", es.len(), STATE_MAX_EDGES)?;
        let local = |v: usize| vertices.iter().position(|&w| w == v).expect("vertex in subtree");
        let bag_local: Vec<usize> = nd.node(node).bag.iter().map(|&v| local(v)).collect();
        let bag_mask = bag_local.iter().fold(0, |m, &i| m | 1 << i);
        let edges = es
            .iter()
            .map(|&e| {
                let (u, v) = g.edge(e);
                [(local(u), i128::from(g.incidence(u, e))), (local(v), i128::from(g.incidence(v, e)))]
            })
            .collect();
        Ok(Local {
            vertices,
            bag_mask,
            bag_local,
            edges,
        })
    }

    fn local_of(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Signed sums over maps `f` from the edges in `chosen` (in edge order)
    /// into `target`, with `f(e)` an endpoint of `e`, grouped by image set:
    /// `out[U] = sum over injective f with image U of sgn(f) * prod a_{f(e),e}`.
    fn maps_by_image(&self, chosen: &[usize], target: usize) -> Vec<i128> {
        let size = 1 << self.vertices.len();
        let mut dp = vec![0i128; size];
        dp[0] = 1;
        for &e in chosen {
            let mut next = vec![0i128; size];
            for (used, &val) in dp.iter().enumerate() {
                if val == 0 {
                    continue;
                }
                for &(w, a) in &self.edges[e] {
                    if target >> w & 1 == 0 || used >> w & 1 == 1 {
                        continue;
                    }
                    let above = (used >> (w + 1)).count_ones();
                    let s = if above % 2 == 0 { a } else { -a };
                    next[used | 1 << w] += s * val;
                }
            }
            dp = next;
        }
        dp
    }

    /// Value of the map sum for codomain `t` under `reading`.
    fn map_sum(dp: &[i128], t: usize, reading: MapReading) -> i128 {
        match reading {
            MapReading::Bijection => dp[t],
            MapReading::Injection => crate::subsetfn::submasks(t).map(|u| dp[u]).sum(),
        }
    }
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |i| mask >> i & 1 == 1)
}

/// Subsets of `mask`, expressed as masks.
fn subsets(mask: usize) -> Vec<usize> {
    crate::subsetfn::submasks(mask).collect()
}

/// Nonzero entries of the Steiner table of `node`, evaluated from the state
/// definition by enumeration.
pub fn steiner_state_definition(
    g: &Graph,
    terminals: &[usize],
    nd: &NiceDecomposition,
    node: usize,
    reading: MapReading,
) -> Result<HashMap<SteinerKey, i128>, OracleError> {
    let v1 = *terminals.iter().min().ok_or(OracleError::NoTerminals)?;
    let loc = Local::new(g, nd, node)?;
    let nv = loc.vertices.len();
    let required = terminals.iter().filter_map(|&t| loc.local_of(t)).fold(0, |m, i| m | 1 << i);
    let v1_mask = loc.local_of(v1).map_or(0, |i| 1 << i);
    let mut out: HashMap<SteinerKey, i128> = HashMap::new();
    for y in 0usize..1 << nv {
        if y & required != required {
            continue;
        }
        let a = y & loc.bag_mask & !v1_mask;
        let f = y & !loc.bag_mask & !v1_mask;
        let inside: Vec<usize> = (0..loc.edges.len())
            .filter(|&e| loc.edges[e].iter().all(|&(w, _)| y >> w & 1 == 1))
            .collect();
        for x in 0usize..1 << inside.len() {
            let chosen: Vec<usize> = bits(x).map(|i| inside[i]).collect();
            let dp = loc.maps_by_image(&chosen, f | a);
            for s1 in subsets(a) {
                let d1 = Local::map_sum(&dp, f | s1, reading);
                if d1 == 0 {
                    continue;
                }
                for s2 in subsets(a) {
                    let d2 = Local::map_sum(&dp, f | s2, reading);
                    if d2 == 0 {
                        continue;
                    }
                    let code = loc
                        .bag_local
                        .iter()
                        .map(|&w| {
                            if y >> w & 1 == 0 {
                                0
                            } else {
                                1 + (s2 >> w & 1) as u8 + 2 * (s1 >> w & 1) as u8
                            }
                        })
                        .collect();
                    *out.entry((y.count_ones() as usize, code)).or_insert(0) += d1 * d2;
                }
            }
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Nonzero entries of the Hamiltonian table of `node` (with distinguished
/// vertex 1), evaluated from the state definition by enumeration. Only
/// states the DP represents are reported: a bag vertex other than 1 of
/// degree 2 must be in both `S1` and `S2`; vertex 1 is never in either.
pub fn hamiltonian_state_definition(
    g: &Graph,
    nd: &NiceDecomposition,
    node: usize,
    reading: MapReading,
) -> Result<HashMap<HamiltonianKey, i128>, OracleError> {
    let loc = Local::new(g, nd, node)?;
    let nv = loc.vertices.len();
    let v1_mask = loc.local_of(1).map_or(0, |i| 1 << i);
    let forgotten = ((1 << nv) - 1) & !loc.bag_mask;
    let a = loc.bag_mask & !v1_mask;
    let f = forgotten & !v1_mask;
    let m = loc.edges.len();
    let mut out: HashMap<HamiltonianKey, i128> = HashMap::new();
    for x in 0usize..1 << m {
        let mut deg = vec![0u8; nv];
        for e in bits(x) {
            for &(w, _) in &loc.edges[e] {
                deg[w] += 1;
            }
        }
        if deg.iter().any(|&d| d > 2) || bits(forgotten).any(|w| deg[w] != 2) {
            continue;
        }
        let xs: Vec<usize> = bits(x).collect();
        for sub in 0usize..1 << xs.len() {
            let chosen: Vec<usize> = bits(sub).map(|i| xs[i]).collect();
            let dp = loc.maps_by_image(&chosen, f | a);
            for s1 in subsets(a) {
                let d1 = Local::map_sum(&dp, f | s1, reading);
                if d1 == 0 {
                    continue;
                }
                for s2 in subsets(a) {
                    let d2 = Local::map_sum(&dp, f | s2, reading);
                    if d2 == 0 {
                        continue;
                    }
                    let key: HamiltonianKey = loc
                        .bag_local
                        .iter()
                        .map(|&w| (deg[w], (s1 >> w & 1) as u8, (s2 >> w & 1) as u8))
                        .collect();
                    let dropped = loc
                        .bag_local
                        .iter()
                        .zip(&key)
                        .any(|(&w, &(d, p, q))| d == 2 && (p, q) != (1, 1) && 1 << w != v1_mask);
                    if dropped {
                        continue;
                    }
                    *out.entry(key).or_insert(0) += d1 * d2;
                }
            }
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kirchhoff_matches_enumeration() {
        for seed in 0..30 {
            let inst = crate::gen::random_partial_ktree(2 + seed as usize % 7, 1 + seed as usize % 3, 40 + seed);
            if inst.graph.m() > STEINER_MAX_EDGES {
                continue;
            }
            let want: Vec<BigInt> = brute_count_steiner(&inst.graph, &inst.terminals).unwrap().into_iter().map(BigInt::from).collect();
            assert_eq!(kirchhoff_count_steiner(&inst.graph, &inst.terminals).unwrap(), want, "seed {seed}");
        }
        // spanning trees of K6: 6^4
        let k6 = named::complete(6);
        assert_eq!(kirchhoff_count_steiner(&k6, &[1, 2, 3, 4, 5, 6]).unwrap()[5], BigInt::from(1296));
    }
    use crate::instance::graph::named;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn steiner_small_graphs() {
        let k4 = named::complete(4);
        // spanning trees of K4: 16; trees on 3 of 4 vertices containing {1,2}
        assert_eq!(brute_count_steiner(&k4, &[1, 2, 3, 4]).unwrap(), vec![0, 0, 0, 16]);
        let c = brute_count_steiner(&k4, &[1, 2]).unwrap();
        assert_eq!(c, vec![0, 1, 2 * 3, 16]);
        assert_eq!(brute_count_steiner(&k4, &[3]).unwrap(), vec![1, 3, 9, 16]);
        let p = named::path(5);
        assert_eq!(brute_count_steiner(&p, &[2, 4]).unwrap(), vec![0, 0, 1, 2, 1]);
        assert!(brute_count_steiner(&p, &[]).is_err());
    }

    #[test]
    fn cayley_formula() {
        for n in 2..=6u64 {
            let g = named::complete(n as usize);
            let all: Vec<usize> = (1..=n as usize).collect();
            let c = brute_count_steiner(&g, &all).unwrap();
            assert_eq!(c[n as usize - 1], n.pow(n as u32 - 2));
            // trees through vertex 1 with j vertices: C(n-1, j-1) * j^(j-2)
            let one = brute_count_steiner(&g, &[1]).unwrap();
            for j in 2..=n {
                assert_eq!(one[j as usize - 1], binom(n - 1, j - 1) * j.pow(j as u32 - 2));
            }
        }
    }

    #[test]
    fn hamiltonian_named_graphs() {
        assert_eq!(brute_count_hamiltonian(&named::complete(5)).unwrap(), 12);
        assert_eq!(brute_count_hamiltonian(&named::complete(4)).unwrap(), 3);
        assert_eq!(brute_count_hamiltonian(&named::complete_bipartite(3, 3)).unwrap(), 6);
        assert_eq!(brute_count_hamiltonian(&named::cycle(7)).unwrap(), 1);
        assert_eq!(brute_count_hamiltonian(&named::path(4)).unwrap(), 0);
        assert_eq!(brute_count_hamiltonian(&named::petersen()).unwrap(), 0);
        assert_eq!(brute_count_hamiltonian(&named::complete(2)).unwrap(), 0);
        // (n-1)!/2
        assert_eq!(brute_count_hamiltonian(&named::complete(10)).unwrap(), 181_440);
    }

    #[test]
    fn permutation_count_agrees() {
        for seed in 0..30 {
            let inst = crate::gen::random_partial_ktree(3 + seed as usize % 6, 1 + seed as usize % 4, seed);
            assert_eq!(
                brute_count_hamiltonian(&inst.graph).unwrap(),
                permutation_count_hamiltonian(&inst.graph).unwrap()
            );
        }
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            brute_count_hamiltonian(&named::cycle(15)),
            Err(OracleError::TooLarge { .. })
        ));
        assert!(matches!(
            brute_count_steiner(&named::complete(7), &[1]),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn root_state_counts_trees_and_cycles() {
        use crate::gen::heuristic_td;
        use crate::instance::make_nice;
        let g = named::complete(4);
        let nd = make_nice(&heuristic_td(&g), &g).unwrap();
        let st = steiner_state_definition(&g, &[1, 3], &nd, nd.root(), MapReading::Bijection).unwrap();
        let brute = brute_count_steiner(&g, &[1, 3]).unwrap();
        for (i, &c) in brute.iter().enumerate() {
            assert_eq!(st.get(&(i + 1, vec![])).copied().unwrap_or(0), i128::from(c));
        }
        let ham = hamiltonian_state_definition(&g, &nd, nd.root(), MapReading::Bijection).unwrap();
        assert_eq!(ham.get(&vec![]).copied(), Some(4 * 3));
    }

    #[test]
    fn injection_reading_overcounts() {
        use crate::gen::heuristic_td;
        use crate::instance::make_nice;
        let g = named::complete(4);
        let nd = make_nice(&heuristic_td(&g), &g).unwrap();
        let st = steiner_state_definition(&g, &[1, 3], &nd, nd.root(), MapReading::Injection).unwrap();
        let brute = brute_count_steiner(&g, &[1, 3]).unwrap();
        let differs = brute
            .iter()
            .enumerate()
            .any(|(i, &c)| st.get(&(i + 1, vec![])).copied().unwrap_or(0) != i128::from(c));
        assert!(differs);
    }
}
