//! Counting Hamiltonian cycles.
//!
//! Vertex 1 is the distinguished vertex `v1`. The table of a node `x` holds,
//! per bag vertex, a degree and two flags `(deg, s1, s2)`; an entry sums over
//! edge sets `X ⊆ E_x` (degree 2 at forgotten vertices, `deg` on the bag),
//! subsets `S ⊆ X`, and bijections `f_k` from `S` onto the forgotten
//! vertices plus `S_k`, minus `v1`, of `sgn f1 · sgn f2 · Π a_{f1(e),e}
//! a_{f2(e),e}`. The root value is `n` times the number of Hamiltonian
//! cycles (matrix-tree theorem on each 2-regular spanning subgraph).
//!
//! Only six triples per vertex are kept, stored as one base-6 digit
//! `k`: [`ORIG`]`[k]`. The same digit read through [`TRANS`] gives the
//! set-triple form `(A, B, C)` used by the fast join. `v1` is never in
//! `S1` or `S2`, so its position stores just the degree (radix 3).

pub mod oslash;
pub mod tau;

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::clifford::pauli::PauliTable;
use crate::dp::{check_capacity, run, CountError, Transitions};
use crate::instance::{Graph, NiceDecomposition};
use crate::meter::Buf;
use crate::nsc::Mode;
use crate::oracle::HamiltonianKey;
use crate::ring::Ring;

pub use oslash::{mu_forward, mu_inverse, oslash, oslash_naive, OslashAccumulator};
pub use tau::{tau_forward, tau_inverse, HamFactorFamily};

/// The allowed `(deg, s1, s2)` triples, by digit.
pub const ORIG: [(u8, u8, u8); 6] = [(0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1), (2, 1, 1)];
/// The translated `(A, B, C)` membership triples, by digit.
pub const TRANS: [(u8, u8, u8); 6] = [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 1)];

pub fn orig_code(deg: u8, s1: u8, s2: u8) -> Option<u8> {
    ORIG.iter().position(|&t| t == (deg, s1, s2)).map(|k| k as u8)
}

pub fn trans_code(a: u8, b: u8, c: u8) -> Option<u8> {
    TRANS.iter().position(|&t| t == (a, b, c)).map(|k| k as u8)
}

pub fn trans_triple(k: u8) -> (u8, u8, u8) {
    TRANS[k as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("triple {0:?} is not an allowed state")]
pub struct DisallowedTriple(pub (u8, u8, u8));

/// `(deg, s1, s2)` to `(A, B, C)`.
pub fn translate(t: (u8, u8, u8)) -> Result<(u8, u8, u8), DisallowedTriple> {
    orig_code(t.0, t.1, t.2).map(|k| TRANS[k as usize]).ok_or(DisallowedTriple(t))
}

/// `(A, B, C)` to `(deg, s1, s2)`.
pub fn untranslate(t: (u8, u8, u8)) -> Result<(u8, u8, u8), DisallowedTriple> {
    trans_code(t.0, t.1, t.2).map(|k| ORIG[k as usize]).ok_or(DisallowedTriple(t))
}

/// Mixed-radix packing of a bag: radix 3 at `v1`, 6 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    b: usize,
    v1: Option<usize>,
    place: Vec<usize>,
    len: usize,
}

impl Layout {
    pub fn new(b: usize, v1: Option<usize>) -> Layout {
        let mut place = Vec::with_capacity(b);
        let mut len = 1;
        for p in 0..b {
            place.push(len);
            len *= if Some(p) == v1 { 3 } else { 6 };
        }
        Layout { b, v1, place, len }
    }

    fn radix(&self, p: usize) -> usize {
        if Some(p) == self.v1 {
            3
        } else {
            6
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn digit(&self, code: usize, p: usize) -> usize {
        code / self.place[p] % self.radix(p)
    }

    /// `(deg, s1, s2)` at position `p`.
    pub fn triple(&self, code: usize, p: usize) -> (u8, u8, u8) {
        let d = self.digit(code, p);
        if Some(p) == self.v1 {
            (d as u8, 0, 0)
        } else {
            ORIG[d]
        }
    }

    fn with_digit(&self, code: usize, p: usize, d: usize) -> usize {
        code - self.digit(code, p) * self.place[p] + d * self.place[p]
    }

    /// Digit for a triple at position `p`, if representable.
    fn encode(&self, p: usize, t: (u8, u8, u8)) -> Option<usize> {
        if Some(p) == self.v1 {
            (t.1 == 0 && t.2 == 0 && t.0 <= 2).then_some(t.0 as usize)
        } else {
            orig_code(t.0, t.1, t.2).map(usize::from)
        }
    }

    /// Number of non-`v1` positions.
    fn universe_len(&self) -> usize {
        self.b - usize::from(self.v1.is_some())
    }

    /// Entries with `v1` at degree `dv`, as a base-6 table over the other
    /// positions.
    fn split<T: Clone>(&self, data: &[T], dv: usize) -> Vec<T> {
        match self.v1 {
            None => data.to_vec(),
            Some(p) => {
                let low = tau::pow6(p);
                (0..tau::pow6(self.b - 1))
                    .map(|i| data[i % low + dv * low + i / low * low * 3].clone())
                    .collect()
            }
        }
    }

    fn merge_index(&self, i: usize, dv: usize) -> usize {
        match self.v1 {
            None => i,
            Some(p) => {
                let low = tau::pow6(p);
                i % low + dv * low + i / low * low * 3
            }
        }
    }
}

/// Dense Hamiltonian table for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct HamTable<T> {
    layout: Layout,
    data: Buf<T>,
}

impl<T: Clone> HamTable<T> {
    fn zeros<R: Ring<Elem = T>>(ring: &R, layout: Layout) -> HamTable<T> {
        let data = Buf::new(ring.zeros(layout.len));
        HamTable { layout, data }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Nonzero entries keyed like [`crate::oracle::hamiltonian_state_definition`].
    pub fn entries<R: Ring<Elem = T>>(&self, ring: &R) -> HashMap<HamiltonianKey, BigInt> {
        let mut out = HashMap::new();
        for (c, v) in self.data.iter().enumerate() {
            if !ring.is_zero(v) {
                let key = (0..self.layout.b).map(|p| self.layout.triple(c, p)).collect();
                out.insert(key, ring.to_bigint(v));
            }
        }
        out
    }

    /// Random table over `layout`.
    pub fn random<R: Ring<Elem = T>>(ring: &R, layout: Layout, rng: &mut impl rand::Rng) -> HamTable<T> {
        let data = (0..layout.len).map(|_| ring.from_i64(rng.gen_range(-3..=3))).collect();
        HamTable { layout, data: Buf::new(data) }
    }

    /// Adds one to a single entry; used to check that verification notices.
    pub fn corrupt<R: Ring<Elem = T>>(&mut self, ring: &R) {
        let one = ring.one();
        ring.add_assign(&mut self.data[0], &one);
    }
}

fn layout_of(nd: &NiceDecomposition, node: usize) -> Layout {
    Layout::new(nd.node(node).bag.len(), nd.bag_position(node, 1))
}

/// Hamiltonian-cycle transitions for a fixed graph.
pub struct HamiltonianDp<'a, R: Ring> {
    ring: &'a R,
    g: &'a Graph,
    join: Mode,
}

impl<'a, R: Ring> HamiltonianDp<'a, R> {
    pub fn new(ring: &'a R, g: &'a Graph, join: Mode) -> Self {
        HamiltonianDp { ring, g, join }
    }

    pub fn join_naive(&self, y: &HamTable<R::Elem>, z: &HamTable<R::Elem>) -> HamTable<R::Elem> {
        let ring = self.ring;
        let lay = y.layout.clone();
        let mut out = HamTable::zeros(ring, lay.clone());
        // (out digit, y digit, z digit, s1 on y, s1 on z, s2 on y, s2 on z)
        let mut pairs = Vec::new();
        for (ky, &ty) in ORIG.iter().enumerate() {
            for (kz, &tz) in ORIG.iter().enumerate() {
                if ty.1 & tz.1 != 0 || ty.2 & tz.2 != 0 {
                    continue;
                }
                if let Some(k) = orig_code(ty.0 + tz.0, ty.1 | tz.1, ty.2 | tz.2) {
                    pairs.push((k as usize, ky, kz, ty.1, tz.1, ty.2, tz.2));
                }
            }
        }
        let v1_pairs: Vec<_> = (0..3)
            .flat_map(|a| (0..3 - a).map(move |b| (a + b, a, b, 0, 0, 0, 0)))
            .collect();
        struct Walk {
            out: usize,
            cy: usize,
            cz: usize,
            z1: u32,
            z2: u32,
            parity: u32,
        }
        let mut stack = vec![(0usize, Walk { out: 0, cy: 0, cz: 0, z1: 0, z2: 0, parity: 0 })];
        while let Some((p, w)) = stack.pop() {
            if p == lay.b {
                let (a, c) = (&y.data[w.cy], &z.data[w.cz]);
                if ring.is_zero(a) || ring.is_zero(c) {
                    continue;
                }
                if w.parity % 2 == 1 {
                    ring.mul_sub_assign(&mut out.data[w.out], a, c);
                } else {
                    ring.mul_add_assign(&mut out.data[w.out], a, c);
                }
                continue;
            }
            let place = lay.place[p];
            let list = if Some(p) == lay.v1 { &v1_pairs } else { &pairs };
            for &(k, ky, kz, s1y, s1z, s2y, s2z) in list {
                let cy = w.cy + ky * place;
                if ring.is_zero(&y.data[cy % (place * lay.radix(p))]) && p + 1 == lay.b {
                    continue;
                }
                let mut parity = w.parity;
                if s1y == 1 {
                    parity += w.z1;
                }
                if s2y == 1 {
                    parity += w.z2;
                }
                stack.push((
                    p + 1,
                    Walk {
                        out: w.out + k * place,
                        cy,
                        cz: w.cz + kz * place,
                        z1: w.z1 + u32::from(s1z),
                        z2: w.z2 + u32::from(s2z),
                        parity,
                    },
                ));
            }
        }
        out
    }

    pub fn join_fast(&self, y: &HamTable<R::Elem>, z: &HamTable<R::Elem>) -> Result<HamTable<R::Elem>, CountError> {
        let ring = self.ring;
        let lay = y.layout.clone();
        let u = lay.universe_len();
        let degs = if lay.v1.is_some() { 3 } else { 1 };
        let fy: Vec<Vec<R::Elem>> = (0..degs).map(|d| lay.split(&y.data, d)).collect();
        let gz: Vec<Vec<R::Elem>> = (0..degs).map(|d| lay.split(&z.data, d)).collect();
        // |A| of each base-6 code
        let arank: Vec<usize> = (0..tau::pow6(u))
            .map(|mut i| {
                let mut r = 0;
                for _ in 0..u {
                    r += usize::from(TRANS[i % 6].0);
                    i /= 6;
                }
                r
            })
            .collect();
        let rank_slice = |f: &[R::Elem], r: usize| -> Option<Vec<R::Elem>> {
            let mut any = false;
            let s: Vec<R::Elem> = f
                .iter()
                .zip(&arank)
                .map(|(v, &a)| {
                    if a == r && !ring.is_zero(v) {
                        any = true;
                        v.clone()
                    } else {
                        ring.zero()
                    }
                })
                .collect();
            any.then_some(s)
        };
        let tables: Vec<PauliTable> = (0..=u).map(|d| PauliTable::new(2 * d)).collect();
        let mut out = HamTable::zeros(ring, lay.clone());
        for dv in 0..degs {
            for r in 0..=u {
                let mut sum: Option<HamFactorFamily<R::Elem>> = None;
                for (d1, fy_d1) in fy.iter().enumerate().take(dv + 1) {
                    let d2 = dv - d1;
                    for r1 in 0..=r {
                        let Some(fs) = rank_slice(fy_d1, r1) else { continue };
                        let Some(gs) = rank_slice(&gz[d2], r - r1) else { continue };
                        let tf = tau_forward(ring, &fs, u);
                        drop(fs);
                        let tg = tau_forward(ring, &gs, u);
                        drop(gs);
                        let s = sum.get_or_insert_with(|| HamFactorFamily::zeros(ring, u));
                        for dm in 0usize..1 << u {
                            let (pf, pg) = (tf.part(dm), tg.part(dm));
                            if pf.iter().all(|v| ring.is_zero(v)) || pg.iter().all(|v| ring.is_zero(v)) {
                                continue;
                            }
                            let d = dm.count_ones() as usize;
                            let mut acc = OslashAccumulator::new(ring, d, u - d, &tables[d]);
                            acc.add(ring, pf, pg, Mode::Fast)?;
                            for (slot, v) in s.part_mut(dm).iter_mut().zip(acc.finish(ring)) {
                                ring.add_assign(slot, &v);
                            }
                        }
                    }
                }
                if let Some(s) = sum {
                    let h = tau_inverse(ring, &s);
                    for (i, v) in h.into_iter().enumerate() {
                        if arank[i] == r {
                            out.data[lay.merge_index(i, dv)] = v;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

impl<R: Ring> Transitions for HamiltonianDp<'_, R> {
    type Table = HamTable<R::Elem>;

    fn leaf(&self, nd: &NiceDecomposition, node: usize) -> Result<Self::Table, CountError> {
        let mut t = HamTable::zeros(self.ring, layout_of(nd, node));
        t.data[0] = self.ring.one();
        Ok(t)
    }

    fn introduce_vertex(
        &self,
        nd: &NiceDecomposition,
        node: usize,
        v: usize,
        child: Self::Table,
    ) -> Result<Self::Table, CountError> {
        let lay = layout_of(nd, node);
        let p = nd.bag_position(node, v).expect("introduced vertex in bag");
        let place = lay.place[p];
        let radix = lay.radix(p);
        let mut out = HamTable::zeros(self.ring, lay);
        for (c, val) in child.data.iter().enumerate() {
            out.data[c % place + c / place * place * radix] = val.clone();
        }
        Ok(out)
    }

    fn introduce_edge(
        &self,
        nd: &NiceDecomposition,
        node: usize,
        e: usize,
        child: Self::Table,
    ) -> Result<Self::Table, CountError> {
        let ring = self.ring;
        let lay = child.layout.clone();
        let (u, v) = self.g.edge(e);
        let ends = [u, v].map(|w| {
            let p = nd.bag_position(node, w).expect("edge endpoint in bag");
            (p, self.g.incidence(w, e))
        });
        let [(pu, _), (pv, _)] = ends;
        let mut out = child.clone();
        for c in 0..lay.len {
            let (tu, tv) = (lay.triple(c, pu), lay.triple(c, pv));
            if tu.0 == 0 || tv.0 == 0 {
                continue;
            }
            let (mut s1, mut s2) = (0usize, 0usize);
            for p in 0..lay.b {
                let t = lay.triple(c, p);
                s1 |= usize::from(t.1) << p;
                s2 |= usize::from(t.2) << p;
            }
            let mut add = |nu: (u8, u8, u8), nv: (u8, u8, u8), sign: i32| {
                if let (Some(du), Some(dv)) = (lay.encode(pu, nu), lay.encode(pv, nv)) {
                    let from = lay.with_digit(lay.with_digit(c, pu, du), pv, dv);
                    let val = &child.data[from];
                    if !ring.is_zero(val) {
                        let s = ring.signed(val, sign);
                        ring.add_assign(&mut out.data[c], &s);
                    }
                }
            };
            // e in X but not in S
            add((tu.0 - 1, tu.1, tu.2), (tv.0 - 1, tv.1, tv.2), 1);
            // e in S with f1(e) = w1, f2(e) = w2
            for &(p1, a1) in &ends {
                if s1 >> p1 & 1 == 0 {
                    continue;
                }
                for &(p2, a2) in &ends {
                    if s2 >> p2 & 1 == 0 {
                        continue;
                    }
                    let (mut nu, mut nv) = ((tu.0 - 1, tu.1, tu.2), (tv.0 - 1, tv.1, tv.2));
                    if p1 == pu {
                        nu.1 = 0;
                    } else {
                        nv.1 = 0;
                    }
                    if p2 == pu {
                        nu.2 = 0;
                    } else {
                        nv.2 = 0;
                    }
                    let flips = (s1 >> (p1 + 1)).count_ones() + (s2 >> (p2 + 1)).count_ones();
                    let sign = a1 * a2 * if flips % 2 == 0 { 1 } else { -1 };
                    add(nu, nv, sign);
                }
            }
        }
        Ok(out)
    }

    fn forget(&self, nd: &NiceDecomposition, node: usize, v: usize, child: Self::Table) -> Result<Self::Table, CountError> {
        let lay = layout_of(nd, node);
        let child_node = nd.node(node).children[0];
        let p = nd.bag_position(child_node, v).expect("forgotten vertex in child bag");
        let cl = &child.layout;
        let place = cl.place[p];
        let radix = cl.radix(p);
        // degree 2 and, unless v = v1, in both S1 and S2
        let keep = if radix == 3 { 2 } else { 5 };
        let mut out = HamTable::zeros(self.ring, lay);
        for (c, slot) in out.data.iter_mut().enumerate() {
            *slot = child.data[c % place + keep * place + c / place * place * radix].clone();
        }
        Ok(out)
    }

    fn join(
        &self,
        _: &NiceDecomposition,
        _: usize,
        left: Self::Table,
        right: Self::Table,
    ) -> Result<Self::Table, CountError> {
        match self.join {
            Mode::Naive => Ok(self.join_naive(&left, &right)),
            Mode::Fast => self.join_fast(&left, &right),
        }
    }
}

/// Number of Hamiltonian cycles of `g`.
pub fn count_hamiltonian<R: Ring>(ring: &R, g: &Graph, nd: &NiceDecomposition, join: Mode) -> Result<R::Elem, CountError> {
    count_hamiltonian_traced(ring, g, nd, join, &mut |_, _| {})
}

/// [`count_hamiltonian`] with a hook that sees every node table.
pub fn count_hamiltonian_traced<R: Ring>(
    ring: &R,
    g: &Graph,
    nd: &NiceDecomposition,
    join: Mode,
    hook: &mut dyn FnMut(usize, &mut HamTable<R::Elem>),
) -> Result<R::Elem, CountError> {
    if g.n() < 3 {
        return Err(CountError::TooFewVertices(g.n()));
    }
    check_capacity(nd)?;
    let dp = HamiltonianDp::new(ring, g, join);
    let root = run(&dp, nd, hook)?;
    let total = &root.data[0];
    ring.div_exact(total, g.n() as u64)
        .ok_or_else(|| CountError::InexactDivision(ring.to_bigint(total).to_string(), g.n() as u64))
}
