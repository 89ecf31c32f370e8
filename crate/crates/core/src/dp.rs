//! Bottom-up evaluation over a nice decomposition.

use std::collections::HashMap;

use crate::instance::{NiceDecomposition, NodeKind};
use crate::nsc::NscError;

/// Largest bag the counters accept.
pub const MAX_BAG: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("terminal set is empty")]
    NoTerminals,
    #[error("terminal {0} is not a vertex of the graph")]
    TerminalOutOfRange(usize),
    #[error("graph has {0} vertices; need at least 3")]
    TooFewVertices(usize),
    #[error("bag of size {bag} exceeds the capacity limit of {cap}")]
    Capacity { bag: usize, cap: usize },
    #[error("decomposition does not match the graph: {0}")]
    Mismatch(String),
    #[error("final count {0} is not divisible by {1}")]
    InexactDivision(String, u64),
    #[error(transparent)]
    Nsc(#[from] NscError),
}

pub(crate) fn check_capacity(nd: &NiceDecomposition) -> Result<(), CountError> {
    let bag = nd.max_bag();
    if bag > MAX_BAG {
        return Err(CountError::Capacity { bag, cap: MAX_BAG });
    }
    Ok(())
}

/// Node transitions of a table-based DP.
pub trait Transitions {
    type Table;

    fn leaf(&self, nd: &NiceDecomposition, node: usize) -> Result<Self::Table, CountError>;
    fn introduce_vertex(
        &self,
        nd: &NiceDecomposition,
        node: usize,
        v: usize,
        child: Self::Table,
    ) -> Result<Self::Table, CountError>;
    fn introduce_edge(
        &self,
        nd: &NiceDecomposition,
        node: usize,
        e: usize,
        child: Self::Table,
    ) -> Result<Self::Table, CountError>;
    fn forget(&self, nd: &NiceDecomposition, node: usize, v: usize, child: Self::Table) -> Result<Self::Table, CountError>;
    fn join(
        &self,
        nd: &NiceDecomposition,
        node: usize,
        left: Self::Table,
        right: Self::Table,
    ) -> Result<Self::Table, CountError>;
}

/// Evaluates every node bottom-up and returns the root table.
///
/// At a join the larger subtree is evaluated first, so at most
/// `log2(nodes) + 1` finished tables are alive at once. Child tables are
/// dropped as soon as the parent is computed. `hook` sees every table right
/// after it is computed and may modify it.
pub fn run<P: Transitions>(
    p: &P,
    nd: &NiceDecomposition,
    hook: &mut dyn FnMut(usize, &mut P::Table),
) -> Result<P::Table, CountError> {
    let size = |id: usize| nd.subtree(id).count();
    let mut done: HashMap<usize, P::Table> = HashMap::new();
    let mut stack = vec![(nd.root(), false)];
    while let Some((id, expanded)) = stack.pop() {
        let node = nd.node(id);
        if !expanded {
            stack.push((id, true));
            let mut kids = node.children.clone();
            kids.sort_by_key(|&c| size(c));
            stack.extend(kids.into_iter().map(|c| (c, false)));
            continue;
        }
        let mut take = |c: usize| done.remove(&c).expect("child evaluated");
        let mut table = match node.kind {
            NodeKind::Leaf => p.leaf(nd, id)?,
            NodeKind::IntroduceVertex(v) => p.introduce_vertex(nd, id, v, take(node.children[0]))?,
            NodeKind::IntroduceEdge(e) => p.introduce_edge(nd, id, e, take(node.children[0]))?,
            NodeKind::ForgetVertex(v) => p.forget(nd, id, v, take(node.children[0]))?,
            NodeKind::Join => {
                let l = take(node.children[0]);
                let r = take(node.children[1]);
                p.join(nd, id, l, r)?
            }
        };
        hook(id, &mut table);
        done.insert(id, table);
    }
    Ok(done.remove(&nd.root()).expect("root evaluated"))
}
