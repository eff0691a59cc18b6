//! Terminal graph construction, multiway cut solvers, and cut application.
//!
//! For one guessed partition `B_1, ..., B_k'` of the bad vertices, each block
//! is contracted into a terminal of the Plus-edge graph. Any clustering that
//! respects the partition must cut a multiway cut of that graph, so a cheap
//! cut tells us which Plus edges to give up before solving the pieces.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::BadPartition;
use crate::error::{Error, Result};
use crate::flow::{CutWeight, FlowNetwork};
use crate::graph::{mask, Label, SignedGraph};

/// What a terminal-graph node stands for in the original instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeOrigin {
    Block(usize),
    Vertex(usize),
}

/// Weighted undirected graph with designated terminal nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalGraphOf<W> {
    num_nodes: usize,
    terminals: Vec<usize>,
    edges: BTreeMap<(usize, usize), W>,
    origin: Vec<NodeOrigin>,
}

/// A set of terminal-graph edges and its total weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutSetOf<W> {
    pub edges: Vec<(usize, usize)>,
    pub weight: W,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl<W: CutWeight> TerminalGraphOf<W> {
    pub fn new(num_nodes: usize, terminals: Vec<usize>) -> Self {
        assert!(terminals.iter().all(|&t| t < num_nodes));
        TerminalGraphOf {
            num_nodes,
            terminals,
            edges: BTreeMap::new(),
            origin: (0..num_nodes).map(NodeOrigin::Vertex).collect(),
        }
    }

    /// Adds `w` to the weight of edge `{a, b}`. Zero weights are not stored.
    pub fn add_weight(&mut self, a: usize, b: usize, w: W) {
        assert!(a != b && a < self.num_nodes && b < self.num_nodes);
        if w == W::zero() {
            return;
        }
        let e = self.edges.entry(key(a, b)).or_insert(W::zero());
        *e = *e + w;
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn origin(&self, node: usize) -> NodeOrigin {
        self.origin[node]
    }

    pub fn weight(&self, a: usize, b: usize) -> W {
        self.edges.get(&key(a, b)).copied().unwrap_or(W::zero())
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), W)> + '_ {
        self.edges.iter().map(|(&e, &w)| (e, w))
    }

    pub fn total_weight(&self) -> W {
        self.edges.values().copied().sum()
    }

    /// Connected component id per node after deleting `removed`.
    pub fn components_without(&self, removed: &BTreeSet<(usize, usize)>) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in self.edges.keys() {
            if !removed.contains(&(a, b)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut comp = vec![usize::MAX; self.num_nodes];
        let mut next = 0;
        for start in 0..self.num_nodes {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// True when deleting `removed` leaves every pair of terminals disconnected.
    pub fn separates(&self, removed: &BTreeSet<(usize, usize)>) -> bool {
        let comp = self.components_without(removed);
        let ids: BTreeSet<usize> = self.terminals.iter().map(|&t| comp[t]).collect();
        ids.len() == self.terminals.len()
    }

    fn cut_from(&self, edges: BTreeSet<(usize, usize)>) -> CutSetOf<W> {
        let weight = edges.iter().map(|&(a, b)| self.weight(a, b)).sum();
        CutSetOf {
            edges: edges.into_iter().collect(),
            weight,
        }
    }

    fn check_cut(&self, cut: &CutSetOf<W>) -> Result<()> {
        let set: BTreeSet<_> = cut.edges.iter().copied().collect();
        if !self.separates(&set) {
            return Err(Error::Invariant(
                "multiway cut leaves two terminals connected".into(),
            ));
        }
        Ok(())
    }
}

type TerminalGraph = TerminalGraphOf<u64>;
type CutSet = CutSetOf<u64>;

/// Contracts each block of `p` into a terminal of the Plus-edge graph.
///
/// Node layout: terminals `0..k'` in block order, then the good vertices in
/// increasing order. Edge weights count the Plus edges they stand for.
pub fn build_auxiliary(g: &SignedGraph, p: &BadPartition) -> TerminalGraph {
    let kp = p.num_blocks();
    let mut node_of = vec![usize::MAX; g.n()];
    for (i, block) in p.blocks.iter().enumerate() {
        for &v in block {
            node_of[v] = i;
        }
    }
    let mut origin: Vec<NodeOrigin> = (0..kp).map(NodeOrigin::Block).collect();
    for v in 0..g.n() {
        if node_of[v] == usize::MAX {
            node_of[v] = origin.len();
            origin.push(NodeOrigin::Vertex(v));
        }
    }
    let mut tg = TerminalGraph::new(origin.len(), (0..kp).collect());
    tg.origin = origin;
    for u in 0..g.n() {
        for &v in g.plus_neighbors(u) {
            let (a, b) = (node_of[u], node_of[v]);
            if v > u && a != b {
                tg.add_weight(a, b, 1);
            }
        }
    }
    tg
}

/// Isolating-cut 2(1 - 1/k')-approximation.
///
/// For every terminal, a minimum cut separating it from the others; the
/// heaviest of these is dropped and the rest are unioned. Edges the union
/// does not need are then pruned greedily, heaviest first.
pub fn multiway_cut_isolating<W: CutWeight>(tg: &TerminalGraphOf<W>) -> Result<CutSetOf<W>> {
    let terms = tg.terminals();
    if terms.len() < 2 {
        return Ok(tg.cut_from(BTreeSet::new()));
    }
    let big = tg.total_weight() + W::one();
    let sink = tg.num_nodes();
    let isolating: Vec<(W, Vec<(usize, usize)>)> = terms
        .par_iter()
        .map(|&t| {
            let mut net = FlowNetwork::<W>::new(tg.num_nodes() + 1);
            for ((a, b), w) in tg.edges() {
                net.add_undirected(a, b, w);
            }
            for &o in terms.iter().filter(|&&o| o != t) {
                net.add_arc(o, sink, big, W::zero());
            }
            let value = net.max_flow(t, sink);
            let side = net.source_side(t);
            let cut: Vec<_> = tg
                .edges()
                .filter(|&((a, b), _)| side[a] != side[b])
                .map(|(e, _)| e)
                .collect();
            (value, cut)
        })
        .collect();
    let heaviest = isolating
        .iter()
        .enumerate()
        .max_by_key(|(_, (w, _))| *w)
        .map(|(i, _)| i)
        .expect("at least two terminals");
    let mut union: BTreeSet<(usize, usize)> = isolating
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != heaviest)
        .flat_map(|(_, (_, cut))| cut)
        .collect();

    let mut order: Vec<_> = union.iter().copied().collect();
    order.sort_by_key(|&(a, b)| (std::cmp::Reverse(tg.weight(a, b)), a, b));
    for e in order {
        union.remove(&e);
        if !tg.separates(&union) {
            union.insert(e);
        }
    }
    let cut = tg.cut_from(union);
    tg.check_cut(&cut)?;
    Ok(cut)
}

/// Default cap on the number of nodes the exact solver enumerates.
pub const EXACT_CUT_CAP: usize = 16;

/// Minimum multiway cut by branch-and-bound over assignments of
/// non-terminal nodes to terminals.
///
/// Only nodes whose component holds two or more terminals are enumerated;
/// everything else can follow its component at zero cost. `cap` bounds the
/// number of enumerated nodes.
pub fn multiway_cut_exact<W: CutWeight>(tg: &TerminalGraphOf<W>, cap: usize) -> Result<CutSetOf<W>> {
    let terms = tg.terminals();
    if terms.len() < 2 {
        return Ok(tg.cut_from(BTreeSet::new()));
    }
    let comp = tg.components_without(&BTreeSet::new());
    let mut terminals_in = BTreeMap::<usize, Vec<usize>>::new();
    for (i, &t) in terms.iter().enumerate() {
        terminals_in.entry(comp[t]).or_default().push(i);
    }
    let is_term = mask(tg.num_nodes(), terms);
    let free: Vec<usize> = (0..tg.num_nodes())
        .filter(|&v| !is_term[v] && terminals_in.get(&comp[v]).is_some_and(|ts| ts.len() >= 2))
        .collect();
    if free.len() > cap {
        return Err(Error::budget(format!(
            "exact multiway cut would enumerate {} nodes (cap {cap})",
            free.len()
        )));
    }

    let mut label = vec![usize::MAX; tg.num_nodes()];
    for (i, &t) in terms.iter().enumerate() {
        label[t] = i;
    }
    for v in 0..tg.num_nodes() {
        if label[v] == usize::MAX && !free.contains(&v) {
            label[v] = terminals_in.get(&comp[v]).map_or(0, |ts| ts[0]);
        }
    }
    let mut adj = vec![Vec::new(); tg.num_nodes()];
    for ((a, b), w) in tg.edges() {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    // Fixed nodes contribute a constant amongst themselves.
    let base: W = tg
        .edges()
        .filter(|&((a, b), _)| !free.contains(&a) && !free.contains(&b) && label[a] != label[b])
        .map(|(_, w)| w)
        .sum();

    let mut search = CutSearch {
        adj: &adj,
        free: &free,
        k: terms.len(),
        label,
        best: None,
    };
    search.dfs(0, base);
    let best_label = search.best.expect("at least one assignment").1;
    let cut: BTreeSet<_> = tg
        .edges()
        .filter(|&((a, b), _)| best_label[a] != best_label[b])
        .map(|(e, _)| e)
        .collect();
    let cut = tg.cut_from(cut);
    tg.check_cut(&cut)?;
    Ok(cut)
}

struct CutSearch<'a, W> {
    adj: &'a [Vec<(usize, W)>],
    free: &'a [usize],
    k: usize,
    label: Vec<usize>,
    best: Option<(W, Vec<usize>)>,
}

impl<W: CutWeight> CutSearch<'_, W> {
    fn dfs(&mut self, i: usize, cost: W) {
        if let Some((b, _)) = &self.best {
            if cost >= *b {
                return;
            }
        }
        if i == self.free.len() {
            self.best = Some((cost, self.label.clone()));
            return;
        }
        let v = self.free[i];
        for t in 0..self.k {
            // edges to already-labelled nodes that this choice cuts
            let extra: W = self.adj[v]
                .iter()
                .filter(|&&(u, _)| self.label[u] != usize::MAX && self.label[u] != t)
                .map(|&(_, w)| w)
                .sum();
            self.label[v] = t;
            self.dfs(i + 1, cost + extra);
        }
        self.label[v] = usize::MAX;
    }
}

/// One Plus-connected piece of the instance after the cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    /// Index of the block this piece hosts; `None` for good-only pieces.
    pub block: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CutApplication {
    /// Instance with the cut Plus edges demoted.
    pub h: SignedGraph,
    pub components: Vec<Component>,
    /// Cut edges that were actually needed to separate terminals.
    pub applied: CutSet,
}

/// Removes the Plus edges represented by `f` and splits the instance into
/// Plus-connected pieces, each block treated as contracted.
///
/// Cut Plus edges between blocks become Missing; the ones between good
/// vertices, and between a good vertex and a block, become Minus. Edges of
/// `f` whose endpoints still end up together are restored.
pub fn apply_cut(g: &SignedGraph, p: &BadPartition, f: &CutSet) -> Result<CutApplication> {
    let tg = build_auxiliary(g, p);
    if let Some(&(a, b)) = f
        .edges
        .iter()
        .find(|&&(a, b)| tg.weight(a, b) == 0)
    {
        return Err(Error::Invariant(format!(
            "cut edge ({a}, {b}) is not an edge of the terminal graph"
        )));
    }
    let removed: BTreeSet<_> = f.edges.iter().copied().collect();
    if !tg.separates(&removed) {
        return Err(Error::Invariant(
            "multiway cut leaves two terminals connected".into(),
        ));
    }
    let comp = tg.components_without(&removed);
    let needed: BTreeSet<_> = removed
        .into_iter()
        .filter(|&(a, b)| comp[a] != comp[b])
        .collect();

    let mut h = g.clone();
    let mut block_of = vec![usize::MAX; g.n()];
    for (i, block) in p.blocks.iter().enumerate() {
        for &v in block {
            block_of[v] = i;
        }
    }
    for u in 0..g.n() {
        for &v in g.plus_neighbors(u) {
            if v > u && block_of[u] != usize::MAX && block_of[v] != usize::MAX && block_of[u] != block_of[v] {
                h.set_label(u, v, Label::Missing);
            }
        }
    }
    for &(a, b) in &needed {
        match (tg.origin(a), tg.origin(b)) {
            (NodeOrigin::Vertex(u), NodeOrigin::Vertex(v)) => h.set_label(u, v, Label::Minus),
            (NodeOrigin::Block(i), NodeOrigin::Vertex(v))
            | (NodeOrigin::Vertex(v), NodeOrigin::Block(i)) => {
                for &u in &p.blocks[i] {
                    if g.label(u, v) == Label::Plus {
                        h.set_label(u, v, Label::Minus);
                    }
                }
            }
            (NodeOrigin::Block(_), NodeOrigin::Block(_)) => {}
        }
    }

    let mut by_comp = BTreeMap::<usize, Component>::new();
    for node in 0..tg.num_nodes() {
        let entry = by_comp.entry(comp[node]).or_insert_with(|| Component {
            vertices: Vec::new(),
            block: None,
        });
        match tg.origin(node) {
            NodeOrigin::Block(i) => {
                entry.block = Some(i);
                entry.vertices.extend_from_slice(&p.blocks[i]);
            }
            NodeOrigin::Vertex(v) => entry.vertices.push(v),
        }
    }
    let mut components: Vec<Component> = by_comp.into_values().collect();
    for c in &mut components {
        c.vertices.sort_unstable();
    }
    components.sort_by_key(|c| c.vertices[0]);
    Ok(CutApplication {
        h,
        components,
        applied: tg.cut_from(needed),
    })
}
