//! Bad-vertex detection: a minimum vertex cover of the missing-pair graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Label, SignedGraph};

/// Unlabeled simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SimpleGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "loops are not allowed");
        for (a, b) in [(u, v), (v, u)] {
            if let Err(pos) = self.adj[a].binary_search(&b) {
                self.adj[a].insert(pos, b);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_cover(&self, s: &[usize]) -> bool {
        let inside = crate::graph::mask(self.n(), s);
        self.edges().all(|(u, v)| inside[u] || inside[v])
    }
}

/// Graph whose edges are exactly the missing pairs of `g`.
pub fn empty_edge_graph(g: &SignedGraph) -> SimpleGraph {
    let mut g0 = SimpleGraph::new(g.n());
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.label(u, v) == Label::Missing {
                g0.add_edge(u, v);
            }
        }
    }
    g0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    pub bad_vertices: Vec<usize>,
    pub k: usize,
}

/// Minimum vertex cover by iterative deepening on the cover size.
///
/// Fails with a budget error carrying `k_max + 1` as a lower bound when no
/// cover of size `<= k_max` exists.
pub fn min_vertex_cover(g0: &SimpleGraph, k_max: usize) -> Result<CoverResult> {
    let mut search = CoverSearch {
        g: g0,
        taken: vec![false; g0.n()],
        chosen: Vec::new(),
    };
    for target in 0..=k_max {
        if search.run(target) {
            let mut bad_vertices = search.chosen.clone();
            bad_vertices.sort_unstable();
            debug_assert!(g0.is_cover(&bad_vertices));
            return Ok(CoverResult {
                k: bad_vertices.len(),
                bad_vertices,
            });
        }
        debug_assert!(search.chosen.is_empty());
    }
    Err(Error::Budget {
        what: format!("minimum vertex cover of the missing-pair graph exceeds k = {k_max}"),
        lower_bound: Some(k_max + 1),
    })
}

struct CoverSearch<'a> {
    g: &'a SimpleGraph,
    taken: Vec<bool>,
    chosen: Vec<usize>,
}

impl CoverSearch<'_> {
    fn live_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.g.neighbors(v).iter().copied().filter(|&u| !self.taken[u])
    }

    fn degree(&self, v: usize) -> usize {
        self.live_neighbors(v).count()
    }

    fn take(&mut self, v: usize) {
        self.taken[v] = true;
        self.chosen.push(v);
    }

    fn undo_to(&mut self, mark: usize) {
        for v in self.chosen.drain(mark..) {
            self.taken[v] = false;
        }
    }

    /// One forced vertex from the reduction rules, if any applies.
    fn forced(&self, budget: usize) -> Option<usize> {
        for v in 0..self.g.n() {
            if self.taken[v] {
                continue;
            }
            let deg = self.degree(v);
            if deg == 0 {
                continue;
            }
            if deg > budget {
                return Some(v);
            }
            if deg == 1 {
                return self.live_neighbors(v).next();
            }
            // N[v] ⊆ N[u] for a neighbor u: some minimum cover contains u.
            for u in self.live_neighbors(v) {
                let dominated = self
                    .live_neighbors(v)
                    .all(|w| w == u || self.g.neighbors(u).binary_search(&w).is_ok());
                if dominated {
                    return Some(u);
                }
            }
        }
        None
    }

    fn first_uncovered(&self) -> Option<(usize, usize)> {
        (0..self.g.n())
            .filter(|&u| !self.taken[u])
            .find_map(|u| self.live_neighbors(u).find(|&v| v > u).map(|v| (u, v)))
    }

    /// True (with `chosen` holding the cover) iff a cover of size `<= budget`
    /// exists below the current state.
    fn run(&mut self, mut budget: usize) -> bool {
        let mark = self.chosen.len();
        while let Some(v) = self.forced(budget) {
            if budget == 0 {
                self.undo_to(mark);
                return false;
            }
            self.take(v);
            budget -= 1;
        }
        let Some((u, v)) = self.first_uncovered() else {
            return true;
        };
        if budget > 0 {
            for pick in [u, v] {
                let inner = self.chosen.len();
                self.take(pick);
                if self.run(budget - 1) {
                    return true;
                }
                self.undo_to(inner);
            }
        }
        self.undo_to(mark);
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_has_no_missing_pairs() {
        let g = SignedGraph::filled(5, Label::Plus);
        let g0 = empty_edge_graph(&g);
        assert_eq!(g0.num_edges(), 0);
        let c = min_vertex_cover(&g0, 0).unwrap();
        assert_eq!(c.k, 0);
        assert!(c.bad_vertices.is_empty());
    }

    #[test]
    fn single_missing_pair() {
        let mut g = SignedGraph::filled(6, Label::Minus);
        g.set_label(2, 5, Label::Missing);
        let g0 = empty_edge_graph(&g);
        assert_eq!(g0.edges().collect::<Vec<_>>(), vec![(2, 5)]);
        let c = min_vertex_cover(&g0, 3).unwrap();
        assert_eq!(c.k, 1);
    }

    #[test]
    fn star_is_covered_by_center() {
        let g0 = SimpleGraph::from_edges(5, &[(3, 0), (3, 1), (3, 2), (3, 4)]);
        let c = min_vertex_cover(&g0, 4).unwrap();
        assert_eq!(c.bad_vertices, vec![3]);
    }

    #[test]
    fn budget_error_carries_lower_bound() {
        // triangle needs 2
        let g0 = SimpleGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        match min_vertex_cover(&g0, 1) {
            Err(Error::Budget { lower_bound, .. }) => assert_eq!(lower_bound, Some(2)),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert_eq!(min_vertex_cover(&g0, 2).unwrap().k, 2);
    }

    #[test]
    fn label_trichotomy() {
        let mut g = SignedGraph::filled(7, Label::Plus);
        g.set_label(0, 1, Label::Minus);
        g.set_label(0, 2, Label::Missing);
        g.set_label(4, 6, Label::Missing);
        let (plus, minus, _) = g.label_counts();
        assert_eq!(empty_edge_graph(&g).num_edges() + plus + minus, 7 * 6 / 2);
    }

    #[test]
    fn cover_is_deterministic() {
        let g0 = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let a = min_vertex_cover(&g0, 6).unwrap();
        let b = min_vertex_cover(&g0, 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k, 3);
    }
}
