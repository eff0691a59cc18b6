//! Signed graphs, clusterings and disagreement counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise label of an unordered vertex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Plus,
    Minus,
    /// No preference; never contributes a mistake.
    Missing,
}

/// Complete vertex-pair labelling on `0..n`.
///
/// Labels live in a dense symmetric matrix; per-sign adjacency lists are kept
/// sorted so neighborhood scans run in `O(deg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    n: usize,
    labels: Vec<Label>,
    plus: Vec<Vec<usize>>,
    minus: Vec<Vec<usize>>,
}

impl SignedGraph {
    /// Graph on `n` vertices with every pair missing.
    pub fn new(n: usize) -> Self {
        SignedGraph {
            n,
            labels: vec![Label::Missing; n * n],
            plus: vec![Vec::new(); n],
            minus: vec![Vec::new(); n],
        }
    }

    /// Graph on `n` vertices with every pair set to `label`.
    pub fn filled(n: usize, label: Label) -> Self {
        let mut g = SignedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_label(u, v, label);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn label(&self, u: usize, v: usize) -> Label {
        if u == v {
            return Label::Missing;
        }
        self.labels[u * self.n + v]
    }

    pub fn set_label(&mut self, u: usize, v: usize, label: Label) {
        assert!(u != v, "self-labels are not allowed");
        assert!(u < self.n && v < self.n, "vertex out of range");
        let old = self.labels[u * self.n + v];
        if old == label {
            return;
        }
        for (a, b) in [(u, v), (v, u)] {
            match old {
                Label::Plus => remove_sorted(&mut self.plus[a], b),
                Label::Minus => remove_sorted(&mut self.minus[a], b),
                Label::Missing => {}
            }
            match label {
                Label::Plus => insert_sorted(&mut self.plus[a], b),
                Label::Minus => insert_sorted(&mut self.minus[a], b),
                Label::Missing => {}
            }
        }
        self.labels[u * self.n + v] = label;
        self.labels[v * self.n + u] = label;
    }

    pub fn plus_neighbors(&self, v: usize) -> &[usize] {
        &self.plus[v]
    }

    pub fn minus_neighbors(&self, v: usize) -> &[usize] {
        &self.minus[v]
    }

    /// Labeled pairs `(u, v, label)` with `u < v`, in lexicographic order.
    pub fn labeled_pairs(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n).filter_map(move |v| match self.label(u, v) {
                Label::Missing => None,
                l => Some((u, v, l)),
            })
        })
    }

    /// Numbers of (Plus, Minus, Missing) pairs.
    pub fn label_counts(&self) -> (usize, usize, usize) {
        let plus: usize = self.plus.iter().map(Vec::len).sum::<usize>() / 2;
        let minus: usize = self.minus.iter().map(Vec::len).sum::<usize>() / 2;
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        (plus, minus, pairs - plus - minus)
    }

    /// True when no pair inside `s` is missing.
    pub fn is_complete_on(&self, s: &[usize]) -> bool {
        s.iter().enumerate().all(|(i, &u)| {
            s[i + 1..]
                .iter()
                .all(|&v| self.label(u, v) != Label::Missing)
        })
    }

    /// Induced subgraph; local vertex `i` is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> SignedGraph {
        let mut h = SignedGraph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                let l = self.label(u, v);
                if l != Label::Missing {
                    h.set_label(i, j, l);
                }
            }
        }
        h
    }

    pub(crate) fn check_vertices(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&v| v >= self.n) {
            Some(v) => Err(Error::input(format!(
                "vertex {v} out of range for graph on {} vertices",
                self.n
            ))),
            None => Ok(()),
        }
    }
}

fn insert_sorted(list: &mut Vec<usize>, x: usize) {
    if let Err(pos) = list.binary_search(&x) {
        list.insert(pos, x);
    }
}

fn remove_sorted(list: &mut Vec<usize>, x: usize) {
    if let Ok(pos) = list.binary_search(&x) {
        list.remove(pos);
    }
}

/// Membership mask of `s` over `0..n`.
pub fn mask(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

/// Sorted, deduplicated copy of `s`.
pub fn normalize_set(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Positive, negative and empty neighbors of a vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Neighborhoods {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub empty: Vec<usize>,
}

/// Neighbors of `s` outside `s`, split by the label that connects them.
/// A vertex may appear in several of the three sets.
pub fn neighborhoods(g: &SignedGraph, s: &[usize]) -> Result<Neighborhoods> {
    g.check_vertices(s)?;
    let inside = mask(g.n(), s);
    let mut seen = [vec![false; g.n()], vec![false; g.n()], vec![false; g.n()]];
    for &u in s {
        for v in (0..g.n()).filter(|&v| !inside[v]) {
            let slot = match g.label(u, v) {
                Label::Plus => 0,
                Label::Minus => 1,
                Label::Missing => 2,
            };
            seen[slot][v] = true;
        }
    }
    let collect = |m: &[bool]| (0..g.n()).filter(|&v| m[v]).collect::<Vec<_>>();
    Ok(Neighborhoods {
        plus: collect(&seen[0]),
        minus: collect(&seen[1]),
        empty: collect(&seen[2]),
    })
}

/// Total assignment of vertices to clusters.
///
/// Cluster ids are normalized to `0..c` in order of first appearance, so two
/// clusterings describing the same partition compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clustering {
    assignment: Vec<usize>,
    num_clusters: usize,
}

impl Clustering {
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let assignment: Vec<usize> = raw
            .iter()
            .map(|id| {
                let next = remap.len();
                *remap.entry(*id).or_insert(next)
            })
            .collect();
        Clustering {
            num_clusters: remap.len(),
            assignment,
        }
    }

    /// Builds a clustering of `0..n` from explicit clusters. Every vertex
    /// must appear exactly once; empty clusters are dropped.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; n];
        for (id, cluster) in clusters.iter().enumerate() {
            for &v in cluster {
                if v >= n {
                    return Err(Error::input(format!("vertex {v} out of range (n = {n})")));
                }
                if raw[v] != usize::MAX {
                    return Err(Error::input(format!("vertex {v} assigned twice")));
                }
                raw[v] = id;
            }
        }
        if let Some(v) = raw.iter().position(|&c| c == usize::MAX) {
            return Err(Error::input(format!("vertex {v} is not assigned")));
        }
        Ok(Clustering::from_assignment(&raw))
    }

    pub fn one_cluster(n: usize) -> Self {
        Clustering::from_assignment(&vec![0; n])
    }

    pub fn singletons(n: usize) -> Self {
        Clustering::from_assignment(&(0..n).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Clusters as sorted vertex lists, ordered by id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// True when `s` lies inside a single cluster.
    pub fn keeps_together(&self, s: &[usize]) -> bool {
        s.windows(2)
            .all(|w| self.assignment[w[0]] == self.assignment[w[1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MistakeReport {
    #[serde(rename = "positive")]
    pub positive_mistakes: usize,
    #[serde(rename = "negative")]
    pub negative_mistakes: usize,
    pub total: usize,
}

/// Counts Plus pairs split across clusters and Minus pairs kept together.
pub fn count_mistakes(g: &SignedGraph, c: &Clustering) -> Result<MistakeReport> {
    if c.len() != g.n() {
        return Err(Error::input(format!(
            "clustering covers {} vertices, graph has {}",
            c.len(),
            g.n()
        )));
    }
    Ok(mistakes_of_assignment(g, c.assignment()))
}

pub(crate) fn mistakes_of_assignment(g: &SignedGraph, assignment: &[usize]) -> MistakeReport {
    let mut positive = 0;
    let mut negative = 0;
    for u in 0..g.n() {
        positive += g.plus[u]
            .iter()
            .filter(|&&v| v > u && assignment[u] != assignment[v])
            .count();
        negative += g.minus[u]
            .iter()
            .filter(|&&v| v > u && assignment[u] == assignment[v])
            .count();
    }
    MistakeReport {
        positive_mistakes: positive,
        negative_mistakes: negative,
        total: positive + negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SignedGraph {
        let mut g = SignedGraph::new(3);
        g.set_label(0, 1, Label::Plus);
        g.set_label(0, 2, Label::Minus);
        g
    }

    #[test]
    fn neighborhoods_of_single_vertices() {
        let g = path3();
        let nb = neighborhoods(&g, &[0]).unwrap();
        assert_eq!((nb.plus, nb.minus, nb.empty), (vec![1], vec![2], vec![]));
        let nb = neighborhoods(&g, &[1]).unwrap();
        assert_eq!((nb.plus, nb.minus, nb.empty), (vec![0], vec![], vec![2]));
        let nb = neighborhoods(&g, &[0, 1, 2]).unwrap();
        assert_eq!(nb, Neighborhoods::default());
        assert!(neighborhoods(&g, &[3]).is_err());
    }

    #[test]
    fn set_neighborhoods_may_overlap() {
        let mut g = path3();
        g.set_label(1, 2, Label::Plus);
        let nb = neighborhoods(&g, &[0, 1]).unwrap();
        assert_eq!(nb.plus, vec![2]);
        assert_eq!(nb.minus, vec![2]);
    }

    #[test]
    fn triangle_mistakes() {
        let g = SignedGraph::filled(3, Label::Plus);
        let one = Clustering::one_cluster(3);
        assert_eq!(count_mistakes(&g, &one).unwrap().total, 0);

        let mut g = g;
        g.set_label(1, 2, Label::Minus);
        let r = count_mistakes(&g, &one).unwrap();
        assert_eq!((r.positive_mistakes, r.negative_mistakes, r.total), (0, 1, 1));
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = SignedGraph::new(3);
        assert!(count_mistakes(&g, &Clustering::one_cluster(2)).is_err());
    }

    #[test]
    fn relabeled_clusterings_compare_equal() {
        let a = Clustering::from_assignment(&[5, 5, 2, 9]);
        let b = Clustering::from_assignment(&[0, 0, 1, 2]);
        assert_eq!(a, b);
        assert_eq!(a.clusters(), vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn from_clusters_validates() {
        assert!(Clustering::from_clusters(3, &[vec![0, 1]]).is_err());
        assert!(Clustering::from_clusters(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Clustering::from_clusters(3, &[vec![0, 1], vec![2, 3]]).is_err());
        let c = Clustering::from_clusters(3, &[vec![2], vec![], vec![0, 1]]).unwrap();
        assert_eq!(c.num_clusters(), 2);
    }

    #[test]
    fn set_label_keeps_adjacency_in_sync() {
        let mut g = SignedGraph::new(4);
        g.set_label(2, 0, Label::Plus);
        g.set_label(3, 0, Label::Plus);
        assert_eq!(g.plus_neighbors(0), &[2, 3]);
        g.set_label(0, 2, Label::Minus);
        assert_eq!(g.plus_neighbors(0), &[3]);
        assert_eq!(g.minus_neighbors(2), &[0]);
        g.set_label(0, 2, Label::Missing);
        assert!(g.minus_neighbors(2).is_empty());
        assert_eq!(g.label_counts(), (1, 0, 5));
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = path3();
        let h = g.induced(&[2, 0]);
        assert_eq!(h.label(0, 1), Label::Minus);
        assert!(h.is_complete_on(&[0, 1]));
        assert!(!g.is_complete_on(&[0, 1, 2]));
    }
}
