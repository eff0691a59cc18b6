//! Clustering a Plus-connected piece that must keep its bad set `B` whole.
//!
//! The piece is first canonicalized into a working graph in which `B` is a
//! Plus clique and no good vertex has both signs towards `B`. Several
//! candidate clusterings are then produced:
//!
//! * `B` alone next to a complete-solver clustering of the rest (the
//!   fallback every branch keeps as a candidate),
//! * a large δ-clean cluster grown around a Plus neighbor of `B` when `B` has
//!   many Plus neighbors,
//! * otherwise, guesses of which Plus neighbors share `B`'s cluster,
//!   extended step by step.
//!
//! Every candidate is scored on the piece's original labels and the
//! cheapest one wins; ties go to the candidate produced first.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complete::{constrained_on, solve_complete, SolverChoice};
use crate::delta::{badset_good, clean, edges_between, vertex_good, DeltaParams};
use crate::enumerate::{enumerate_subsets, EnumBudget};
use crate::error::{Error, Result};
use crate::graph::{mask, mistakes_of_assignment, normalize_set, Clustering, Label, SignedGraph};

/// Canonicalized graph together with its bad set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingGraph {
    pub graph: SignedGraph,
    pub bad: Vec<usize>,
    in_bad: Vec<bool>,
}

impl WorkingGraph {
    pub fn is_bad(&self, v: usize) -> bool {
        self.in_bad[v]
    }

    /// Plus neighbors of `B` outside `B`.
    pub fn plus_neighbors_of_bad(&self) -> Vec<usize> {
        self.neighbors_of_bad(Label::Plus)
    }

    /// Minus neighbors of `B` outside `B`.
    pub fn minus_neighbors_of_bad(&self) -> Vec<usize> {
        self.neighbors_of_bad(Label::Minus)
    }

    fn neighbors_of_bad(&self, label: Label) -> Vec<usize> {
        let mut hit = vec![false; self.graph.n()];
        for &b in &self.bad {
            let adj = match label {
                Label::Plus => self.graph.plus_neighbors(b),
                _ => self.graph.minus_neighbors(b),
            };
            for &v in adj {
                hit[v] = !self.in_bad[v];
            }
        }
        (0..self.graph.n()).filter(|&v| hit[v]).collect()
    }

    /// `(|E⁻(B, C \ B)|, |E⁺(B, C \ B)|)`
    pub fn signed_edges_into(&self, c: &[usize]) -> (usize, usize) {
        let mut inside = mask(self.graph.n(), c);
        for &b in &self.bad {
            inside[b] = false;
        }
        (
            edges_between(&self.graph, &self.bad, &inside, Label::Minus),
            edges_between(&self.graph, &self.bad, &inside, Label::Plus),
        )
    }

    /// `|E⁺(B, V \ C)|` for `C ⊇ B`.
    fn plus_edges_leaving(&self, c: &[usize]) -> usize {
        let outside: Vec<bool> = mask(self.graph.n(), c).into_iter().map(|x| !x).collect();
        edges_between(&self.graph, &self.bad, &outside, Label::Plus)
    }
}

/// Makes `B` a Plus clique and cancels opposite-signed edges between each
/// good vertex and `B`.
///
/// A good vertex with `l1` Plus and `l2` Minus edges into `B` keeps `|l1 - l2|`
/// edges of the majority sign, to the lowest-indexed endpoints; its other
/// pairs with `B` become missing.
pub fn canonicalize(g_sub: &SignedGraph, b: &[usize]) -> Result<WorkingGraph> {
    g_sub.check_vertices(b)?;
    let bad = normalize_set(b);
    let in_bad = mask(g_sub.n(), &bad);
    let mut graph = g_sub.clone();
    for (i, &u) in bad.iter().enumerate() {
        for &v in &bad[i + 1..] {
            graph.set_label(u, v, Label::Plus);
        }
    }
    for v in (0..g_sub.n()).filter(|&v| !in_bad[v]) {
        let plus: Vec<usize> = bad.iter().copied().filter(|&u| g_sub.label(u, v) == Label::Plus).collect();
        let minus: Vec<usize> = bad.iter().copied().filter(|&u| g_sub.label(u, v) == Label::Minus).collect();
        let (keep, sign) = if plus.len() >= minus.len() {
            (&plus[..plus.len() - minus.len()], Label::Plus)
        } else {
            (&minus[..minus.len() - plus.len()], Label::Minus)
        };
        for &u in &bad {
            let label = if keep.contains(&u) { sign } else { Label::Missing };
            graph.set_label(u, v, label);
        }
    }
    Ok(WorkingGraph {
        graph,
        bad,
        in_bad,
    })
}

/// Output of [`clean_cluster`]: `c_prime ⊆ c`, both containing the seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CleanPair {
    pub c_prime: Vec<usize>,
    pub c: Vec<usize>,
}

/// Grows a cluster around good vertex `u`.
///
/// Starts from `N⁺[u] ∪ B`, repeatedly drops the lowest-indexed good member
/// (other than `u`) that is 3δ-bad w.r.t. the current set, and gives up with
/// `({u}, {u})` unless both `B` and `u` end 3δ-good. The survivor is `C′`;
/// `C` adds every vertex whose Plus neighborhood is concentrated on `C′`
/// (9δ thresholds).
pub fn clean_cluster(h: &WorkingGraph, u: usize, p: &DeltaParams) -> Result<CleanPair> {
    h.graph.check_vertices(&[u])?;
    if h.is_bad(u) {
        return Err(Error::input(format!("seed {u} is a bad vertex")));
    }
    let g = &h.graph;
    let mut in_a = mask(g.n(), g.plus_neighbors(u));
    in_a[u] = true;
    for &b in &h.bad {
        in_a[b] = true;
    }
    let mut a_len = in_a.iter().filter(|&&x| x).count();

    loop {
        let bad_member = (0..g.n())
            .find(|&v| in_a[v] && v != u && !h.is_bad(v) && !vertex_good(g, v, &in_a, a_len, p, 3));
        match bad_member {
            Some(v) => {
                in_a[v] = false;
                a_len -= 1;
            }
            None => break,
        }
    }
    let keep = badset_good(g, &h.bad, &h.in_bad, &in_a, a_len, p, 3)
        && vertex_good(g, u, &in_a, a_len, p, 3);
    if !keep {
        return Ok(CleanPair {
            c_prime: vec![u],
            c: vec![u],
        });
    }
    let c_prime: Vec<usize> = (0..g.n()).filter(|&v| in_a[v]).collect();
    let c: Vec<usize> = (0..g.n())
        .filter(|&v| {
            if in_a[v] {
                return true;
            }
            let plus_in = g.plus_neighbors(v).iter().filter(|&&x| in_a[x]).count();
            let plus_out = g.plus_neighbors(v).len() - plus_in;
            p.at_least_complement(plus_in, 9, a_len) && p.within(plus_out, 9, a_len)
        })
        .collect();
    Ok(CleanPair { c_prime, c })
}

/// `|N⁺(B)| > 2|B|² + (2/δ)|B|`
pub fn many_plus_neighbors(p: &DeltaParams, plus_neighbors: usize, b: usize) -> bool {
    let (num, den) = (p.num(), p.den());
    let (n, b) = (plus_neighbors as u128, b as u128);
    n * num > 2 * b * b * num + 2 * den * b
}

/// `|N⁺(B⁺)| > (2 + 2/δ)|B|²`
fn too_many_extension_neighbors(p: &DeltaParams, neighbors: usize, b: usize) -> bool {
    let (num, den) = (p.num(), p.den());
    let (n, b) = (neighbors as u128, b as u128);
    n * num > (2 * num + 2 * den) * b * b
}

/// Picks the Plus neighbor `y` of `B` whose [`clean_cluster`] output hosts
/// `B`, is larger than `|B|/δ`, is 13δ-clean, and leaks the fewest Plus edges
/// of `B`. Ties go to the lowest vertex.
pub fn select_y(h: &WorkingGraph, p: &DeltaParams) -> Option<(usize, CleanPair)> {
    let mut best: Option<(usize, usize, CleanPair)> = None;
    for v in h.plus_neighbors_of_bad() {
        let pair = clean_cluster(h, v, p).expect("Plus neighbors of B are good");
        let in_cp = mask(h.graph.n(), &pair.c_prime);
        let hosts = in_cp[v] && h.bad.iter().all(|&b| in_cp[b]);
        let large = pair.c_prime.len() as u128 * p.num() > h.bad.len() as u128 * p.den();
        if !(hosts && large) {
            continue;
        }
        let in_c = mask(h.graph.n(), &pair.c);
        if !clean(&h.graph, &pair.c, &h.bad, &h.in_bad, &in_c, p, 13) {
            continue;
        }
        let leak = h.plus_edges_leaving(&pair.c);
        if best.as_ref().is_none_or(|(l, _, _)| leak < *l) {
            best = Some((leak, v, pair));
        }
    }
    best.map(|(_, y, pair)| (y, pair))
}

/// Which top-level branch produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadClusterPath {
    /// Many Plus neighbors and a qualifying `y`.
    LargeClean,
    /// Many Plus neighbors but no qualifying `y`; `B` alone.
    LargeFallback,
    BoundedNeighbors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BadClusterStats {
    pub path: BadClusterPath,
    pub candidates: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    clusters: Vec<Vec<usize>>,
    mistakes: usize,
}

/// Solver state for one piece. Holds the working graph, a memo of complete
/// solves keyed by vertex set, and the rng stream all randomized calls draw
/// from, so a run is reproducible from its seed.
pub struct BadClusterSolver<'a> {
    original: &'a SignedGraph,
    h: WorkingGraph,
    delta: DeltaParams,
    solver: SolverChoice,
    budget: EnumBudget,
    rng: ChaCha8Rng,
    memo: HashMap<Vec<usize>, Vec<Vec<usize>>>,
    fallback: Option<Candidate>,
    candidates: usize,
    truncated: bool,
}

impl<'a> BadClusterSolver<'a> {
    pub fn new(
        g_sub: &'a SignedGraph,
        b: &[usize],
        delta: DeltaParams,
        solver: SolverChoice,
        budget: EnumBudget,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::input("bad set must be nonempty"));
        }
        Ok(BadClusterSolver {
            original: g_sub,
            h: canonicalize(g_sub, b)?,
            delta,
            solver,
            budget,
            rng,
            memo: HashMap::new(),
            fallback: None,
            candidates: 0,
            truncated: false,
        })
    }

    pub fn working_graph(&self) -> &WorkingGraph {
        &self.h
    }

    fn bad(&self) -> &[usize] {
        &self.h.bad
    }

    fn subsets(&mut self, s: &[usize]) -> Vec<Vec<usize>> {
        let subs = enumerate_subsets(s, self.budget);
        self.truncated |= subs.is_truncated();
        subs.collect()
    }

    /// Complete-solver clustering of everything outside `taken`.
    fn complete_outside(&mut self, taken: &[usize]) -> Result<Vec<Vec<usize>>> {
        let inside = mask(self.h.graph.n(), taken);
        let rest: Vec<usize> = (0..self.h.graph.n()).filter(|&v| !inside[v]).collect();
        if let Some(hit) = self.memo.get(&rest) {
            return Ok(hit.clone());
        }
        let clusters = solve_complete(&self.h.graph, &rest, &self.solver, &mut self.rng)?;
        self.memo.insert(rest, clusters.clone());
        Ok(clusters)
    }

    fn candidate(&mut self, clusters: Vec<Vec<usize>>) -> Candidate {
        let mut assign = vec![usize::MAX; self.original.n()];
        for (id, c) in clusters.iter().enumerate() {
            for &v in c {
                assign[v] = id;
            }
        }
        debug_assert!(assign.iter().all(|&a| a != usize::MAX), "candidate misses a vertex");
        self.candidates += 1;
        Candidate {
            mistakes: mistakes_of_assignment(self.original, &assign).total,
            clusters,
        }
    }

    /// `cluster` as one cluster, the complete solver on everything else.
    fn with_cluster(&mut self, cluster: Vec<usize>) -> Result<Candidate> {
        let mut clusters = self.complete_outside(&cluster)?;
        clusters.push(cluster);
        Ok(self.candidate(clusters))
    }

    /// `B` on its own next to a complete-solver clustering of the rest.
    fn bad_alone(&mut self) -> Result<Candidate> {
        if let Some(c) = &self.fallback {
            return Ok(c.clone());
        }
        let c = self.with_cluster(self.bad().to_vec())?;
        self.fallback = Some(c.clone());
        Ok(c)
    }

    /// Cheapest candidate, earliest on ties.
    fn best(cands: Vec<Candidate>) -> Candidate {
        cands
            .into_iter()
            .reduce(|a, b| if b.mistakes < a.mistakes { b } else { a })
            .expect("at least one candidate")
    }

    fn to_clustering(&self, c: Candidate) -> Clustering {
        Clustering::from_clusters(self.original.n(), &c.clusters).expect("candidates are total")
    }

    /// Runs the whole case analysis and returns the chosen clustering.
    pub fn run(&mut self) -> Result<(Clustering, BadClusterStats)> {
        let fallback = self.bad_alone()?;
        let plus = self.h.plus_neighbors_of_bad();
        let (best, path) = if many_plus_neighbors(&self.delta, plus.len(), self.bad().len()) {
            match select_y(&self.h, &self.delta) {
                Some((_, pair)) => {
                    let (minus_in, plus_in) = self.h.signed_edges_into(&pair.c);
                    let found = if minus_in <= plus_in {
                        self.with_cluster(pair.c.clone())?
                    } else {
                        self.more_negative_edges_candidate(&pair.c)?
                    };
                    (Self::best(vec![found, fallback]), BadClusterPath::LargeClean)
                }
                None => (fallback, BadClusterPath::LargeFallback),
            }
        } else {
            (self.bounded_candidate()?, BadClusterPath::BoundedNeighbors)
        };
        let stats = BadClusterStats {
            path,
            candidates: self.candidates,
            truncated: self.truncated,
        };
        Ok((self.to_clustering(best), stats))
    }

    /// Handles a cluster `c ⊇ B` into which `B` sends more Minus than Plus
    /// edges: either guess which of `B`'s Minus neighbors in `c` to evict,
    /// or (when there are many) guess good vertices that replace `B`.
    pub fn more_negative_edges(&mut self, c: &[usize]) -> Result<Clustering> {
        let best = self.more_negative_edges_candidate(c)?;
        Ok(self.to_clustering(best))
    }

    fn more_negative_edges_candidate(&mut self, c: &[usize]) -> Result<Candidate> {
        let c = normalize_set(c);
        let in_c = mask(self.h.graph.n(), &c);
        if self.bad().iter().any(|&b| !in_c[b]) {
            return Err(Error::input("cluster does not contain the bad set"));
        }
        let (minus_in, plus_in) = self.h.signed_edges_into(&c);
        if minus_in <= plus_in {
            return Err(Error::input(
                "bad set sends no more Minus than Plus edges into the cluster",
            ));
        }
        let mut cands = vec![self.bad_alone()?];
        let negative: Vec<usize> = self
            .h
            .minus_neighbors_of_bad()
            .into_iter()
            .filter(|&v| in_c[v])
            .collect();
        let b_len = self.bad().len();
        if negative.len() < 3 * b_len {
            for evict in self.subsets(&negative) {
                let keep: Vec<usize> = c.iter().copied().filter(|v| !evict.contains(v)).collect();
                cands.push(self.with_cluster(keep)?);
            }
        } else {
            let picked = negative[..3 * b_len].to_vec();
            for replacement in self.subsets(&picked) {
                if replacement.len() >= b_len {
                    cands.push(self.good_replace_bad_candidate(&replacement)?);
                }
            }
        }
        Ok(Self::best(cands))
    }

    /// Clusters with `b_plus ∪ B` together, solving an auxiliary instance in
    /// which the good vertices `b_plus` stand in for `B`.
    pub fn good_replace_bad(&mut self, b_plus: &[usize]) -> Result<Clustering> {
        let best = self.good_replace_bad_candidate(b_plus)?;
        Ok(self.to_clustering(best))
    }

    fn good_replace_bad_candidate(&mut self, b_plus: &[usize]) -> Result<Candidate> {
        let b_plus = normalize_set(b_plus);
        self.h.graph.check_vertices(&b_plus)?;
        if b_plus.iter().any(|&v| self.h.is_bad(v)) {
            return Err(Error::input("replacement set intersects the bad set"));
        }
        if b_plus.len() < self.bad().len() {
            return Err(Error::input("replacement set is smaller than the bad set"));
        }
        let replaced = replacement_graph(&self.h, &b_plus);
        let rest: Vec<usize> = (0..self.h.graph.n()).filter(|&v| !self.h.is_bad(v)).collect();
        let mut clusters = constrained_on(&replaced, &rest, &b_plus, &self.solver, &mut self.rng)?;
        let host = clusters
            .iter_mut()
            .find(|c| c.contains(&b_plus[0]))
            .ok_or_else(|| Error::Invariant("must-link set lost by constrained solve".into()))?;
        host.extend_from_slice(&self.h.bad);
        host.sort_unstable();
        Ok(self.candidate(clusters))
    }

    /// Branch for a bad set with few Plus neighbors: guess which of them
    /// share `B`'s cluster and extend the guess.
    pub fn bounded_positive_neighbors(&mut self) -> Result<Clustering> {
        let best = self.bounded_candidate()?;
        Ok(self.to_clustering(best))
    }

    fn bounded_candidate(&mut self) -> Result<Candidate> {
        let plus = self.h.plus_neighbors_of_bad();
        let b_len = self.bad().len();
        if many_plus_neighbors(&self.delta, plus.len(), b_len) {
            return Err(Error::input("bad set has too many Plus neighbors for this branch"));
        }
        let mut cands = vec![self.bad_alone()?];
        for guess in self.subsets(&plus) {
            let seeded = match guess.first() {
                None => self.bad_alone()?,
                Some(&u) => {
                    let pair = clean_cluster(&self.h, u, &self.delta)?;
                    let (minus_in, plus_in) = self.h.signed_edges_into(&pair.c);
                    let mut cb = pair.c;
                    cb.extend_from_slice(&self.h.bad);
                    let cb = normalize_set(&cb);
                    if minus_in <= plus_in {
                        self.with_cluster(cb)?
                    } else {
                        self.more_negative_edges_candidate(&cb)?
                    }
                }
            };
            cands.push(self.find_neighbors_candidate(&[], &guess, &seeded, 0)?);
        }
        Ok(Self::best(cands))
    }

    /// Extends the guessed set `b_plus_acc ∪ n_prime` of good vertices that
    /// share `B`'s cluster, returning the clustering for this guess.
    pub fn find_neighbors(
        &mut self,
        b_plus_acc: &[usize],
        n_prime: &[usize],
        c_dd: &Clustering,
        depth: usize,
    ) -> Result<Clustering> {
        let seeded = self.candidate(c_dd.clusters());
        let best = self.find_neighbors_candidate(b_plus_acc, n_prime, &seeded, depth)?;
        Ok(self.to_clustering(best))
    }

    fn find_neighbors_candidate(
        &mut self,
        b_plus_acc: &[usize],
        n_prime: &[usize],
        c_dd: &Candidate,
        depth: usize,
    ) -> Result<Candidate> {
        let b_len = self.bad().len();
        if depth > b_len {
            return Ok(c_dd.clone());
        }
        let mut b_plus = b_plus_acc.to_vec();
        b_plus.extend_from_slice(n_prime);
        let b_plus = normalize_set(&b_plus);

        if n_prime.is_empty() {
            let mut cluster = b_plus;
            cluster.extend_from_slice(&self.h.bad);
            return self.with_cluster(normalize_set(&cluster));
        }
        if b_plus.len() >= b_len {
            return self.good_replace_bad_candidate(&b_plus);
        }
        let taken = mask(self.h.graph.n(), &b_plus);
        let mut hit = vec![false; self.h.graph.n()];
        for &v in &b_plus {
            for &w in self.h.graph.plus_neighbors(v) {
                hit[w] |= !taken[w] && !self.h.is_bad(w);
            }
        }
        let extension: Vec<usize> = (0..hit.len()).filter(|&v| hit[v]).collect();
        if too_many_extension_neighbors(&self.delta, extension.len(), b_len) {
            return Ok(c_dd.clone());
        }
        let mut cands = Vec::new();
        for next in self.subsets(&extension) {
            cands.push(self.find_neighbors_candidate(&b_plus, &next, c_dd, depth + 1)?);
        }
        Ok(Self::best(cands))
    }
}

/// Auxiliary instance for replacing `B` by `b_plus` (bad vertices are kept
/// in the graph but ignored by the caller).
///
/// For each other vertex `v` with `l3`/`l4` Plus/Minus edges to `B` and
/// `l5`/`l6` to `b_plus`: if `l3 > l5`, `⌊l6/2⌋` of its Minus edges to
/// `b_plus` turn Plus; else if `l4 > l6`, `⌊l5/2⌋` of its Plus edges turn
/// Minus. Lowest-indexed endpoints are flipped first.
fn replacement_graph(h: &WorkingGraph, b_plus: &[usize]) -> SignedGraph {
    let g = &h.graph;
    let in_bp = mask(g.n(), b_plus);
    let mut out = g.clone();
    for v in (0..g.n()).filter(|&v| !h.is_bad(v) && !in_bp[v]) {
        let count = |adj: &[usize], m: &[bool]| adj.iter().filter(|&&x| m[x]).count();
        let l3 = count(g.plus_neighbors(v), &h.in_bad);
        let l4 = count(g.minus_neighbors(v), &h.in_bad);
        let to_bp_plus: Vec<usize> = g.plus_neighbors(v).iter().copied().filter(|&x| in_bp[x]).collect();
        let to_bp_minus: Vec<usize> = g.minus_neighbors(v).iter().copied().filter(|&x| in_bp[x]).collect();
        let (l5, l6) = (to_bp_plus.len(), to_bp_minus.len());
        if l3 > l5 {
            for &x in &to_bp_minus[..l6 / 2] {
                out.set_label(v, x, Label::Plus);
            }
        } else if l4 > l6 {
            for &x in &to_bp_plus[..l5 / 2] {
                out.set_label(v, x, Label::Minus);
            }
        }
    }
    out
}

/// Clustering of `g_sub` with all of `b` in one cluster.
pub fn bad_cluster(
    g_sub: &SignedGraph,
    b: &[usize],
    delta: DeltaParams,
    solver: SolverChoice,
    budget: EnumBudget,
    rng: ChaCha8Rng,
) -> Result<(Clustering, BadClusterStats)> {
    BadClusterSolver::new(g_sub, b, delta, solver, budget, rng)?.run()
}
