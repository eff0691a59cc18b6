//! Solvers for instances whose relevant pairs are all labeled.
//!
//! Everything here works on "items": groups of vertices that must stay
//! together (a single vertex is a one-element item). Pairwise Plus/Minus
//! counts between items make scoring on the contracted instance identical
//! to scoring on the original one.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{mask, Clustering, Label, SignedGraph};

/// Default cap on the number of items the exact solver accepts
/// (Bell(12) ≈ 4.2M partitions before pruning).
pub const EXACT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Pivot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolverChoice {
    pub kind: SolverKind,
    pub repeats: usize,
    pub exact_cap: usize,
}

impl SolverChoice {
    pub fn pivot(repeats: usize) -> Self {
        SolverChoice {
            kind: SolverKind::Pivot,
            repeats,
            exact_cap: EXACT_CAP,
        }
    }

    pub fn exact() -> Self {
        SolverChoice {
            kind: SolverKind::Exact,
            repeats: 1,
            exact_cap: EXACT_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::pivot(5)
    }
}

/// Contracted view of a vertex subset.
struct Items {
    members: Vec<Vec<usize>>,
    plus: Vec<Vec<u32>>,
    minus: Vec<Vec<u32>>,
    /// Minus pairs inside items; paid by every feasible clustering.
    internal: usize,
}

impl Items {
    /// `groups` become the first items (in the given order), followed by the
    /// remaining vertices of `s` in increasing order.
    fn new(g: &SignedGraph, s: &[usize], groups: &[Vec<usize>]) -> Self {
        let grouped = mask(g.n(), &groups.concat());
        let mut members: Vec<Vec<usize>> = groups.to_vec();
        let mut rest: Vec<usize> = s.iter().copied().filter(|&v| !grouped[v]).collect();
        rest.sort_unstable();
        members.extend(rest.into_iter().map(|v| vec![v]));
        let m = members.len();
        let mut plus = vec![vec![0u32; m]; m];
        let mut minus = vec![vec![0u32; m]; m];
        let mut internal = 0;
        for i in 0..m {
            for a in 0..members[i].len() {
                for b in a + 1..members[i].len() {
                    if g.label(members[i][a], members[i][b]) == Label::Minus {
                        internal += 1;
                    }
                }
            }
            for j in i + 1..m {
                let (mut p, mut q) = (0, 0);
                for &u in &members[i] {
                    for &v in &members[j] {
                        match g.label(u, v) {
                            Label::Plus => p += 1,
                            Label::Minus => q += 1,
                            Label::Missing => {}
                        }
                    }
                }
                plus[i][j] = p;
                plus[j][i] = p;
                minus[i][j] = q;
                minus[j][i] = q;
            }
        }
        Items {
            members,
            plus,
            minus,
            internal,
        }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn cost(&self, assign: &[usize]) -> usize {
        let mut c = self.internal;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                c += if assign[i] == assign[j] {
                    self.minus[i][j]
                } else {
                    self.plus[i][j]
                } as usize;
            }
        }
        c
    }

    fn clusters(&self, assign: &[usize]) -> Vec<Vec<usize>> {
        let k = assign.iter().max().map_or(0, |&x| x + 1);
        let mut out = vec![Vec::new(); k];
        for (i, &b) in assign.iter().enumerate() {
            out[b].extend_from_slice(&self.members[i]);
        }
        out.retain(|c| !c.is_empty());
        for c in &mut out {
            c.sort_unstable();
        }
        out
    }

    /// Branch-and-bound over restricted growth strings; the first `fixed`
    /// items are forced into distinct clusters.
    fn exact(&self, fixed: usize) -> Vec<usize> {
        let mut state = ExactSearch {
            items: self,
            fixed,
            assign: vec![usize::MAX; self.len()],
            best: None,
        };
        state.dfs(0, self.internal, 0);
        state.best.expect("empty search space").1
    }

    fn pivot<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let m = self.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let mut assign = vec![usize::MAX; m];
        let mut next = 0;
        for &p in &order {
            if assign[p] != usize::MAX {
                continue;
            }
            assign[p] = next;
            for q in 0..m {
                // majority sign between items; ties read as Minus
                if assign[q] == usize::MAX && self.plus[p][q] > self.minus[p][q] {
                    assign[q] = next;
                }
            }
            next += 1;
        }
        assign
    }

    fn best_pivot<R: Rng + ?Sized>(&self, repeats: usize, rng: &mut R) -> Vec<usize> {
        let seeds: Vec<u64> = (0..repeats).map(|_| rng.gen()).collect();
        seeds
            .into_iter()
            .map(|seed| {
                let assign = self.pivot(&mut ChaCha8Rng::seed_from_u64(seed));
                (self.cost(&assign), assign)
            })
            .min_by_key(|(c, _)| *c)
            .map(|(_, a)| a)
            .unwrap_or_default()
    }
}

struct ExactSearch<'a> {
    items: &'a Items,
    fixed: usize,
    assign: Vec<usize>,
    best: Option<(usize, Vec<usize>)>,
}

impl ExactSearch<'_> {
    fn dfs(&mut self, i: usize, cost: usize, blocks: usize) {
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if i == self.items.len() {
            self.best = Some((cost, self.assign.clone()));
            return;
        }
        let choices: Vec<usize> = if i < self.fixed {
            vec![blocks]
        } else {
            (0..=blocks).collect()
        };
        for b in choices {
            let extra: usize = (0..i)
                .map(|j| {
                    let w = if self.assign[j] == b {
                        self.items.minus[i][j]
                    } else {
                        self.items.plus[i][j]
                    };
                    w as usize
                })
                .sum();
            self.assign[i] = b;
            self.dfs(i + 1, cost + extra, blocks.max(b + 1));
        }
        self.assign[i] = usize::MAX;
    }
}

fn check_cap(items: usize, cap: usize) -> Result<()> {
    if items > cap {
        return Err(Error::budget(format!(
            "exact solver asked for {items} items (cap {cap})"
        )));
    }
    Ok(())
}

fn check_groups(g: &SignedGraph, groups: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for grp in groups {
        g.check_vertices(grp)?;
        let grp = crate::graph::normalize_set(grp);
        for &v in &grp {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::input(format!("vertex {v} appears in two groups")));
            }
        }
        if !grp.is_empty() {
            out.push(grp);
        }
    }
    out.sort_by_key(|grp| grp[0]);
    Ok(out)
}

/// Optimal clustering of `g`, ties broken towards the first partition in
/// restricted-growth order.
pub fn exact_cc(g: &SignedGraph, cap: usize) -> Result<Clustering> {
    exact_cc_grouped(g, &[], cap)
}

/// Optimal clustering of `g` among those keeping each group whole and the
/// groups pairwise apart. `cap` bounds the number of contracted items.
pub fn exact_cc_grouped(g: &SignedGraph, groups: &[Vec<usize>], cap: usize) -> Result<Clustering> {
    let groups = check_groups(g, groups)?;
    let all: Vec<usize> = (0..g.n()).collect();
    let items = Items::new(g, &all, &groups);
    check_cap(items.len(), cap)?;
    let assign = items.exact(groups.len());
    Clustering::from_clusters(g.n(), &items.clusters(&assign))
}

/// Best of `repeats` randomized pivot runs on a complete instance.
pub fn pivot_cc<R: Rng + ?Sized>(g: &SignedGraph, repeats: usize, rng: &mut R) -> Result<Clustering> {
    let all: Vec<usize> = (0..g.n()).collect();
    if !g.is_complete_on(&all) {
        return Err(Error::input("pivot needs a complete instance"));
    }
    let items = Items::new(g, &all, &[]);
    let assign = items.best_pivot(repeats.max(1), rng);
    Clustering::from_clusters(g.n(), &items.clusters(&assign))
}

/// Clustering of a complete instance with all of `must_link` in one cluster.
///
/// Small instances (at most `solver.exact_cap` items) and the exact solver
/// use the constrained exact search; otherwise pivot runs on the instance
/// with `must_link` contracted into one majority-signed meta-vertex.
pub fn constrained_cc<R: Rng + ?Sized>(
    g: &SignedGraph,
    must_link: &[usize],
    solver: &SolverChoice,
    rng: &mut R,
) -> Result<Clustering> {
    let all: Vec<usize> = (0..g.n()).collect();
    let clusters = constrained_on(g, &all, must_link, solver, rng)?;
    Clustering::from_clusters(g.n(), &clusters)
}

pub(crate) fn constrained_on<R: Rng + ?Sized>(
    g: &SignedGraph,
    s: &[usize],
    must_link: &[usize],
    solver: &SolverChoice,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    g.check_vertices(must_link)?;
    if !g.is_complete_on(s) {
        return Err(Error::input("constrained solve needs a complete instance"));
    }
    let in_s = mask(g.n(), s);
    if must_link.iter().any(|&v| !in_s[v]) {
        return Err(Error::input("must-link set is not inside the instance"));
    }
    let groups = if must_link.is_empty() {
        Vec::new()
    } else {
        vec![crate::graph::normalize_set(must_link)]
    };
    let items = Items::new(g, s, &groups);
    let assign = if solver.kind == SolverKind::Exact || items.len() <= solver.exact_cap {
        check_cap(items.len(), solver.exact_cap)?;
        items.exact(groups.len())
    } else {
        items.best_pivot(solver.repeats.max(1), rng)
    };
    Ok(items.clusters(&assign))
}

/// Runs the configured complete solver on the vertices `s` of `g`, returning
/// clusters of original vertex ids.
pub fn solve_complete<R: Rng + ?Sized>(
    g: &SignedGraph,
    s: &[usize],
    solver: &SolverChoice,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if !g.is_complete_on(s) {
        return Err(Error::input("complete solver got a missing pair"));
    }
    let items = Items::new(g, s, &[]);
    let assign = match solver.kind {
        SolverKind::Exact => {
            check_cap(items.len(), solver.exact_cap)?;
            items.exact(0)
        }
        SolverKind::Pivot => items.best_pivot(solver.repeats.max(1), rng),
    };
    Ok(items.clusters(&assign))
}
