//! Brute-force oracles and random instance builders shared by the
//! integration tests. Nothing here calls the library's solvers.

#![allow(dead_code)]

use corrclust::{Label, SignedGraph, TerminalGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Double-loop recount of (positive, negative) mistakes.
pub fn naive_mistakes(g: &SignedGraph, assign: &[usize]) -> (usize, usize) {
    let (mut pos, mut neg) = (0, 0);
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            match g.label(u, v) {
                Label::Plus if assign[u] != assign[v] => pos += 1,
                Label::Minus if assign[u] == assign[v] => neg += 1,
                _ => {}
            }
        }
    }
    (pos, neg)
}

/// Every set partition of `0..n` as an assignment vector, built by
/// inserting each element into an existing block or a new one.
pub fn all_assignments(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            rec(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    rec(0, n, &mut Vec::new(), 0, &mut out);
    out
}

fn total(g: &SignedGraph, a: &[usize]) -> usize {
    let (p, n) = naive_mistakes(g, a);
    p + n
}

/// Optimum number of mistakes over all clusterings.
pub fn brute_opt(g: &SignedGraph) -> usize {
    all_assignments(g.n()).iter().map(|a| total(g, a)).min().unwrap_or(0)
}

/// Optimum over clusterings that keep every group whole and distinct groups
/// apart.
pub fn brute_opt_grouped(g: &SignedGraph, groups: &[Vec<usize>]) -> usize {
    all_assignments(g.n())
        .iter()
        .filter(|a| {
            groups.iter().all(|grp| grp.iter().all(|&v| a[v] == a[grp[0]]))
                && groups
                    .iter()
                    .enumerate()
                    .all(|(i, x)| groups[i + 1..].iter().all(|y| a[x[0]] != a[y[0]]))
        })
        .map(|a| total(g, a))
        .min()
        .unwrap_or(0)
}

/// Smallest vertex cover by trying every subset.
pub fn brute_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|m| edges.iter().all(|&(u, v)| m >> u & 1 == 1 || m >> v & 1 == 1))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap()
}

/// Minimum multiway cut by assigning every node to a terminal.
pub fn mwc_by_assignment(tg: &TerminalGraph) -> u64 {
    let terms = tg.terminals().to_vec();
    let k = terms.len() as u64;
    let n = tg.num_nodes();
    let free: Vec<usize> = (0..n).filter(|v| !terms.contains(v)).collect();
    let edges: Vec<_> = tg.edges().collect();
    let mut side = vec![0usize; n];
    for (i, &t) in terms.iter().enumerate() {
        side[t] = i;
    }
    let mut best = u64::MAX;
    for code in 0..k.pow(free.len() as u32) {
        let mut c = code;
        for &v in &free {
            side[v] = (c % k) as usize;
            c /= k;
        }
        let w: u64 = edges.iter().filter(|((a, b), _)| side[*a] != side[*b]).map(|(_, w)| w).sum();
        best = best.min(w);
    }
    best
}

/// Minimum multiway cut by trying every edge subset (at most ~12 edges).
pub fn mwc_by_edge_subsets(tg: &TerminalGraph) -> u64 {
    let edges: Vec<_> = tg.edges().collect();
    let n = tg.num_nodes();
    let mut best = u64::MAX;
    for m in 0u32..1 << edges.len() {
        let w: u64 = (0..edges.len()).filter(|i| m >> i & 1 == 1).map(|i| edges[i].1).sum();
        if w >= best {
            continue;
        }
        // union-find over kept edges
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (i, &((a, b), _)) in edges.iter().enumerate() {
            if m >> i & 1 == 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let roots: std::collections::HashSet<usize> =
            tg.terminals().iter().map(|&t| find(&mut parent, t)).collect();
        if roots.len() == tg.terminals().len() {
            best = w;
        }
    }
    best
}

/// Complete signed graph with each pair Plus with probability `p_plus`.
pub fn random_complete<R: Rng>(n: usize, p_plus: f64, rng: &mut R) -> SignedGraph {
    let mut g = SignedGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let l = if rng.gen_bool(p_plus) { Label::Plus } else { Label::Minus };
            g.set_label(u, v, l);
        }
    }
    g
}

/// Noisy planted clustering of `0..n`, as an assignment and a complete graph.
pub fn random_planted<R: Rng>(n: usize, clusters: usize, flip: f64, rng: &mut R) -> (SignedGraph, Vec<usize>) {
    let assign: Vec<usize> = (0..n).map(|_| rng.gen_range(0..clusters.max(1))).collect();
    let mut g = SignedGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let same = assign[u] == assign[v];
            let plus = same != rng.gen_bool(flip);
            g.set_label(u, v, if plus { Label::Plus } else { Label::Minus });
        }
    }
    (g, assign)
}

/// Random instance whose Missing pairs all touch `bad`: a noisy planted
/// complete graph where each bad-incident pair turns Missing with
/// probability `p_missing`.
pub fn random_with_bad<R: Rng>(n: usize, bad: &[usize], p_missing: f64, flip: f64, rng: &mut R) -> SignedGraph {
    let clusters = rng.gen_range(1..=3);
    let (mut g, _) = random_planted(n, clusters, flip, rng);
    for &b in bad {
        for v in 0..n {
            if v != b && rng.gen_bool(p_missing) {
                g.set_label(b, v, Label::Missing);
            }
        }
    }
    g
}

/// `k` distinct random vertices of `0..n`, sorted.
pub fn random_subset<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut s = all[..k.min(n)].to_vec();
    s.sort_unstable();
    s
}

/// Random terminal graph: terminals are nodes `0..k`, then `free` others.
pub fn random_terminal_graph<R: Rng>(k: usize, free: usize, density: f64, max_w: u64, rng: &mut R) -> TerminalGraph {
    let n = k + free;
    let mut tg = TerminalGraph::new(n, (0..k).collect());
    for a in 0..n {
        for b in a + 1..n {
            if (a >= k || b >= k) && rng.gen_bool(density) {
                tg.add_weight(a, b, rng.gen_range(1..=max_w));
            }
        }
    }
    tg
}

/// Signed graph with Missing pairs forming an arbitrary given edge set.
pub fn graph_with_missing(n: usize, missing: &[(usize, usize)]) -> SignedGraph {
    let mut g = SignedGraph::filled(n, Label::Plus);
    for &(u, v) in missing {
        g.set_label(u, v, Label::Missing);
    }
    g
}
