//! Highest-label push-relabel max-flow over integer capacities.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::PrimInt;

/// Integer edge weight usable as a flow capacity.
pub trait CutWeight: PrimInt + Sum + Debug + Send + Sync + 'static {}

impl<T> CutWeight for T where T: PrimInt + Sum + Debug + Send + Sync + 'static {}

#[derive(Debug, Clone)]
struct Arc<W> {
    to: usize,
    rev: usize,
    cap: W,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<W> {
    adj: Vec<Vec<Arc<W>>>,
}

impl<W: CutWeight> FlowNetwork<W> {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Adds arc `u -> v` with capacity `cap` and its reverse with `rev_cap`.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: W, rev_cap: W) {
        let (iu, iv) = (self.adj[u].len(), self.adj[v].len());
        self.adj[u].push(Arc { to: v, rev: iv, cap });
        self.adj[v].push(Arc {
            to: u,
            rev: iu,
            cap: rev_cap,
        });
    }

    pub fn add_undirected(&mut self, u: usize, v: usize, cap: W) {
        self.add_arc(u, v, cap, cap);
    }

    /// Maximum `s`-`t` flow value. Residual capacities are left in place so
    /// [`FlowNetwork::source_side`] can read off a minimum cut.
    pub fn max_flow(&mut self, s: usize, t: usize) -> W {
        let n = self.n();
        assert!(s != t && s < n && t < n);
        let mut height = vec![0usize; n];
        let mut excess = vec![W::zero(); n];
        let mut current = vec![0usize; n];
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 1];
        let mut in_bucket = vec![false; n];
        let mut highest = 0;
        height[s] = n;

        for i in 0..self.adj[s].len() {
            let cap = self.adj[s][i].cap;
            if cap > W::zero() {
                // the source has unbounded supply
                excess[s] = excess[s] + cap;
                self.push(s, i, cap, &mut excess);
                let v = self.adj[s][i].to;
                if v != t && !in_bucket[v] {
                    buckets[height[v]].push(v);
                    in_bucket[v] = true;
                }
            }
        }

        loop {
            while highest > 0 && buckets[highest].is_empty() {
                highest -= 1;
            }
            let Some(u) = buckets[highest].pop() else {
                if highest == 0 {
                    break;
                }
                continue;
            };
            in_bucket[u] = false;
            // discharge u
            while excess[u] > W::zero() {
                if current[u] == self.adj[u].len() {
                    let min_h = self.adj[u]
                        .iter()
                        .filter(|a| a.cap > W::zero())
                        .map(|a| height[a.to])
                        .min()
                        .expect("node with excess has a residual arc back");
                    height[u] = min_h + 1;
                    current[u] = 0;
                    continue;
                }
                let i = current[u];
                let (v, cap) = (self.adj[u][i].to, self.adj[u][i].cap);
                if cap > W::zero() && height[u] == height[v] + 1 {
                    let amount = excess[u].min(cap);
                    self.push(u, i, amount, &mut excess);
                    if v != s && v != t && !in_bucket[v] {
                        buckets[height[v]].push(v);
                        in_bucket[v] = true;
                        highest = highest.max(height[v]);
                    }
                } else {
                    current[u] += 1;
                }
            }
        }
        excess[t]
    }

    fn push(&mut self, u: usize, i: usize, amount: W, excess: &mut [W]) {
        let (v, r) = (self.adj[u][i].to, self.adj[u][i].rev);
        self.adj[u][i].cap = self.adj[u][i].cap - amount;
        self.adj[v][r].cap = self.adj[v][r].cap + amount;
        excess[u] = excess[u] - amount;
        excess[v] = excess[v] + amount;
    }

    /// Vertices reachable from `s` in the residual network; after
    /// [`FlowNetwork::max_flow`] this is the smallest source side of a
    /// minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                if a.cap > W::zero() && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}
