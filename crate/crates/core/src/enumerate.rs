//! Set-partition and subset enumeration.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Partition of a vertex set into nonempty blocks, blocks ordered by their
/// smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct BadPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl BadPartition {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

/// Restricted-growth-string iterator over all set partitions of a sorted set.
pub struct Partitions {
    elems: Vec<usize>,
    rgs: Vec<usize>,
    // max of rgs[..i] for each i, kept alongside for O(1) successor checks
    prefix_max: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = BadPartition;

    fn next(&mut self) -> Option<BadPartition> {
        if self.done {
            return None;
        }
        let m = self.elems.len();
        let k = self.rgs.iter().max().map_or(0, |&x| x + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(self.elems[i]);
        }
        // advance: rightmost position that can still grow
        self.done = true;
        for i in (1..m).rev() {
            if self.rgs[i] <= self.prefix_max[i] {
                self.rgs[i] += 1;
                for j in i + 1..m {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1].max(self.rgs[j - 1]);
                }
                self.done = false;
                break;
            }
        }
        Some(BadPartition { blocks })
    }
}

/// All set partitions of `s`, each exactly once, in restricted-growth order.
/// `cap` bounds `|s|` since the stream has Bell(|s|) items.
pub fn enumerate_partitions(s: &[usize], cap: usize) -> Result<Partitions> {
    if s.len() > cap {
        return Err(Error::budget(format!(
            "cannot enumerate partitions of {} bad vertices (cap {cap})",
            s.len()
        )));
    }
    let elems = crate::graph::normalize_set(s);
    let m = elems.len();
    Ok(Partitions {
        elems,
        rgs: vec![0; m],
        prefix_max: vec![0; m],
        done: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumBudget {
    pub max_subsets: usize,
    pub max_subset_size: usize,
}

impl EnumBudget {
    pub fn new(max_subsets: usize, max_subset_size: usize) -> Result<Self> {
        if max_subsets == 0 || max_subset_size == 0 {
            return Err(Error::Config("enumeration budget entries must be >= 1".into()));
        }
        Ok(EnumBudget {
            max_subsets,
            max_subset_size,
        })
    }
}

/// Subsets of a set, possibly truncated to small ones (plus the full set).
pub struct Subsets {
    inner: Box<dyn Iterator<Item = Vec<usize>> + Send>,
    truncated: bool,
}

impl Subsets {
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.inner.next()
    }
}

/// All subsets of `s` when `2^|s| <= max_subsets`; otherwise every subset
/// of size `<= max_subset_size` followed by `s` itself.
pub fn enumerate_subsets(s: &[usize], budget: EnumBudget) -> Subsets {
    let elems = crate::graph::normalize_set(s);
    let m = elems.len();
    let fits = m < usize::BITS as usize && (1usize << m) <= budget.max_subsets;
    if fits {
        let inner = (0..1usize << m).map(move |bits| {
            (0..m).filter(|i| bits >> i & 1 == 1).map(|i| elems[i]).collect()
        });
        return Subsets {
            inner: Box::new(inner),
            truncated: false,
        };
    }
    let small = budget.max_subset_size.min(m);
    let full = elems.clone();
    let by_size = (0..=small).flat_map({
        let elems = elems.clone();
        move |k| elems.clone().into_iter().combinations(k)
    });
    let tail = (small < m).then_some(full);
    Subsets {
        inner: Box::new(by_size.chain(tail)),
        truncated: true,
    }
}
