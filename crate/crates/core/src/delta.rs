//! δ-good / δ-clean predicates.
//!
//! Thresholds are compared in integers: `count * den <= factor * num * size`,
//! so there are no floating-point ties to worry about.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{mask, Label, SignedGraph};

/// Exact rational δ with `0 < δ <= 1/5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaParams {
    delta: Ratio<i64>,
}

impl DeltaParams {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("delta has zero denominator".into()));
        }
        Self::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(delta: Ratio<i64>) -> Result<Self> {
        if delta <= Ratio::from_integer(0) || delta > Ratio::new(1, 5) {
            return Err(Error::Config(format!("delta must lie in (0, 1/5], got {delta}")));
        }
        Ok(DeltaParams { delta })
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.delta
    }

    pub(crate) fn num(&self) -> u128 {
        *self.delta.numer() as u128
    }

    pub(crate) fn den(&self) -> u128 {
        *self.delta.denom() as u128
    }

    /// `count <= factor * δ * size`
    pub(crate) fn within(&self, count: usize, factor: u32, size: usize) -> bool {
        count as u128 * self.den() <= factor as u128 * self.num() * size as u128
    }

    /// `count >= (1 - factor * δ) * size`
    pub(crate) fn at_least_complement(&self, count: usize, factor: u32, size: usize) -> bool {
        let lhs = count as i128 * self.den() as i128;
        let rhs = (self.den() as i128 - factor as i128 * self.num() as i128) * size as i128;
        lhs >= rhs
    }
}

impl Default for DeltaParams {
    fn default() -> Self {
        DeltaParams {
            delta: Ratio::new(1, 65),
        }
    }
}

impl fmt::Display for DeltaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.delta.numer(), self.delta.denom())
    }
}

impl FromStr for DeltaParams {
    type Err = Error;

    /// Accepts `a/b` or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse delta {s:?}; expected a/b"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        DeltaParams::new(num, den)
    }
}

impl Serialize for DeltaParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Multiplier applied to δ in a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    One,
    Three,
    Nine,
    Thirteen,
}

impl Factor {
    pub fn value(self) -> u32 {
        match self {
            Factor::One => 1,
            Factor::Three => 3,
            Factor::Nine => 9,
            Factor::Thirteen => 13,
        }
    }

    fn check(self, p: &DeltaParams) -> Result<()> {
        if self.value() as u128 * p.num() > p.den() {
            return Err(Error::Config(format!(
                "{} * delta = {}/{} exceeds 1",
                self.value(),
                self.value() as u128 * p.num(),
                p.den()
            )));
        }
        Ok(())
    }
}

/// `|N⁻(v) ∩ C|` and `|N⁺(v) \ C|`.
pub(crate) fn vertex_counts(h: &SignedGraph, v: usize, in_c: &[bool]) -> (usize, usize) {
    let minus_in = h.minus_neighbors(v).iter().filter(|&&x| in_c[x]).count();
    let plus_out = h.plus_neighbors(v).iter().filter(|&&x| !in_c[x]).count();
    (minus_in, plus_out)
}

pub(crate) fn vertex_good(
    h: &SignedGraph,
    v: usize,
    in_c: &[bool],
    c_len: usize,
    p: &DeltaParams,
    factor: u32,
) -> bool {
    let (minus_in, plus_out) = vertex_counts(h, v, in_c);
    p.within(minus_in, factor, c_len) && p.within(plus_out, factor, c_len)
}

/// `|E⁻(B, C \ B)|` and `|E⁺(B, V \ (C ∪ B))|`.
pub(crate) fn badset_counts(
    h: &SignedGraph,
    b: &[usize],
    in_b: &[bool],
    in_c: &[bool],
) -> (usize, usize) {
    let mut minus_in = 0;
    let mut plus_out = 0;
    for &u in b {
        minus_in += h
            .minus_neighbors(u)
            .iter()
            .filter(|&&x| in_c[x] && !in_b[x])
            .count();
        plus_out += h
            .plus_neighbors(u)
            .iter()
            .filter(|&&x| !in_c[x] && !in_b[x])
            .count();
    }
    (minus_in, plus_out)
}

pub(crate) fn badset_good(
    h: &SignedGraph,
    b: &[usize],
    in_b: &[bool],
    in_c: &[bool],
    c_len: usize,
    p: &DeltaParams,
    factor: u32,
) -> bool {
    let (minus_in, plus_out) = badset_counts(h, b, in_b, in_c);
    let size = b.len() * c_len;
    p.within(minus_in, factor, size) && p.within(plus_out, factor, size)
}

pub(crate) fn clean(
    h: &SignedGraph,
    c: &[usize],
    b: &[usize],
    in_b: &[bool],
    in_c: &[bool],
    p: &DeltaParams,
    factor: u32,
) -> bool {
    let hosts_b = !b.is_empty() && in_c[b[0]];
    c.iter()
        .filter(|&&v| !in_b[v])
        .all(|&v| vertex_good(h, v, in_c, c.len(), p, factor))
        && (!hosts_b || badset_good(h, b, in_b, in_c, c.len(), p, factor))
}

/// Whether good vertex `v` is (factor·δ)-good w.r.t. `c`.
pub fn is_delta_good_vertex(
    h: &SignedGraph,
    v: usize,
    c: &[usize],
    p: &DeltaParams,
    factor: Factor,
) -> Result<bool> {
    factor.check(p)?;
    h.check_vertices(c)?;
    h.check_vertices(&[v])?;
    let in_c = mask(h.n(), c);
    let c_len = in_c.iter().filter(|&&x| x).count();
    Ok(vertex_good(h, v, &in_c, c_len, p, factor.value()))
}

/// Whether the bad set `b ⊆ c` is (factor·δ)-good w.r.t. `c`.
pub fn is_delta_good_badset(
    h: &SignedGraph,
    b: &[usize],
    c: &[usize],
    p: &DeltaParams,
    factor: Factor,
) -> Result<bool> {
    factor.check(p)?;
    h.check_vertices(c)?;
    h.check_vertices(b)?;
    let in_c = mask(h.n(), c);
    if b.iter().any(|&v| !in_c[v]) {
        return Err(Error::input("bad set is not contained in the cluster"));
    }
    let b = crate::graph::normalize_set(b);
    let in_b = mask(h.n(), &b);
    let c_len = in_c.iter().filter(|&&x| x).count();
    Ok(badset_good(h, &b, &in_b, &in_c, c_len, p, factor.value()))
}

/// Whether `c` is (factor·δ)-clean given bad set `b`, which must be either
/// contained in or disjoint from `c`.
pub fn is_delta_clean(
    h: &SignedGraph,
    c: &[usize],
    b: &[usize],
    p: &DeltaParams,
    factor: Factor,
) -> Result<bool> {
    factor.check(p)?;
    h.check_vertices(c)?;
    h.check_vertices(b)?;
    let c = crate::graph::normalize_set(c);
    let b = crate::graph::normalize_set(b);
    let in_c = mask(h.n(), &c);
    let inside = b.iter().filter(|&&v| in_c[v]).count();
    if inside != 0 && inside != b.len() {
        return Err(Error::input("bad set partially overlaps the cluster"));
    }
    let in_b = mask(h.n(), &b);
    Ok(clean(h, &c, &b, &in_b, &in_c, p, factor.value()))
}

/// Number of edges with label `label` between `a` and `b` (disjoint sets).
pub(crate) fn edges_between(h: &SignedGraph, a: &[usize], in_b: &[bool], label: Label) -> usize {
    a.iter()
        .map(|&u| {
            let adj = match label {
                Label::Plus => h.plus_neighbors(u),
                Label::Minus => h.minus_neighbors(u),
                Label::Missing => unreachable!("missing pairs are not edges"),
            };
            adj.iter().filter(|&&x| in_b[x]).count()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_into(c_size: usize) -> SignedGraph {
        // vertex 0 is Plus to 1..c_size, Minus to everything after
        let mut g = SignedGraph::filled(c_size + 3, Label::Minus);
        for v in 1..c_size {
            g.set_label(0, v, Label::Plus);
        }
        g
    }

    #[test]
    fn default_delta_is_one_sixty_fifth() {
        assert_eq!(DeltaParams::default().ratio(), Ratio::new(1, 65));
        assert_eq!("1/65".parse::<DeltaParams>().unwrap(), DeltaParams::default());
        assert!("1/4".parse::<DeltaParams>().is_err());
        assert!("0/4".parse::<DeltaParams>().is_err());
        assert!("x".parse::<DeltaParams>().is_err());
    }

    #[test]
    fn fully_agreeing_vertex_is_good() {
        let g = star_into(10);
        let c: Vec<usize> = (0..10).collect();
        let p = DeltaParams::default();
        assert!(is_delta_good_vertex(&g, 0, &c, &p, Factor::One).unwrap());
    }

    #[test]
    fn all_minus_vertex_is_bad() {
        let g = SignedGraph::filled(6, Label::Minus);
        let c = [1, 2, 3, 4, 5];
        let p = DeltaParams::new(1, 5).unwrap();
        assert!(!is_delta_good_vertex(&g, 0, &c, &p, Factor::One).unwrap());
    }

    #[test]
    fn vacuous_factor_is_a_config_error() {
        let g = SignedGraph::filled(3, Label::Plus);
        let p = DeltaParams::new(1, 5).unwrap();
        assert!(matches!(
            is_delta_good_vertex(&g, 0, &[0, 1], &p, Factor::Nine),
            Err(Error::Config(_))
        ));
        assert!(is_delta_good_vertex(&g, 0, &[0, 1], &p, Factor::One).is_ok());
    }

    #[test]
    fn badset_equal_to_cluster_only_sees_outgoing_plus() {
        let mut g = SignedGraph::filled(5, Label::Minus);
        g.set_label(0, 1, Label::Plus);
        let p = DeltaParams::new(1, 5).unwrap();
        // B = C = {0,1}: no good vertices inside, no Plus edges leaving.
        assert!(is_delta_good_badset(&g, &[0, 1], &[0, 1], &p, Factor::One).unwrap());
        g.set_label(0, 4, Label::Plus);
        // one Plus edge out vs threshold 1/5 * 2 * 2 = 0.8
        assert!(!is_delta_good_badset(&g, &[0, 1], &[0, 1], &p, Factor::One).unwrap());
        assert!(is_delta_good_badset(&g, &[0, 1], &[0, 1], &p, Factor::Three).unwrap());
        assert!(is_delta_good_badset(&g, &[0, 4], &[0, 1], &p, Factor::One).is_err());
    }

    #[test]
    fn clean_cases() {
        let mut g = SignedGraph::filled(6, Label::Minus);
        for u in 0..4 {
            for v in u + 1..4 {
                g.set_label(u, v, Label::Plus);
            }
        }
        let p = DeltaParams::default();
        assert!(is_delta_clean(&g, &[0, 1, 2, 3], &[], &p, Factor::One).unwrap());
        assert!(is_delta_clean(&g, &[0, 1, 2, 3], &[5], &p, Factor::One).unwrap());
        assert!(!is_delta_clean(&g, &[0, 1, 2, 3, 4], &[], &p, Factor::One).unwrap());
        assert!(is_delta_clean(&g, &[0, 1, 2, 3], &[0, 1], &p, Factor::One).unwrap());
        assert!(is_delta_clean(&g, &[0, 1], &[1, 5], &p, Factor::One).is_err());
    }
}
