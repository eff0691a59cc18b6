//! Text formats and the planted-instance generator.
//!
//! Instance files are line oriented:
//!
//! ```text
//! # comment
//! p cc <n>
//! <u> <v> <+|->
//! ```
//!
//! with `0 <= u < v < n`; pairs that are not listed are missing. Clustering
//! files hold one cluster per line as space-separated vertex ids.

use std::io::Write;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Clustering, Label, SignedGraph};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_instance(text: &str) -> Result<SignedGraph> {
    let mut graph: Option<SignedGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "p" {
            if graph.is_some() {
                return Err(parse_err(line_no, "duplicate header"));
            }
            if fields.len() != 3 || fields[1] != "cc" {
                return Err(parse_err(line_no, "header must be `p cc <n>`"));
            }
            let n: usize = fields[2]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad vertex count {:?}", fields[2])))?;
            graph = Some(SignedGraph::new(n));
            continue;
        }
        let g = graph
            .as_mut()
            .ok_or_else(|| parse_err(line_no, "edge line before `p cc <n>` header"))?;
        if fields.len() != 3 {
            return Err(parse_err(line_no, "edge line must be `<u> <v> <+|->`"));
        }
        let id = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| parse_err(line_no, format!("bad vertex id {s:?}")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let label = match fields[2] {
            "+" => Label::Plus,
            "-" => Label::Minus,
            other => return Err(parse_err(line_no, format!("bad label {other:?}"))),
        };
        if u == v {
            return Err(parse_err(line_no, format!("self pair ({u}, {v})")));
        }
        if u >= g.n() || v >= g.n() {
            return Err(parse_err(line_no, format!("vertex out of range in ({u}, {v})")));
        }
        if g.label(u, v) != Label::Missing {
            return Err(parse_err(line_no, format!("pair ({u}, {v}) listed twice")));
        }
        g.set_label(u, v, label);
    }
    graph.ok_or_else(|| parse_err(0, "missing `p cc <n>` header"))
}

/// Canonical text: header, then labeled pairs sorted with `u < v`.
pub fn write_instance(g: &SignedGraph) -> String {
    let mut out = format!("p cc {}\n", g.n());
    for (u, v, l) in g.labeled_pairs() {
        let sign = if l == Label::Plus { '+' } else { '-' };
        out.push_str(&format!("{u} {v} {sign}\n"));
    }
    out
}

/// Reads a clustering of `0..n`; every vertex must appear exactly once.
pub fn parse_clustering(text: &str, n: usize) -> Result<Clustering> {
    let mut clusters = Vec::new();
    let mut seen = vec![false; n];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cluster = Vec::new();
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("bad vertex id {tok:?}")))?;
            if v >= n {
                return Err(Error::input(format!("line {}: vertex {v} out of range (n = {n})", idx + 1)));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::input(format!("line {}: vertex {v} listed twice", idx + 1)));
            }
            cluster.push(v);
        }
        clusters.push(cluster);
    }
    Clustering::from_clusters(n, &clusters)
}

pub fn write_clustering(c: &Clustering) -> String {
    c.clusters()
        .iter()
        .map(|cl| cl.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Parameters of a planted instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceSpec {
    /// Good vertices.
    pub n: usize,
    /// Bad vertices; every missing pair touches one of them.
    pub k_bad: usize,
    pub num_clusters: usize,
    pub flip_prob: f64,
    /// Fraction of pairs incident to bad vertices that are made missing.
    pub missing_frac: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: SignedGraph,
    pub ground_truth: Clustering,
    pub bad_vertices: Vec<usize>,
    /// Flipped pairs that are still labeled in the output.
    pub flipped: usize,
}

/// Generates a planted instance.
///
/// Vertices get ground-truth clusters (every cluster nonempty); pairs inside
/// a cluster are Plus and across are Minus, each flipped with `flip_prob`.
/// Then a uniformly random `missing_frac` share of the pairs touching the
/// bad vertices is made missing, so those vertices cover all missing pairs.
pub fn gen_planted(spec: &InstanceSpec) -> Result<PlantedInstance> {
    let total = spec.n + spec.k_bad;
    if !(0.0..=1.0).contains(&spec.flip_prob) || !(0.0..=1.0).contains(&spec.missing_frac) {
        return Err(Error::input("flip_prob and missing_frac must lie in [0, 1]"));
    }
    if total > 0 && (spec.num_clusters == 0 || spec.num_clusters > total) {
        return Err(Error::input(format!(
            "cannot place {total} vertices into {} nonempty clusters",
            spec.num_clusters
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut truth: Vec<usize> = (0..total).map(|v| v % spec.num_clusters.max(1)).collect();
    truth.shuffle(&mut rng);
    let mut bad_vertices = index::sample(&mut rng, total, spec.k_bad).into_vec();
    bad_vertices.sort_unstable();

    let mut graph = SignedGraph::new(total);
    let mut flipped_pairs = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            let same = truth[u] == truth[v];
            let flip = rng.gen_bool(spec.flip_prob);
            let label = if same != flip { Label::Plus } else { Label::Minus };
            graph.set_label(u, v, label);
            if flip {
                flipped_pairs.push((u, v));
            }
        }
    }

    let is_bad = crate::graph::mask(total, &bad_vertices);
    let incident: Vec<(usize, usize)> = (0..total)
        .flat_map(|u| (u + 1..total).map(move |v| (u, v)))
        .filter(|&(u, v)| is_bad[u] || is_bad[v])
        .collect();
    let amount = (spec.missing_frac * incident.len() as f64).round() as usize;
    for i in index::sample(&mut rng, incident.len(), amount.min(incident.len())) {
        let (u, v) = incident[i];
        graph.set_label(u, v, Label::Missing);
    }
    let flipped = flipped_pairs
        .iter()
        .filter(|&&(u, v)| graph.label(u, v) != Label::Missing)
        .count();

    Ok(PlantedInstance {
        graph,
        ground_truth: Clustering::from_assignment(&truth),
        bad_vertices,
        flipped,
    })
}
