//! End-to-end solve: bad vertices, partition guesses, cuts, and merging.

use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bad_cluster::{BadClusterSolver, BadClusterStats};
use crate::complete::{exact_cc, solve_complete, SolverChoice, SolverKind};
use crate::cover::{empty_edge_graph, min_vertex_cover};
use crate::delta::DeltaParams;
use crate::enumerate::{enumerate_partitions, BadPartition, EnumBudget};
use crate::error::{Error, Result};
use crate::graph::{count_mistakes, Clustering, Label, MistakeReport, SignedGraph};
use crate::multiway::{apply_cut, build_auxiliary, multiway_cut_exact, multiway_cut_isolating, EXACT_CUT_CAP};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutSolver {
    Isolating,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PipelineConfig {
    pub delta: DeltaParams,
    pub complete_solver: SolverChoice,
    pub cut_solver: CutSolver,
    pub enum_max_subsets: usize,
    /// Size cap for truncated subset enumeration; `None` means `2|B|`.
    pub enum_max_size: Option<usize>,
    pub max_k: usize,
    pub exact_cut_cap: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            delta: DeltaParams::default(),
            complete_solver: SolverChoice::default(),
            cut_solver: CutSolver::Isolating,
            enum_max_subsets: 4096,
            enum_max_size: None,
            max_k: 6,
            exact_cut_cap: EXACT_CUT_CAP,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.complete_solver.validate()?;
        EnumBudget::new(self.enum_max_subsets, self.enum_max_size.unwrap_or(1))?;
        Ok(())
    }

    fn budget_for(&self, bad: usize) -> EnumBudget {
        EnumBudget {
            max_subsets: self.enum_max_subsets,
            max_subset_size: self.enum_max_size.unwrap_or(2 * bad).max(1),
        }
    }

    fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// How one partition guess fared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSummary {
    pub blocks: Vec<Vec<usize>>,
    pub cut_weight: u64,
    pub applied_cut_weight: u64,
    pub components: usize,
    pub bad_components: Vec<BadClusterStats>,
    pub candidates: usize,
    pub truncated: bool,
    pub mistakes: usize,
}

/// Where the returned clustering came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selected {
    Partition(usize),
    CompleteSolver,
    OneCluster,
    Singletons,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub bad_vertices: Vec<usize>,
    /// Best partition guess; empty when there are no bad vertices.
    pub partition: Vec<Vec<usize>>,
    pub selected: Selected,
    pub clusters: Vec<Vec<usize>>,
    pub mistakes: MistakeReport,
    pub config: PipelineConfig,
    pub seed: u64,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_opt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub partitions: Vec<PartitionSummary>,
    pub runtime_ms: u64,
    #[serde(skip)]
    pub clustering: Clustering,
}

impl RunReport {
    /// Records the exact optimum and the resulting ratio.
    pub fn set_exact_opt(&mut self, opt: usize) {
        self.exact_opt = Some(opt);
        self.ratio = (opt > 0).then(|| self.mistakes.total as f64 / opt as f64);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with `runtime_ms` zeroed, for reproducibility checks.
    pub fn to_json_without_runtime(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.runtime_ms = 0;
        copy.to_json()
    }
}

struct PartitionOutcome {
    clustering: Clustering,
    summary: PartitionSummary,
}

fn solve_partition(
    g: &SignedGraph,
    p: &BadPartition,
    index: usize,
    cfg: &PipelineConfig,
) -> Result<PartitionOutcome> {
    let tg = build_auxiliary(g, p);
    let cut = match cfg.cut_solver {
        CutSolver::Isolating => multiway_cut_isolating(&tg)?,
        CutSolver::Exact => multiway_cut_exact(&tg, cfg.exact_cut_cap)?,
    };
    let app = apply_cut(g, p, &cut)?;
    let mut rng = cfg.stream(index as u64 + 1);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut bad_components = Vec::new();
    for comp in &app.components {
        match comp.block {
            Some(i) => {
                let sub = app.h.induced(&comp.vertices);
                let local_b: Vec<usize> = p.blocks[i]
                    .iter()
                    .map(|v| comp.vertices.binary_search(v).expect("block inside its component"))
                    .collect();
                let child = ChaCha8Rng::seed_from_u64(rng.gen());
                let mut solver = BadClusterSolver::new(
                    &sub,
                    &local_b,
                    cfg.delta,
                    cfg.complete_solver,
                    cfg.budget_for(local_b.len()),
                    child,
                )?;
                let (local, stats) = solver.run()?;
                bad_components.push(stats);
                clusters.extend(
                    local
                        .clusters()
                        .into_iter()
                        .map(|c| c.into_iter().map(|v| comp.vertices[v]).collect()),
                );
            }
            None => clusters.extend(solve_complete(&app.h, &comp.vertices, &cfg.complete_solver, &mut rng)?),
        }
    }
    let clustering = Clustering::from_clusters(g.n(), &clusters)?;
    for block in &p.blocks {
        if !clustering.keeps_together(block) {
            return Err(Error::Invariant("a bad block was split".into()));
        }
    }
    let mistakes = count_mistakes(g, &clustering)?.total;
    Ok(PartitionOutcome {
        clustering,
        summary: PartitionSummary {
            blocks: p.blocks.clone(),
            cut_weight: cut.weight,
            applied_cut_weight: app.applied.weight,
            components: app.components.len(),
            candidates: bad_components.iter().map(|s| s.candidates).sum(),
            truncated: bad_components.iter().any(|s| s.truncated),
            bad_components,
            mistakes,
        },
    })
}

/// Runs the full pipeline on `g`.
pub fn solve(g: &SignedGraph, cfg: &PipelineConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    let cover = min_vertex_cover(&empty_edge_graph(g), cfg.max_k)?;
    let all: Vec<usize> = (0..g.n()).collect();

    let mut candidates: Vec<(Selected, Clustering)> = Vec::new();
    let mut summaries = Vec::new();
    let mut partition = Vec::new();

    if cover.k == 0 {
        let clusters = solve_complete(g, &all, &cfg.complete_solver, &mut cfg.stream(0))?;
        candidates.push((Selected::CompleteSolver, Clustering::from_clusters(g.n(), &clusters)?));
    } else {
        let partitions: Vec<BadPartition> = enumerate_partitions(&cover.bad_vertices, cfg.max_k)?.collect();
        let outcomes: Vec<Result<PartitionOutcome>> = partitions
            .par_iter()
            .enumerate()
            .map(|(i, p)| solve_partition(g, p, i, cfg))
            .collect();
        for (i, outcome) in outcomes.into_iter().enumerate() {
            let outcome = outcome.map_err(|e| e.with_context(&format!("partition {:?}", partitions[i].blocks)))?;
            candidates.push((Selected::Partition(i), outcome.clustering));
            summaries.push(outcome.summary);
        }
        let best = summaries
            .iter()
            .enumerate()
            .min_by_key(|(i, s)| (s.mistakes, *i))
            .map(|(i, _)| i)
            .expect("at least one partition");
        partition = summaries[best].blocks.clone();

        // Baselines keep the output no worse than the trivial clusterings.
        let mut relaxed = g.clone();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                if g.label(u, v) == Label::Missing {
                    relaxed.set_label(u, v, Label::Minus);
                }
            }
        }
        if cfg.complete_solver.kind == SolverKind::Pivot || g.n() <= cfg.complete_solver.exact_cap {
            let clusters = solve_complete(&relaxed, &all, &cfg.complete_solver, &mut cfg.stream(0))?;
            candidates.push((Selected::CompleteSolver, Clustering::from_clusters(g.n(), &clusters)?));
        }
        candidates.push((Selected::OneCluster, Clustering::one_cluster(g.n())));
        candidates.push((Selected::Singletons, Clustering::singletons(g.n())));
    }

    let mut best: Option<(usize, MistakeReport)> = None;
    for (i, (_, c)) in candidates.iter().enumerate() {
        let m = count_mistakes(g, c)?;
        if best.is_none_or(|(_, b)| m.total < b.total) {
            best = Some((i, m));
        }
    }
    let (winner, mistakes) = best.expect("at least one candidate");
    let (selected, clustering) = candidates.swap_remove(winner);

    Ok(RunReport {
        version: REPORT_VERSION,
        n: g.n(),
        k: cover.k,
        bad_vertices: cover.bad_vertices,
        partition,
        selected,
        clusters: clustering.clusters(),
        mistakes,
        config: *cfg,
        seed: cfg.seed,
        truncated: summaries.iter().any(|s| s.truncated),
        exact_opt: None,
        ratio: None,
        partitions: summaries,
        runtime_ms: start.elapsed().as_millis() as u64,
        clustering,
    })
}

/// Solve plus the exact optimum when `g` is small enough.
pub fn solve_with_exact(g: &SignedGraph, cfg: &PipelineConfig, exact_cap: usize) -> Result<RunReport> {
    let mut report = solve(g, cfg)?;
    if g.n() <= exact_cap {
        let opt = exact_cc(g, exact_cap)?;
        report.set_exact_opt(count_mistakes(g, &opt)?.total);
    }
    Ok(report)
}

/// Worst-case factor `18/δ² + 7.3` together with whether it actually
/// applies to a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuaranteeBound {
    pub value: Ratio<i64>,
    pub applies: bool,
}

impl GuaranteeBound {
    pub fn for_delta(delta: Ratio<i64>) -> Self {
        let value = Ratio::from_integer(18) / (delta * delta) + Ratio::new(73, 10);
        let applies = delta > Ratio::from_integer(0) && delta <= Ratio::new(1, 5);
        GuaranteeBound { value, applies }
    }
}

/// The worst-case factor for `cfg.delta`. `applies` holds only with exact
/// sub-solvers and a subset budget no branch can exceed.
pub fn guarantee_bound(cfg: &PipelineConfig) -> GuaranteeBound {
    let mut bound = GuaranteeBound::for_delta(cfg.delta.ratio());
    bound.applies &= cfg.cut_solver == CutSolver::Exact
        && cfg.complete_solver.kind == SolverKind::Exact
        && !truncation_possible(cfg);
    bound
}

/// Whether some subset enumeration could exceed the budget for a bad block
/// of up to `max_k` vertices.
fn truncation_possible(cfg: &PipelineConfig) -> bool {
    let b = Ratio::from_integer(cfg.max_k as i64);
    let d = cfg.delta.ratio();
    let two = Ratio::from_integer(2);
    let largest = [
        two * b * b + two / d * b,
        (two + two / d) * b * b,
        Ratio::from_integer(3) * b,
    ]
    .into_iter()
    .max()
    .expect("nonempty")
    .floor()
    .to_integer();
    largest >= 63 || (1u64 << largest) > cfg.enum_max_subsets as u64
}
