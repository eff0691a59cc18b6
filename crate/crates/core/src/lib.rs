//! Correlation clustering (minimizing disagreements) on signed graphs with
//! missing pairs, parameterized by the number `k` of vertices that cover all
//! missing pairs.
//!
//! The solver finds those `k` "bad" vertices, guesses how they split across
//! clusters, separates the guessed groups with a multiway cut of the Plus
//! graph, and clusters each resulting piece, keeping every group of bad
//! vertices together. Exact brute-force solvers are included for checking
//! results on small instances.
//!
//! ```
//! use corrclust::{parse_instance, solve, PipelineConfig};
//!
//! let g = parse_instance("p cc 4\n0 1 +\n0 2 +\n1 2 +\n0 3 -\n1 3 -\n").unwrap();
//! let report = solve(&g, &PipelineConfig::default()).unwrap();
//! assert_eq!(report.k, 1);
//! assert_eq!(report.mistakes.total, 0);
//! ```

pub mod bad_cluster;
pub mod complete;
pub mod cover;
pub mod delta;
pub mod enumerate;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod multiway;
pub mod pipeline;

pub use bad_cluster::{bad_cluster, canonicalize, clean_cluster, select_y, BadClusterSolver, CleanPair, WorkingGraph};
pub use complete::{constrained_cc, exact_cc, exact_cc_grouped, pivot_cc, solve_complete, SolverChoice, SolverKind, EXACT_CAP};
pub use cover::{empty_edge_graph, min_vertex_cover, CoverResult, SimpleGraph};
pub use delta::{is_delta_clean, is_delta_good_badset, is_delta_good_vertex, DeltaParams, Factor};
pub use enumerate::{enumerate_partitions, enumerate_subsets, BadPartition, EnumBudget};
pub use error::{Error, Result};
pub use flow::{CutWeight, FlowNetwork};
pub use graph::{count_mistakes, neighborhoods, Clustering, Label, MistakeReport, Neighborhoods, SignedGraph};
pub use io::{gen_planted, parse_clustering, parse_instance, write_clustering, write_instance, InstanceSpec, PlantedInstance};
pub use multiway::{apply_cut, build_auxiliary, multiway_cut_exact, multiway_cut_isolating, Component, CutApplication, CutSetOf, TerminalGraphOf};
pub use pipeline::{guarantee_bound, solve, solve_with_exact, CutSolver, GuaranteeBound, PipelineConfig, RunReport};

/// Terminal graph with the integer weights the pipeline uses.
pub type TerminalGraph = TerminalGraphOf<u64>;
/// Multiway cut over [`TerminalGraph`].
pub type CutSet = CutSetOf<u64>;
/// Narrower weights for small hand-built cut instances.
pub type TerminalGraph32 = TerminalGraphOf<u32>;
/// Exact rational used for δ and the guarantee formula.
pub type Rational = num_rational::Ratio<i64>;

/// Rescores a clustering; same contract as [`count_mistakes`].
pub fn check(g: &SignedGraph, c: &Clustering) -> Result<MistakeReport> {
    count_mistakes(g, c)
}
