//! Exact minimum independent dominating set on marked graphs.
//!
//! The solver is a branch-and-reduce search over [`MarkedGraph`]s whose
//! free part shrinks at every branch; once the free subgraph is a union of
//! small cliques the rest is handed to a constraint solver. Around it sit
//! brute-force oracles, instance generators, the Measure & Conquer
//! tooling used to bound the search, and a tracer for the lower-bound
//! graph family.

pub mod analysis;
pub mod batch;
pub mod csp;
pub mod graph;
pub mod instances;
pub mod lb_trace;
pub mod oracle;
pub mod solver;
pub mod vertex_set;

pub use analysis::WeightVector;
pub use graph::{GraphError, MarkedGraph, Vertex};
pub use solver::{solve, solve_with, CaseId, SearchStats, Solution, SolveError, SolverConfig};
pub use vertex_set::VertexSet;
