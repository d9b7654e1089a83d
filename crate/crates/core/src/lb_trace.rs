//! Instrumented solver runs on the lower-bound family `G'_l`.
//!
//! While more than four free vertices remain, every node is expected to
//! branch by rule (9) on the first vertex of a free suffix `u_k, v_k, ..`
//! or `v_k, u_{k+1}, ..`, with no marked vertices, and its three children
//! to remove 3, 4 and 5 vertices. The report records each node so those
//! claims can be checked rather than assumed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::batch;
use crate::graph::Vertex;
use crate::instances::{gen_lower_bound, InstanceError};
use crate::solver::{
    selection_candidates, solve_observed, CaseId, NodeEvent, SolveError, SolverConfig,
};

/// Below this many free vertices the trace records but does not check.
pub const CHECK_THRESHOLD: usize = 4;

pub const EXPECTED_REMOVALS: [usize; 3] = [3, 4, 5];

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace needs l >= 3, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `u_i` for even identifiers and `v_i` for odd ones.
pub fn vertex_name(x: Vertex) -> String {
    if x.is_multiple_of(2) {
        format!("u{}", x / 2 + 1)
    } else {
        format!("v{}", x.div_ceil(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: u64,
    pub parent: Option<u64>,
    pub depth: usize,
    pub case: CaseId,
    pub free: usize,
    pub marked: usize,
    /// Smallest free vertex, if the free set is a suffix of `0..2l`.
    pub suffix_start: Option<Vertex>,
    pub candidates: Vec<Vertex>,
    /// Free vertices removed by each child, in branching order.
    pub removals: Vec<usize>,
}

impl NodeRecord {
    pub fn checked(&self) -> bool {
        self.free > CHECK_THRESHOLD
    }

    /// `{u_k, v_l}` or `{v_k, v_l}` with `u_k` or `v_k` the suffix start.
    fn candidate_shape(&self, last: Vertex) -> bool {
        self.marked == 0
            && self
                .suffix_start
                .is_some_and(|s| self.candidates == [s, last])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub l: usize,
    pub solution_size: Option<usize>,
    pub nodes: u64,
    pub leaves: u64,
    pub case9_only_above_4: bool,
    pub removals_match: bool,
    pub candidate_shapes_match: bool,
    /// Layer indices `k` of the suffix start over checked nodes.
    pub k_range: Option<(usize, usize)>,
    pub records: Vec<NodeRecord>,
}

pub fn trace(l: usize) -> Result<TraceReport, TraceError> {
    if l < 3 {
        return Err(TraceError::TooSmall(l));
    }
    let g = gen_lower_bound(l)?;
    let last = 2 * l - 1;
    let mut records: Vec<NodeRecord> = Vec::new();
    let mut observer = |e: &NodeEvent<'_>| {
        let free = e.graph.free();
        let suffix_start = match free.first() {
            Some(s) if free.len() == last + 1 - s && free.iter().all(|v| v >= s) => Some(s),
            None => Some(last + 1),
            _ => None,
        };
        records.push(NodeRecord {
            id: e.id,
            parent: e.parent,
            depth: e.depth,
            case: e.case,
            free: free.len(),
            marked: e.graph.marked().len(),
            suffix_start,
            candidates: selection_candidates(e.graph),
            removals: Vec::new(),
        });
    };
    let (solution, stats) = solve_observed(&g, &SolverConfig::default(), &mut observer)?;

    // ids are preorder indices, so records[id] is node id
    for i in 0..records.len() {
        if let Some(p) = records[i].parent {
            let removed = records[p as usize].free - records[i].free;
            records[p as usize].removals.push(removed);
        }
    }

    let checked: Vec<&NodeRecord> = records.iter().filter(|r| r.checked()).collect();
    let case9_only_above_4 = checked.iter().all(|r| r.case == CaseId::DegreeTwoMark);
    let removals_match = checked.iter().all(|r| r.removals == EXPECTED_REMOVALS);
    let candidate_shapes_match = checked.iter().all(|r| r.candidate_shape(last));
    let ks = checked
        .iter()
        .filter_map(|r| r.suffix_start)
        .map(|s| s / 2 + 1);
    let k_range = ks.clone().min().zip(ks.max());

    Ok(TraceReport {
        l,
        solution_size: solution.size(),
        nodes: stats.nodes,
        leaves: stats.leaves,
        case9_only_above_4,
        removals_match,
        candidate_shapes_match,
        k_range,
        records,
    })
}

impl TraceReport {
    pub fn root(&self) -> &NodeRecord {
        &self.records[0]
    }

    pub fn all_checks_pass(&self) -> bool {
        self.case9_only_above_4 && self.removals_match && self.candidate_shapes_match
    }

    /// One `node` line per search node.
    pub fn records_text(&self) -> String {
        let mut out = String::new();
        let names = |xs: &[Vertex]| {
            xs.iter()
                .map(|&x| vertex_name(x))
                .collect::<Vec<_>>()
                .join(",")
        };
        let nums = |xs: &[usize]| {
            xs.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        for r in &self.records {
            writeln!(
                out,
                "node l={} id={} parent={} depth={} free={} marked={} case={} suffix={} candidates={} removals={}",
                self.l,
                r.id,
                r.parent.map_or("-".to_string(), |p| p.to_string()),
                r.depth,
                r.free,
                r.marked,
                r.case.label(),
                r.suffix_start
                    .filter(|&s| s < 2 * self.l)
                    .map_or("-".to_string(), vertex_name),
                if r.candidates.is_empty() { "-".to_string() } else { names(&r.candidates) },
                if r.removals.is_empty() { "-".to_string() } else { nums(&r.removals) },
            )
            .unwrap();
        }
        out
    }

    pub fn summary_line(&self) -> String {
        format!(
            "trace l={} nodes={} leaves={} case9_only_above_4={} removals_3_4_5={} candidate_shapes={} k_range={}",
            self.l,
            self.nodes,
            self.leaves,
            self.case9_only_above_4,
            self.removals_match,
            self.candidate_shapes_match,
            self.k_range.map_or("-".to_string(), |(a, b)| format!("{a}..{b}")),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub l: usize,
    pub nodes: u64,
    pub leaves: u64,
    /// `leaves(l) / leaves(l-1)`; absent on the first row.
    pub ratio: Option<f64>,
    pub checks_pass: bool,
    pub k_range: Option<(usize, usize)>,
}

/// Leaf counts for `l_min..=l_max`, one solver run per `l`, run in
/// parallel across `l`.
pub fn leaf_growth(l_min: usize, l_max: usize) -> Result<Vec<GrowthRow>, TraceError> {
    if l_min < 3 {
        return Err(TraceError::TooSmall(l_min));
    }
    let ls: Vec<usize> = (l_min..=l_max).collect();
    let reports = batch::par_map(&ls, |&l| trace(l));
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(ls.len());
    for report in reports {
        let report = report?;
        let ratio = rows
            .last()
            .map(|prev| report.leaves as f64 / prev.leaves as f64);
        rows.push(GrowthRow {
            l: report.l,
            nodes: report.nodes,
            leaves: report.leaves,
            ratio,
            checks_pass: report.all_checks_pass(),
            k_range: report.k_range,
        });
    }
    Ok(rows)
}

/// Expected per-`l` leaf ratio: two vertices per layer at the recurrence's
/// growth rate per vertex.
pub fn expected_layer_ratio() -> f64 {
    crate::analysis::lb_growth_rate().powi(2)
}

/// Smallest `C` with `leaves(l) >= rate^(2l) / C` over the rows.
pub fn growth_constant(rows: &[GrowthRow], rate: f64) -> f64 {
    rows.iter()
        .map(|r| rate.powi(2 * r.l as i32) / r.leaves as f64)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(vertex_name(0), "u1");
        assert_eq!(vertex_name(1), "v1");
        assert_eq!(vertex_name(9), "v5");
    }

    #[test]
    fn l5_has_the_expected_tree() {
        let r = trace(5).unwrap();
        assert!(r.case9_only_above_4);
        assert!(r.removals_match);
        assert!(r.candidate_shapes_match);
        assert_eq!(r.root().candidates, vec![0, 9]);
        assert_eq!(r.root().removals, vec![3, 4, 5]);
        assert_eq!(r.root().case, CaseId::DegreeTwoMark);
        let oracle = crate::oracle::exhaustive_mids(&gen_lower_bound(5).unwrap()).unwrap();
        assert_eq!(r.solution_size, oracle.size());
        assert_eq!(r.records.len() as u64, r.nodes);
    }

    #[test]
    fn text_output() {
        let r = trace(3).unwrap();
        let text = r.records_text();
        assert_eq!(text.lines().count() as u64, r.nodes);
        assert!(text.starts_with("node l=3 id=0 parent=- depth=0 free=6 marked=0 case=case9 suffix=u1 candidates=u1,v3 removals=3,4,5\n"));
        assert!(r.summary_line().starts_with("trace l=3 "));
    }

    #[test]
    fn growth_rows() {
        assert!(trace(2).is_err());
        let rows = leaf_growth(3, 9).unwrap();
        assert_eq!(rows.len(), 7);
        assert!(rows[0].ratio.is_none());
        assert!(rows.windows(2).all(|w| w[1].leaves > w[0].leaves));
        assert!(rows.iter().all(|r| r.checks_pass));
        assert!(growth_constant(&rows, 1.3247).is_finite());
        assert!((expected_layer_ratio() - 1.7549).abs() < 1e-3);
    }
}
