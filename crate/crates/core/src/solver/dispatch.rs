//! Rule selection. [`plan`] walks the eighteen rules in listing order and
//! returns the first one whose guard holds, together with the vertices it
//! branches on. Every choice among several candidates goes to the smallest
//! vertex identifier.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{ComponentShape, MarkedGraph, Vertex};
use crate::vertex_set::VertexSet;

/// The rule applied at a search node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// `F ∪ M = ∅`.
    Empty,
    /// (1) a marked vertex has no free neighbor.
    Undominated,
    /// (2) clique union with a free vertex of free degree at least 5.
    CliqueBranchAll,
    /// (3) clique union with a free vertex of free degree 4.
    CliqueBranchOne,
    /// (4) clique union of cliques of size at most 4.
    CspEndgame,
    /// (5) a marked vertex has exactly one free neighbor.
    ForcedNeighbor,
    /// (6) a complete bipartite component on more than two vertices.
    CompleteBipartite,
    /// (7) a triangle with exactly one vertex of free degree at least 3.
    TriangleCut,
    /// (8)
    DegreeOne,
    /// (9)
    DegreeTwoMark,
    /// (10)
    DegreeTwoAll,
    /// (11)
    CubicNeighborhood,
    /// (12)
    DegreeFourNeighbor,
    /// (13)
    DegreeFiveNeighbor,
    /// (14)
    CliqueNeighborhood,
    /// (15)
    DegreeThreeMark,
    /// (16)
    DegreeThreeAll,
    /// (17)
    DegreeFour,
    /// (18)
    HighDegree,
}

impl CaseId {
    pub const ALL: [CaseId; 19] = [
        CaseId::Empty,
        CaseId::Undominated,
        CaseId::CliqueBranchAll,
        CaseId::CliqueBranchOne,
        CaseId::CspEndgame,
        CaseId::ForcedNeighbor,
        CaseId::CompleteBipartite,
        CaseId::TriangleCut,
        CaseId::DegreeOne,
        CaseId::DegreeTwoMark,
        CaseId::DegreeTwoAll,
        CaseId::CubicNeighborhood,
        CaseId::DegreeFourNeighbor,
        CaseId::DegreeFiveNeighbor,
        CaseId::CliqueNeighborhood,
        CaseId::DegreeThreeMark,
        CaseId::DegreeThreeAll,
        CaseId::DegreeFour,
        CaseId::HighDegree,
    ];

    /// Rule number 1..=18, `None` for [`CaseId::Empty`].
    pub fn number(self) -> Option<u8> {
        match self {
            CaseId::Empty => None,
            other => Some(other as u8),
        }
    }

    pub fn from_number(n: u8) -> Option<CaseId> {
        match n {
            1..=18 => Some(Self::ALL[n as usize]),
            _ => None,
        }
    }

    /// Rules that never recurse.
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            CaseId::Empty | CaseId::Undominated | CaseId::CspEndgame
        )
    }

    /// Rules that make at least two recursive calls.
    pub fn is_branching(self) -> bool {
        !self.is_terminal() && self != CaseId::ForcedNeighbor
    }

    /// Short stable name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            CaseId::Empty => "empty",
            CaseId::CspEndgame => "csp_endgame",
            other => RULE_LABELS[other as usize],
        }
    }
}

const RULE_LABELS: [&str; 19] = [
    "empty", "case1", "case2", "case3", "case4", "case5", "case6", "case7", "case8", "case9",
    "case10", "case11", "case12", "case13", "case14", "case15", "case16", "case17", "case18",
];

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A dispatched rule with the vertices it acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Plan {
    Empty,
    Undominated,
    CspEndgame,
    BranchAll { case: CaseId, u: Vertex },
    BranchOne { case: CaseId, u: Vertex },
    BranchMark { case: CaseId, u: Vertex },
    Forced { v: Vertex },
    Bipartite { x: VertexSet, y: VertexSet },
    TakeOrDelete { case: CaseId, v: Vertex },
    DoubleMark { u: Vertex, v: Vertex },
}

impl Plan {
    pub(crate) fn case(&self) -> CaseId {
        match *self {
            Plan::Empty => CaseId::Empty,
            Plan::Undominated => CaseId::Undominated,
            Plan::CspEndgame => CaseId::CspEndgame,
            Plan::Forced { .. } => CaseId::ForcedNeighbor,
            Plan::Bipartite { .. } => CaseId::CompleteBipartite,
            Plan::DoubleMark { .. } => CaseId::DegreeFiveNeighbor,
            Plan::BranchAll { case, .. }
            | Plan::BranchOne { case, .. }
            | Plan::BranchMark { case, .. }
            | Plan::TakeOrDelete { case, .. } => case,
        }
    }
}

/// The rule the solver applies to `g`.
pub fn dispatch_case(g: &MarkedGraph) -> CaseId {
    plan(g).case()
}

pub(crate) fn plan(g: &MarkedGraph) -> Plan {
    if g.is_empty() {
        return Plan::Empty;
    }
    let order = g.order();
    let mut degree = vec![0usize; order];
    for v in &g.vertices() {
        degree[v] = g.free_degree(v);
    }

    // (1)
    if g.marked().iter().any(|m| degree[m] == 0) {
        return Plan::Undominated;
    }

    let components = g.free_components();
    let mut in_clique = VertexSet::new(order);
    for comp in &components {
        if g.is_clique(comp) {
            in_clique.union_with(comp);
        }
    }

    // (2)-(4)
    if in_clique == *g.free() {
        if let Some(u) = g.free().iter().find(|&u| degree[u] >= 5) {
            return Plan::BranchAll {
                case: CaseId::CliqueBranchAll,
                u,
            };
        }
        if let Some(u) = g.free().iter().find(|&u| degree[u] == 4) {
            return Plan::BranchOne {
                case: CaseId::CliqueBranchOne,
                u,
            };
        }
        return Plan::CspEndgame;
    }

    // (5)
    if let Some(m) = g.marked().iter().find(|&m| degree[m] == 1) {
        let v = g.free_neighbors(m).first().expect("free degree is 1");
        return Plan::Forced { v };
    }

    // (6)
    for comp in &components {
        if comp.len() > 2 {
            if let Ok(ComponentShape::CompleteBipartite { left, right }) =
                g.classify_component(comp)
            {
                return Plan::Bipartite { x: left, y: right };
            }
        }
    }

    // (7)
    if let Some(v) = triangle_cut(g, &degree) {
        return Plan::TakeOrDelete {
            case: CaseId::TriangleCut,
            v,
        };
    }

    let u = select_vertex(g, &degree, &in_clique);
    let du = degree[u];
    let nbrs = g.free_neighbors(u);
    match du {
        0 => unreachable!("isolated free vertices form clique components"),
        1 => Plan::BranchAll {
            case: CaseId::DegreeOne,
            u,
        },
        2 => {
            if nbrs.iter().any(|v| degree[v] <= 4) {
                Plan::BranchMark {
                    case: CaseId::DegreeTwoMark,
                    u,
                }
            } else {
                Plan::BranchAll {
                    case: CaseId::DegreeTwoAll,
                    u,
                }
            }
        }
        3 => degree_three(g, &degree, u, &nbrs),
        4 => Plan::BranchOne {
            case: CaseId::DegreeFour,
            u,
        },
        _ => Plan::BranchAll {
            case: CaseId::HighDegree,
            u,
        },
    }
}

fn degree_three(g: &MarkedGraph, degree: &[usize], u: Vertex, nbrs: &VertexSet) -> Plan {
    // (11)
    if nbrs.iter().all(|v| degree[v] == 3) {
        let v = cubic_pick(g, u).expect("3-regular non-clique component has a sparse neighborhood");
        return Plan::BranchOne {
            case: CaseId::CubicNeighborhood,
            u: v,
        };
    }
    // (12)
    if let Some(v) = nbrs.iter().find(|&v| degree[v] == 4) {
        return Plan::BranchOne {
            case: CaseId::DegreeFourNeighbor,
            u: v,
        };
    }
    // (13)
    if let Some(v) = nbrs.iter().find(|&v| degree[v] == 5) {
        return Plan::DoubleMark { u, v };
    }
    // (14), (15)
    if nbrs.iter().filter(|&v| degree[v] == 3).count() >= 2 {
        if g.is_clique(nbrs) {
            let v3 = max_degree_neighbor(nbrs, degree);
            return Plan::TakeOrDelete {
                case: CaseId::CliqueNeighborhood,
                v: v3,
            };
        }
        return Plan::BranchMark {
            case: CaseId::DegreeThreeMark,
            u,
        };
    }
    // (16)
    Plan::BranchAll {
        case: CaseId::DegreeThreeAll,
        u,
    }
}

/// First vertex of maximum free degree in `set`.
fn max_degree_neighbor(set: &VertexSet, degree: &[usize]) -> Vertex {
    let mut best = None;
    for v in set {
        match best {
            Some((_, d)) if degree[v] <= d => {}
            _ => best = Some((v, degree[v])),
        }
    }
    best.expect("nonempty neighborhood").0
}

/// First (lexicographic) triangle `{a, b, c}` of free vertices where exactly
/// one vertex has free degree at least 3; returns that vertex.
fn triangle_cut(g: &MarkedGraph, degree: &[usize]) -> Option<Vertex> {
    // The two low vertices have free degree exactly 2, so each triangle is
    // found from either of them. Scan all and keep the smallest triple.
    let mut best: Option<([Vertex; 3], Vertex)> = None;
    for a in g.free() {
        if degree[a] != 2 {
            continue;
        }
        let n = g.free_neighbors(a).to_vec();
        let (x, y) = (n[0], n[1]);
        if !g.has_edge(x, y) {
            continue;
        }
        let high: Vec<Vertex> = [x, y].into_iter().filter(|&w| degree[w] >= 3).collect();
        if high.len() != 1 {
            continue;
        }
        let mut triple = [a, x, y];
        triple.sort_unstable();
        if best.as_ref().is_none_or(|(t, _)| triple < *t) {
            best = Some((triple, high[0]));
        }
    }
    best.map(|(_, v)| v)
}

/// Criteria (a)-(c): outside clique components, minimum free degree, then a
/// free neighbor of maximum free degree, then smallest identifier.
fn select_vertex(g: &MarkedGraph, degree: &[usize], in_clique: &VertexSet) -> Vertex {
    let mut best: Option<(Vertex, usize, usize)> = None;
    for u in &g.free().difference(in_clique) {
        let du = degree[u];
        let reach = g
            .free_neighbors(u)
            .iter()
            .map(|w| degree[w])
            .max()
            .unwrap_or(0);
        let better = match best {
            None => true,
            Some((_, bd, br)) => du < bd || (du == bd && reach > br),
        };
        if better {
            best = Some((u, du, reach));
        }
    }
    best.expect("some free component is not a clique").0
}

/// Every vertex tied under selection criteria (a)-(c), ascending. The
/// solver branches on the first; empty when all free components are
/// cliques.
pub fn selection_candidates(g: &MarkedGraph) -> Vec<Vertex> {
    let mut candidates = Vec::new();
    let mut best_key = None;
    for comp in g.free_components() {
        if g.is_clique(&comp) {
            continue;
        }
        for u in &comp {
            let du = g.free_degree(u);
            let reach = g
                .free_neighbors(u)
                .iter()
                .map(|w| g.free_degree(w))
                .max()
                .unwrap_or(0);
            let key = (du, std::cmp::Reverse(reach));
            match best_key {
                Some(b) if key > b => {}
                Some(b) if key == b => candidates.push(u),
                _ => {
                    best_key = Some(key);
                    candidates = vec![u];
                }
            }
        }
    }
    candidates.sort_unstable();
    candidates
}

/// The vertex of `N_F[u]` whose free neighborhood spans at most one edge,
/// smallest identifier first.
pub(crate) fn cubic_pick(g: &MarkedGraph, u: Vertex) -> Option<Vertex> {
    let mut closed = g.free_neighbors(u);
    closed.insert(u);
    closed
        .iter()
        .find(|&v| g.edges_within(&g.free_neighbors(v)) <= 1)
}
