//! Branch-and-reduce search for a minimum independent dominating set of a
//! marked graph.
//!
//! Each search node dispatches exactly one rule (see [`CaseId`]); terminal
//! rules return directly, the rest recurse on the instances built in
//! [`branch`]. Solutions carry their witness back up the tree.

pub mod branch;
mod dispatch;
mod solution;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{measure, WeightVector};
use crate::csp::{self, CspError};
use crate::graph::{ComponentShape, MarkedGraph, Vertex};
use crate::vertex_set::VertexSet;

pub use branch::Branch;
pub use dispatch::{dispatch_case, selection_candidates, CaseId};
pub use solution::Solution;

use dispatch::{cubic_pick, plan, Plan};

/// Marked vertices may have at most this many free neighbors.
pub const MAX_MARKED_DEGREE: usize = 4;

const STACK_RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("marked vertex {vertex} has {degree} free neighbors (at most 4 allowed)")]
    MarkedDegree { vertex: Vertex, degree: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invariant violated at node {node} ({case}): {detail}")]
    Invariant {
        node: u64,
        case: CaseId,
        detail: String,
    },
    #[error(transparent)]
    Csp(#[from] CspError),
}

#[derive(Debug, Clone, Default)]
pub struct SolverConfig {
    /// Check the marked-degree bound at every node and, for every child,
    /// that the number of free vertices strictly drops. The measure must
    /// strictly drop below a branching and not grow below a reduction.
    pub assertions: bool,
    /// Weights used by the measure check.
    pub weights: WeightVector,
}

impl SolverConfig {
    pub fn with_assertions() -> Self {
        Self {
            assertions: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub max_depth: usize,
    pub case_counts: BTreeMap<CaseId, u64>,
}

impl SearchStats {
    pub fn count(&self, case: CaseId) -> u64 {
        self.case_counts.get(&case).copied().unwrap_or(0)
    }

    /// Nodes that made at least two recursive calls.
    pub fn branching_nodes(&self) -> u64 {
        self.case_counts
            .iter()
            .filter(|(c, _)| c.is_branching())
            .map(|(_, n)| n)
            .sum()
    }

    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.max_depth = self.max_depth.max(other.max_depth);
        for (case, n) in &other.case_counts {
            *self.case_counts.entry(*case).or_default() += n;
        }
    }
}

/// What an observer sees when the search enters a node.
#[derive(Debug)]
pub struct NodeEvent<'a> {
    /// Preorder index, root is 0.
    pub id: u64,
    pub parent: Option<u64>,
    pub depth: usize,
    pub case: CaseId,
    pub graph: &'a MarkedGraph,
}

pub trait SearchObserver {
    fn on_node(&mut self, event: &NodeEvent<'_>);
}

impl SearchObserver for () {
    fn on_node(&mut self, _: &NodeEvent<'_>) {}
}

impl<F: FnMut(&NodeEvent<'_>)> SearchObserver for F {
    fn on_node(&mut self, event: &NodeEvent<'_>) {
        self(event)
    }
}

/// Minimum independent dominating set of `g`, with search statistics.
pub fn solve(g: &MarkedGraph) -> Result<(Solution, SearchStats), SolveError> {
    solve_with(g, &SolverConfig::default())
}

pub fn solve_with(
    g: &MarkedGraph,
    config: &SolverConfig,
) -> Result<(Solution, SearchStats), SolveError> {
    solve_observed(g, config, &mut ())
}

pub fn solve_observed(
    g: &MarkedGraph,
    config: &SolverConfig,
    observer: &mut dyn SearchObserver,
) -> Result<(Solution, SearchStats), SolveError> {
    check_marked_degrees(g)?;
    let mut search = Search {
        config,
        observer,
        stats: SearchStats::default(),
        next_id: 0,
    };
    let solution = search.node(g, 0, None)?;
    Ok((solution, search.stats))
}

fn check_marked_degrees(g: &MarkedGraph) -> Result<(), SolveError> {
    for m in g.marked() {
        let degree = g.free_degree(m);
        if degree > MAX_MARKED_DEGREE {
            return Err(SolveError::MarkedDegree { vertex: m, degree });
        }
    }
    Ok(())
}

struct Search<'a> {
    config: &'a SolverConfig,
    observer: &'a mut dyn SearchObserver,
    stats: SearchStats,
    next_id: u64,
}

impl Search<'_> {
    fn node(
        &mut self,
        g: &MarkedGraph,
        depth: usize,
        parent: Option<u64>,
    ) -> Result<Solution, SolveError> {
        let id = self.next_id;
        self.next_id += 1;
        let plan = plan(g);
        let case = plan.case();
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        *self.stats.case_counts.entry(case).or_default() += 1;
        self.observer.on_node(&NodeEvent {
            id,
            parent,
            depth,
            case,
            graph: g,
        });
        if self.config.assertions {
            check_marked_degrees(g).map_err(|e| SolveError::Invariant {
                node: id,
                case,
                detail: e.to_string(),
            })?;
        }

        match plan {
            Plan::Empty => {
                self.stats.leaves += 1;
                Ok(Solution::empty())
            }
            Plan::Undominated => {
                self.stats.leaves += 1;
                Ok(Solution::Infeasible)
            }
            Plan::CspEndgame => {
                self.stats.leaves += 1;
                Ok(csp::solve_clique_union(g)?)
            }
            ref branching => {
                let children = branch::plan_children(g, branching);
                if self.config.assertions {
                    self.check_progress(id, case, g, &children)?;
                }
                self.explore(&children, depth, Some(id))
            }
        }
    }

    fn explore(
        &mut self,
        children: &[Branch],
        depth: usize,
        parent: Option<u64>,
    ) -> Result<Solution, SolveError> {
        let mut best = Solution::Infeasible;
        for child in children {
            let sub = stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, || {
                self.node(&child.graph, depth + 1, parent)
            })?;
            best = best.min(sub.with(&child.taken));
        }
        Ok(best)
    }

    fn check_progress(
        &self,
        node: u64,
        case: CaseId,
        g: &MarkedGraph,
        children: &[Branch],
    ) -> Result<(), SolveError> {
        let w = &self.config.weights;
        let k = measure(g, w);
        let free = g.free().len();
        for (i, child) in children.iter().enumerate() {
            let fail = |detail: String| SolveError::Invariant {
                node,
                case,
                detail: format!("child {i}: {detail}"),
            };
            let child_free = child.graph.free().len();
            if child_free >= free {
                return Err(fail(format!("free vertices {free} -> {child_free}")));
            }
            // A single-child reduction may take a vertex of weight 0, so
            // only branchings are required to lower the measure strictly.
            let child_k = measure(&child.graph, w);
            let branching = children.len() > 1;
            if child_k > k || (branching && child_k >= k) {
                return Err(fail(format!("measure {k} -> {child_k}")));
            }
        }
        Ok(())
    }
}

fn require_free(g: &MarkedGraph, v: Vertex) -> Result<(), SolveError> {
    if g.is_free(v) {
        Ok(())
    } else {
        Err(SolveError::Precondition(format!("vertex {v} is not free")))
    }
}

fn solve_children(g: &MarkedGraph, children: &[Branch]) -> Result<Solution, SolveError> {
    check_marked_degrees(g)?;
    let config = SolverConfig::default();
    let mut search = Search {
        config: &config,
        observer: &mut (),
        stats: SearchStats::default(),
        next_id: 0,
    };
    search.explore(children, 0, None)
}

/// `1 + min` over `v ∈ N_F[u]` of the instance left after taking `v`.
pub fn branch_all(g: &MarkedGraph, u: Vertex) -> Result<Solution, SolveError> {
    require_free(g, u)?;
    solve_children(g, &branch::branch_all_children(g, u))
}

/// Take `u`, or take `v_i` with `v_1..v_{i-1}` marked.
pub fn branch_mark(g: &MarkedGraph, u: Vertex) -> Result<Solution, SolveError> {
    require_free(g, u)?;
    let children = branch::branch_mark_children(g, u);
    if let Some(bad) = children
        .iter()
        .flat_map(|b| {
            b.graph
                .marked()
                .iter()
                .map(move |m| (m, b.graph.free_degree(m)))
        })
        .find(|&(_, d)| d > MAX_MARKED_DEGREE)
    {
        return Err(SolveError::MarkedDegree {
            vertex: bad.0,
            degree: bad.1,
        });
    }
    solve_children(g, &children)
}

/// Take `u`, or mark it.
pub fn branch_one(g: &MarkedGraph, u: Vertex) -> Result<Solution, SolveError> {
    require_free(g, u)?;
    let degree = g.free_degree(u);
    if degree > MAX_MARKED_DEGREE {
        return Err(SolveError::MarkedDegree { vertex: u, degree });
    }
    solve_children(g, &branch::branch_one_children(g, u))
}

/// Rule (6): the solution contains one whole side of the complete
/// bipartite component `x ∪ y`.
pub fn case6_bipartite_branch(
    g: &MarkedGraph,
    x: &VertexSet,
    y: &VertexSet,
) -> Result<Solution, SolveError> {
    let component = x.union(y);
    let ok = component.len() > 2
        && match g.classify_component(&component) {
            Ok(ComponentShape::CompleteBipartite { left, right }) => {
                (left == *x && right == *y) || (left == *y && right == *x)
            }
            _ => false,
        };
    if !ok {
        return Err(SolveError::Precondition(
            "x and y are not the sides of a complete bipartite free component".into(),
        ));
    }
    solve_children(g, &branch::bipartite_children(g, x, y))
}

/// Rule (7): take `v`, or delete it (unmarked).
pub fn case7_clique_branch(g: &MarkedGraph, v: Vertex) -> Result<Solution, SolveError> {
    require_free(g, v)?;
    solve_children(g, &branch::take_or_delete_children(g, v))
}

/// Rule (14): take `v3`, or delete it (unmarked).
pub fn case14_clique_branch(g: &MarkedGraph, v3: Vertex) -> Result<Solution, SolveError> {
    require_free(g, v3)?;
    solve_children(g, &branch::take_or_delete_children(g, v3))
}

/// Rule (13): take `u`, take `v`, or mark both.
pub fn case13_double_mark(g: &MarkedGraph, u: Vertex, v: Vertex) -> Result<Solution, SolveError> {
    require_free(g, u)?;
    require_free(g, v)?;
    if g.free_degree(u) != 3 || g.free_degree(v) != 5 || !g.has_edge(u, v) {
        return Err(SolveError::Precondition(
            "need d_F(u) = 3 and a free neighbor v with d_F(v) = 5".into(),
        ));
    }
    solve_children(g, &branch::double_mark_children(g, u, v))
}

/// Rule (11): the vertex of `N_F[u]` whose free neighborhood spans at most
/// one edge, smallest identifier first.
pub fn case11_select(g: &MarkedGraph, u: Vertex) -> Result<Vertex, SolveError> {
    require_free(g, u)?;
    let nbrs = g.free_neighbors(u);
    if nbrs.len() != 3 || nbrs.iter().any(|v| g.free_degree(v) != 3) {
        return Err(SolveError::Precondition(
            "u and its free neighbors must all have free degree 3".into(),
        ));
    }
    let mut closed = nbrs.clone();
    closed.insert(u);
    if g.is_clique(&closed) {
        return Err(SolveError::Precondition("component is a clique".into()));
    }
    cubic_pick(g, u).ok_or_else(|| SolveError::Precondition("no sparse neighborhood".into()))
}

/// Repeatedly applies rules (1) and (5): a marked vertex without free
/// neighbors makes the instance infeasible; one with a single free neighbor
/// forces that neighbor into the solution. Returns the reduced instance and
/// the forced vertices, or `None` when infeasible.
pub fn apply_reductions(g: &MarkedGraph) -> Option<(MarkedGraph, Vec<Vertex>)> {
    let mut g = g.clone();
    let mut forced = Vec::new();
    loop {
        let mut single = None;
        for m in g.marked() {
            match g.free_degree(m) {
                0 => return None,
                1 if single.is_none() => single = Some(m),
                _ => {}
            }
        }
        match single {
            Some(m) => {
                let v = g.free_neighbors(m).first().expect("one free neighbor");
                forced.push(v);
                g = g.take(v);
            }
            None => {
                forced.sort_unstable();
                return Some((g, forced));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{
        complete, complete_bipartite, cycle, gen_lower_bound, path, prism, star,
    };
    use crate::oracle::{check_ids, exhaustive_mids};

    fn size(s: &Solution) -> Option<usize> {
        s.size()
    }

    #[test]
    fn solve_examples() {
        let g2 = gen_lower_bound(2).unwrap();
        let (s, stats) = solve(&g2).unwrap();
        assert_eq!(size(&s), Some(1));
        let w = s.witness().unwrap();
        assert!(w == [1] || w == [2], "witness {w:?}");
        assert!(stats.nodes >= stats.leaves && stats.leaves >= 1);

        let lonely = MarkedGraph::new(1, [0], []).unwrap();
        assert_eq!(solve(&lonely).unwrap().0, Solution::Infeasible);

        let c5 = cycle(5);
        let (s, _) = solve(&c5).unwrap();
        assert_eq!(size(&s), Some(2));
        assert!(check_ids(&c5, s.witness().unwrap()));

        let (s, stats) = solve(&MarkedGraph::empty()).unwrap();
        assert_eq!(s, Solution::empty());
        assert_eq!(stats.count(CaseId::Empty), 1);
    }

    #[test]
    fn rejects_marked_vertex_of_high_degree() {
        let g = MarkedGraph::new(6, [0], (1..6).map(|v| (0, v))).unwrap();
        assert_eq!(
            solve(&g).unwrap_err(),
            SolveError::MarkedDegree {
                vertex: 0,
                degree: 5
            }
        );
    }

    #[test]
    fn branch_all_examples() {
        // u isolated in G[F]: single branch
        let g = MarkedGraph::plain(3, [(1, 2)]).unwrap();
        assert_eq!(branch_all(&g, 0).unwrap().size(), Some(2));
        assert_eq!(branch::branch_all_children(&g, 0).len(), 1);

        assert_eq!(branch_all(&complete(3), 0).unwrap().size(), Some(1));

        let s = star(5);
        let dispatched = dispatch_case(&s);
        assert_eq!(dispatched, CaseId::CompleteBipartite);
        assert_eq!(branch_all(&s, 0).unwrap(), Solution::Found(vec![0]));
        assert!(branch_all(&MarkedGraph::new(1, [0], []).unwrap(), 0).is_err());
    }

    #[test]
    fn branch_mark_examples() {
        let c6 = cycle(6);
        let s = branch_mark(&c6, 0).unwrap();
        assert_eq!(s.size(), Some(2));
        let w = s.witness().unwrap();
        assert_eq!(w[1] - w[0], 3, "opposite pair expected, got {w:?}");
    }

    #[test]
    fn branch_one_examples() {
        assert_eq!(branch_one(&complete(5), 0).unwrap().size(), Some(1));
        assert!(matches!(
            branch_one(&complete(6), 0),
            Err(SolveError::MarkedDegree { .. })
        ));
    }

    #[test]
    fn case17_children_drop_measure_by_five_and_one() {
        // 4-regular circulant C8(1,2), all vertices degree 4 and in triangles
        let edges: Vec<_> = (0..8usize)
            .flat_map(|i| [(i, (i + 1) % 8), (i, (i + 2) % 8)])
            .collect();
        let g = MarkedGraph::plain(8, edges).unwrap();
        let w = WeightVector::standard();
        let k = measure(&g, &w);
        assert_eq!(dispatch_case(&g), CaseId::DegreeFour);
        let kids = branch::branch_one_children(&g, 0);
        // taking u removes 5 weight-1 vertices; marking u removes one and
        // leaves every neighbor at free degree 3
        assert!(k - measure(&kids[0].graph, &w) >= 5.0 - 1e-9);
        assert!((k - measure(&kids[1].graph, &w) - 1.0).abs() < 1e-9);
        assert_eq!(g.free().len() - kids[0].graph.free().len(), 5);
        assert_eq!(g.free().len() - kids[1].graph.free().len(), 1);
    }

    #[test]
    fn case6_examples() {
        let p3 = path(3);
        let x = VertexSet::from_vertices(3, [1]);
        let y = VertexSet::from_vertices(3, [0, 2]);
        assert_eq!(
            case6_bipartite_branch(&p3, &x, &y).unwrap(),
            Solution::Found(vec![1])
        );

        let k23 = complete_bipartite(2, 3);
        let x = VertexSet::from_vertices(5, [0, 1]);
        let y = VertexSet::from_vertices(5, [2, 3, 4]);
        assert_eq!(
            case6_bipartite_branch(&k23, &x, &y).unwrap(),
            Solution::Found(vec![0, 1])
        );
        assert_eq!(exhaustive_mids(&k23).unwrap().size(), Some(2));

        let k14 = star(4);
        let x = VertexSet::from_vertices(5, [0]);
        let y = VertexSet::from_vertices(5, [1, 2, 3, 4]);
        assert_eq!(
            case6_bipartite_branch(&k14, &x, &y).unwrap(),
            Solution::Found(vec![0])
        );

        assert!(case6_bipartite_branch(&cycle(5), &x, &y).is_err());
    }

    #[test]
    fn case7_example_forces_a_triangle_vertex() {
        // triangle {0,1,2}; 2 adjacent to free 3 of degree 1
        let g = MarkedGraph::plain(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let kids = branch::take_or_delete_children(&g, 2);
        assert!(!kids[1].graph.is_marked(2));
        // deleting 2 leaves K2 {0,1} and K1 {3}: clique union endgame
        assert_eq!(dispatch_case(&kids[1].graph), CaseId::CspEndgame);
        let s = case7_clique_branch(&g, 2).unwrap();
        assert_eq!(s.size(), exhaustive_mids(&g).unwrap().size());
    }

    #[test]
    fn case14_guard() {
        // K4 {0,1,2,3}, only 3 has outside neighbors 4..9 (degree 3+6 = 9);
        // the outside part is a 6-cycle so every vertex but 3 has degree 3
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        edges.extend((4..10).map(|v| (3, v)));
        edges.extend((4..10).map(|v| (v, if v == 9 { 4 } else { v + 1 })));
        let g = MarkedGraph::plain(10, edges).unwrap();
        assert_eq!(dispatch_case(&g), CaseId::CliqueNeighborhood);
        let s = case14_clique_branch(&g, 3).unwrap();
        assert_eq!(s.size(), exhaustive_mids(&g).unwrap().size());
    }

    #[test]
    fn case13_third_child() {
        let g = MarkedGraph::plain(
            9,
            [
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 4),
                (1, 5),
                (1, 6),
                (1, 7),
                (2, 8),
                (3, 8),
            ],
        )
        .unwrap();
        let kids = branch::double_mark_children(&g, 0, 1);
        let third = &kids[2].graph;
        assert_eq!(third.free_degree(1), 4);
        let w = WeightVector::standard();
        // u (degree 3) and v (degree 5): 2 w3 gone; neighbors drop in degree
        assert!(measure(&g, &w) - measure(third, &w) >= 2.0 - 1e-9);
        assert_eq!(g.free().len() - third.free().len(), 2);
        let s = case13_double_mark(&g, 0, 1).unwrap();
        assert_eq!(s.size(), exhaustive_mids(&g).unwrap().size());
        assert!(case13_double_mark(&g, 1, 0).is_err());
    }

    #[test]
    fn case11_select_examples() {
        let p = prism();
        for u in 0..6 {
            let v = case11_select(&p, u).unwrap();
            assert_eq!(p.edges_within(&p.free_neighbors(v)), 1);
        }
        let q3 = crate::instances::cube();
        for u in 0..8 {
            // triangle-free, so every candidate qualifies and the smallest wins
            let smallest = q3.free_neighbors(u).iter().chain([u]).min().unwrap();
            assert_eq!(case11_select(&q3, u).unwrap(), smallest);
        }
        assert!(case11_select(&complete(4), 0).is_err());
    }

    #[test]
    fn reductions() {
        let g = MarkedGraph::new(4, [3], [(3, 0), (0, 1), (1, 2)]).unwrap();
        let (rest, forced) = apply_reductions(&g).unwrap();
        assert_eq!(forced, vec![0]);
        assert_eq!(rest.free().to_vec(), vec![2]);
        assert!(rest.marked().is_empty());

        let g = MarkedGraph::new(2, [0], []).unwrap();
        assert!(apply_reductions(&g).is_none());

        let p = path(4);
        let (rest, forced) = apply_reductions(&p).unwrap();
        assert!(forced.is_empty());
        assert_eq!(rest, p);
    }

    #[test]
    fn deep_reduction_chain_does_not_overflow() {
        // free path f_0 .. f_{2k-1}; marked m_i sees only f_{2i}
        let k = 1500;
        let order = 3 * k;
        let mut edges: Vec<(Vertex, Vertex)> = (0..2 * k - 1).map(|i| (i, i + 1)).collect();
        edges.extend((0..k).map(|i| (2 * k + i, 2 * i)));
        let g = MarkedGraph::new(order, 2 * k..3 * k, edges).unwrap();
        let (s, stats) = std::thread::Builder::new()
            .stack_size(256 * 1024)
            .spawn(move || solve(&g).unwrap())
            .unwrap()
            .join()
            .unwrap();
        assert_eq!(s.size(), Some(k));
        assert!(stats.max_depth >= k - 1);
    }

    #[test]
    fn assertion_mode_passes_on_lower_bound_graph() {
        let g = gen_lower_bound(6).unwrap();
        let (a, sa) = solve_with(&g, &SolverConfig::with_assertions()).unwrap();
        let (b, sb) = solve(&g).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn observer_sees_every_node() {
        let g = cycle(7);
        let mut seen = 0u64;
        let mut root_case = None;
        let (_, stats) = solve_observed(&g, &SolverConfig::default(), &mut |e: &NodeEvent<'_>| {
            if e.parent.is_none() {
                root_case = Some(e.case);
            }
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, stats.nodes);
        assert_eq!(root_case, Some(CaseId::DegreeTwoMark));
    }
}
