//! Child-instance construction for every branching and reduction rule.

use crate::graph::{MarkedGraph, Vertex};
use crate::vertex_set::VertexSet;

use super::dispatch::Plan;

/// One recursive call: the vertices committed to the solution on the way
/// down and the instance left to solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub taken: Vec<Vertex>,
    pub graph: MarkedGraph,
}

impl Branch {
    fn take(g: &MarkedGraph, v: Vertex) -> Self {
        Branch {
            taken: vec![v],
            graph: g.take(v),
        }
    }

    fn skip(graph: MarkedGraph) -> Self {
        Branch {
            taken: Vec::new(),
            graph,
        }
    }
}

/// Free neighbors of `u` by increasing free degree, ties by identifier.
pub fn ordered_free_neighbors(g: &MarkedGraph, u: Vertex) -> Vec<Vertex> {
    let mut nbrs: Vec<(usize, Vertex)> = g
        .free_neighbors(u)
        .iter()
        .map(|v| (g.free_degree(v), v))
        .collect();
    nbrs.sort_unstable();
    nbrs.into_iter().map(|(_, v)| v).collect()
}

/// `u` or one of its free neighbors joins the solution.
pub fn branch_all_children(g: &MarkedGraph, u: Vertex) -> Vec<Branch> {
    std::iter::once(u)
        .chain(ordered_free_neighbors(g, u))
        .map(|v| Branch::take(g, v))
        .collect()
}

/// Like [`branch_all_children`], but the branch taking `v_i` also marks
/// `v_1, .., v_{i-1}` (those not dominated by `v_i`).
pub fn branch_mark_children(g: &MarkedGraph, u: Vertex) -> Vec<Branch> {
    let ordered = ordered_free_neighbors(g, u);
    let mut out = Vec::with_capacity(ordered.len() + 1);
    out.push(Branch::take(g, u));
    let mut earlier = VertexSet::new(g.order());
    for &v in &ordered {
        let child = g.take(v);
        let still_free = earlier.intersection(child.free());
        out.push(Branch {
            taken: vec![v],
            graph: child.mark_all(&still_free),
        });
        earlier.insert(v);
    }
    out
}

/// `u` joins the solution, or `u` is marked.
pub fn branch_one_children(g: &MarkedGraph, u: Vertex) -> Vec<Branch> {
    vec![Branch::take(g, u), Branch::skip(g.mark(u))]
}

/// `v` joins the solution, or `v` is deleted without being marked.
pub fn take_or_delete_children(g: &MarkedGraph, v: Vertex) -> Vec<Branch> {
    vec![Branch::take(g, v), Branch::skip(g.delete(v))]
}

/// The solution contains all of `x` or all of `y`.
pub fn bipartite_children(g: &MarkedGraph, x: &VertexSet, y: &VertexSet) -> Vec<Branch> {
    [x, y]
        .into_iter()
        .map(|side| Branch {
            taken: side.to_vec(),
            graph: g.take_all(side),
        })
        .collect()
}

/// Take `u`, take `v`, or mark both at once.
pub fn double_mark_children(g: &MarkedGraph, u: Vertex, v: Vertex) -> Vec<Branch> {
    let both = VertexSet::from_vertices(g.order(), [u, v]);
    vec![
        Branch::take(g, u),
        Branch::take(g, v),
        Branch::skip(g.mark_all(&both)),
    ]
}

pub(crate) fn plan_children(g: &MarkedGraph, plan: &Plan) -> Vec<Branch> {
    match plan {
        Plan::Empty | Plan::Undominated | Plan::CspEndgame => Vec::new(),
        Plan::BranchAll { u, .. } => branch_all_children(g, *u),
        Plan::BranchOne { u, .. } => branch_one_children(g, *u),
        Plan::BranchMark { u, .. } => branch_mark_children(g, *u),
        Plan::Forced { v } => vec![Branch::take(g, *v)],
        Plan::Bipartite { x, y } => bipartite_children(g, x, y),
        Plan::TakeOrDelete { v, .. } => take_or_delete_children(g, *v),
        Plan::DoubleMark { u, v } => double_mark_children(g, *u, *v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{cycle, gen_lower_bound};

    #[test]
    fn branch_mark_on_degree_two_marks_first_neighbor_in_last_child() {
        let g = cycle(6);
        let kids = branch_mark_children(&g, 0);
        assert_eq!(kids.len(), 3);
        // neighbors of 0 are 1 and 5, both degree 2: order by id
        assert_eq!(kids[1].taken, vec![1]);
        assert_eq!(kids[2].taken, vec![5]);
        assert!(kids[2].graph.is_marked(1));
        assert!(kids[0].graph.marked().is_empty());
        assert!(kids[1].graph.marked().is_empty());
    }

    #[test]
    fn lower_bound_root_children_follow_the_three_layered_branches() {
        // u_i = 2(i-1), v_i = 2i-1
        let g = gen_lower_bound(3).unwrap();
        let kids = branch_mark_children(&g, 0);
        let taken: Vec<_> = kids.iter().map(|b| b.taken[0]).collect();
        assert_eq!(taken, vec![0, 1, 2]); // u1, v1, u2
        let free: Vec<_> = kids.iter().map(|b| b.graph.free().to_vec()).collect();
        assert_eq!(free[0], vec![3, 4, 5]);
        assert_eq!(free[1], vec![4, 5]);
        assert_eq!(free[2], vec![5]);
        assert!(kids.iter().all(|b| b.graph.marked().is_empty()));
    }

    #[test]
    fn double_mark_leaves_degree_four() {
        // u=0 with neighbors 1,2,3 ; v=1 with neighbors 0,4,5,6,7
        let g = MarkedGraph::plain(8, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (1, 6), (1, 7)])
            .unwrap();
        let kids = double_mark_children(&g, 0, 1);
        let third = &kids[2].graph;
        assert_eq!(third.free_degree(1), 4);
        assert!(third.marked().iter().all(|m| third.free_degree(m) <= 4));
        assert!(!third.has_edge(0, 1));
    }

    #[test]
    fn take_or_delete_never_marks() {
        let g = cycle(5);
        let kids = take_or_delete_children(&g, 2);
        assert!(!kids[1].graph.contains(2));
        assert!(kids[1].graph.marked().is_empty());
    }
}
