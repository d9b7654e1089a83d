//! Marked graphs: vertices split into free ones (eligible for the solution)
//! and marked ones (must be dominated, may not be chosen).
//!
//! A [`MarkedGraph`] is immutable. Every branching step of the solver builds
//! a new instance through one of the induced-subgraph constructors. Vertex
//! identifiers are never renumbered, so a witness found deep in the search
//! refers directly to vertices of the input graph.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::vertex_set::VertexSet;

/// Dense vertex identifier, `0..order`.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} is not in the graph")]
    UnknownVertex { vertex: Vertex },
    #[error("vertex {vertex} is both free and marked")]
    OverlappingParts { vertex: Vertex },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: Vertex },
    #[error("vertex set is not a connected component of the free subgraph")]
    NotAComponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Free,
    Marked,
}

/// Snapshot of one vertex: its identifier, free degree and status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexView {
    pub id: Vertex,
    pub f_degree: usize,
    pub status: Status,
}

/// Shape of a connected component of `G[F]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentShape {
    Clique(usize),
    /// `left` is the smaller side; on equal sizes, the side holding the
    /// smallest vertex.
    CompleteBipartite {
        left: VertexSet,
        right: VertexSet,
    },
    Other,
}

/// A marked graph `(F, M, E)`.
///
/// The edge set is stored as a shared base adjacency that is masked by the
/// present vertices on every query. Edges between two marked vertices are
/// never visible.
#[derive(Clone)]
pub struct MarkedGraph {
    adjacency: Arc<[VertexSet]>,
    free: VertexSet,
    marked: VertexSet,
}

impl MarkedGraph {
    /// Graph on vertices `0..order` where every vertex not listed in
    /// `marked` is free. Marked-marked edges are dropped.
    pub fn new(
        order: usize,
        marked: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let marked = collect_checked(order, marked)?;
        let free = VertexSet::full(order).difference(&marked);
        Self::from_parts(order, free, marked, edges)
    }

    /// Graph with every vertex free.
    pub fn plain(
        order: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        Self::new(order, std::iter::empty(), edges)
    }

    /// General constructor: identifiers in `0..order` outside both parts
    /// are absent. Edge endpoints must be present.
    pub fn from_parts(
        order: usize,
        free: VertexSet,
        marked: VertexSet,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        if let Some(v) = free.intersection(&marked).first() {
            return Err(GraphError::OverlappingParts { vertex: v });
        }
        let present = free.union(&marked);
        if let Some(v) = present.iter().find(|&v| v >= order) {
            return Err(GraphError::UnknownVertex { vertex: v });
        }
        let mut adjacency = vec![VertexSet::new(order); order];
        for (a, b) in edges {
            for x in [a, b] {
                if !present.contains(x) {
                    return Err(GraphError::UnknownVertex { vertex: x });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { vertex: a });
            }
            if marked.contains(a) && marked.contains(b) {
                continue;
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Ok(Self {
            adjacency: adjacency.into(),
            free,
            marked,
        })
    }

    pub fn empty() -> Self {
        Self {
            adjacency: Vec::new().into(),
            free: VertexSet::new(0),
            marked: VertexSet::new(0),
        }
    }

    /// Size of the identifier space, including absent identifiers.
    pub fn order(&self) -> usize {
        self.adjacency.len()
    }

    /// `|F ∪ M|`.
    pub fn vertex_count(&self) -> usize {
        self.free.len() + self.marked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty() && self.marked.is_empty()
    }

    pub fn free(&self) -> &VertexSet {
        &self.free
    }

    pub fn marked(&self) -> &VertexSet {
        &self.marked
    }

    pub fn vertices(&self) -> VertexSet {
        self.free.union(&self.marked)
    }

    pub fn is_free(&self, v: Vertex) -> bool {
        self.free.contains(v)
    }

    pub fn is_marked(&self, v: Vertex) -> bool {
        self.marked.contains(v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.is_free(v) || self.is_marked(v)
    }

    fn check(&self, v: Vertex) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex { vertex: v })
        }
    }

    /// Free neighbors of a present vertex.
    #[inline]
    pub fn free_neighbors(&self, v: Vertex) -> VertexSet {
        self.adjacency[v].intersection(&self.free)
    }

    /// `d_F(v)` for a present vertex. Panics on identifiers beyond the order.
    #[inline]
    pub fn free_degree(&self, v: Vertex) -> usize {
        self.adjacency[v].intersection_len(&self.free)
    }

    /// Checked `d_F(v)`.
    pub fn f_degree(&self, v: Vertex) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.free_degree(v))
    }

    /// Marked neighbors of a present vertex (empty for marked vertices).
    pub fn marked_neighbors(&self, v: Vertex) -> VertexSet {
        if self.is_marked(v) {
            VertexSet::new(self.order())
        } else {
            self.adjacency[v].intersection(&self.marked)
        }
    }

    /// `N(v)` restricted to present vertices.
    pub fn neighbors(&self, v: Vertex) -> VertexSet {
        let mut n = self.free_neighbors(v);
        n.union_with(&self.marked_neighbors(v));
        n
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.contains(a)
            && self.contains(b)
            && !(self.is_marked(a) && self.is_marked(b))
            && self.adjacency[a].contains(b)
    }

    pub fn vertex_view(&self, v: Vertex) -> Result<VertexView, GraphError> {
        self.check(v)?;
        Ok(VertexView {
            id: v,
            f_degree: self.free_degree(v),
            status: if self.is_free(v) {
                Status::Free
            } else {
                Status::Marked
            },
        })
    }

    /// Edges `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().to_vec().into_iter().flat_map(move |a| {
            self.neighbors(a)
                .to_vec()
                .into_iter()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub fn edge_count(&self) -> usize {
        let present: usize = self
            .free
            .iter()
            .map(|v| self.adjacency[v].intersection_len(&self.free))
            .sum::<usize>()
            / 2;
        let cross: usize = self
            .marked
            .iter()
            .map(|v| self.adjacency[v].intersection_len(&self.free))
            .sum();
        present + cross
    }

    /// Number of edges of `G[S]` for a set of free vertices.
    pub fn edges_within(&self, set: &VertexSet) -> usize {
        set.iter()
            .map(|v| self.visible_neighbors_within(v, set))
            .sum::<usize>()
            / 2
    }

    pub fn is_clique(&self, set: &VertexSet) -> bool {
        let k = set.len();
        set.iter()
            .all(|v| self.visible_neighbors_within(v, set) == k - 1)
    }

    /// `|N(v) ∩ set|`, reading the base adjacency directly when `set` holds
    /// only free vertices.
    fn visible_neighbors_within(&self, v: Vertex, set: &VertexSet) -> usize {
        if !self.contains(v) {
            0
        } else if set.is_subset(&self.free) {
            self.adjacency[v].intersection_len(set)
        } else {
            self.neighbors(v).intersection_len(set)
        }
    }

    /// `G[S, T]`: `S` becomes the free part, `T` the marked part.
    pub fn induced_marked_subgraph(
        &self,
        free: &VertexSet,
        marked: &VertexSet,
    ) -> Result<Self, GraphError> {
        if let Some(v) = free.intersection(marked).first() {
            return Err(GraphError::OverlappingParts { vertex: v });
        }
        let present = self.vertices();
        for part in [free, marked] {
            if let Some(v) = part.difference(&present).first() {
                return Err(GraphError::UnknownVertex { vertex: v });
            }
        }
        // Un-marking vertices would expose edges that this graph no longer
        // has, so strip marked-marked pairs from the base first.
        let adjacency = if free.is_disjoint(&self.marked) {
            Arc::clone(&self.adjacency)
        } else {
            self.adjacency
                .iter()
                .enumerate()
                .map(|(v, row)| {
                    if self.marked.contains(v) {
                        row.difference(&self.marked)
                    } else {
                        row.clone()
                    }
                })
                .collect::<Vec<_>>()
                .into()
        };
        Ok(Self {
            adjacency,
            free: resized(free, self.order()),
            marked: resized(marked, self.order()),
        })
    }

    /// `G[F \ N[v], M \ N(v)]`: the instance left after putting free `v`
    /// into the solution.
    pub fn take(&self, v: Vertex) -> Self {
        let mut g = self.clone();
        g.free.difference_with(&self.adjacency[v]);
        g.free.remove(v);
        g.marked.difference_with(&self.adjacency[v]);
        g
    }

    /// `G[F \ N[X], M \ N(X)]` for a set of free vertices `X`.
    pub fn take_all(&self, set: &VertexSet) -> Self {
        let mut g = self.clone();
        for v in set {
            g.free.difference_with(&self.adjacency[v]);
            g.marked.difference_with(&self.adjacency[v]);
        }
        g.free.difference_with(set);
        g
    }

    /// `G[F \ S, M ∪ S]` for free vertices `S`.
    pub fn mark_all(&self, set: &VertexSet) -> Self {
        let mut g = self.clone();
        g.free.difference_with(set);
        g.marked.union_with(set);
        g
    }

    pub fn mark(&self, v: Vertex) -> Self {
        let mut g = self.clone();
        g.free.remove(v);
        g.marked.insert(v);
        g
    }

    /// `G[F \ {v}, M]`: drop free `v` without marking it.
    pub fn delete(&self, v: Vertex) -> Self {
        let mut g = self.clone();
        g.free.remove(v);
        g
    }

    /// Connected components of `G[F]`, ordered by smallest vertex.
    pub fn free_components(&self) -> Vec<VertexSet> {
        let mut unseen = self.free.clone();
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        while let Some(start) = unseen.first() {
            let mut comp = VertexSet::new(self.order());
            unseen.remove(start);
            comp.insert(start);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let next = self.adjacency[v].intersection(&unseen);
                for w in &next {
                    comp.insert(w);
                    queue.push_back(w);
                }
                unseen.difference_with(&next);
            }
            components.push(comp);
        }
        components
    }

    /// Classifies a connected component `B` of `G[F]`.
    pub fn classify_component(&self, component: &VertexSet) -> Result<ComponentShape, GraphError> {
        let start = component.first().ok_or(GraphError::NotAComponent)?;
        if !component.is_subset(&self.free) {
            return Err(GraphError::NotAComponent);
        }
        let mut left = VertexSet::new(self.order());
        let mut right = VertexSet::new(self.order());
        left.insert(start);
        let mut seen = left.clone();
        let mut queue = VecDeque::from([start]);
        let mut two_colorable = true;
        while let Some(v) = queue.pop_front() {
            let nbrs = self.free_neighbors(v);
            if !nbrs.is_subset(component) {
                return Err(GraphError::NotAComponent);
            }
            let v_left = left.contains(v);
            for w in &nbrs {
                if seen.insert(w) {
                    if v_left {
                        right.insert(w);
                    } else {
                        left.insert(w);
                    }
                    queue.push_back(w);
                } else if left.contains(w) == v_left {
                    two_colorable = false;
                }
            }
        }
        if seen != resized(component, self.order()) {
            return Err(GraphError::NotAComponent);
        }
        let size = component.len();
        if self.is_clique(component) {
            return Ok(ComponentShape::Clique(size));
        }
        if two_colorable && self.edges_within(component) == left.len() * right.len() {
            if right.len() < left.len() {
                std::mem::swap(&mut left, &mut right);
            }
            return Ok(ComponentShape::CompleteBipartite { left, right });
        }
        Ok(ComponentShape::Other)
    }
}

impl std::fmt::Debug for MarkedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarkedGraph")
            .field("free", &self.free)
            .field("marked", &self.marked)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for MarkedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.free == other.free && self.marked == other.marked && self.edges().eq(other.edges())
    }
}

impl Eq for MarkedGraph {}

fn collect_checked(
    order: usize,
    vertices: impl IntoIterator<Item = Vertex>,
) -> Result<VertexSet, GraphError> {
    let mut set = VertexSet::new(order);
    for v in vertices {
        if v >= order {
            return Err(GraphError::UnknownVertex { vertex: v });
        }
        set.insert(v);
    }
    Ok(set)
}

fn resized(set: &VertexSet, order: usize) -> VertexSet {
    if set.capacity() == VertexSet::new(order).capacity() {
        set.clone()
    } else {
        VertexSet::from_vertices(order, set.iter())
    }
}
