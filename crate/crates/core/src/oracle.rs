//! Reference solvers that share nothing with the branch-and-reduce search:
//! a domination checker, exhaustive subset search, and the classic
//! "smallest maximal independent set" baseline.

use thiserror::Error;

use crate::graph::{MarkedGraph, Vertex};
use crate::solver::Solution;
use crate::vertex_set::VertexSet;

/// Free-vertex limit of [`exhaustive_mids`].
pub const EXHAUSTIVE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{free} free vertices exceed the exhaustive limit of {limit}")]
    TooLarge { free: usize, limit: usize },
    #[error("graph has marked vertices; expected a plain graph")]
    MarkedVertices,
}

/// `D ⊆ F`, `D` independent, and every vertex of `F ∪ M` is in `D` or has
/// a neighbor in `D`.
pub fn check_ids(g: &MarkedGraph, set: &[Vertex]) -> bool {
    if !set.iter().all(|&v| g.is_free(v)) {
        return false;
    }
    let d = VertexSet::from_vertices(g.order(), set.iter().copied());
    if d.len() != set.len() {
        return false;
    }
    let touches = |x: Vertex| d.iter().any(|w| g.has_edge(x, w));
    if set.iter().any(|&v| touches(v)) {
        return false;
    }
    g.vertices().iter().all(|x| d.contains(x) || touches(x))
}

/// Minimum independent dominating set by trying every subset of `F` in
/// order of increasing size.
pub fn exhaustive_mids(g: &MarkedGraph) -> Result<Solution, OracleError> {
    let free = g.free().to_vec();
    let n = free.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooLarge {
            free: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    // masks over positions in `free`
    let mask_of = |x: Vertex| -> u32 {
        free.iter()
            .enumerate()
            .filter(|&(_, &w)| g.has_edge(x, w))
            .fold(0u32, |m, (i, _)| m | (1 << i))
    };
    let free_adj: Vec<u32> = free.iter().map(|&v| mask_of(v)).collect();
    let marked_adj: Vec<u32> = g.marked().iter().map(mask_of).collect();

    let feasible = |d: u32| -> bool {
        for (i, &adj) in free_adj.iter().enumerate() {
            let inside = d & (1 << i) != 0;
            if inside && adj & d != 0 {
                return false;
            }
            if !inside && adj & d == 0 {
                return false;
            }
        }
        marked_adj.iter().all(|&adj| adj & d != 0)
    };

    for k in 0..=n {
        for d in subsets_of_size(n, k) {
            if feasible(d) {
                let witness = (0..n)
                    .filter(|i| d & (1 << i) != 0)
                    .map(|i| free[i])
                    .collect();
                return Ok(Solution::Found(witness));
            }
        }
    }
    Ok(Solution::Infeasible)
}

/// `k`-subsets of `0..n` as bitmasks in increasing numeric order.
fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = Some(first).filter(|&m| m < limit);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            Some(n).filter(|&m| m < limit)
        };
        Some(cur as u32)
    })
}

/// Streams the maximal independent sets of the free subgraph `G[F]`, each
/// exactly once.
pub fn enumerate_maximal_independent_sets(g: &MarkedGraph) -> MaximalIndependentSets<'_> {
    let vertices = g.free().to_vec();
    let order = g.order();
    MaximalIndependentSets {
        g,
        stack: vec![Frame {
            index: 0,
            chosen: VertexSet::new(order),
            covered: VertexSet::new(order),
        }],
        vertices,
    }
}

pub struct MaximalIndependentSets<'a> {
    g: &'a MarkedGraph,
    vertices: Vec<Vertex>,
    stack: Vec<Frame>,
}

struct Frame {
    index: usize,
    chosen: VertexSet,
    /// Closed neighborhood of `chosen` within `F`.
    covered: VertexSet,
}

impl Iterator for MaximalIndependentSets<'_> {
    type Item = Vec<Vertex>;

    fn next(&mut self) -> Option<Vec<Vertex>> {
        while let Some(frame) = self.stack.pop() {
            let Some(&v) = self.vertices.get(frame.index) else {
                // every excluded vertex was checked to be coverable, but
                // only a full cover makes the set maximal
                if frame.covered.len() == self.vertices.len() {
                    return Some(frame.chosen.to_vec());
                }
                continue;
            };
            let index = frame.index + 1;
            if frame.covered.contains(v) {
                self.stack.push(Frame { index, ..frame });
                continue;
            }
            // Excluding v is only viable if a later vertex can still cover it.
            let later = self.vertices[index..]
                .iter()
                .any(|&w| self.g.has_edge(v, w) && !frame.covered.contains(w));
            if later {
                self.stack.push(Frame {
                    index,
                    chosen: frame.chosen.clone(),
                    covered: frame.covered.clone(),
                });
            }
            let mut chosen = frame.chosen;
            let mut covered = frame.covered;
            chosen.insert(v);
            covered.insert(v);
            covered.union_with(&self.g.free_neighbors(v));
            self.stack.push(Frame {
                index,
                chosen,
                covered,
            });
        }
        None
    }
}

/// Smallest maximal independent set of a plain graph; the first one
/// enumerated wins ties.
pub fn mis_enumeration_mids(g: &MarkedGraph) -> Result<Solution, OracleError> {
    if !g.marked().is_empty() {
        return Err(OracleError::MarkedVertices);
    }
    Ok(enumerate_maximal_independent_sets(g)
        .fold(None::<Vec<Vertex>>, |best, s| match best {
            Some(b) if b.len() <= s.len() => Some(b),
            _ => Some(s),
        })
        .map_or(Solution::Infeasible, Solution::Found))
}
