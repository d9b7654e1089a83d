//! Instance generators and the `p mids` text format.
//!
//! Random generators draw from ChaCha8 seeded through `seed_from_u64`; the
//! exact derivation of every draw is fixed in `docs/instance-format.md` so
//! corpora can be regenerated elsewhere.

mod format;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{MarkedGraph, Vertex};
use crate::solver::MAX_MARKED_DEGREE;
use crate::vertex_set::VertexSet;

pub use format::{read_graph, write_graph, FormatError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("lower-bound family needs l >= 1, got {0}")]
    BadParameter(usize),
}

/// `G'_l`: free vertices `u_i = 2(i-1)`, `v_i = 2i-1` and edges
/// `u_1 v_1` plus `u_i v_i`, `u_i u_{i-1}`, `v_i v_{i-1}`, `u_i v_{i-1}` for
/// `2 <= i <= l`.
pub fn gen_lower_bound(l: usize) -> Result<MarkedGraph, InstanceError> {
    if l == 0 {
        return Err(InstanceError::BadParameter(l));
    }
    let u = |i: usize| 2 * (i - 1);
    let v = |i: usize| 2 * i - 1;
    let mut edges = vec![(u(1), v(1))];
    for i in 2..=l {
        edges.extend([
            (u(i), v(i)),
            (u(i), u(i - 1)),
            (v(i), v(i - 1)),
            (u(i), v(i - 1)),
        ]);
    }
    Ok(MarkedGraph::plain(2 * l, edges).expect("lower-bound edges are valid"))
}

/// Uniform double in `[0, 1)` from the top 53 bits of one output word.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index in `0..bound` by widening multiplication.
fn below(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as usize
}

fn shuffle(rng: &mut ChaCha8Rng, items: &mut [Vertex]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// `G(n, p)`: each pair `i < j`, visited in lexicographic order, is an edge
/// when its draw is below `p`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> MarkedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if unit(&mut rng) < p {
                edges.push((i, j));
            }
        }
    }
    MarkedGraph::plain(n, edges).expect("pairs are in range")
}

/// Marks up to `round(fraction · |F|)` free vertices, visiting them in a
/// seeded shuffled order and skipping any whose free degree exceeds 4 at
/// that point. Marking only lowers other vertices' free degrees, so every
/// marked vertex ends within the solver's limit.
pub fn mark_random(g: &MarkedGraph, fraction: f64, seed: u64) -> MarkedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = g.free().to_vec();
    shuffle(&mut rng, &mut order);
    let target = (fraction.clamp(0.0, 1.0) * order.len() as f64).round() as usize;
    let mut current = g.clone();
    let mut marked = 0;
    for v in order {
        if marked == target {
            break;
        }
        if current.free_degree(v) <= MAX_MARKED_DEGREE {
            current = current.mark(v);
            marked += 1;
        }
    }
    current
}

/// Disjoint cliques of sizes `1..=4` with `free` vertices in total, plus
/// `marked` marked vertices each adjacent to `0..=4` random free vertices.
/// Free vertices come first, cliques in order; marked vertices follow.
pub fn gen_clique_union(free: usize, marked: usize, seed: u64) -> MarkedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut start = 0;
    while start < free {
        let size = (1 + below(&mut rng, 4)).min(free - start);
        for a in start..start + size {
            for b in a + 1..start + size {
                edges.push((a, b));
            }
        }
        start += size;
    }
    let mut pool: Vec<Vertex> = (0..free).collect();
    for m in free..free + marked {
        let degree = below(&mut rng, MAX_MARKED_DEGREE + 1).min(free);
        // partial Fisher-Yates: the first `degree` entries become the sample
        for i in 0..degree {
            let j = i + below(&mut rng, free - i);
            pool.swap(i, j);
            edges.push((m, pool[i]));
        }
    }
    MarkedGraph::new(free + marked, free..free + marked, edges).expect("valid clique union")
}

pub fn path(n: usize) -> MarkedGraph {
    MarkedGraph::plain(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// `C_n` for `n >= 3`.
pub fn cycle(n: usize) -> MarkedGraph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    MarkedGraph::plain(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

pub fn complete(n: usize) -> MarkedGraph {
    MarkedGraph::plain(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
        .expect("valid clique")
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> MarkedGraph {
    MarkedGraph::plain(a + b, (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y))))
        .expect("valid complete bipartite graph")
}

/// Center 0 joined to `leaves` leaves.
pub fn star(leaves: usize) -> MarkedGraph {
    complete_bipartite(1, leaves)
}

/// Triangles `0,1,2` and `3,4,5` joined by the matching `i ~ i+3`.
pub fn prism() -> MarkedGraph {
    MarkedGraph::plain(
        6,
        [
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    )
    .expect("valid prism")
}

/// The 3-cube: vertices are 3-bit words, edges join words at Hamming
/// distance 1.
pub fn cube() -> MarkedGraph {
    let edges = (0..8usize).flat_map(|x| {
        (0..3)
            .map(move |bit| (x, x ^ (1 << bit)))
            .filter(|&(a, b)| a < b)
    });
    MarkedGraph::plain(8, edges).expect("valid cube")
}

/// `k` disjoint triangles `{3i, 3i+1, 3i+2}`.
pub fn disjoint_triangles(k: usize) -> MarkedGraph {
    let edges = (0..k).flat_map(|i| {
        let b = 3 * i;
        [(b, b + 1), (b + 1, b + 2), (b, b + 2)]
    });
    MarkedGraph::plain(3 * k, edges).expect("valid triangles")
}

/// Every labeled graph on `0..n` as an edge subset of the `n(n-1)/2`
/// pairs, in increasing mask order.
pub fn all_labeled_graphs(n: usize) -> impl Iterator<Item = MarkedGraph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    assert!(pairs.len() < 32, "too many labeled graphs to enumerate");
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e);
        MarkedGraph::plain(n, edges).expect("valid pairs")
    })
}

pub fn is_connected(g: &MarkedGraph) -> bool {
    let present = g.vertices();
    let Some(start) = present.first() else {
        return true;
    };
    let mut seen = VertexSet::new(g.order());
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(v) = stack.pop() {
        for w in &g.neighbors(v) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen == present
}
