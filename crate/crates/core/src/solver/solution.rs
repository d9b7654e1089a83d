use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// Outcome of a search: no independent dominating set exists, or a
/// minimum one was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solution {
    Infeasible,
    /// Witness vertices in ascending order.
    Found(Vec<Vertex>),
}

impl Solution {
    pub fn empty() -> Self {
        Solution::Found(Vec::new())
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Solution::Infeasible => None,
            Solution::Found(w) => Some(w.len()),
        }
    }

    pub fn witness(&self) -> Option<&[Vertex]> {
        match self {
            Solution::Infeasible => None,
            Solution::Found(w) => Some(w),
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Solution::Found(_))
    }

    /// Adds committed vertices. Infeasible absorbs.
    pub fn with(self, taken: &[Vertex]) -> Self {
        match self {
            Solution::Infeasible => Solution::Infeasible,
            Solution::Found(mut w) => {
                w.extend_from_slice(taken);
                w.sort_unstable();
                Solution::Found(w)
            }
        }
    }

    /// Strictly smaller than `other`; Infeasible is larger than everything.
    pub fn beats(&self, other: &Solution) -> bool {
        match (self.size(), other.size()) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// Keeps `self` on ties, so the earliest branch wins.
    pub fn min(self, other: Solution) -> Solution {
        if other.beats(&self) {
            other
        } else {
            self
        }
    }
}
