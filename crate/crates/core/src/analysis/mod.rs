//! Measure & Conquer tooling: the weighted measure, branching factors of
//! measure recurrences, the recurrence catalog and weight tuning.

mod catalog;
mod optimize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MarkedGraph;

pub use catalog::{Annotation, Catalog, Delta, Recurrence, BUILTIN_CATALOG};
pub use optimize::{audit_weights, optimize_weights, Audit, AuditRow, GridSchedule, Optimum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("weights ({w1}, {w2}) are not admissible")]
    Inadmissible { w1: f64, w2: f64 },
    #[error("recurrence {label}: branch {branch} has non-positive measure drop {value}")]
    NonPositiveDelta {
        label: String,
        branch: usize,
        value: f64,
    },
    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },
    #[error("no admissible grid point with positive deltas")]
    EmptyGrid,
    #[error("cannot read catalog: {0}")]
    Io(String),
}

const ADMISSIBLE_EPS: f64 = 1e-12;

/// Weights of free vertices by free degree: `w0 = 0`, `w1`, `w2`, and
/// `w_i = 1` for `i >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    w1: f64,
    w2: f64,
}

impl WeightVector {
    pub const STANDARD_W1: f64 = 0.8482;
    pub const STANDARD_W2: f64 = 0.9685;

    /// Checked constructor; see [`WeightVector::is_admissible`].
    pub fn new(w1: f64, w2: f64) -> Result<Self, AnalysisError> {
        if Self::is_admissible(w1, w2) {
            Ok(Self { w1, w2 })
        } else {
            Err(AnalysisError::Inadmissible { w1, w2 })
        }
    }

    /// `(0.8482, 0.9685)`.
    pub fn standard() -> Self {
        Self {
            w1: Self::STANDARD_W1,
            w2: Self::STANDARD_W2,
        }
    }

    /// `0 <= w1 <= w2 <= 1` and `w1 - 0 >= w2 - w1 >= 1 - w2`.
    pub fn is_admissible(w1: f64, w2: f64) -> bool {
        let e = ADMISSIBLE_EPS;
        w1.is_finite()
            && w2.is_finite()
            && w1 >= -e
            && w1 <= w2 + e
            && w2 <= 1.0 + e
            && w1 + e >= w2 - w1
            && (w2 - w1) + e >= 1.0 - w2
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    /// Weight of a free vertex of free degree `degree`.
    pub fn weight(&self, degree: usize) -> f64 {
        match degree {
            0 => 0.0,
            1 => self.w1,
            2 => self.w2,
            _ => 1.0,
        }
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::standard()
    }
}

/// Free vertices bucketed by free degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3plus: usize,
}

impl DegreeHistogram {
    pub fn total(&self) -> usize {
        self.n0 + self.n1 + self.n2 + self.n3plus
    }
}

pub fn degree_histogram(g: &MarkedGraph) -> DegreeHistogram {
    let mut h = DegreeHistogram::default();
    for v in g.free() {
        match g.free_degree(v) {
            0 => h.n0 += 1,
            1 => h.n1 += 1,
            2 => h.n2 += 1,
            _ => h.n3plus += 1,
        }
    }
    h
}

/// `k(G) = Σ w_i n_i`; marked vertices weigh nothing.
pub fn measure(g: &MarkedGraph, w: &WeightVector) -> f64 {
    let h = degree_histogram(g);
    w.w1 * h.n1 as f64 + w.w2 * h.n2 as f64 + h.n3plus as f64
}

const BISECTION_LOW: f64 = 1.0 + 1e-12;
const BISECTION_HIGH: f64 = 64.0;
const BISECTION_TOL: f64 = 1e-9;

/// The unique `τ > 1` with `Σ_i τ^(-Δ_i) = 1`, by bisection. A recurrence
/// with a single branch has factor 1.
pub fn branching_factor(r: &Recurrence, w: &WeightVector) -> Result<f64, AnalysisError> {
    let drops = r.evaluate(w);
    if let Some((branch, &value)) = drops.iter().enumerate().find(|(_, &d)| d <= 0.0) {
        return Err(AnalysisError::NonPositiveDelta {
            label: r.label.clone(),
            branch,
            value,
        });
    }
    let copies = r.multiplicity.unwrap_or(1) as f64;
    if drops.len() as f64 * copies <= 1.0 {
        return Ok(1.0);
    }
    let excess = |tau: f64| drops.iter().map(|d| copies * tau.powf(-d)).sum::<f64>() - 1.0;
    Ok(bisect_decreasing(excess, BISECTION_LOW, BISECTION_HIGH))
}

/// Root of a strictly decreasing function that is positive at `low`; the
/// upper end is doubled until it brackets the root.
fn bisect_decreasing(f: impl Fn(f64) -> f64, mut low: f64, mut high: f64) -> f64 {
    while f(high) > 0.0 {
        low = high;
        high *= 2.0;
    }
    while high - low > BISECTION_TOL {
        let mid = 0.5 * (low + high);
        if f(mid) > 0.0 {
            low = mid;
        } else {
            high = mid;
        }
    }
    0.5 * (low + high)
}

/// Worst base of the clique-union endgame per unit of measure: a clique of
/// size `i + 1` costs `(i+1)/2 · α` split instances over `i + 1` vertices
/// of weight `w_i`, with `α = 1.5` for the binary CSP solver.
pub fn csp_endgame_base(w: &WeightVector) -> f64 {
    [
        1.5f64.powf(1.0 / (2.0 * w.w1)),
        2.25f64.powf(1.0 / (3.0 * w.w2)),
        3.0f64.powf(1.0 / 4.0),
    ]
    .into_iter()
    .fold(f64::MIN, f64::max)
}

/// Leaf count of the lower-bound search tree after removing `k` vertices,
/// `L[k] = L[k-3] + L[k-4] + L[k-5]`, from caller-supplied `L[0..5]`.
pub fn lb_recurrence_predict(base: [u128; 5], k: usize) -> u128 {
    if k < 5 {
        return base[k];
    }
    let mut window = base;
    for _ in 5..=k {
        let next = window[2] + window[1] + window[0];
        window.rotate_left(1);
        window[4] = next;
    }
    window[4]
}

/// Growth rate of [`lb_recurrence_predict`]: the real root of
/// `x^5 = x^2 + x + 1`.
pub fn lb_growth_rate() -> f64 {
    bisect_decreasing(
        |x| 1.0 + 1.0 / x.powi(3) + 1.0 / x.powi(4) + 1.0 / x.powi(5) - 2.0,
        1.0,
        2.0,
    )
}
