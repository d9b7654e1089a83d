//! Auditing a weight choice against the catalog, and tuning the weights by
//! nested grid refinement.

use serde::{Deserialize, Serialize};

use super::{branching_factor, AnalysisError, Catalog, WeightVector};
use crate::batch;

/// Factors within this distance of the maximum count as attaining it.
const ARGMAX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub label: String,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub weights: WeightVector,
    pub rows: Vec<AuditRow>,
    pub max_factor: f64,
    pub worst_cases: Vec<String>,
}

pub fn audit_weights(catalog: &Catalog, w: &WeightVector) -> Result<Audit, AnalysisError> {
    let rows = catalog
        .recurrences
        .iter()
        .map(|r| {
            Ok(AuditRow {
                label: r.label.clone(),
                factor: branching_factor(r, w)?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let max_factor = rows.iter().map(|r| r.factor).fold(1.0, f64::max);
    let worst_cases = rows
        .iter()
        .filter(|r| r.factor >= max_factor - ARGMAX_TOL)
        .map(|r| r.label.clone())
        .collect();
    Ok(Audit {
        weights: *w,
        rows,
        max_factor,
        worst_cases,
    })
}

/// Step sizes of successive grid levels. The first level spans `[0,1]²`;
/// each later one spans `window` steps of the previous level around the
/// incumbent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSchedule {
    pub steps: Vec<f64>,
    pub window: u32,
}

impl Default for GridSchedule {
    fn default() -> Self {
        Self {
            steps: vec![1e-2, 1e-3, 1e-4],
            window: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub weights: WeightVector,
    pub max_factor: f64,
    /// Admissible grid points evaluated over all levels.
    pub evaluated: usize,
}

/// Minimizes the audit maximum over admissible grid points. Exact ties go to
/// the lexicographically smallest `(w1, w2)`, independent of evaluation
/// order.
pub fn optimize_weights(
    catalog: &Catalog,
    schedule: &GridSchedule,
) -> Result<Optimum, AnalysisError> {
    let mut best: Option<(f64, WeightVector)> = None;
    let mut evaluated = 0;
    let mut prev_step = None::<f64>;
    for &step in &schedule.steps {
        let axis = |center: f64| -> Vec<f64> {
            let (lo, hi) = match (prev_step, center) {
                (Some(p), c) => (
                    c - schedule.window as f64 * p,
                    c + schedule.window as f64 * p,
                ),
                (None, _) => (0.0, 1.0),
            };
            let first = (lo.max(0.0) / step - 1e-9).ceil() as i64;
            let last = (hi.min(1.0) / step + 1e-9).floor() as i64;
            (first..=last).map(|i| i as f64 * step).collect()
        };
        let (c1, c2) = best.map_or((0.5, 0.5), |(_, w)| (w.w1(), w.w2()));
        let xs = axis(c1);
        let ys = axis(c2);
        let candidates: Vec<WeightVector> = xs
            .iter()
            .flat_map(|&w1| ys.iter().map(move |&w2| (w1, w2)))
            .filter_map(|(w1, w2)| WeightVector::new(w1, w2).ok())
            .collect();
        evaluated += candidates.len();
        let scores = batch::par_map(&candidates, |w| objective(catalog, w));
        for (w, score) in candidates.into_iter().zip(scores) {
            let Some(score) = score else { continue };
            let better = match best {
                None => true,
                Some((b, bw)) => score < b || (score == b && (w.w1(), w.w2()) < (bw.w1(), bw.w2())),
            };
            if better {
                best = Some((score, w));
            }
        }
        prev_step = Some(step);
    }
    let (max_factor, weights) = best.ok_or(AnalysisError::EmptyGrid)?;
    Ok(Optimum {
        weights,
        max_factor,
        evaluated,
    })
}

/// Audit maximum, or `None` where some delta is not positive.
fn objective(catalog: &Catalog, w: &WeightVector) -> Option<f64> {
    catalog
        .recurrences
        .iter()
        .map(|r| branching_factor(r, w).ok())
        .try_fold(1.0f64, |m, f| f.map(|f| m.max(f)))
}
