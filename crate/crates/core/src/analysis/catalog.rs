//! The recurrence catalog: a line-oriented text asset, parsed at runtime.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, WeightVector};

/// The catalog shipped with the crate.
pub const BUILTIN_CATALOG: &str = include_str!("catalog.txt");

const SUPPORTED_VERSION: u32 = 1;

/// Measure drop `a·w1 + b·w2 + c·w3` with `w3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Delta {
    pub a: i32,
    pub b: i32,
    pub c: i32,
}

impl Delta {
    pub const fn new(a: i32, b: i32, c: i32) -> Self {
        Self { a, b, c }
    }

    pub fn evaluate(&self, w: &WeightVector) -> f64 {
        self.a as f64 * w.w1() + self.b as f64 * w.w2() + self.c as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recurrence {
    pub label: String,
    pub branches: Vec<Delta>,
    /// `P[k] <= ℓ·P[k - Δ]` for a single-branch `Δ` repeated `ℓ` times.
    pub multiplicity: Option<u32>,
}

impl Recurrence {
    pub fn evaluate(&self, w: &WeightVector) -> Vec<f64> {
        self.branches.iter().map(|d| d.evaluate(w)).collect()
    }

    /// Number of recursive calls, counting multiplicity.
    pub fn branch_count(&self) -> usize {
        self.branches.len() * self.multiplicity.unwrap_or(1) as usize
    }
}

/// A bound recorded alongside the recurrences that is not itself one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub label: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub recurrences: Vec<Recurrence>,
    pub annotations: Vec<Annotation>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CATALOG).expect("built-in catalog parses")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, AnalysisError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| AnalysisError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let mut version = None;
        let mut recurrences: Vec<Recurrence> = Vec::new();
        let mut annotations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| AnalysisError::Catalog {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("version") {
                if version.is_some() {
                    return Err(err("duplicate version line".into()));
                }
                let v: u32 = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad version `{}`", rest.trim())))?;
                if v != SUPPORTED_VERSION {
                    return Err(err(format!("unsupported version {v}")));
                }
                version = Some(v);
                continue;
            }
            if version.is_none() {
                return Err(err("records before the version line".into()));
            }
            if let Some(rest) = line.strip_prefix('@') {
                let (label, note) = rest
                    .split_once(';')
                    .ok_or_else(|| err("annotation needs `@label; note`".into()))?;
                annotations.push(Annotation {
                    label: label.trim().to_string(),
                    note: note.trim().to_string(),
                });
                continue;
            }
            let rec = parse_record(line).map_err(err)?;
            if recurrences.iter().any(|r| r.label == rec.label) {
                return Err(err(format!("duplicate label `{}`", rec.label)));
            }
            recurrences.push(rec);
        }
        Ok(Catalog {
            version: version.ok_or(AnalysisError::Catalog {
                line: 0,
                message: "missing version line".into(),
            })?,
            recurrences,
            annotations,
        })
    }

    pub fn get(&self, label: &str) -> Option<&Recurrence> {
        self.recurrences.iter().find(|r| r.label == label)
    }

    pub fn len(&self) -> usize {
        self.recurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recurrences.is_empty()
    }
}

fn parse_record(line: &str) -> Result<Recurrence, String> {
    let fields: Vec<&str> = line.split(';').map(str::trim).collect();
    let (label, count, deltas, multiplicity) = match fields.as_slice() {
        [l, c, d] => (*l, *c, *d, None),
        [l, c, d, m] => (*l, *c, *d, Some(*m)),
        _ => {
            return Err(format!(
                "expected 3 or 4 `;`-separated fields, got {}",
                fields.len()
            ))
        }
    };
    if label.is_empty() {
        return Err("empty label".into());
    }
    let count: usize = count
        .parse()
        .map_err(|_| format!("bad branch count `{count}`"))?;
    let branches = parse_deltas(deltas)?;
    if branches.is_empty() {
        return Err("no branches".into());
    }
    let multiplicity = match multiplicity {
        None => None,
        Some(m) => {
            let m: u32 = m.parse().map_err(|_| format!("bad multiplicity `{m}`"))?;
            if branches.len() != 1 || m == 0 {
                return Err("multiplicity needs exactly one delta and a positive count".into());
            }
            Some(m)
        }
    };
    let rec = Recurrence {
        label: label.to_string(),
        branches,
        multiplicity,
    };
    if rec.branch_count() != count {
        return Err(format!(
            "branch count {count} does not match the {} branches listed",
            rec.branch_count()
        ));
    }
    Ok(rec)
}

/// `item (ws item)*` where `item = [n '*'] '(' a ',' b ',' c ')'`.
fn parse_deltas(s: &str) -> Result<Vec<Delta>, String> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| format!("expected `(` in `{rest}`"))?;
        let prefix = rest[..open].trim();
        let repeat = match prefix.strip_suffix('*') {
            Some(n) => n
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("bad repetition `{prefix}`"))?,
            None if prefix.is_empty() => 1,
            None => return Err(format!("unexpected `{prefix}`")),
        };
        let close = rest.find(')').ok_or_else(|| "unclosed `(`".to_string())?;
        let parts: Vec<i32> = rest[open + 1..close]
            .split(',')
            .map(|x| x.trim().parse::<i32>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("bad integers in `{}`", &rest[open..=close]))?;
        let [a, b, c] = parts[..] else {
            return Err(format!(
                "expected three coefficients in `{}`",
                &rest[open..=close]
            ));
        };
        out.extend(std::iter::repeat_n(Delta::new(a, b, c), repeat));
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}
