//! Clique-union endgame.
//!
//! When `G[F]` is a disjoint union of cliques of size at most 4 and every
//! marked vertex has at most 4 free neighbors, a minimum independent
//! dominating set picks exactly one vertex per clique, and the only
//! remaining requirement is that every marked vertex sees a picked vertex.
//! That is a CSP with one variable per clique (domain = clique positions)
//! and one "at least one of these (variable, value) pairs" constraint per
//! marked vertex. Domains are split down to size 2 before solving.

use thiserror::Error;

use crate::graph::{MarkedGraph, Vertex};
use crate::solver::Solution;

/// Largest domain and scope accepted by [`CspInstance`].
pub const MAX_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspError {
    #[error("free subgraph is not a disjoint union of cliques of size at most 4")]
    NotCliqueUnion,
    #[error("marked vertex {vertex} has {degree} free neighbors (at most 4 allowed)")]
    MarkedDegree { vertex: Vertex, degree: usize },
    #[error("variable {var} has domain size {size}, expected 1..=4")]
    DomainSize { var: usize, size: usize },
    #[error("literal refers to variable {var} value {value} outside its domain")]
    LiteralOutOfRange { var: usize, value: u8 },
    #[error("constraint {index} spans {scope} variables (at most 4 allowed)")]
    ScopeTooLarge { index: usize, scope: usize },
    #[error("variable {var} has domain size {size}; binary solving needs at most 2")]
    NotBinary { var: usize, size: usize },
}

/// Domain as a bitmask over values `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain(u8);

impl Domain {
    /// `{0, .., size - 1}`.
    pub fn range(size: usize) -> Self {
        Domain(((1u16 << size) - 1) as u8)
    }

    pub fn from_values(values: impl IntoIterator<Item = u8>) -> Self {
        Domain(values.into_iter().fold(0, |m, v| m | (1 << v)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, value: u8) -> bool {
        value < 8 && self.0 & (1 << value) != 0
    }

    pub fn values(self) -> impl Iterator<Item = u8> {
        (0..8u8).filter(move |&v| self.contains(v))
    }

    /// The two smallest values, and the rest.
    fn halves(self) -> (Domain, Domain) {
        let values: Vec<u8> = self.values().collect();
        let cut = 2.min(values.len());
        (
            Domain::from_values(values[..cut].iter().copied()),
            Domain::from_values(values[cut..].iter().copied()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub value: u8,
}

impl Literal {
    pub fn new(var: usize, value: u8) -> Self {
        Self { var, value }
    }
}

/// Satisfied iff at least one literal holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    literals: Vec<Literal>,
}

impl Constraint {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort_unstable();
        literals.dedup();
        Self { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn scope(&self) -> usize {
        let mut vars: Vec<usize> = self.literals.iter().map(|l| l.var).collect();
        vars.dedup();
        vars.len()
    }

    pub fn is_satisfied_by(&self, assignment: &[u8]) -> bool {
        self.literals.iter().any(|l| assignment[l.var] == l.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    domains: Vec<Domain>,
    constraints: Vec<Constraint>,
}

impl CspInstance {
    /// Variables with domains `{0..size}`.
    pub fn new(domain_sizes: &[usize], constraints: Vec<Constraint>) -> Result<Self, CspError> {
        let domains = domain_sizes
            .iter()
            .enumerate()
            .map(|(var, &size)| {
                if (1..=MAX_ARITY).contains(&size) {
                    Ok(Domain::range(size))
                } else {
                    Err(CspError::DomainSize { var, size })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_domains(domains, constraints)
    }

    pub fn with_domains(
        domains: Vec<Domain>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, CspError> {
        for (var, d) in domains.iter().enumerate() {
            if d.is_empty() || d.len() > MAX_ARITY || d.values().any(|v| v as usize >= MAX_ARITY) {
                return Err(CspError::DomainSize { var, size: d.len() });
            }
        }
        for (index, c) in constraints.iter().enumerate() {
            for l in &c.literals {
                if l.var >= domains.len() || l.value as usize >= MAX_ARITY {
                    return Err(CspError::LiteralOutOfRange {
                        var: l.var,
                        value: l.value,
                    });
                }
            }
            let scope = c.scope();
            if scope > MAX_ARITY {
                return Err(CspError::ScopeTooLarge { index, scope });
            }
        }
        Ok(Self {
            domains,
            constraints,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Every assignment in the domains satisfying every constraint.
    pub fn is_solution(&self, assignment: &[u8]) -> bool {
        assignment.len() == self.domains.len()
            && assignment
                .iter()
                .zip(&self.domains)
                .all(|(&v, d)| d.contains(v))
            && self
                .constraints
                .iter()
                .all(|c| c.is_satisfied_by(assignment))
    }

    /// Drops literals outside their variable's domain and constraints
    /// already satisfied by a singleton domain.
    fn simplified(mut self) -> Self {
        let domains = &self.domains;
        self.constraints.retain(|c| {
            !c.literals
                .iter()
                .any(|l| domains[l.var].len() == 1 && domains[l.var].contains(l.value))
        });
        for c in &mut self.constraints {
            c.literals.retain(|l| domains[l.var].contains(l.value));
        }
        self
    }
}

/// Maps CSP variables back to cliques of the source graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueEncoding {
    /// `clique_of[i][j]`: vertex picked when variable `i` takes value `j`.
    pub clique_of: Vec<Vec<Vertex>>,
}

impl CliqueEncoding {
    pub fn decode(&self, assignment: &[u8]) -> Vec<Vertex> {
        let mut picked: Vec<Vertex> = self
            .clique_of
            .iter()
            .zip(assignment)
            .map(|(clique, &value)| clique[value as usize])
            .collect();
        picked.sort_unstable();
        picked
    }
}

/// Builds the CSP for a clique-union marked graph. Cliques are numbered by
/// their smallest vertex; positions inside a clique ascend by identifier.
pub fn encode(g: &MarkedGraph) -> Result<(CspInstance, CliqueEncoding), CspError> {
    let components = g.free_components();
    let mut position = vec![None; g.order()];
    let mut clique_of = Vec::with_capacity(components.len());
    for (var, comp) in components.iter().enumerate() {
        if comp.len() > MAX_ARITY || !g.is_clique(comp) {
            return Err(CspError::NotCliqueUnion);
        }
        let vertices = comp.to_vec();
        for (j, &v) in vertices.iter().enumerate() {
            position[v] = Some(Literal::new(var, j as u8));
        }
        clique_of.push(vertices);
    }
    let mut constraints = Vec::with_capacity(g.marked().len());
    for m in g.marked() {
        let nbrs = g.free_neighbors(m);
        if nbrs.len() > MAX_ARITY {
            return Err(CspError::MarkedDegree {
                vertex: m,
                degree: nbrs.len(),
            });
        }
        constraints.push(Constraint::new(
            nbrs.iter()
                .map(|v| position[v].expect("free vertex has a clique")),
        ));
    }
    let sizes: Vec<usize> = clique_of.iter().map(Vec::len).collect();
    let instance = CspInstance::new(&sizes, constraints)?;
    Ok((instance, CliqueEncoding { clique_of }))
}

/// Splits every domain of size 3 or 4 into two parts (`{a,b} | {c,d}` or
/// `{a,b} | {c}`), producing instances whose domains all have size at most
/// 2. The input is satisfiable iff some output is. Outputs are ordered with
/// the lower half of the lowest-indexed variable first.
pub fn split_to_binary(instance: &CspInstance) -> Vec<CspInstance> {
    let mut out = vec![instance.domains.clone()];
    for (var, d) in instance.domains.iter().enumerate() {
        if d.len() <= 2 {
            continue;
        }
        let (low, high) = d.halves();
        out = out
            .into_iter()
            .flat_map(|domains| {
                [low, high].map(|half| {
                    let mut next = domains.clone();
                    next[var] = half;
                    next
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|domains| {
            CspInstance {
                domains,
                constraints: instance.constraints.clone(),
            }
            .simplified()
        })
        .collect()
}

/// Chronological backtracking with unit propagation. Variables are decided
/// in index order, values ascending.
pub fn solve_binary(instance: &CspInstance) -> Result<Option<Vec<u8>>, CspError> {
    if let Some((var, d)) = instance
        .domains
        .iter()
        .enumerate()
        .find(|(_, d)| d.len() > 2)
    {
        return Err(CspError::NotBinary { var, size: d.len() });
    }
    Ok(Backtracker::new(instance).run())
}

struct Backtracker<'a> {
    instance: &'a CspInstance,
    assignment: Vec<Option<u8>>,
    trail: Vec<usize>,
}

enum Propagation {
    Conflict,
    Stable,
}

impl<'a> Backtracker<'a> {
    fn new(instance: &'a CspInstance) -> Self {
        Self {
            instance,
            assignment: vec![None; instance.domains.len()],
            trail: Vec::new(),
        }
    }

    fn run(mut self) -> Option<Vec<u8>> {
        if self.search() {
            Some(
                self.assignment
                    .into_iter()
                    .map(|v| v.expect("total"))
                    .collect(),
            )
        } else {
            None
        }
    }

    fn assign(&mut self, var: usize, value: u8) {
        self.assignment[var] = Some(value);
        self.trail.push(var);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().expect("nonempty trail");
            self.assignment[var] = None;
        }
    }

    fn literal_live(&self, l: &Literal) -> bool {
        self.assignment[l.var].is_none() && self.instance.domains[l.var].contains(l.value)
    }

    fn propagate(&mut self) -> Propagation {
        loop {
            let mut forced = None;
            for c in &self.instance.constraints {
                if c.literals
                    .iter()
                    .any(|l| self.assignment[l.var] == Some(l.value))
                {
                    continue;
                }
                let mut live = c.literals.iter().filter(|l| self.literal_live(l));
                match (live.next(), live.next()) {
                    (None, _) => return Propagation::Conflict,
                    (Some(l), None) => {
                        forced = Some(*l);
                        break;
                    }
                    _ => {}
                }
            }
            match forced {
                Some(l) => self.assign(l.var, l.value),
                None => return Propagation::Stable,
            }
        }
    }

    fn search(&mut self) -> bool {
        let mark = self.trail.len();
        if let Propagation::Conflict = self.propagate() {
            self.undo_to(mark);
            return false;
        }
        let Some(var) = self.assignment.iter().position(Option::is_none) else {
            return true;
        };
        for value in self.instance.domains[var].values() {
            let inner = self.trail.len();
            self.assign(var, value);
            if self.search() {
                return true;
            }
            self.undo_to(inner);
        }
        self.undo_to(mark);
        false
    }
}

/// Solves a clique-union marked graph through the CSP: one vertex per
/// clique, or infeasible. The first satisfiable split instance wins.
pub fn solve_clique_union(g: &MarkedGraph) -> Result<Solution, CspError> {
    let (instance, encoding) = encode(g)?;
    for part in split_to_binary(&instance) {
        if let Some(assignment) = solve_binary(&part)? {
            return Ok(Solution::Found(encoding.decode(&assignment)));
        }
    }
    Ok(Solution::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::check_ids;

    /// All assignments over the given domains.
    fn enumerate(domains: &[Domain]) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for d in domains {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    d.values().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn solutions(instance: &CspInstance) -> Vec<Vec<u8>> {
        enumerate(instance.domains())
            .into_iter()
            .filter(|a| instance.is_solution(a))
            .collect()
    }

    #[test]
    fn encode_examples() {
        // triangle {0,1,2} and K1 {3}
        let g = MarkedGraph::plain(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (csp, enc) = encode(&g).unwrap();
        assert_eq!(csp.variable_count(), 2);
        assert!(csp.constraints().is_empty());
        assert_eq!(enc.clique_of, vec![vec![0, 1, 2], vec![3]]);

        // clique {a=0, b=1}, clique {c=2}, marked m=3 sees a and c
        let g = MarkedGraph::new(4, [3], [(0, 1), (3, 0), (3, 2)]).unwrap();
        let (csp, _) = encode(&g).unwrap();
        assert_eq!(
            csp.constraints()[0].literals(),
            &[Literal::new(0, 0), Literal::new(1, 0)]
        );

        // m sees all of {0,1,2}
        let g = MarkedGraph::new(4, [3], [(0, 1), (1, 2), (0, 2), (3, 0), (3, 1), (3, 2)]).unwrap();
        let (csp, _) = encode(&g).unwrap();
        assert_eq!(
            csp.constraints()[0].literals(),
            &[Literal::new(0, 0), Literal::new(0, 1), Literal::new(0, 2)]
        );
        assert_eq!(solutions(&csp).len(), 3);
    }

    #[test]
    fn encode_rejects_non_clique_union() {
        assert_eq!(
            encode(&crate::instances::path(3)).unwrap_err(),
            CspError::NotCliqueUnion
        );
        assert_eq!(
            encode(&crate::instances::complete(5)).unwrap_err(),
            CspError::NotCliqueUnion
        );
    }

    #[test]
    fn split_examples() {
        let binary = CspInstance::new(&[2, 1, 2], vec![]).unwrap();
        assert_eq!(split_to_binary(&binary), vec![binary.clone()]);

        let four = CspInstance::new(&[4], vec![]).unwrap();
        let parts = split_to_binary(&four);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].domains()[0], Domain::from_values([0, 1]));
        assert_eq!(parts[1].domains()[0], Domain::from_values([2, 3]));

        // domain {0,1,2} with constraint (x0=2) ∨ (x1=0)
        let three = CspInstance::new(
            &[3, 2],
            vec![Constraint::new([Literal::new(0, 2), Literal::new(1, 0)])],
        )
        .unwrap();
        let parts = split_to_binary(&three);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].domains()[0], Domain::from_values([0, 1]));
        assert_eq!(parts[0].constraints()[0].literals(), &[Literal::new(1, 0)]);
        assert_eq!(parts[1].domains()[0], Domain::from_values([2]));
        assert!(parts[1].constraints().is_empty(), "singleton satisfies it");

        let mut union: Vec<Vec<u8>> = parts.iter().flat_map(solutions).collect();
        union.sort();
        assert_eq!(union, solutions(&three));
    }

    #[test]
    fn solve_binary_examples() {
        let free = CspInstance::new(&[2, 2], vec![]).unwrap();
        assert_eq!(solve_binary(&free).unwrap(), Some(vec![0, 0]));

        let empty_clause = CspInstance::new(&[2], vec![Constraint::new([])]).unwrap();
        assert_eq!(solve_binary(&empty_clause).unwrap(), None);

        let chain = CspInstance::new(
            &[2, 2, 2],
            vec![
                Constraint::new([Literal::new(0, 0), Literal::new(1, 0)]),
                Constraint::new([Literal::new(1, 1), Literal::new(2, 0)]),
            ],
        )
        .unwrap();
        let brute = solutions(&chain);
        assert!(!brute.is_empty());
        let got = solve_binary(&chain).unwrap().unwrap();
        assert!(brute.contains(&got));

        assert_eq!(
            solve_binary(&CspInstance::new(&[3], vec![]).unwrap()).unwrap_err(),
            CspError::NotBinary { var: 0, size: 3 }
        );
    }

    #[test]
    fn unsatisfiable_by_pigeonhole() {
        // x0 must be 0, x0 must be 1
        let csp = CspInstance::new(
            &[2],
            vec![
                Constraint::new([Literal::new(0, 0)]),
                Constraint::new([Literal::new(0, 1)]),
            ],
        )
        .unwrap();
        assert_eq!(solve_binary(&csp).unwrap(), None);
    }

    #[test]
    fn clique_union_examples() {
        // cliques {a=0,b=1}, {c=2}; marked 3 adjacent to b and c
        let g = MarkedGraph::new(4, [3], [(0, 1), (3, 1), (3, 2)]).unwrap();
        let s = solve_clique_union(&g).unwrap();
        assert_eq!(s.size(), Some(2));
        assert!(check_ids(&g, s.witness().unwrap()));

        // clique {0,1}; marked 2 sees only 0, marked 3 sees only 1
        let g = MarkedGraph::new(4, [2, 3], [(0, 1), (2, 0), (3, 1)]).unwrap();
        assert_eq!(solve_clique_union(&g).unwrap(), Solution::Infeasible);

        // three cliques, no marks
        let g = MarkedGraph::plain(6, [(0, 1), (2, 3), (3, 4), (2, 4)]).unwrap();
        let s = solve_clique_union(&g).unwrap();
        assert_eq!(s.size(), Some(3));
        assert!(check_ids(&g, s.witness().unwrap()));
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            CspInstance::new(&[0], vec![]),
            Err(CspError::DomainSize { .. })
        ));
        assert!(matches!(
            CspInstance::new(&[5], vec![]),
            Err(CspError::DomainSize { .. })
        ));
        assert!(matches!(
            CspInstance::new(&[2], vec![Constraint::new([Literal::new(1, 0)])]),
            Err(CspError::LiteralOutOfRange { .. })
        ));
        let wide = Constraint::new((0..5).map(|v| Literal::new(v, 0)));
        assert!(matches!(
            CspInstance::new(&[1; 5], vec![wide]),
            Err(CspError::ScopeTooLarge { .. })
        ));
    }
}
