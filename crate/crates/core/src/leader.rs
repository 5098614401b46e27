//! The leader map `μ_Q` over vertices of `R_A`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineTask, CriticalMap, VerificationReport};
use crate::complex::ChromaticVertex;
use crate::procset::{Color, ProcSet};
use crate::subdivision::Chr2Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LeaderError {
    #[error("vertex {vertex} has color outside Q = {q}")]
    ColorNotInQ { vertex: String, q: ProcSet },
    #[error("vertex {0} is not in the task complex")]
    NotInTask(String),
    #[error("candidate views {0} and {1} are incomparable")]
    NotAChain(ProcSet, ProcSet),
    #[error("no candidate view meets Q = {q} for vertex {vertex}")]
    NoCandidate { vertex: String, q: ProcSet },
}

/// Inclusion-minimum of a family that must be a chain.
pub fn chain_min<I: IntoIterator<Item = ProcSet>>(sets: I) -> Result<Option<ProcSet>, LeaderError> {
    let sets: Vec<ProcSet> = sets.into_iter().collect();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if !a.is_subset(*b) && !b.is_subset(*a) {
                return Err(LeaderError::NotAChain(*a, *b));
            }
        }
    }
    Ok(sets.into_iter().min_by_key(|s| s.len()))
}

/// Evaluates `δ_Q`, `γ_Q` and `μ_Q` for one task, caching critical data.
pub struct Leader<'a> {
    task: &'a AffineTask,
    critical: CriticalMap<'a>,
}

impl<'a> Leader<'a> {
    pub fn new(task: &'a AffineTask) -> Self {
        Self { task, critical: CriticalMap::new(&task.alpha) }
    }

    /// Checks the query preconditions.
    pub fn query(&self, v: &Chr2Vertex, q: ProcSet) -> Result<(), LeaderError> {
        if !q.contains(v.color()) {
            return Err(LeaderError::ColorNotInQ { vertex: v.uid(), q });
        }
        if !self.task.complex.has_vertex(v) {
            return Err(LeaderError::NotInTask(v.uid()));
        }
        Ok(())
    }

    fn csv_meets(&mut self, v: &Chr2Vertex, q: ProcSet) -> bool {
        self.critical.get(v.view()).csv.intersects(q)
    }

    /// Smallest carrier of a critical simplex in `carrier(v, Chr s)` meeting `Q`.
    pub fn delta_q(&mut self, v: &Chr2Vertex, q: ProcSet) -> Result<ProcSet, LeaderError> {
        let data = self.critical.get(v.view());
        let candidates = data.cs.iter().map(|s| s.carrier().colors()).filter(|c| c.intersects(q));
        chain_min(candidates)?.ok_or_else(|| LeaderError::NoCandidate { vertex: v.uid(), q })
    }

    /// Smallest first-round view in `carrier(v, Chr s)` meeting `Q`.
    pub fn gamma_q(&self, v: &Chr2Vertex, q: ProcSet) -> Result<ProcSet, LeaderError> {
        let candidates = v.view().vertices().iter().map(|u| u.carrier_s()).filter(|c| c.intersects(q));
        chain_min(candidates)?.ok_or_else(|| LeaderError::NoCandidate { vertex: v.uid(), q })
    }

    pub fn mu_q(&mut self, v: &Chr2Vertex, q: ProcSet) -> Result<Color, LeaderError> {
        self.query(v, q)?;
        let view = if self.csv_meets(v, q) { self.delta_q(v, q)? } else { self.gamma_q(v, q)? };
        Ok(view.intersection(q).min().expect("selected view meets Q"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuProperty {
    Validity,
    Agreement,
    Robustness,
    Defined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuViolation {
    pub property: MuProperty,
    pub q: ProcSet,
    pub simplex: Vec<String>,
    pub detail: String,
}

/// Exhaustive check of validity, agreement and robustness of `μ_Q` over
/// every facet of the task, every nonempty `Q` and every face colored in `Q`.
/// `only_q` restricts the sweep to one candidate set.
pub fn verify_mu_properties(task: &AffineTask, only_q: Option<ProcSet>) -> VerificationReport<MuViolation> {
    let n = task.n();
    let mut leader = Leader::new(task);
    let mut report = VerificationReport::new();
    let qs: Vec<ProcSet> = match only_q {
        Some(q) => vec![q],
        None => ProcSet::full(n).nonempty_subsets().collect(),
    };
    for sigma in task.complex.facets() {
        for &q in &qs {
            let mut leaders = Vec::with_capacity(sigma.len());
            for v in sigma.vertices() {
                if !q.contains(v.color()) {
                    leaders.push(None);
                    continue;
                }
                let fail = |property, detail: String| MuViolation {
                    property,
                    q,
                    simplex: vec![v.uid()],
                    detail,
                };
                let mu = match leader.mu_q(v, q) {
                    Ok(mu) => mu,
                    Err(e) => {
                        report.record(Some(fail(MuProperty::Defined, e.to_string())));
                        leaders.push(None);
                        continue;
                    }
                };
                let carrier = v.carrier_s();
                report.record((!carrier.contains(mu) || !q.contains(mu)).then(|| {
                    fail(MuProperty::Validity, format!("leader {mu} outside carrier {carrier} or Q"))
                }));
                let narrowed = leader.mu_q(v, carrier.intersection(q));
                report.record((narrowed.as_ref() != Ok(&mu)).then(|| {
                    fail(MuProperty::Robustness, format!("leader {mu} but {narrowed:?} for Q restricted to {carrier}"))
                }));
                leaders.push(Some(mu));
            }
            for theta in sigma.faces() {
                if !theta.colors().is_subset(q) {
                    continue;
                }
                let chosen: BTreeSet<Color> = sigma
                    .vertices()
                    .iter()
                    .zip(&leaders)
                    .filter(|(v, _)| theta.contains_vertex(v))
                    .filter_map(|(_, l)| *l)
                    .collect();
                let bound = task.alpha.get(theta.carrier_s().colors());
                report.record((chosen.len() > bound).then(|| MuViolation {
                    property: MuProperty::Agreement,
                    q,
                    simplex: theta.uids(),
                    detail: format!("{} leaders, bound {bound}", chosen.len()),
                }));
            }
        }
    }
    report
}

/// Agreement alone, as a separate entry point.
pub fn verify_mu_agreement(task: &AffineTask) -> VerificationReport<MuViolation> {
    let mut report = verify_mu_properties(task, None);
    report.violations.retain(|v| v.property == MuProperty::Agreement);
    report
}
