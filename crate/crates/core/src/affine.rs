//! Contention simplices, critical simplices and the affine tasks built from them.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{min_hitting_set, AdversaryError, AgreementFunction, FairAdversary};
use crate::complex::{ChromaticComplex, ChromaticVertex, ComplexError, Simplex};
use crate::export::{to_document, ComplexDocument};
use crate::procset::ProcSet;
use crate::subdivision::{build_chr2, chr_s, Chr2Complex, Chr2Simplex, ChrComplex, ChrSimplex, ChrVertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("agreement function has alpha(full set) = 0")]
    Trivial,
}

/// Which of two vertices saw fewer processes in the first round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentionWitness {
    /// Smaller first view, larger second view.
    pub early: String,
    pub late: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentionRecord {
    pub simplex: Vec<String>,
    pub witnesses: Vec<ContentionWitness>,
}

fn contending(a: &crate::subdivision::Chr2Vertex, b: &crate::subdivision::Chr2Vertex) -> bool {
    a.view1().is_proper_subset(b.view1()) && b.view2().is_proper_subset(a.view2())
}

/// Every pair of vertices has strictly reversed first and second views.
pub fn is_contention(theta: &Chr2Simplex) -> bool {
    let vs = theta.vertices();
    vs.iter().enumerate().all(|(i, a)| {
        vs[i + 1..].iter().all(|b| contending(a, b) || contending(b, a))
    })
}

pub fn contention_record(theta: &Chr2Simplex) -> Option<ContentionRecord> {
    let vs = theta.vertices();
    let mut witnesses = Vec::new();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            let (early, late) = if contending(a, b) {
                (a, b)
            } else if contending(b, a) {
                (b, a)
            } else {
                return None;
            };
            witnesses.push(ContentionWitness { early: early.uid(), late: late.uid() });
        }
    }
    Some(ContentionRecord { simplex: theta.uids(), witnesses })
}

/// `Cont₂`: every contention simplex of `Chr² s`.
pub fn contention_simplices(chr2: &Chr2Complex) -> BTreeSet<Chr2Simplex> {
    chr2.facets().iter().flat_map(|f| f.faces()).filter(is_contention).collect()
}

fn carrier_colors(sigma: &ChrSimplex) -> ProcSet {
    sigma.carrier().colors()
}

pub fn is_critical(sigma: &ChrSimplex, alpha: &AgreementFunction) -> bool {
    let carrier = carrier_colors(sigma);
    sigma.vertices().iter().all(|v| v.carrier_s() == carrier)
        && alpha.get(carrier.difference(sigma.colors())) < alpha.get(carrier)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalData {
    /// Critical faces of the simplex.
    pub cs: Vec<ChrSimplex>,
    /// Vertices belonging to some critical face.
    pub csm: Vec<ChrVertex>,
    pub csm_colors: ProcSet,
    /// Colors of the carrier of `csm`, empty when `csm` is.
    pub csv: ProcSet,
    pub conc: usize,
}

pub fn critical_data(sigma: &ChrSimplex, alpha: &AgreementFunction) -> CriticalData {
    let cs: Vec<ChrSimplex> = sigma.faces().filter(|f| is_critical(f, alpha)).collect();
    let members: BTreeSet<ChrVertex> = cs.iter().flat_map(|f| f.vertices().iter().cloned()).collect();
    let csm: Vec<ChrVertex> = members.into_iter().collect();
    let csm_colors = csm.iter().map(ChromaticVertex::color).collect();
    let csv = csm.iter().fold(ProcSet::EMPTY, |acc, v| acc.union(v.carrier_s()));
    let conc = cs.iter().map(|t| alpha.get(carrier_colors(t))).max().unwrap_or(0);
    CriticalData { cs, csm, csm_colors, csv, conc }
}

/// Memoized [`critical_data`] over the simplices of `Chr s`.
pub struct CriticalMap<'a> {
    alpha: &'a AgreementFunction,
    cache: HashMap<ChrSimplex, CriticalData>,
}

impl<'a> CriticalMap<'a> {
    pub fn new(alpha: &'a AgreementFunction) -> Self {
        Self { alpha, cache: HashMap::new() }
    }

    pub fn alpha(&self) -> &AgreementFunction {
        self.alpha
    }

    pub fn get(&mut self, sigma: &ChrSimplex) -> &CriticalData {
        if !self.cache.contains_key(sigma) {
            let data = critical_data(sigma, self.alpha);
            self.cache.insert(sigma.clone(), data);
        }
        &self.cache[sigma]
    }
}

/// How the member colors of the outer carrier and the critical view of the
/// inner carrier are combined in the membership predicate of `R_A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineForm {
    #[default]
    Union,
    Intersection,
}

#[derive(Clone, Debug)]
pub struct AffineTask {
    pub name: String,
    pub complex: Chr2Complex,
    pub alpha: AgreementFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub set: ProcSet,
    pub alpha: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskDocument {
    pub name: String,
    #[serde(flatten)]
    pub complex: ComplexDocument,
    pub alpha: Vec<AlphaEntry>,
}

impl AffineTask {
    pub fn n(&self) -> usize {
        self.complex.n()
    }

    pub fn facet_set(&self) -> BTreeSet<Chr2Simplex> {
        self.complex.facets().iter().cloned().collect()
    }

    pub fn to_document(&self) -> TaskDocument {
        TaskDocument {
            name: self.name.clone(),
            complex: to_document(&self.complex),
            alpha: self.alpha.table().into_iter().map(|(set, alpha)| AlphaEntry { set, alpha }).collect(),
        }
    }
}

/// `Pc({σ ∈ Cont₂ : dim σ ≥ k}, Chr² s)`.
pub fn r_k_of(n: usize, k: usize) -> Result<AffineTask, AffineError> {
    if k < 1 || k > n {
        return Err(AffineError::Parameter(format!("k = {k} outside 1..={n}")));
    }
    let chr2 = build_chr2(n)?;
    let excluded: BTreeSet<Chr2Simplex> =
        contention_simplices(&chr2).into_iter().filter(|s| s.dim() >= k).collect();
    let complex = chr2.pure_complement(&excluded)?;
    let alpha = AgreementFunction::from_fn(n, |p| p.len().min(k))?;
    Ok(AffineTask { name: format!("R_{k}-OF"), complex, alpha })
}

/// Facets of `Chr² s` whose vertices all see at least `n - t` processes.
pub fn r_t_res(n: usize, t: usize) -> Result<AffineTask, AffineError> {
    if t >= n {
        return Err(AffineError::Parameter(format!("t = {t} must be below n = {n}")));
    }
    let chr2 = build_chr2(n)?;
    let complex = chr2.filter_facets(|f| f.vertices().iter().all(|v| v.carrier_s().len() >= n - t));
    let alpha = AgreementFunction::from_fn(n, |p| if p.len() >= n - t { p.len() - (n - t) + 1 } else { 0 })?;
    Ok(AffineTask { name: format!("R_{t}-res"), complex, alpha })
}

/// First face of `sigma` breaking the membership predicate of `R_A`.
pub fn r_alpha_violation(
    sigma: &Chr2Simplex,
    critical: &mut CriticalMap<'_>,
    form: CombineForm,
) -> Option<Chr2Simplex> {
    let rho = sigma.carrier();
    let csm_rho = critical.get(&rho).csm_colors;
    for theta in sigma.faces() {
        if !is_contention(&theta) {
            continue;
        }
        let tau = theta.carrier();
        let data = critical.get(&tau);
        let guard = match form {
            CombineForm::Union => csm_rho.union(data.csv),
            CombineForm::Intersection => csm_rho.intersection(data.csv),
        };
        if !theta.colors().intersects(guard) && theta.dim() >= data.conc {
            return Some(theta);
        }
    }
    None
}

/// `R_A` for an agreement function, keeping each facet of `Chr² s` all of
/// whose nonempty faces satisfy the membership predicate.
pub fn r_alpha(name: &str, alpha: &AgreementFunction, form: CombineForm) -> Result<AffineTask, AffineError> {
    let n = alpha.n();
    if alpha.get(ProcSet::full(n)) < 1 {
        return Err(AffineError::Trivial);
    }
    let chr2 = build_chr2(n)?;
    let mut critical = CriticalMap::new(alpha);
    let complex = chr2.filter_facets(|f| r_alpha_violation(f, &mut critical, form).is_none());
    Ok(AffineTask { name: name.to_string(), complex, alpha: alpha.clone() })
}

pub fn r_a(adv: &FairAdversary, form: CombineForm) -> Result<AffineTask, AffineError> {
    r_alpha(&format!("R_A {}", adv.adversary()), adv.alpha(), form)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport<T> {
    pub checked: usize,
    pub violations: Vec<T>,
}

impl<T> VerificationReport<T> {
    pub fn new() -> Self {
        Self { checked: 0, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&mut self, outcome: Option<T>) {
        self.checked += 1;
        if let Some(v) = outcome {
            self.violations.push(v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionForm {
    FullCarrier,
    WithFailures,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionViolation {
    pub form: DistributionForm,
    pub simplex: Vec<String>,
    pub level: usize,
    pub lhs: i64,
    pub rhs: usize,
}

/// Size of the smallest color set meeting every listed simplex.
fn simplex_csize(simplices: &[&ChrSimplex]) -> usize {
    let sets: Vec<ProcSet> = simplices.iter().map(|s| s.colors()).collect();
    min_hitting_set(&sets).map_or(0, ProcSet::len)
}

/// Lower bounds on how many processes must be removed to destroy every
/// critical simplex of agreement power at least `l`, for every simplex of
/// `Chr s` and every `l` in `1..=n+1`.
///
/// The full-carrier form applies to simplices colored by their whole
/// carrier; the failure form covers all simplices and subtracts the number
/// of carrier processes missing from the simplex.
pub fn verify_cs_distribution(alpha: &AgreementFunction) -> Result<VerificationReport<DistributionViolation>, AffineError> {
    let n = alpha.n();
    let chr = chr_s(n)?;
    let mut report = VerificationReport::new();
    for sigma in chr.simplices() {
        let data = critical_data(&sigma, alpha);
        let carrier = carrier_colors(&sigma);
        let missing = carrier.difference(sigma.colors()).len() as i64;
        for l in 1..=n + 1 {
            let heavy: Vec<&ChrSimplex> =
                data.cs.iter().filter(|t| alpha.get(carrier_colors(t)) >= l).collect();
            let rhs = simplex_csize(&heavy);
            let base = alpha.get(carrier) as i64 - l as i64 + 1;
            if sigma.colors() == carrier {
                let violation = (base > rhs as i64).then(|| DistributionViolation {
                    form: DistributionForm::FullCarrier,
                    simplex: sigma.uids(),
                    level: l,
                    lhs: base,
                    rhs,
                });
                report.record(violation);
            }
            let lhs = base - missing;
            let violation = (lhs > rhs as i64).then(|| DistributionViolation {
                form: DistributionForm::WithFailures,
                simplex: sigma.uids(),
                level: l,
                lhs,
                rhs,
            });
            report.record(violation);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleCarrierViolation {
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub alpha: usize,
}

/// Critical simplices of a common simplex with equal agreement power share
/// their carrier. Checking facets covers every simplex, since the critical
/// faces of a simplex are critical faces of each facet containing it.
pub fn verify_single_carrier(alpha: &AgreementFunction) -> Result<VerificationReport<SingleCarrierViolation>, AffineError> {
    let chr = chr_s(alpha.n())?;
    let mut report = VerificationReport::new();
    for sigma in chr.facets() {
        let data = critical_data(sigma, alpha);
        for (i, a) in data.cs.iter().enumerate() {
            for b in &data.cs[i + 1..] {
                let (ca, cb) = (a.carrier(), b.carrier());
                let level = alpha.get(ca.colors());
                let violation = (level == alpha.get(cb.colors()) && ca != cb).then(|| SingleCarrierViolation {
                    first: a.uids(),
                    second: b.uids(),
                    alpha: level,
                });
                report.record(violation);
            }
        }
    }
    Ok(report)
}

/// Facets kept by one combination form but not the other, plus an optional
/// comparison against a reference task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub name: String,
    pub union_facets: usize,
    pub intersection_facets: usize,
    pub only_union: Vec<Vec<String>>,
    pub only_intersection: Vec<Vec<String>>,
    pub reference: Option<ReferenceComparison>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceComparison {
    pub name: String,
    pub facets: usize,
    pub union_equal: bool,
    pub intersection_equal: bool,
}

pub fn differential(
    name: &str,
    alpha: &AgreementFunction,
    reference: Option<&AffineTask>,
) -> Result<DifferentialReport, AffineError> {
    let union = r_alpha(name, alpha, CombineForm::Union)?.facet_set();
    let inter = r_alpha(name, alpha, CombineForm::Intersection)?.facet_set();
    let listing = |a: &BTreeSet<Chr2Simplex>, b: &BTreeSet<Chr2Simplex>| -> Vec<Vec<String>> {
        a.difference(b).map(Simplex::uids).collect()
    };
    let reference = reference.map(|r| {
        let facets = r.facet_set();
        ReferenceComparison {
            name: r.name.clone(),
            facets: facets.len(),
            union_equal: facets == union,
            intersection_equal: facets == inter,
        }
    });
    Ok(DifferentialReport {
        name: name.to_string(),
        union_facets: union.len(),
        intersection_facets: inter.len(),
        only_union: listing(&union, &inter),
        only_intersection: listing(&inter, &union),
        reference,
    })
}

/// Simplices of `Chr s` whose concurrency level is at least `level`.
pub fn conc_at_least(chr: &ChrComplex, alpha: &AgreementFunction, level: usize) -> ChromaticComplex<ChrVertex> {
    let keep: Vec<ChrSimplex> =
        chr.simplices().into_iter().filter(|s| critical_data(s, alpha).conc >= level).collect();
    ChromaticComplex::closure(chr.n(), keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Adversary;
    use crate::subdivision::{chr2_facet, OrderedPartition};

    fn op(blocks: &[&[u8]]) -> OrderedPartition {
        OrderedPartition::from_ids(blocks).unwrap()
    }

    #[test]
    fn reversed_runs_contend() {
        let f = chr2_facet(3, &op(&[&[2], &[1], &[3]]), &op(&[&[3], &[1], &[2]])).unwrap();
        assert!(is_contention(&f));
        let rec = contention_record(&f).unwrap();
        assert_eq!(rec.witnesses.len(), 3);
    }

    #[test]
    fn vertices_contend_vacuously() {
        let chr2 = build_chr2(2).unwrap();
        for v in chr2.vertices() {
            assert!(is_contention(&Simplex::vertex(v)));
        }
    }

    #[test]
    fn solo_corner_is_critical_for_one_of() {
        let alpha = AgreementFunction::from_fn(3, |p| p.len().min(1)).unwrap();
        let v = Simplex::vertex(ChrVertex::from_ids(1, &[1]).unwrap());
        assert!(is_critical(&v, &alpha));
        assert_eq!(critical_data(&v, &alpha).conc, 1);
    }

    #[test]
    fn synchronous_facet_conc_is_alpha_of_everyone() {
        let alpha = AgreementFunction::from_fn(3, |p| p.len().min(2)).unwrap();
        let f = crate::subdivision::partition_to_facet(3, &op(&[&[1, 2, 3]])).unwrap();
        assert!(is_critical(&f, &alpha));
        assert_eq!(critical_data(&f, &alpha).conc, 2);
    }

    #[test]
    fn full_k_is_whole_chr2() {
        let task = r_k_of(3, 3).unwrap();
        assert_eq!(task.complex.facets().len(), 169);
        assert_eq!(r_t_res(3, 2).unwrap().complex.facets().len(), 169);
    }

    #[test]
    fn trivial_alpha_rejected() {
        let alpha = AgreementFunction::from_fn(2, |_| 0).unwrap();
        assert_eq!(r_alpha("zero", &alpha, CombineForm::Union).unwrap_err(), AffineError::Trivial);
    }

    #[test]
    fn wait_free_alpha_keeps_everything() {
        let adv = FairAdversary::new(Adversary::symmetric(3, &[1, 2, 3]).unwrap()).unwrap();
        assert_eq!(r_a(&adv, CombineForm::Union).unwrap().complex.facets().len(), 169);
    }
}
