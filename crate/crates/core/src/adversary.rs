//! Adversaries, their agreement power and agreement functions.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{check_system_size, ComplexError};
use crate::procset::ProcSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("live set {set} is empty or outside a system of {n} processes")]
    BadLiveSet { set: ProcSet, n: usize },
    #[error("expected {inner} to be a subset of {outer}")]
    Nesting { inner: ProcSet, outer: ProcSet },
    #[error("invalid generator parameter: {0}")]
    Parameter(String),
    #[error("agreement function is not monotonic: alpha{smaller} = {a} > alpha{larger} = {b}")]
    NotMonotonic { smaller: ProcSet, larger: ProcSet, a: usize, b: usize },
    #[error("agreement function grows too fast from {smaller} to {larger}")]
    UnboundedGrowth { smaller: ProcSet, larger: ProcSet },
    #[error("adversary is not fair: P = {p}, Q = {q}, setcon(A|P,Q) = {lhs} but min(|Q|, alpha(P)) = {rhs}")]
    Unfair { p: ProcSet, q: ProcSet, lhs: usize, rhs: usize },
}

/// A set of process sets, stored as a bitmask indexed by subset mask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Family(u32);

impl Family {
    pub const EMPTY: Family = Family(0);

    pub fn from_bits(bits: u32) -> Self {
        Self(bits & !1)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, s: ProcSet) -> bool {
        self.0 & (1 << s.bits()) != 0
    }

    pub fn insert(&mut self, s: ProcSet) {
        if !s.is_empty() {
            self.0 |= 1 << s.bits();
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing bitmask order.
    pub fn iter(self) -> impl Iterator<Item = ProcSet> {
        (1u8..32).filter(move |m| self.0 & (1 << m) != 0).map(ProcSet::from_bits)
    }

    /// Members included in `p`.
    pub fn restrict(self, p: ProcSet) -> Self {
        let mut out = 0u32;
        for m in p.subsets() {
            out |= self.0 & (1 << m.bits());
        }
        Self(out & !1)
    }

    /// Members meeting `q`.
    pub fn meeting(self, q: ProcSet) -> Self {
        Self(self.iter().filter(|s| s.intersects(q)).fold(0, |acc, s| acc | 1 << s.bits()))
    }
}

impl FromIterator<ProcSet> for Family {
    fn from_iter<I: IntoIterator<Item = ProcSet>>(iter: I) -> Self {
        let mut f = Family::EMPTY;
        for s in iter {
            f.insert(s);
        }
        f
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sets: Vec<ProcSet> = self.iter().collect();
        sets.sort();
        f.debug_set().entries(sets).finish()
    }
}

/// How an adversary was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Explicit,
    SupersetClosed { minimal: Vec<ProcSet> },
    Symmetric { sizes: Vec<usize> },
    TResilient { t: usize },
    KOf { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adversary {
    n: usize,
    live_sets: Family,
    provenance: Provenance,
}

impl Adversary {
    pub fn explicit<I: IntoIterator<Item = ProcSet>>(n: usize, sets: I) -> Result<Self, AdversaryError> {
        check_system_size(n)?;
        let full = ProcSet::full(n);
        let mut live_sets = Family::EMPTY;
        for s in sets {
            if s.is_empty() || !s.is_subset(full) {
                return Err(AdversaryError::BadLiveSet { set: s, n });
            }
            live_sets.insert(s);
        }
        Ok(Self { n, live_sets, provenance: Provenance::Explicit })
    }

    pub fn from_family(n: usize, live_sets: Family) -> Result<Self, AdversaryError> {
        Self::explicit(n, live_sets.iter())
    }

    /// Every superset of a listed set is live.
    pub fn superset_closed(n: usize, minimal: &[ProcSet]) -> Result<Self, AdversaryError> {
        let base = Self::explicit(n, minimal.iter().copied())?;
        let full = ProcSet::full(n);
        let live = full
            .nonempty_subsets()
            .filter(|s| minimal.iter().any(|m| m.is_subset(*s)))
            .collect();
        let mut minimal: Vec<ProcSet> = base.live_sets.iter().collect();
        minimal.sort();
        Ok(Self { n, live_sets: live, provenance: Provenance::SupersetClosed { minimal } })
    }

    /// Every set whose size is listed is live.
    pub fn symmetric(n: usize, sizes: &[usize]) -> Result<Self, AdversaryError> {
        check_system_size(n)?;
        if let Some(bad) = sizes.iter().find(|&&k| k == 0 || k > n) {
            return Err(AdversaryError::Parameter(format!("size {bad} outside 1..={n}")));
        }
        let mut sizes = sizes.to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        let live = ProcSet::full(n).nonempty_subsets().filter(|s| sizes.contains(&s.len())).collect();
        Ok(Self { n, live_sets: live, provenance: Provenance::Symmetric { sizes } })
    }

    /// All sets of at least `n - t` processes.
    pub fn t_resilient(n: usize, t: usize) -> Result<Self, AdversaryError> {
        check_system_size(n)?;
        if t >= n {
            return Err(AdversaryError::Parameter(format!("t = {t} must be below n = {n}")));
        }
        let mut adv = Self::symmetric(n, &((n - t)..=n).collect::<Vec<_>>())?;
        adv.provenance = Provenance::TResilient { t };
        Ok(adv)
    }

    /// All nonempty sets of at most `k` processes.
    pub fn k_of(n: usize, k: usize) -> Result<Self, AdversaryError> {
        check_system_size(n)?;
        if k < 1 || k > n {
            return Err(AdversaryError::Parameter(format!("k = {k} outside 1..={n}")));
        }
        let mut adv = Self::symmetric(n, &(1..=k).collect::<Vec<_>>())?;
        adv.provenance = Provenance::KOf { k };
        Ok(adv)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn live_sets(&self) -> Family {
        self.live_sets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn sorted_live_sets(&self) -> Vec<ProcSet> {
        let mut v: Vec<ProcSet> = self.live_sets.iter().collect();
        v.sort();
        v
    }

    /// `A|_P`.
    pub fn restrict(&self, p: ProcSet) -> Self {
        Self { n: self.n, live_sets: self.live_sets.restrict(p), provenance: Provenance::Explicit }
    }

    /// `A|_{P,Q}`: live sets included in `P` that meet `Q`.
    pub fn restrict2(&self, p: ProcSet, q: ProcSet) -> Result<Self, AdversaryError> {
        let full = ProcSet::full(self.n);
        if !p.is_subset(full) {
            return Err(AdversaryError::Nesting { inner: p, outer: full });
        }
        if !q.is_subset(p) {
            return Err(AdversaryError::Nesting { inner: q, outer: p });
        }
        Ok(Self {
            n: self.n,
            live_sets: self.live_sets.restrict(p).meeting(q),
            provenance: Provenance::Explicit,
        })
    }

    pub fn setcon(&self) -> usize {
        SetconCache::default().setcon(self.live_sets)
    }

    pub fn csize(&self) -> usize {
        let sets: Vec<ProcSet> = self.live_sets.iter().collect();
        min_hitting_set(&sets).map_or(0, ProcSet::len)
    }

    pub fn is_superset_closed(&self) -> bool {
        let full = ProcSet::full(self.n);
        self.live_sets.iter().all(|s| {
            full.difference(s).iter().all(|c| self.live_sets.contains(s.with(c)))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let full = ProcSet::full(self.n);
        let mut by_size = [None::<bool>; 6];
        for s in full.nonempty_subsets() {
            let live = self.live_sets.contains(s);
            match by_size[s.len()] {
                None => by_size[s.len()] = Some(live),
                Some(prev) if prev != live => return false,
                Some(_) => {}
            }
        }
        true
    }

    /// Number of distinct live-set sizes, defined for symmetric adversaries.
    pub fn symmetric_setcon_shortcut(&self) -> Option<usize> {
        if !self.is_symmetric() {
            return None;
        }
        let mut sizes: Vec<usize> = self.live_sets.iter().map(ProcSet::len).collect();
        sizes.sort_unstable();
        sizes.dedup();
        Some(sizes.len())
    }

    /// First `(P, Q, setcon(A|_{P,Q}), min(|Q|, setcon(A|_P)))` violating fairness.
    pub fn fairness_witness(&self) -> Option<(ProcSet, ProcSet, usize, usize)> {
        let mut cache = SetconCache::default();
        for p in ProcSet::full(self.n).subsets() {
            let within = self.live_sets.restrict(p);
            let alpha = cache.setcon(within);
            for q in p.subsets() {
                let lhs = cache.setcon(within.meeting(q));
                let rhs = q.len().min(alpha);
                if lhs != rhs {
                    return Some((p, q, lhs, rhs));
                }
            }
        }
        None
    }

    pub fn is_fair(&self) -> bool {
        self.fairness_witness().is_none()
    }

    pub fn to_spec(&self) -> AdversarySpec {
        let mut spec = AdversarySpec {
            n: self.n,
            kind: AdversaryKind::Explicit,
            live_sets: None,
            sizes: None,
            t: None,
            k: None,
        };
        match &self.provenance {
            Provenance::Explicit => spec.live_sets = Some(self.sorted_live_sets()),
            Provenance::SupersetClosed { minimal } => {
                spec.kind = AdversaryKind::SupersetClosed;
                spec.live_sets = Some(minimal.clone());
            }
            Provenance::Symmetric { sizes } => {
                spec.kind = AdversaryKind::Symmetric;
                spec.sizes = Some(sizes.clone());
            }
            Provenance::TResilient { t } => {
                spec.kind = AdversaryKind::TResilient;
                spec.t = Some(*t);
            }
            Provenance::KOf { k } => {
                spec.kind = AdversaryKind::KOf;
                spec.k = Some(*k);
            }
        }
        spec
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.sorted_live_sets().iter().map(ToString::to_string).collect();
        write!(f, "[{}]", sets.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Explicit,
    SupersetClosed,
    Symmetric,
    TResilient,
    KOf,
}

/// On-disk description of an adversary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub n: usize,
    pub kind: AdversaryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub live_sets: Option<Vec<ProcSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl AdversarySpec {
    pub fn build(&self) -> Result<Adversary, AdversaryError> {
        let missing = |field: &str| AdversaryError::Parameter(format!("missing field `{field}`"));
        match self.kind {
            AdversaryKind::Explicit => {
                Adversary::explicit(self.n, self.live_sets.clone().ok_or_else(|| missing("live_sets"))?)
            }
            AdversaryKind::SupersetClosed => Adversary::superset_closed(
                self.n,
                self.live_sets.as_deref().ok_or_else(|| missing("live_sets"))?,
            ),
            AdversaryKind::Symmetric => {
                Adversary::symmetric(self.n, self.sizes.as_deref().ok_or_else(|| missing("sizes"))?)
            }
            AdversaryKind::TResilient => Adversary::t_resilient(self.n, self.t.ok_or_else(|| missing("t"))?),
            AdversaryKind::KOf => Adversary::k_of(self.n, self.k.ok_or_else(|| missing("k"))?),
        }
    }
}

/// Memo table for the agreement-power recursion, keyed by live-set family.
#[derive(Default, Debug)]
pub struct SetconCache {
    memo: HashMap<u32, u8>,
}

impl SetconCache {
    pub fn setcon(&mut self, family: Family) -> usize {
        if family.is_empty() {
            return 0;
        }
        if let Some(&v) = self.memo.get(&family.bits()) {
            return v as usize;
        }
        let mut best = 0;
        for s in family.iter() {
            let worst = s
                .iter()
                .map(|a| self.setcon(family.restrict(s.without(a))) + 1)
                .min()
                .expect("live sets are nonempty");
            best = best.max(worst);
        }
        self.memo.insert(family.bits(), best as u8);
        best
    }
}

/// Smallest set meeting every listed set, `None` if some listed set is empty.
pub fn min_hitting_set(sets: &[ProcSet]) -> Option<ProcSet> {
    fn search(sets: &[ProcSet], chosen: ProcSet, best: &mut Option<ProcSet>) {
        if best.is_some_and(|b| chosen.len() >= b.len()) {
            return;
        }
        match sets.iter().find(|s| !s.intersects(chosen)) {
            None => *best = Some(chosen),
            Some(unhit) => {
                for c in unhit.iter() {
                    search(sets, chosen.with(c), best);
                }
            }
        }
    }
    if sets.iter().any(|s| s.is_empty()) {
        return None;
    }
    let mut best = None;
    search(sets, ProcSet::EMPTY, &mut best);
    best
}

/// Values of `α` on every subset of `Π`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementFunction {
    n: usize,
    values: Vec<u8>,
}

impl AgreementFunction {
    /// `α(P) = setcon(A|_P)`, validated for monotonicity and bounded growth.
    pub fn from_adversary(adv: &Adversary) -> Result<Self, AdversaryError> {
        let mut cache = SetconCache::default();
        let values = ProcSet::full(adv.n)
            .subsets()
            .map(|p| cache.setcon(adv.live_sets.restrict(p)) as u8)
            .collect();
        let alpha = Self { n: adv.n, values };
        alpha.validate()?;
        Ok(alpha)
    }

    /// Builds an arbitrary function, validating it like a derived one.
    pub fn from_fn<F: Fn(ProcSet) -> usize>(n: usize, f: F) -> Result<Self, AdversaryError> {
        check_system_size(n)?;
        let values = ProcSet::full(n).subsets().map(|p| f(p) as u8).collect();
        let alpha = Self { n, values };
        alpha.validate()?;
        Ok(alpha)
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        for p in ProcSet::full(self.n).subsets() {
            for c in ProcSet::full(self.n).difference(p).iter() {
                let larger = p.with(c);
                let (a, b) = (self.get(p), self.get(larger));
                if a > b {
                    return Err(AdversaryError::NotMonotonic { smaller: p, larger, a, b });
                }
                if b > a + 1 {
                    return Err(AdversaryError::UnboundedGrowth { smaller: p, larger });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: ProcSet) -> usize {
        self.values[p.bits() as usize] as usize
    }

    /// `(set, α(set))` for every subset, in canonical set order.
    pub fn table(&self) -> Vec<(ProcSet, usize)> {
        let mut rows: Vec<(ProcSet, usize)> =
            ProcSet::full(self.n).subsets().map(|p| (p, self.get(p))).collect();
        rows.sort();
        rows
    }

    /// First `(P, Q)` with `Q ⊆ P` breaking `α(P) ≥ α(P∖Q) ≥ α(P) − |Q|`.
    pub fn subtraction_bound_witness(&self) -> Option<(ProcSet, ProcSet)> {
        for p in ProcSet::full(self.n).subsets() {
            for q in p.subsets() {
                let (whole, rest) = (self.get(p), self.get(p.difference(q)));
                if whole < rest || rest + q.len() < whole {
                    return Some((p, q));
                }
            }
        }
        None
    }
}

/// A fair adversary together with its agreement function.
#[derive(Clone, Debug)]
pub struct FairAdversary {
    adversary: Adversary,
    alpha: AgreementFunction,
}

impl FairAdversary {
    pub fn new(adversary: Adversary) -> Result<Self, AdversaryError> {
        if let Some((p, q, lhs, rhs)) = adversary.fairness_witness() {
            return Err(AdversaryError::Unfair { p, q, lhs, rhs });
        }
        let alpha = AgreementFunction::from_adversary(&adversary)?;
        Ok(Self { adversary, alpha })
    }

    pub fn adversary(&self) -> &Adversary {
        &self.adversary
    }

    pub fn alpha(&self) -> &AgreementFunction {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.adversary.n
    }
}

/// Every adversary over `n` processes, including the empty one.
pub fn all_adversaries(n: usize) -> impl Iterator<Item = Adversary> {
    let subsets = (1u32 << n) - 1;
    (0u64..(1u64 << subsets)).map(move |code| {
        let live = (1..=subsets)
            .filter(|m| code & (1 << (m - 1)) != 0)
            .map(|m| ProcSet::from_bits(m as u8));
        Adversary::explicit(n, live).expect("subsets of the full set")
    })
}
