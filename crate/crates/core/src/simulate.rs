//! Exhaustive model checking of the two-snapshot protocol that solves `R_A`
//! in the α-model, and composition of iterated task runs.
//!
//! Modeling choices:
//! * immediate snapshot objects commit blocks chosen by the scheduler;
//! * the return of a snapshot and the write of its result to the shared
//!   register are separate steps, so a process may crash in between;
//! * the wait guard reads all registers in one atomic scan and the guard
//!   step is enabled only when the guard holds;
//! * the read for the concurrency update and the write of `Conc[i]` are
//!   separate steps;
//! * participation is fixed up front and at most `α(P) - 1` participants
//!   crash, each after taking at least one step.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{AdversaryError, AdversarySpec, AgreementFunction, FairAdversary};
use crate::affine::AffineTask;
use crate::complex::{ChromaticVertex, ComplexError, Simplex};
use crate::procset::{Color, ProcSet, MAX_PROCESSES};
use crate::subdivision::{Chr2Simplex, Chr2Vertex, ChrVertex, SubVertex};

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("event {0:?} is not enabled")]
    NotEnabled(Event),
    #[error("state budget of {0} exceeded")]
    StateCap(usize),
    #[error("participation {0} has agreement power 0")]
    Participation(ProcSet),
    #[error("combinatorial budget of {0} runs exceeded")]
    RunCap(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsObject {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Step { process: Color },
    CommitBlock { object: IsObject, block: ProcSet },
    Crash { process: Color },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pc {
    Idle,
    FirstPending,
    FirstReturned,
    Waiting,
    SecondPending,
    SecondReturned,
    AfterSecond,
    WriteConc,
    Done,
    Crashed,
}

/// Contents of the shared registers as seen by an atomic scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Registers {
    pub is1: [ProcSet; MAX_PROCESSES],
    /// Processes whose second snapshot is visible in `IS2[j]`, empty if unwritten.
    pub is2: [ProcSet; MAX_PROCESSES],
    pub conc: [usize; MAX_PROCESSES],
}

/// `crit ∨ rank < conc` for process `i`.
pub fn wait_guard(alpha: &AgreementFunction, regs: &Registers, i: Color) -> bool {
    let own = regs.is1[i.index()];
    let n = alpha.n();
    let same: ProcSet = (0..n).filter(|&j| regs.is1[j] == own).map(Color::from_index).collect();
    let crit = alpha.get(own) > alpha.get(own.difference(same));
    let rank = own
        .iter()
        .filter(|j| regs.is2[j.index()].is_empty() && regs.is1[j.index()] != own)
        .count();
    let conc = regs.conc[..n].iter().copied().fold(alpha.get(own), usize::max);
    crit || rank < conc
}

/// Whether process `i` publishes its concurrency level after its second snapshot.
pub fn publishes_conc(alpha: &AgreementFunction, regs: &Registers, i: Color) -> bool {
    let own = regs.is1[i.index()];
    let finished: ProcSet = (0..alpha.n())
        .filter(|&j| regs.is1[j] == own && !regs.is2[j].is_empty())
        .map(Color::from_index)
        .collect();
    alpha.get(own) > alpha.get(own.difference(finished))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pc: [Pc; MAX_PROCESSES],
    out1: [ProcSet; MAX_PROCESSES],
    out2: [ProcSet; MAX_PROCESSES],
    is1_written: ProcSet,
    is2_written: ProcSet,
    conc_written: ProcSet,
    first: ProcSet,
    second: ProcSet,
    crashes: u8,
}

impl State {
    pub fn pc(&self, c: Color) -> Pc {
        self.pc[c.index()]
    }

    pub fn done(&self) -> ProcSet {
        self.with_pc(|pc| pc == Pc::Done)
    }

    pub fn crashed(&self) -> ProcSet {
        self.with_pc(|pc| pc == Pc::Crashed)
    }

    fn with_pc(&self, f: impl Fn(Pc) -> bool) -> ProcSet {
        (0..MAX_PROCESSES).filter(|&i| f(self.pc[i])).map(Color::from_index).collect()
    }

    pub fn crash_count(&self) -> usize {
        self.crashes as usize
    }

    pub fn registers(&self, alpha: &AgreementFunction) -> Registers {
        let mut regs = Registers::default();
        for c in self.is1_written.iter() {
            regs.is1[c.index()] = self.out1[c.index()];
        }
        for c in self.is2_written.iter() {
            regs.is2[c.index()] = self.out2[c.index()];
        }
        for c in self.conc_written.iter() {
            regs.conc[c.index()] = alpha.get(self.out1[c.index()]);
        }
        regs
    }

    /// The `Chr²` vertex returned by a process that finished its second snapshot.
    pub fn output_vertex(&self, c: Color) -> Option<Chr2Vertex> {
        let out2 = self.out2[c.index()];
        if out2.is_empty() {
            return None;
        }
        let chr = |j: Color| {
            let view = Simplex::new(self.out1[j.index()].iter()).expect("nonempty view");
            ChrVertex::new(j, view).expect("self-inclusion")
        };
        let view = Simplex::new(out2.iter().map(chr)).expect("distinct colors");
        Some(SubVertex::new(chr(c), view).expect("self-inclusion"))
    }

    /// Outputs of processes that returned, as a simplex (`None` if nobody did).
    pub fn outputs(&self) -> Option<Chr2Simplex> {
        let vs: Vec<Chr2Vertex> = self.done().iter().filter_map(|c| self.output_vertex(c)).collect();
        (!vs.is_empty()).then(|| Simplex::new(vs).expect("distinct colors"))
    }
}

/// The protocol for one participating set and crash budget.
#[derive(Clone, Debug)]
pub struct Model<'a> {
    alpha: &'a AgreementFunction,
    participation: ProcSet,
    crash_budget: usize,
}

impl<'a> Model<'a> {
    /// The α-model: `α(P) ≥ 1` and at most `α(P) - 1` crashes.
    pub fn alpha_model(alpha: &'a AgreementFunction, participation: ProcSet) -> Result<Self, SimError> {
        let power = alpha.get(participation);
        if power == 0 {
            return Err(SimError::Participation(participation));
        }
        Ok(Self { alpha, participation, crash_budget: power - 1 })
    }

    /// Arbitrary crash budget, for negative controls.
    pub fn with_budget(alpha: &'a AgreementFunction, participation: ProcSet, crash_budget: usize) -> Self {
        Self { alpha, participation, crash_budget }
    }

    pub fn participation(&self) -> ProcSet {
        self.participation
    }

    pub fn crash_budget(&self) -> usize {
        self.crash_budget
    }

    pub fn initial(&self) -> State {
        State {
            pc: [Pc::Idle; MAX_PROCESSES],
            out1: [ProcSet::EMPTY; MAX_PROCESSES],
            out2: [ProcSet::EMPTY; MAX_PROCESSES],
            is1_written: ProcSet::EMPTY,
            is2_written: ProcSet::EMPTY,
            conc_written: ProcSet::EMPTY,
            first: ProcSet::EMPTY,
            second: ProcSet::EMPTY,
            crashes: 0,
        }
    }

    fn pending(&self, s: &State, object: IsObject) -> ProcSet {
        let want = match object {
            IsObject::First => Pc::FirstPending,
            IsObject::Second => Pc::SecondPending,
        };
        self.participation.iter().filter(|c| s.pc(*c) == want).collect()
    }

    fn step_enabled(&self, s: &State, c: Color) -> bool {
        match s.pc(c) {
            Pc::Idle | Pc::FirstReturned | Pc::SecondReturned | Pc::AfterSecond | Pc::WriteConc => true,
            Pc::Waiting => wait_guard(self.alpha, &s.registers(self.alpha), c),
            Pc::FirstPending | Pc::SecondPending | Pc::Done | Pc::Crashed => false,
        }
    }

    fn crash_enabled(&self, s: &State, c: Color) -> bool {
        s.crash_count() < self.crash_budget && !matches!(s.pc(c), Pc::Idle | Pc::Done | Pc::Crashed)
    }

    /// Enabled events other than crashes.
    pub fn progress_events(&self, s: &State) -> Vec<Event> {
        let mut out: Vec<Event> = self
            .participation
            .iter()
            .filter(|c| self.step_enabled(s, *c))
            .map(|process| Event::Step { process })
            .collect();
        for object in [IsObject::First, IsObject::Second] {
            for block in self.pending(s, object).nonempty_subsets() {
                out.push(Event::CommitBlock { object, block });
            }
        }
        out
    }

    pub fn enabled(&self, s: &State) -> Vec<Event> {
        let mut out = self.progress_events(s);
        out.extend(
            self.participation
                .iter()
                .filter(|c| self.crash_enabled(s, *c))
                .map(|process| Event::Crash { process }),
        );
        out
    }

    pub fn is_enabled(&self, s: &State, e: &Event) -> bool {
        match e {
            Event::Step { process } => self.participation.contains(*process) && self.step_enabled(s, *process),
            Event::CommitBlock { object, block } => {
                !block.is_empty() && block.is_subset(self.pending(s, *object))
            }
            Event::Crash { process } => self.participation.contains(*process) && self.crash_enabled(s, *process),
        }
    }

    pub fn apply(&self, s: &State, e: &Event) -> Result<State, SimError> {
        if !self.is_enabled(s, e) {
            return Err(SimError::NotEnabled(e.clone()));
        }
        let mut t = *s;
        match *e {
            Event::Step { process: c } => {
                let i = c.index();
                t.pc[i] = match s.pc[i] {
                    Pc::Idle => Pc::FirstPending,
                    Pc::FirstReturned => {
                        t.is1_written.insert(c);
                        Pc::Waiting
                    }
                    Pc::Waiting => Pc::SecondPending,
                    Pc::SecondReturned => {
                        t.is2_written.insert(c);
                        Pc::AfterSecond
                    }
                    Pc::AfterSecond => {
                        if publishes_conc(self.alpha, &s.registers(self.alpha), c) {
                            Pc::WriteConc
                        } else {
                            Pc::Done
                        }
                    }
                    Pc::WriteConc => {
                        t.conc_written.insert(c);
                        Pc::Done
                    }
                    other => unreachable!("step from {other:?} is never enabled"),
                };
            }
            Event::CommitBlock { object: IsObject::First, block } => {
                t.first = s.first.union(block);
                for c in block.iter() {
                    t.out1[c.index()] = t.first;
                    t.pc[c.index()] = Pc::FirstReturned;
                }
            }
            Event::CommitBlock { object: IsObject::Second, block } => {
                t.second = s.second.union(block);
                for c in block.iter() {
                    t.out2[c.index()] = t.second;
                    t.pc[c.index()] = Pc::SecondReturned;
                }
            }
            Event::Crash { process } => {
                t.pc[process.index()] = Pc::Crashed;
                t.crashes += 1;
            }
        }
        Ok(t)
    }

    /// No progress event is enabled; only crashes, if anything, remain.
    pub fn is_stable(&self, s: &State) -> bool {
        self.progress_events(s).is_empty()
    }
}

/// Reachable state graph stored as a BFS tree with parent pointers.
pub struct Exploration {
    states: Vec<State>,
    parents: Vec<Option<(u32, Event)>>,
    edges: usize,
}

impl Exploration {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, &State)> {
        self.states.iter().enumerate()
    }

    /// Events leading from the initial state to state `idx`.
    pub fn trace(&self, mut idx: usize) -> Vec<Event> {
        let mut events = Vec::new();
        while let Some((parent, e)) = &self.parents[idx] {
            events.push(e.clone());
            idx = *parent as usize;
        }
        events.reverse();
        events
    }
}

pub fn explore(model: &Model<'_>, cap: usize) -> Result<Exploration, SimError> {
    explore_with(model, cap, |_, _, _| {})
}

/// Breadth-first exploration calling `hook(from, event, to)` on every edge.
pub fn explore_with<F: FnMut(&State, &Event, &State)>(
    model: &Model<'_>,
    cap: usize,
    mut hook: F,
) -> Result<Exploration, SimError> {
    let init = model.initial();
    let mut index: HashMap<State, u32> = HashMap::from([(init, 0)]);
    let mut ex = Exploration { states: vec![init], parents: vec![None], edges: 0 };
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let s = ex.states[idx];
        for e in model.enabled(&s) {
            let t = model.apply(&s, &e)?;
            hook(&s, &e, &t);
            ex.edges += 1;
            if index.contains_key(&t) {
                continue;
            }
            if ex.states.len() >= cap {
                return Err(SimError::StateCap(cap));
            }
            let id = ex.states.len();
            index.insert(t, id as u32);
            ex.states.push(t);
            ex.parents.push(Some((idx as u32, e)));
            queue.push_back(id);
        }
    }
    Ok(ex)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Outputs do not form a simplex of `Chr² s`.
    NotInChr2,
    /// Outputs form a simplex of `Chr² s` outside the target task.
    NotInTask,
    /// A correct process is stuck forever.
    Stuck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub trace: Vec<Event>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub safety: bool,
    pub liveness: bool,
}

impl Checks {
    pub const BOTH: Checks = Checks { safety: true, liveness: true };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipationReport {
    pub participation: ProcSet,
    pub alpha: usize,
    pub crash_budget: usize,
    pub states: usize,
    pub edges: usize,
    pub stable_states: usize,
    pub safety_violations: usize,
    pub liveness_violations: usize,
    /// At most a few violations of each kind are kept with their traces.
    pub samples: Vec<Violation>,
    /// A run reaching a stable state in which every correct process returned.
    #[serde(skip)]
    pub example: Vec<Event>,
}

const SAMPLES_PER_KIND: usize = 3;

/// Model checks one participating set against a target task.
pub fn check_participation(
    model: &Model<'_>,
    target: &AffineTask,
    checks: Checks,
    cap: usize,
) -> Result<ParticipationReport, SimError> {
    let ex = explore(model, cap)?;
    let mut report = ParticipationReport {
        participation: model.participation,
        alpha: model.alpha.get(model.participation),
        crash_budget: model.crash_budget,
        states: ex.len(),
        edges: ex.edges(),
        stable_states: 0,
        safety_violations: 0,
        liveness_violations: 0,
        samples: Vec::new(),
        example: Vec::new(),
    };
    let mut chr2 = None;
    let mut verdicts: HashMap<Chr2Simplex, Option<ViolationKind>> = HashMap::new();
    let mut example_depth = None;
    for (idx, s) in ex.states() {
        if !model.is_stable(s) {
            continue;
        }
        report.stable_states += 1;
        if checks.safety {
            if let Some(out) = s.outputs() {
                let verdict = *verdicts.entry(out.clone()).or_insert_with(|| {
                    if target.complex.contains(&out) {
                        None
                    } else {
                        let chr2 = chr2.get_or_insert_with(|| {
                            crate::subdivision::build_chr2(target.n()).expect("valid size")
                        });
                        Some(if chr2.contains(&out) { ViolationKind::NotInTask } else { ViolationKind::NotInChr2 })
                    }
                });
                if let Some(kind) = verdict {
                    report.safety_violations += 1;
                    if report.samples.iter().filter(|v| v.kind != ViolationKind::Stuck).count() < SAMPLES_PER_KIND {
                        report.samples.push(Violation {
                            kind,
                            detail: format!("outputs {out} not in {}", target.name),
                            trace: ex.trace(idx),
                        });
                    }
                }
            }
        }
        let stuck = model.participation.difference(s.done()).difference(s.crashed());
        if checks.liveness && !stuck.is_empty() {
            report.liveness_violations += 1;
            if report.samples.iter().filter(|v| v.kind == ViolationKind::Stuck).count() < SAMPLES_PER_KIND {
                report.samples.push(Violation {
                    kind: ViolationKind::Stuck,
                    detail: format!("processes {stuck} wait forever"),
                    trace: ex.trace(idx),
                });
            }
        }
        if stuck.is_empty() {
            let depth = ex.trace(idx).len();
            if example_depth.is_none_or(|d| depth > d) {
                example_depth = Some(depth);
                report.example = ex.trace(idx);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: usize,
    pub adversary: String,
    pub target: String,
    pub checks: Checks,
    pub total_states: usize,
    pub safety_violations: usize,
    pub liveness_violations: usize,
    pub participations: Vec<ParticipationReport>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.safety_violations == 0 && self.liveness_violations == 0
    }
}

/// How many crashes each participating set tolerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrashBudget {
    /// `α(P) - 1`.
    AlphaModel,
    /// `α(P) - 1 + extra`, outside the model.
    Exceed(usize),
}

/// Explores every participating set with `α(P) ≥ 1`, in parallel.
pub fn check_all(
    adv: &FairAdversary,
    target: &AffineTask,
    checks: Checks,
    budget: CrashBudget,
    cap: usize,
) -> Result<SimulationReport, SimError> {
    let alpha = adv.alpha();
    let participations: Vec<ProcSet> =
        ProcSet::full(adv.n()).nonempty_subsets().filter(|p| alpha.get(*p) >= 1).collect();
    let mut reports = participations
        .par_iter()
        .map(|&p| {
            let base = alpha.get(p) - 1;
            let model = match budget {
                CrashBudget::AlphaModel => Model::alpha_model(alpha, p)?,
                CrashBudget::Exceed(extra) => Model::with_budget(alpha, p, base + extra),
            };
            check_participation(&model, target, checks, cap)
        })
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by_key(|r| r.participation);
    Ok(SimulationReport {
        n: adv.n(),
        adversary: adv.adversary().to_string(),
        target: target.name.clone(),
        checks,
        total_states: reports.iter().map(|r| r.states).sum(),
        safety_violations: reports.iter().map(|r| r.safety_violations).sum(),
        liveness_violations: reports.iter().map(|r| r.liveness_violations).sum(),
        participations: reports,
    })
}

/// A replayable schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub adversary: AdversarySpec,
    pub participation: ProcSet,
    pub crash_budget: usize,
    pub events: Vec<Event>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub steps: usize,
    pub done: ProcSet,
    pub crashed: ProcSet,
    pub stable: bool,
    pub outputs: Vec<String>,
}

pub fn replay(trace: &TraceFile) -> Result<ReplayOutcome, SimError> {
    let adv = FairAdversary::new(trace.adversary.build()?)?;
    let model = Model::with_budget(adv.alpha(), trace.participation, trace.crash_budget);
    let mut s = model.initial();
    for e in &trace.events {
        s = model.apply(&s, e)?;
    }
    Ok(ReplayOutcome {
        steps: trace.events.len(),
        done: s.done(),
        crashed: s.crashed(),
        stable: model.is_stable(&s),
        outputs: s.outputs().map(|o| o.uids()).unwrap_or_default(),
    })
}

/// A vertex of an iterated subdivision of arbitrary depth.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NestedVertex {
    pub color: Color,
    pub view: Vec<NestedVertex>,
}

impl NestedVertex {
    pub fn corner(color: Color) -> Self {
        Self { color, view: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.view.iter().map(|v| v.depth() + 1).max().unwrap_or(0)
    }
}

/// Re-bases a vertex of `Chr² s` onto the simplex produced by the previous iteration.
fn lift_chr2(v: &Chr2Vertex, input: &[NestedVertex]) -> NestedVertex {
    let lift_chr = |u: &ChrVertex| NestedVertex {
        color: u.color(),
        view: u.view().vertices().iter().map(|c| input[c.index()].clone()).collect(),
    };
    NestedVertex { color: v.color(), view: v.view().vertices().iter().map(lift_chr).collect() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedRun {
    pub facets: Vec<Chr2Simplex>,
    pub outputs: Vec<NestedVertex>,
}

/// All `m`-iteration runs of a task in which every process participates in
/// every iteration, each iteration fed the outputs of the previous one.
pub fn compose_runs(task: &AffineTask, m: usize, cap: usize) -> Result<Vec<ComposedRun>, SimError> {
    let facets = task.complex.facets();
    let total = (facets.len() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(SimError::RunCap(cap));
    }
    let n = task.n();
    let mut runs = vec![ComposedRun {
        facets: Vec::new(),
        outputs: (0..n).map(|i| NestedVertex::corner(Color::from_index(i))).collect(),
    }];
    for _ in 0..m {
        let mut next = Vec::with_capacity(runs.len() * facets.len());
        for run in &runs {
            for f in facets {
                let outputs = f.vertices().iter().map(|v| lift_chr2(v, &run.outputs)).collect();
                let mut chosen = run.facets.clone();
                chosen.push(f.clone());
                next.push(ComposedRun { facets: chosen, outputs });
            }
        }
        runs = next;
    }
    Ok(runs)
}

/// Number of distinct final output simplices among composed runs.
pub fn distinct_outputs(runs: &[ComposedRun]) -> usize {
    runs.iter().map(|r| r.outputs.clone()).collect::<BTreeSet<_>>().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::Adversary;
    use crate::affine::{r_a, CombineForm};

    fn fair(adv: Adversary) -> FairAdversary {
        FairAdversary::new(adv).unwrap()
    }

    #[test]
    fn single_process_has_one_run() {
        let adv = fair(Adversary::k_of(1, 1).unwrap());
        let model = Model::alpha_model(adv.alpha(), ProcSet::full(1)).unwrap();
        let ex = explore(&model, 1000).unwrap();
        let terminals: Vec<usize> =
            ex.states().filter(|(_, s)| model.enabled(s).is_empty()).map(|(i, _)| i).collect();
        assert_eq!(terminals.len(), 1);
        let s = ex.states[terminals[0]];
        assert_eq!(s.done(), ProcSet::full(1));
        assert_eq!(s.outputs().unwrap().uids(), vec!["1:[1:[1]]"]);
    }

    #[test]
    fn disabled_event_is_rejected() {
        let adv = fair(Adversary::k_of(2, 1).unwrap());
        let model = Model::alpha_model(adv.alpha(), ProcSet::full(2)).unwrap();
        let e = Event::CommitBlock { object: IsObject::First, block: ProcSet::full(2) };
        assert_eq!(model.apply(&model.initial(), &e), Err(SimError::NotEnabled(e)));
        let crash = Event::Crash { process: Color::new(1) };
        assert!(!model.is_enabled(&model.initial(), &crash));
    }

    #[test]
    fn synchronous_schedule_yields_synchronous_facet() {
        let adv = fair(Adversary::k_of(3, 2).unwrap());
        let model = Model::alpha_model(adv.alpha(), ProcSet::full(3)).unwrap();
        let all = ProcSet::full(3);
        let mut s = model.initial();
        let run = |s: &mut State, e: Event| *s = model.apply(s, &e).unwrap();
        for c in all.iter() {
            run(&mut s, Event::Step { process: c });
        }
        run(&mut s, Event::CommitBlock { object: IsObject::First, block: all });
        for c in all.iter() {
            run(&mut s, Event::Step { process: c });
        }
        for c in all.iter() {
            run(&mut s, Event::Step { process: c });
        }
        run(&mut s, Event::CommitBlock { object: IsObject::Second, block: all });
        while let Some(e) = model.progress_events(&s).into_iter().next() {
            run(&mut s, e);
        }
        assert_eq!(s.done(), all);
        let out = s.outputs().unwrap();
        assert!(out.vertices().iter().all(|v| v.view1() == all && v.view2() == all));
    }

    #[test]
    fn one_of_two_processes_is_safe_and_live() {
        let adv = fair(Adversary::k_of(2, 1).unwrap());
        let task = r_a(&adv, CombineForm::Union).unwrap();
        let report = check_all(&adv, &task, Checks::BOTH, CrashBudget::AlphaModel, 100_000).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn state_cap_is_enforced() {
        let adv = fair(Adversary::k_of(2, 1).unwrap());
        let model = Model::alpha_model(adv.alpha(), ProcSet::full(2)).unwrap();
        assert_eq!(explore(&model, 3).err(), Some(SimError::StateCap(3)));
    }

    #[test]
    fn composition_of_one_iteration_is_the_task() {
        let adv = fair(Adversary::k_of(2, 1).unwrap());
        let task = r_a(&adv, CombineForm::Union).unwrap();
        let runs = compose_runs(&task, 1, 1000).unwrap();
        assert_eq!(runs.len(), task.complex.facets().len());
        assert!(compose_runs(&task, 30, 1000).is_err());
    }
}
