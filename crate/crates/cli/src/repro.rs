//! Figure and report bundle.

use std::fs;
use std::path::Path;

use affine_fair::adversary::{all_adversaries, Adversary, AgreementFunction, FairAdversary};
use affine_fair::affine::{
    conc_at_least, contention_simplices, differential, is_critical, r_a, r_k_of, r_t_res, verify_cs_distribution,
    verify_single_carrier, CombineForm, DifferentialReport, DistributionViolation, SingleCarrierViolation,
    VerificationReport,
};
use affine_fair::leader::{verify_mu_properties, MuViolation};
use affine_fair::procset::ProcSet;
use affine_fair::simulate::{check_all, Checks, CrashBudget, SimulationReport};
use affine_fair::subdivision::{build_chr2, chr_s};
use affine_fair::svg::{render, Layer, Panel};
use anyhow::{ensure, Context, Result};
use serde::Serialize;

use crate::{state_cap, to_json};

pub const FIGURES: [&str; 6] = [
    "fig1a_chr.svg",
    "fig1b_r1res.svg",
    "fig3c_cont2.svg",
    "fig4_critical.svg",
    "fig5_concurrency.svg",
    "fig6_ra.svg",
];

pub const REPORTS: [&str; 4] = ["affine_lemmas.json", "differential.json", "leader.json", "simulate.json"];

const HIGHLIGHT: &str = "#6baed6";
const LEVELS: [&str; 5] = ["#c6dbef", "#6baed6", "#2171b5", "#08306b", "#000000"];

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub check: String,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ReproSummary {
    pub n: usize,
    pub adversary: String,
    pub files: Vec<FileEntry>,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
}

/// The bound `α(P) ≥ α(P∖Q) ≥ α(P) − |Q|` over all `Q ⊆ P`.
#[derive(Serialize)]
pub struct SubtractionReport {
    pub checked: usize,
    pub violations: Vec<(ProcSet, ProcSet)>,
}

#[derive(Serialize)]
struct LemmaEntry {
    adversary: String,
    distribution: VerificationReport<DistributionViolation>,
    single_carrier: VerificationReport<SingleCarrierViolation>,
    subtraction: SubtractionReport,
}

#[derive(Serialize)]
struct LemmaBundle {
    n: usize,
    fair_adversaries: usize,
    passed: bool,
    entries: Vec<LemmaEntry>,
}

#[derive(Serialize)]
struct DifferentialBundle {
    n: usize,
    reports: Vec<DifferentialReport>,
}

#[derive(Serialize)]
struct LeaderEntry {
    adversary: String,
    facets: usize,
    checked: usize,
    violations: usize,
    samples: Vec<MuViolation>,
}

#[derive(Serialize)]
struct LeaderBundle {
    n: usize,
    passed: bool,
    entries: Vec<LeaderEntry>,
}

#[derive(Serialize)]
struct SimulateBundle {
    n: usize,
    state_cap: usize,
    passed: bool,
    reports: Vec<SimulationReport>,
}

fn fair(adv: Adversary) -> Result<FairAdversary> {
    Ok(FairAdversary::new(adv)?)
}

/// The superset-closed adversary generated by `{2}` and `{1,3}`.
pub fn fig6b_adversary() -> Result<FairAdversary> {
    fair(Adversary::superset_closed(3, &[ProcSet::from_ids([2]), ProcSet::from_ids([1, 3])])?)
}

/// Adversaries whose protocol runs are model checked.
pub fn fixtures(n: usize) -> Result<Vec<FairAdversary>> {
    let mut out = vec![fair(Adversary::k_of(n, 1)?)?];
    if n >= 2 {
        out.push(fair(Adversary::k_of(n, 2)?)?);
        out.push(fair(Adversary::t_resilient(n, 1)?)?);
    }
    if n == 3 {
        out.push(fig6b_adversary()?);
    }
    Ok(out)
}

pub fn subtraction(alpha: &AgreementFunction) -> SubtractionReport {
    let n = alpha.n();
    SubtractionReport {
        checked: ProcSet::full(n).subsets().map(|p| 1usize << p.len()).sum(),
        violations: alpha.subtraction_bound_witness().into_iter().collect(),
    }
}

fn lemma_bundle(n: usize) -> Result<LemmaBundle> {
    let mut entries = Vec::new();
    for adv in all_adversaries(n).filter(Adversary::is_fair) {
        let alpha = AgreementFunction::from_adversary(&adv)?;
        entries.push(LemmaEntry {
            adversary: adv.to_string(),
            distribution: verify_cs_distribution(&alpha)?,
            single_carrier: verify_single_carrier(&alpha)?,
            subtraction: subtraction(&alpha),
        });
    }
    let passed = entries
        .iter()
        .all(|e| e.distribution.passed() && e.single_carrier.passed() && e.subtraction.violations.is_empty());
    Ok(LemmaBundle { n, fair_adversaries: entries.len(), passed, entries })
}

fn differential_bundle(n: usize, chosen: &FairAdversary) -> Result<DifferentialBundle> {
    let mut reports = Vec::new();
    for k in 1..n {
        let adv = fair(Adversary::k_of(n, k)?)?;
        let reference = r_k_of(n, k)?;
        reports.push(differential(&format!("{k}-OF"), adv.alpha(), Some(&reference))?);
    }
    for t in 0..n - 1 {
        let adv = fair(Adversary::t_resilient(n, t)?)?;
        let reference = r_t_res(n, t)?;
        reports.push(differential(&format!("{t}-resilient"), adv.alpha(), Some(&reference))?);
    }
    reports.push(differential(&chosen.adversary().to_string(), chosen.alpha(), None)?);
    Ok(DifferentialBundle { n, reports })
}

fn leader_bundle(n: usize) -> Result<LeaderBundle> {
    let mut entries = Vec::new();
    for adv in all_adversaries(n).filter(|a| a.is_fair() && a.setcon() > 0) {
        let fa = fair(adv)?;
        let task = r_a(&fa, CombineForm::Union)?;
        let report = verify_mu_properties(&task, None);
        entries.push(LeaderEntry {
            adversary: fa.adversary().to_string(),
            facets: task.complex.facets().len(),
            checked: report.checked,
            violations: report.violations.len(),
            samples: report.violations.into_iter().take(3).collect(),
        });
    }
    let passed = entries.iter().all(|e| e.violations == 0);
    Ok(LeaderBundle { n, passed, entries })
}

fn simulate_bundle(n: usize, chosen: &FairAdversary) -> Result<SimulateBundle> {
    let cap = state_cap()?;
    let mut advs = fixtures(n)?;
    if advs.iter().all(|a| a.adversary().live_sets() != chosen.adversary().live_sets()) {
        advs.push(chosen.clone());
    }
    let mut reports = Vec::new();
    for fa in &advs {
        let task = r_a(fa, CombineForm::Union)?;
        reports.push(check_all(fa, &task, Checks::BOTH, CrashBudget::AlphaModel, cap)?);
    }
    let passed = reports.iter().all(SimulationReport::passed);
    Ok(SimulateBundle { n, state_cap: cap, passed, reports })
}

fn figures(n: usize, chosen: &FairAdversary) -> Result<Vec<String>> {
    let chr = chr_s(n)?;
    let chr2 = build_chr2(n)?;
    let alpha = chosen.alpha();
    let name = chosen.adversary().to_string();

    let fig1a = render(&[Panel { title: format!("Chr s, n = {n}"), base: &chr, layers: Vec::new() }]);

    let res = r_t_res(n, 1.min(n - 1))?;
    let fig1b = render(&[Panel {
        title: res.name.clone(),
        base: &chr2,
        layers: vec![Layer::new(HIGHLIGHT, res.complex.facets().iter().cloned())],
    }]);

    let cont = contention_simplices(&chr2).into_iter().filter(|t| t.dim() >= 1);
    let fig3c = render(&[Panel {
        title: "Cont₂, dimension ≥ 1".into(),
        base: &chr2,
        layers: vec![Layer::new("#fd8d3c", cont)],
    }]);

    let critical = chr.simplices().into_iter().filter(|s| is_critical(s, alpha));
    let fig4 = render(&[Panel {
        title: format!("critical simplices, {name}"),
        base: &chr,
        layers: vec![Layer::new("#e6550d", critical)],
    }]);

    let conc_levels: Vec<_> = (1..=alpha.get(ProcSet::full(n))).map(|l| (l, conc_at_least(&chr, alpha, l))).collect();
    let panels: Vec<Panel<'_, _>> = conc_levels
        .iter()
        .map(|(l, k)| Panel {
            title: format!("Conc ≥ {l}, {name}"),
            base: &chr,
            layers: vec![Layer::new(LEVELS[(l - 1).min(LEVELS.len() - 1)], k.facets().iter().cloned())],
        })
        .collect();
    let fig5 = render(&panels);

    let one_of = r_a(&fair(Adversary::k_of(n, 1)?)?, CombineForm::Union)?;
    let chosen_task = r_a(chosen, CombineForm::Union)?;
    let fig6 = render(&[
        Panel {
            title: one_of.name.clone(),
            base: &chr2,
            layers: vec![Layer::new(HIGHLIGHT, one_of.complex.facets().iter().cloned())],
        },
        Panel {
            title: chosen_task.name.clone(),
            base: &chr2,
            layers: vec![Layer::new(HIGHLIGHT, chosen_task.complex.facets().iter().cloned())],
        },
    ]);
    Ok(vec![fig1a, fig1b, fig3c, fig4, fig5, fig6])
}

/// Writes the six figures and four reports into `out`. `chosen` defaults to
/// the 2-obstruction-free adversary.
pub fn repro(n: usize, chosen: Option<&FairAdversary>, out: &Path) -> Result<ReproSummary> {
    ensure!((2..=3).contains(&n), "repro draws planar figures and needs n in 2..=3");
    let default;
    let chosen = match chosen {
        Some(fa) => {
            ensure!(fa.n() == n, "adversary is over {} processes, --n is {n}", fa.n());
            fa
        }
        None => {
            default = fair(Adversary::k_of(n, 2)?)?;
            &default
        }
    };
    ensure!(chosen.alpha().get(ProcSet::full(n)) > 0, "adversary has no live set");
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let lemmas = lemma_bundle(n)?;
    let leader = leader_bundle(n)?;
    let simulate = simulate_bundle(n, chosen)?;
    let checks = vec![
        CheckLine { check: "affine lemmas".into(), passed: lemmas.passed },
        CheckLine { check: "leader properties".into(), passed: leader.passed },
        CheckLine { check: "protocol model checking".into(), passed: simulate.passed },
    ];
    let reports = [
        to_json(&lemmas)?,
        to_json(&differential_bundle(n, chosen)?)?,
        to_json(&leader)?,
        to_json(&simulate)?,
    ];

    let mut files = Vec::new();
    let contents = figures(n, chosen)?.into_iter().zip(FIGURES).chain(reports.into_iter().zip(REPORTS));
    for (text, name) in contents {
        let path = out.join(name);
        fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        files.push(FileEntry { name: name.to_string(), bytes: text.len() });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(ReproSummary { n, adversary: chosen.adversary().to_string(), files, checks, passed })
}
