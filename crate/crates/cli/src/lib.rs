//! Command-line front end for the `affine-fair` library.

use std::fs;
use std::path::{Path, PathBuf};

use affine_fair::adversary::{all_adversaries, Adversary, AdversarySpec, AgreementFunction, FairAdversary};
use affine_fair::affine::{r_a, verify_cs_distribution, verify_single_carrier, CombineForm};
use affine_fair::complex::ChromaticComplex;
use affine_fair::export::{from_document, to_document, to_off, ComplexDocument};
use affine_fair::leader::verify_mu_properties;
use affine_fair::procset::ProcSet;
use affine_fair::simulate::{check_all, replay, Checks, CrashBudget, TraceFile, DEFAULT_STATE_CAP};
use affine_fair::subdivision::{build_chr2, chr_s, Chr2Vertex, ChrVertex};
use affine_fair::svg::{render, Layer, Panel};
use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod repro;

#[derive(Parser, Debug)]
#[command(name = "affine-fair", version, about = "Chromatic subdivisions, affine tasks of fair adversaries and their checkers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build Chr s or Chr² s.
    Chr(ChrArgs),
    /// Inspect adversaries.
    #[command(subcommand)]
    Adv(AdvCommand),
    /// Build and check affine tasks.
    #[command(subcommand)]
    Affine(AffineCommand),
    /// Check the leader map.
    #[command(subcommand)]
    Leader(LeaderCommand),
    /// Model check the protocol.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Regenerate every figure and report into one directory.
    Repro(ReproArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Off,
}

#[derive(Args, Debug)]
pub struct ChrArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Subdivision depth, 1 or 2.
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Complex JSON whose facets are drawn on top (SVG only).
    #[arg(long)]
    pub highlight: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AdversaryArg {
    /// Adversary spec JSON.
    #[arg(long)]
    pub adversary: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum AdvCommand {
    /// Agreement power of the adversary.
    Setcon(AdversaryArg),
    /// Agreement function table.
    Alpha(AdversaryArg),
    /// Fairness check; exits 1 with a witness when unfair.
    Fair(AdversaryArg),
    /// Classify every adversary over `n` processes.
    Classify {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// At n = 4, sweep all families instead of every 64th.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    Distribution,
    SingleCarrier,
    Subtraction,
}

#[derive(Subcommand, Debug)]
pub enum AffineCommand {
    /// Build R_A for a fair adversary.
    Build {
        #[command(flatten)]
        adversary: AdversaryArg,
        /// Combine with intersection instead of union.
        #[arg(long)]
        intersection: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Exhaustively check one structural lemma.
    Verify {
        #[arg(value_enum)]
        lemma: Lemma,
        #[command(flatten)]
        adversary: AdversaryArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum LeaderCommand {
    /// Validity, agreement and robustness of μ_Q over R_A.
    Verify {
        #[command(flatten)]
        adversary: AdversaryArg,
        /// Restrict to one set, e.g. `1,3`.
        #[arg(long = "Q", value_parser = parse_procset)]
        q: Option<ProcSet>,
        #[arg(long)]
        intersection: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Explore every schedule of every participating set.
    Check {
        #[command(flatten)]
        adversary: AdversaryArg,
        /// Must match the adversary, when given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, conflicts_with = "safety")]
        liveness: bool,
        #[arg(long)]
        safety: bool,
        /// Target task built with the intersection form.
        #[arg(long)]
        intersection: bool,
        /// Extra crashes beyond the α-model budget.
        #[arg(long, default_value_t = 0)]
        extra_crashes: usize,
        /// Directory receiving one trace file per violation sample.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace file step by step.
    Replay { trace: PathBuf },
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Adversary shown in the last R_A figure.
    #[arg(long)]
    pub adversary: Option<PathBuf>,
    #[arg(long, default_value = "repro")]
    pub out: PathBuf,
}

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

impl Status {
    pub fn from_passed(ok: bool) -> Self {
        if ok {
            Status::Passed
        } else {
            Status::Failed
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::Failed => 1,
        }
    }
}

pub fn parse_procset(s: &str) -> Result<ProcSet, String> {
    let ids = s
        .split(',')
        .map(|t| t.trim().parse::<u8>().map_err(|e| format!("bad process id `{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if ids.iter().any(|&i| i == 0 || i as usize > affine_fair::MAX_PROCESSES) {
        return Err(format!("process ids must lie in 1..={}", affine_fair::MAX_PROCESSES));
    }
    Ok(ProcSet::from_ids(ids))
}

pub fn state_cap() -> Result<usize> {
    match std::env::var("AFFINE_STATE_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("AFFINE_STATE_CAP = {v:?} is not a count")),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

pub fn load_adversary(path: &Path) -> Result<Adversary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: AdversarySpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(spec.build()?)
}

pub fn load_fair(path: &Path) -> Result<FairAdversary> {
    Ok(FairAdversary::new(load_adversary(path)?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn form(intersection: bool) -> CombineForm {
    if intersection {
        CombineForm::Intersection
    } else {
        CombineForm::Union
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Chr(args) => run_chr(args),
        Command::Adv(cmd) => run_adv(cmd),
        Command::Affine(cmd) => run_affine(cmd),
        Command::Leader(cmd) => run_leader(cmd),
        Command::Simulate(cmd) => run_simulate(cmd),
        Command::Repro(args) => {
            let adversary = args.adversary.as_deref().map(load_fair).transpose()?;
            let summary = repro::repro(args.n, adversary.as_ref(), &args.out)?;
            print!("{}", to_json(&summary)?);
            Ok(Status::from_passed(summary.passed))
        }
    }
}

fn read_highlight(path: &Path) -> Result<ComplexDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn chr_svg<V>(base: &ChromaticComplex<V>, title: String, highlight: Option<&Path>) -> Result<String>
where
    V: affine_fair::complex::ChromaticVertex + affine_fair::subdivision::Realize,
{
    let mut layers = Vec::new();
    if let Some(path) = highlight {
        let sub: ChromaticComplex<V> = from_document(&read_highlight(path)?)?;
        ensure!(sub.n() == base.n(), "highlight has n = {}, base has n = {}", sub.n(), base.n());
        for f in sub.facets() {
            ensure!(base.contains(f), "highlighted facet {f} is not in the base complex");
        }
        layers.push(Layer::new("#6baed6", sub.facets().iter().cloned()));
    }
    Ok(render(&[Panel { title, base, layers }]))
}

fn run_chr(args: ChrArgs) -> Result<Status> {
    affine_fair::complex::check_system_size(args.n)?;
    ensure!(args.format != Format::Svg || args.n <= 3, "SVG output needs n <= 3; use --format off");
    ensure!(args.highlight.is_none() || args.format == Format::Svg, "--highlight applies to SVG output");
    let text = match args.level {
        1 => {
            let k = chr_s(args.n)?;
            match args.format {
                Format::Json => to_json(&to_document(&k))?,
                Format::Off => to_off(&k),
                Format::Svg => chr_svg::<ChrVertex>(&k, format!("Chr s, n = {}", args.n), args.highlight.as_deref())?,
            }
        }
        2 => {
            ensure!(args.n <= 4, "Chr² s is only built for n <= 4");
            let k = build_chr2(args.n)?;
            match args.format {
                Format::Json => to_json(&to_document(&k))?,
                Format::Off => to_off(&k),
                Format::Svg => chr_svg::<Chr2Vertex>(&k, format!("Chr² s, n = {}", args.n), args.highlight.as_deref())?,
            }
        }
        other => bail!("level must be 1 or 2, got {other}"),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(Status::Passed)
}

#[derive(Serialize)]
struct AlphaRow {
    set: ProcSet,
    alpha: usize,
}

#[derive(Serialize)]
struct FairnessOutput {
    adversary: String,
    fair: bool,
    witness: Option<Witness>,
}

#[derive(Serialize)]
pub struct Witness {
    pub p: ProcSet,
    pub q: ProcSet,
    pub restricted_power: usize,
    pub expected: usize,
}

#[derive(Serialize)]
pub struct ClassRow {
    pub live_sets: Vec<ProcSet>,
    pub setcon: usize,
    pub csize: usize,
    pub superset_closed: bool,
    pub symmetric: bool,
    pub fair: bool,
    pub alpha_valid: bool,
}

#[derive(Serialize)]
pub struct Classification {
    pub n: usize,
    pub families: usize,
    pub fair: usize,
    pub superset_closed: usize,
    pub symmetric: usize,
    pub rows: Vec<ClassRow>,
}

/// Rows for every adversary over `n` processes, or every `stride`-th one.
pub fn classify(n: usize, stride: usize) -> Classification {
    let rows: Vec<ClassRow> = all_adversaries(n)
        .step_by(stride.max(1))
        .map(|adv| ClassRow {
            live_sets: adv.sorted_live_sets(),
            setcon: adv.setcon(),
            csize: adv.csize(),
            superset_closed: adv.is_superset_closed(),
            symmetric: adv.is_symmetric(),
            fair: adv.is_fair(),
            alpha_valid: AgreementFunction::from_adversary(&adv).is_ok(),
        })
        .collect();
    Classification {
        n,
        families: rows.len(),
        fair: rows.iter().filter(|r| r.fair).count(),
        superset_closed: rows.iter().filter(|r| r.superset_closed).count(),
        symmetric: rows.iter().filter(|r| r.symmetric).count(),
        rows,
    }
}

fn run_adv(cmd: AdvCommand) -> Result<Status> {
    match cmd {
        AdvCommand::Setcon(a) => {
            let adv = load_adversary(&a.adversary)?;
            println!("{}", adv.setcon());
            Ok(Status::Passed)
        }
        AdvCommand::Alpha(a) => {
            let adv = load_adversary(&a.adversary)?;
            let alpha = AgreementFunction::from_adversary(&adv)?;
            let rows: Vec<AlphaRow> = alpha.table().into_iter().map(|(set, alpha)| AlphaRow { set, alpha }).collect();
            print!("{}", to_json(&rows)?);
            Ok(Status::Passed)
        }
        AdvCommand::Fair(a) => {
            let adv = load_adversary(&a.adversary)?;
            let witness = adv.fairness_witness().map(|(p, q, lhs, rhs)| Witness {
                p,
                q,
                restricted_power: lhs,
                expected: rhs,
            });
            let fair = witness.is_none();
            print!("{}", to_json(&FairnessOutput { adversary: adv.to_string(), fair, witness })?);
            Ok(Status::from_passed(fair))
        }
        AdvCommand::Classify { n, full, out } => {
            ensure!((1..=4).contains(&n), "classify supports n in 1..=4");
            let stride = if n == 4 && !full { 64 } else { 1 };
            let table = classify(n, stride);
            let ok = table.rows.iter().all(|r| r.alpha_valid && (!(r.superset_closed || r.symmetric) || r.fair));
            emit(out.as_deref(), &to_json(&table)?)?;
            Ok(Status::from_passed(ok))
        }
    }
}

fn run_affine(cmd: AffineCommand) -> Result<Status> {
    match cmd {
        AffineCommand::Build { adversary, intersection, out, svg } => {
            let fa = load_fair(&adversary.adversary)?;
            let task = r_a(&fa, form(intersection))?;
            if let Some(path) = svg {
                ensure!(fa.n() <= 3, "SVG output needs n <= 3");
                let chr2 = build_chr2(fa.n())?;
                let panel = Panel {
                    title: task.name.clone(),
                    base: &chr2,
                    layers: vec![Layer::new("#6baed6", task.complex.facets().iter().cloned())],
                };
                emit(Some(&path), &render(&[panel]))?;
            }
            emit(out.as_deref(), &to_json(&task.to_document())?)?;
            Ok(Status::Passed)
        }
        AffineCommand::Verify { lemma, adversary } => {
            let fa = load_fair(&adversary.adversary)?;
            let (text, ok) = match lemma {
                Lemma::Distribution => {
                    let r = verify_cs_distribution(fa.alpha())?;
                    (to_json(&r)?, r.passed())
                }
                Lemma::SingleCarrier => {
                    let r = verify_single_carrier(fa.alpha())?;
                    (to_json(&r)?, r.passed())
                }
                Lemma::Subtraction => {
                    let r = repro::subtraction(fa.alpha());
                    (to_json(&r)?, r.violations.is_empty())
                }
            };
            print!("{text}");
            Ok(Status::from_passed(ok))
        }
    }
}

fn run_leader(cmd: LeaderCommand) -> Result<Status> {
    let LeaderCommand::Verify { adversary, q, intersection } = cmd;
    let fa = load_fair(&adversary.adversary)?;
    if let Some(q) = q {
        ensure!(!q.is_empty() && q.is_subset(ProcSet::full(fa.n())), "--Q must be a nonempty subset of 1..={}", fa.n());
    }
    let task = r_a(&fa, form(intersection))?;
    let report = verify_mu_properties(&task, q);
    print!("{}", to_json(&report)?);
    Ok(Status::from_passed(report.passed()))
}

fn run_simulate(cmd: SimulateCommand) -> Result<Status> {
    match cmd {
        SimulateCommand::Check { adversary, n, liveness, safety, intersection, extra_crashes, trace_out, out } => {
            let fa = load_fair(&adversary.adversary)?;
            if let Some(n) = n {
                ensure!(n == fa.n(), "--n {n} does not match the adversary over {} processes", fa.n());
            }
            let checks = match (safety, liveness) {
                (true, false) => Checks { safety: true, liveness: false },
                (false, true) => Checks { safety: false, liveness: true },
                _ => Checks::BOTH,
            };
            let budget = if extra_crashes == 0 { CrashBudget::AlphaModel } else { CrashBudget::Exceed(extra_crashes) };
            let task = r_a(&fa, form(intersection))?;
            let report = check_all(&fa, &task, checks, budget, state_cap()?)?;
            if let Some(dir) = trace_out {
                fs::create_dir_all(&dir)?;
                for part in &report.participations {
                    for (i, sample) in part.samples.iter().enumerate() {
                        let trace = TraceFile {
                            adversary: fa.adversary().to_spec(),
                            participation: part.participation,
                            crash_budget: part.crash_budget,
                            events: sample.trace.clone(),
                        };
                        let ids: Vec<String> = part.participation.ids().iter().map(u8::to_string).collect();
                        let name = format!("trace_p{}_{:?}_{i}.json", ids.join(""), sample.kind).to_lowercase();
                        emit(Some(&dir.join(name)), &to_json(&trace)?)?;
                    }
                }
            }
            emit(out.as_deref(), &to_json(&report)?)?;
            Ok(Status::from_passed(report.passed()))
        }
        SimulateCommand::Replay { trace } => {
            let text = fs::read_to_string(&trace).with_context(|| format!("reading {}", trace.display()))?;
            let file: TraceFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", trace.display()))?;
            let outcome = replay(&file)?;
            print!("{}", to_json(&outcome)?);
            Ok(Status::Passed)
        }
    }
}
