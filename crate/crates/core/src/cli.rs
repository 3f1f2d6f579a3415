//! Command-line driver. Output is line-oriented `key=value`; every run first
//! echoes its effective configuration.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 a resource cap
//! would be exceeded.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::concept::ConceptClass;
use crate::dimensions::{
    is_shattered, ls_dimension, run_online_game, vc_dimension, verify_mistake_tree, Dimension,
    Opponent,
};
use crate::error::{Error, Result};
use crate::labelcover::{self, LabelCoverInstance, PartialAssignment, DEFAULT_BRUTE_FORCE_BUDGET};
use crate::reductions::{
    self, ls_completeness_tree, vc_completeness_certificate, Caps, ReductionKind, ReductionOutput,
    ReductionParams,
};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "littlestone",
    version,
    about = "Exact VC and Littlestone dimensions, online learning, and Label Cover reductions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact dimension of a class file, with a certificate sidecar.
    #[command(subcommand)]
    Dim(DimCommand),
    /// Play the online mistake-bound game with the optimal learner.
    Game(GameArgs),
    /// Generate a reduction from a Label Cover instance.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Audits and certificate checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum DimCommand {
    Vc(DimArgs),
    Ls(DimArgs),
}

#[derive(Args, Debug)]
pub struct DimArgs {
    /// Class file (bit-matrix text, or `.json`).
    pub class: PathBuf,
    /// Certificate output path. Defaults to `<class>.vc.json` / `<class>.ls.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    pub class: PathBuf,
    /// Index of the target concept.
    #[arg(long, conflicts_with = "adversary")]
    pub target: Option<usize>,
    /// Let Nature answer adversarially (the default without `--target`).
    #[arg(long)]
    pub adversary: bool,
    /// Shuffles the presentation order for `--target`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = usize::MAX)]
    pub max_steps: usize,
}

#[derive(Subcommand, Debug)]
pub enum ReduceCommand {
    Vc(ReduceArgs),
    Ls(ReduceArgs),
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// Label Cover instance (JSON).
    pub instance: PathBuf,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes `<out>.cc` and `<out>.meta.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Args, Debug)]
pub struct CapArgs {
    #[arg(long, default_value_t = 100_000)]
    pub max_universe: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_concepts: usize,
    #[arg(long, default_value_t = 16)]
    pub max_rk: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_ell: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            max_universe: self.max_universe,
            max_concepts: self.max_concepts,
            max_rk: self.max_rk,
            max_ell: self.max_ell,
            ..Caps::default()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Dimension inequalities on a class file.
    Facts(FactsArgs),
    /// Completeness certificate of a generated reduction.
    Certificate(CertificateArgs),
    /// Single-matching pass probability against its analytic bound.
    #[command(alias = "lemma36")]
    PassProbability(PassArgs),
    /// Budgeted shattered-set search and decoding checks on a reduction.
    Search(SearchArgs),
}

#[derive(Args, Debug)]
pub struct FactsArgs {
    pub class: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct CertificateArgs {
    /// Reduction prefix (or its `.cc` / `.meta.json` file).
    pub reduction: PathBuf,
    /// Satisfying assignment as a JSON map from vertex label to symbol.
    /// Found by exhaustive search when omitted.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PassArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Assignment to test; an optimal one is used when omitted.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Limit on assignments enumerated to certify the instance value.
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET as u64)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    pub reduction: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Random (concept, non-repetitive subset) samples.
    #[arg(long, default_value_t = 1_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error={}", e.kind());
            let _ = writeln!(err, "reason={}", e.to_string().replace('\n', " "));
            match e {
                Error::Resource { .. } => EXIT_RESOURCE,
                Error::Certificate(_) => EXIT_CHECK_FAILED,
                _ => EXIT_INPUT,
            }
        }
    }
}

/// Runs a parsed command. `Ok(false)` means a check failed.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Dim(DimCommand::Vc(args)) => dim_vc(args, out),
        Command::Dim(DimCommand::Ls(args)) => dim_ls(args, out),
        Command::Game(args) => game(args, out),
        Command::Reduce(ReduceCommand::Vc(args)) => reduce(ReductionKind::Vc, args, out),
        Command::Reduce(ReduceCommand::Ls(args)) => reduce(ReductionKind::Ls, args, out),
        Command::Verify(VerifyCommand::Facts(args)) => facts(args, out),
        Command::Verify(VerifyCommand::Certificate(args)) => certificate(args, out),
        Command::Verify(VerifyCommand::PassProbability(args)) => pass_probability(args, out),
        Command::Verify(VerifyCommand::Search(args)) => search(args, out),
    }
}

fn sidecar(input: &Path, suffix: &str) -> PathBuf {
    let mut s = input.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_class(path: &Path) -> Result<ConceptClass> {
    ConceptClass::load(path)
}

fn dim_vc(args: &DimArgs, out: &mut dyn Write) -> Result<bool> {
    let class = load_class(&args.class)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| sidecar(&args.class, ".vc.json"));
    writeln!(out, "command=dim vc")?;
    writeln!(out, "input={}", args.class.display())?;
    writeln!(
        out,
        "elements={} concepts={}",
        class.n_elements(),
        class.len()
    )?;
    match vc_dimension(&class) {
        Dimension::Undefined => writeln!(out, "vc=undefined")?,
        Dimension::Defined { value, certificate } => {
            let labels: Vec<&str> = certificate
                .set
                .iter()
                .map(|&x| class.universe().label(x))
                .collect();
            let json = serde_json::json!({
                "vc": value,
                "set": labels,
                "positions": certificate.set,
                "assignments": certificate.assignments,
            });
            std::fs::write(&path, serde_json::to_string_pretty(&json)? + "\n")?;
            writeln!(out, "vc={value}")?;
            writeln!(out, "set={}", labels.join(","))?;
            writeln!(out, "witness={}", path.display())?;
        }
    }
    Ok(true)
}

fn dim_ls(args: &DimArgs, out: &mut dyn Write) -> Result<bool> {
    let class = load_class(&args.class)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| sidecar(&args.class, ".ls.json"));
    writeln!(out, "command=dim ls")?;
    writeln!(out, "input={}", args.class.display())?;
    writeln!(
        out,
        "elements={} concepts={}",
        class.n_elements(),
        class.len()
    )?;
    match ls_dimension(&class) {
        Dimension::Undefined => writeln!(out, "ls=undefined")?,
        Dimension::Defined { value, certificate } => {
            let labels: Vec<&str> = certificate
                .node_elements()
                .iter()
                .map(|&x| class.universe().label(x))
                .collect();
            let json = serde_json::json!({
                "ls": value,
                "tree": certificate,
                "node_labels": labels,
            });
            std::fs::write(&path, serde_json::to_string_pretty(&json)? + "\n")?;
            writeln!(out, "ls={value}")?;
            writeln!(out, "tree={}", path.display())?;
        }
    }
    Ok(true)
}

fn game(args: &GameArgs, out: &mut dyn Write) -> Result<bool> {
    let class = load_class(&args.class)?;
    let opponent = match args.target {
        Some(concept) => {
            let order = args.seed.map(|seed| {
                let mut order: Vec<usize> = (0..class.n_elements()).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                order
            });
            Opponent::Target { concept, order }
        }
        None => Opponent::OptimalAdversary,
    };
    writeln!(out, "command=game")?;
    writeln!(out, "input={}", args.class.display())?;
    match &opponent {
        Opponent::Target { concept, .. } => {
            writeln!(out, "opponent=target target={concept}")?;
            match args.seed {
                Some(s) => writeln!(out, "order=shuffled seed={s}")?,
                None => writeln!(out, "order=positional")?,
            }
        }
        _ => writeln!(out, "opponent=adversary")?,
    }
    let transcript = run_online_game(&class, &opponent, args.max_steps)?;
    for (t, step) in transcript.steps.iter().enumerate() {
        writeln!(
            out,
            "step={} element={} prediction={} correct={}",
            t + 1,
            class.universe().label(step.element),
            step.prediction as u8,
            step.correct as u8
        )?;
    }
    writeln!(out, "mistakes={}", transcript.mistakes)?;
    if let Some(ls) = ls_dimension(&class).value() {
        writeln!(out, "ls={ls}")?;
        return Ok(transcript.mistakes <= ls);
    }
    Ok(true)
}

fn reduce(kind: ReductionKind, args: &ReduceArgs, out: &mut dyn Write) -> Result<bool> {
    let instance = LabelCoverInstance::load(&args.instance)?;
    let params = ReductionParams {
        r: args.r,
        delta: args.delta,
        ell: args.ell,
        k: args.k,
        seed: args.seed,
        caps: args.caps.caps(),
    };
    writeln!(out, "command=reduce {}", kind.name())?;
    writeln!(out, "input={}", args.instance.display())?;
    let caps = &params.caps;
    writeln!(
        out,
        "caps=max_universe:{},max_concepts:{},max_rk:{},max_ell:{}",
        caps.max_universe, caps.max_concepts, caps.max_rk, caps.max_ell
    )?;
    let output = match kind {
        ReductionKind::Vc => reductions::vc_reduction(&instance, &params)?,
        ReductionKind::Ls => reductions::ls_reduction(&instance, &params)?,
    };
    let p = &output.meta.params;
    writeln!(
        out,
        "r={} r_padded={} delta={} ell={} k={} seed={}",
        p.r, p.r_padded, p.delta, p.ell, p.k, p.seed
    )?;
    for o in &p.overrides {
        writeln!(out, "override={o}")?;
    }
    let q = &output.partition().quality;
    writeln!(
        out,
        "partition_sizes_ok={} partition_edges_ok={} bi_regular={} attempts={}",
        q.sizes_ok, q.edges_ok, q.bi_regular, q.attempts
    )?;
    writeln!(
        out,
        "elements={} concepts={}",
        output.class.n_elements(),
        output.class.len()
    )?;
    let (cc, meta) = output.save(&args.out)?;
    writeln!(out, "class={}", cc.display())?;
    writeln!(out, "meta={}", meta.display())?;
    Ok(true)
}

fn facts(args: &FactsArgs, out: &mut dyn Write) -> Result<bool> {
    let class = load_class(&args.class)?;
    writeln!(out, "command=verify facts")?;
    writeln!(out, "input={}", args.class.display())?;
    let report = verify::check_dimension_facts(&class, args.seed);
    write!(out, "{}", report.to_text())?;
    Ok(report.passed())
}

fn load_sigma(l: &LabelCoverInstance, path: &Path) -> Result<PartialAssignment> {
    let map: BTreeMap<String, labelcover::Symbol> =
        serde_json::from_str(&std::fs::read_to_string(path)?)?;
    PartialAssignment::from_labeled(l, &map)
}

fn certificate(args: &CertificateArgs, out: &mut dyn Write) -> Result<bool> {
    let output = ReductionOutput::load(&args.reduction)?;
    let l = output.instance();
    writeln!(out, "command=verify certificate")?;
    writeln!(out, "input={}", args.reduction.display())?;
    writeln!(
        out,
        "kind={} r={} k={}",
        output.kind().name(),
        output.r(),
        output.k()
    )?;
    let sigma = match &args.sigma {
        Some(path) => {
            writeln!(out, "sigma={}", path.display())?;
            load_sigma(l, path)?
        }
        None => {
            let (val, sigma) = labelcover::brute_force_optimum(l, DEFAULT_BRUTE_FORCE_BUDGET)?;
            writeln!(out, "sigma=exhaustive value={val}")?;
            sigma
        }
    };
    match output.kind() {
        ReductionKind::Vc => {
            let set = vc_completeness_certificate(&output, &sigma)?;
            let labels: Vec<&str> = set
                .iter()
                .map(|&x| output.class.universe().label(x))
                .collect();
            let shattered =
                is_shattered(&output.class, &set)?.is_some_and(|w| w.is_valid(&output.class));
            writeln!(out, "certificate={}", labels.join(","))?;
            writeln!(out, "size={} expected={}", set.len(), 2 * output.r())?;
            writeln!(out, "shattered={shattered}")?;
            let ok = shattered && set.len() == 2 * output.r();
            writeln!(out, "result={}", if ok { "pass" } else { "fail" })?;
            Ok(ok)
        }
        ReductionKind::Ls => {
            let tree = ls_completeness_tree(&output, &sigma)?;
            let ok = verify_mistake_tree(&output.class, &tree)?;
            writeln!(
                out,
                "tree_depth={} expected={}",
                tree.depth(),
                2 * output.r() * output.k()
            )?;
            writeln!(out, "tree_valid={ok}")?;
            let ok = ok && tree.depth() == 2 * output.r() * output.k();
            writeln!(out, "result={}", if ok { "pass" } else { "fail" })?;
            Ok(ok)
        }
    }
}

fn pass_probability(args: &PassArgs, out: &mut dyn Write) -> Result<bool> {
    let l = LabelCoverInstance::load(&args.instance)?;
    writeln!(out, "command=verify pass-probability")?;
    writeln!(out, "input={}", args.instance.display())?;
    let mut partition = labelcover::partition_blocks(&l, args.r, args.seed)?;
    partition.pad_to_even();
    let sigma = match &args.sigma {
        Some(path) => {
            writeln!(out, "sigma={}", path.display())?;
            load_sigma(&l, path)?
        }
        None => {
            let (_, sigma) = labelcover::brute_force_optimum(&l, args.budget as u128)?;
            writeln!(out, "sigma=optimal")?;
            sigma
        }
    };
    let blocks: Vec<usize> = (0..partition.r()).collect();
    let report = verify::pass_probability_audit(
        &l,
        &partition,
        &blocks,
        &sigma,
        args.delta,
        args.trials,
        args.seed,
        args.budget as u128,
    )?;
    write!(out, "{}", report.to_text())?;
    Ok(report.passed())
}

fn search(args: &SearchArgs, out: &mut dyn Write) -> Result<bool> {
    if args.budget == 0 {
        return Err(Error::Input("budget must be at least 1".into()));
    }
    let output = ReductionOutput::load(&args.reduction)?;
    writeln!(out, "command=verify search")?;
    writeln!(out, "input={}", args.reduction.display())?;
    let found = verify::shattered_search(&output, args.budget);
    let report = found.to_report(&output, args.budget);
    write!(out, "{}", report.to_text())?;
    let containment = verify::containment_audit(&output, args.samples, args.seed);
    write!(out, "{}", containment.to_text())?;
    Ok(report.passed() && containment.passed())
}
