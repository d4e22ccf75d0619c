mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use diffeo_core::algebra::{EdgeFlavor, Leg, LegSet};
use diffeo_core::rules::{
    free_vertex, generalized_vertex, interaction_vertex, total_vertex, EdgeContext, EdgeVar, TheorySpec, VertexForm,
    VertexKind, VertexRule,
};
use diffeo_core::trees::{
    s_linear_tree_sum, tree_sum_a, tree_sum_b_in, tree_sum_bprime, BprimeMode, SumOptions, TreeSumResult,
};
use diffeo_core::verify::{default_suite, run_suite, suite_passes, CheckName, CheckSpec};

use config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "diffeo", version, about = "Exact Feynman rules and tree sums of field diffeomorphisms")]
struct Cli {
    /// JSON configuration with keys theory, diffeo, suite, output.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for tree sums and the suite.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleKind {
    Free,
    Interaction,
    Total,
    Generalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SumKind {
    B,
    Bprime,
    #[value(name = "A")]
    A,
    #[value(name = "S")]
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    AllVertices,
    SOnly,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a vertex Feynman rule.
    Rules {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "free")]
        kind: RuleKind,
        /// Interaction power for --kind interaction.
        #[arg(long)]
        s: Option<usize>,
    },
    /// Compute a tree sum.
    Treesum {
        #[arg(long, value_enum)]
        kind: SumKind,
        #[arg(long)]
        n: usize,
        /// Offshell legs of an A sum: "all", "none" or a list such as "1,3".
        #[arg(long, default_value = "none")]
        offshell: String,
        /// Interaction power for bprime and S sums.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, value_enum, default_value = "all-vertices")]
        mode: ModeArg,
        /// Include every tree's amplitude.
        #[arg(long)]
        trace: bool,
    },
    /// Run theorem checks.
    Verify {
        /// Check to run; repeat for several. Default: the full suite.
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("diffeo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let format = cli.format.or(cfg.output.format).unwrap_or_default();
    if let Some(jobs) = cli.jobs.or(cfg.suite.jobs) {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Rules { n, kind, s } => {
            let rule = rule(&cfg, n, kind, s)?;
            output::rule(&mut out, &rule, format)?;
            Ok(0)
        }
        Command::Treesum { kind, n, offshell, s, mode, trace } => {
            let result = treesum(&cfg, kind, n, &offshell, s, mode, trace || cfg.output.trace)?;
            output::treesum(&mut out, &result, format)?;
            Ok(0)
        }
        Command::Verify { checks, max_n, s, order, trials, dim } => {
            let mut params = cfg.params();
            let seed = cli.seed.or(cfg.suite.seed);
            params.seed = seed.unwrap_or(params.seed);
            let names: Vec<String> = if checks.is_empty() { cfg.suite.checks.clone().unwrap_or_default() } else { checks };
            let mut specs: Vec<CheckSpec> = if names.is_empty() {
                default_suite(params.seed)
            } else {
                names
                    .iter()
                    .map(|n| n.parse::<CheckName>().map(|c| CheckSpec::new(c, params.clone())).map_err(CliError::Usage))
                    .collect::<Result<_, _>>()?
            };
            for spec in &mut specs {
                let p = &mut spec.params;
                let overrides = [(max_n, cfg.suite.max_n), (s, cfg.suite.s), (order, cfg.suite.order), (trials, cfg.suite.trials), (dim, cfg.suite.dim)];
                let pick = |i: usize| overrides[i].0.or(overrides[i].1);
                p.max_n = pick(0).unwrap_or(p.max_n);
                p.s = pick(1).unwrap_or(p.s);
                p.order = pick(2).unwrap_or(p.order);
                p.trials = pick(3).unwrap_or(p.trials);
                p.dim = pick(4).unwrap_or(p.dim);
                spec.fault = cfg.suite.fault;
                spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let reports = run_suite(&specs);
            let pass = suite_passes(&reports);
            output::reports(&mut out, &reports, pass, format)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn external_legs(n: usize) -> Result<Vec<EdgeVar>, CliError> {
    if !(3..=62).contains(&n) {
        return Err(CliError::Usage(format!("vertex valence {n} is outside 3..=62")));
    }
    let ctx = EdgeContext::Unrooted { n: n as Leg };
    (1..=n as Leg).map(|l| EdgeVar::leg(l, ctx).map_err(|e| CliError::Usage(e.to_string()))).collect()
}

fn pick_power(theory: &TheorySpec, s: Option<usize>) -> Result<usize, CliError> {
    match (s, theory.interactions.as_slice()) {
        (Some(s), _) => Ok(s),
        (None, [only]) => Ok(only.s),
        (None, []) => Ok(3),
        (None, _) => Err(CliError::Usage("several interactions configured; pick one with --s".into())),
    }
}

fn rule(cfg: &RunConfig, n: usize, kind: RuleKind, s: Option<usize>) -> Result<VertexRule, CliError> {
    let theory = cfg.theory()?;
    let diffeo = cfg.diffeo()?;
    let legs = external_legs(n)?;
    let compute = |e: diffeo_core::rules::RuleError| CliError::Compute(e.to_string());
    let (kind, value) = match kind {
        RuleKind::Free => {
            let mass = theory.mass_sq().ok_or_else(|| CliError::Usage("--kind free needs the standard propagator".into()))?;
            (VertexKind::Free, free_vertex(n, &legs, &diffeo, mass).map_err(compute)?)
        }
        RuleKind::Interaction => {
            let s = pick_power(&theory, s)?;
            if s < 3 {
                return Err(CliError::Usage(format!("interaction power {s} is below 3")));
            }
            let lambda = theory.interaction(s).map(|i| i.lambda.clone()).unwrap_or_else(|| diffeo_core::rules::Interaction::symbolic(s).lambda);
            (VertexKind::Interaction { s }, interaction_vertex(n, s, &lambda, &diffeo))
        }
        RuleKind::Total => (VertexKind::Total, total_vertex(n, &legs, &theory, &diffeo, VertexForm::Compact).map_err(compute)?),
        RuleKind::Generalized => (VertexKind::Generalized, generalized_vertex(n, &legs, &diffeo, EdgeFlavor::Generalized).map_err(compute)?),
    };
    Ok(VertexRule::new(n, kind, &theory, &value))
}

fn parse_offshell(spec: &str, n: usize) -> Result<LegSet, CliError> {
    let all = LegSet::range(1, n as Leg);
    match spec.trim() {
        "all" => Ok(all),
        "none" | "" => Ok(LegSet::EMPTY),
        list => {
            let mut set = LegSet::EMPTY;
            for part in list.split(',') {
                let leg: Leg = part.trim().parse().map_err(|_| CliError::Usage(format!("offshell leg {part:?} is not a number")))?;
                if !all.contains(leg) {
                    return Err(CliError::Usage(format!("offshell leg {leg} is outside 1..={n}")));
                }
                set.insert(leg);
            }
            Ok(set)
        }
    }
}

fn treesum(cfg: &RunConfig, kind: SumKind, n: usize, offshell: &str, s: Option<usize>, mode: ModeArg, trace: bool) -> Result<TreeSumResult, CliError> {
    let theory = cfg.theory()?;
    let diffeo = cfg.diffeo()?;
    let opts = SumOptions { trace, ..SumOptions::default() };
    let limit = |lo: usize, hi: usize| {
        if (lo..=hi).contains(&n) {
            Ok(())
        } else {
            Err(CliError::Usage(format!("n = {n} is outside {lo}..={hi} for this sum")))
        }
    };
    if kind != SumKind::A && offshell.trim() != "none" {
        return Err(CliError::Usage("--offshell applies to A sums only".into()));
    }
    let compute = |e: diffeo_core::trees::TreeError| CliError::Compute(e.to_string());
    match kind {
        SumKind::B => {
            limit(1, 9)?;
            tree_sum_b_in(n, &theory, &diffeo, opts).map_err(compute)
        }
        SumKind::Bprime => {
            limit(1, 9)?;
            let s = pick_power(&theory, s)?;
            let mode = match mode {
                ModeArg::AllVertices => BprimeMode::AllVertices,
                ModeArg::SOnly => BprimeMode::SOnly,
            };
            tree_sum_bprime(n, s, &diffeo, mode, opts).map_err(|e| CliError::Usage(e.to_string()))
        }
        SumKind::A => {
            limit(3, 9)?;
            tree_sum_a(n, parse_offshell(offshell, n)?, &theory, &diffeo, opts).map_err(compute)
        }
        SumKind::S => {
            limit(3, 9)?;
            let s = pick_power(&theory, s)?;
            s_linear_tree_sum(n, s, &diffeo, opts).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}
