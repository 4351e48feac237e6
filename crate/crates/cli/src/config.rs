//! Command-line flags, the TOML run configuration and their merge.
//!
//! A value in the configuration file overrides the same flag given on the
//! command line. Relative paths in the file are resolved against the file's
//! directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use uqscore_core::verify::Suite;
use uqscore_core::{AcquisitionStrategy, Component, Direction, LearnerConfig, ScoringRule};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "uqscore",
    version,
    about = "Uncertainty measures from proper scoring rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total, aleatoric and epistemic uncertainty of every record.
    Decompose,
    /// Accuracy-rejection curve and its area.
    Selective,
    /// AUROC of in-distribution against out-of-distribution records.
    Ood,
    /// Active learning on the synthetic epistemic-gap benchmark.
    Active(ActiveFlags),
    /// Run the oracle self-checks.
    Verify(VerifyFlags),
}

impl Command {
    pub fn task(&self) -> Task {
        match self {
            Command::Decompose => Task::Decompose,
            Command::Selective => Task::Selective,
            Command::Ood => Task::Ood,
            Command::Active(_) => Task::Active,
            Command::Verify(_) => Task::Verify,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Decompose,
    Selective,
    Ood,
    Active,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Decompose => "decompose",
            Task::Selective => "selective",
            Task::Ood => "ood",
            Task::Active => "active",
            Task::Verify => "verify",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Task::Decompose,
            Task::Selective,
            Task::Ood,
            Task::Active,
            Task::Verify,
        ]
        .into_iter()
        .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

/// `all` or a single rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleChoice {
    All,
    One(ScoringRule),
}

impl FromStr for RuleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("all") {
            Ok(RuleChoice::All)
        } else {
            s.parse().map(RuleChoice::One)
        }
    }
}

fn expand_rules(choices: &[RuleChoice]) -> Vec<ScoringRule> {
    if choices.is_empty() || choices.contains(&RuleChoice::All) {
        return ScoringRule::ALL.to_vec();
    }
    let mut rules = Vec::new();
    for c in choices {
        if let RuleChoice::One(r) = c {
            if !rules.contains(r) {
                rules.push(*r);
            }
        }
    }
    rules
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Prediction file (JSON lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Out-of-distribution prediction file for `ood`.
    #[arg(long, global = true, value_name = "PATH")]
    pub input_ood: Option<PathBuf>,

    /// Scoring rule(s): log, brier, zero-one, spherical or all. Repeatable.
    #[arg(long, global = true, value_name = "RULE", value_delimiter = ',')]
    pub rule: Vec<RuleChoice>,

    /// Uncertainty component: total, aleatoric or epistemic.
    #[arg(long, global = true)]
    pub component: Option<Component>,

    /// Loss used to score retained predictions in `selective` [default: zero-one].
    #[arg(long, global = true, value_name = "RULE")]
    pub task_rule: Option<ScoringRule>,

    /// Retain least uncertain first (ascending) or most uncertain first.
    #[arg(long, global = true)]
    pub direction: Option<Direction>,

    /// Rescale rows that do not sum to one instead of rejecting them.
    #[arg(long, global = true)]
    pub renormalize: bool,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for result files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// TOML run configuration; its values override flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "UQSCORE_THREADS", value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct ActiveFlags {
    /// Acquisition rounds.
    #[arg(long)]
    pub rounds: Option<usize>,

    /// Instances acquired per round.
    #[arg(long)]
    pub batch: Option<usize>,

    /// Trees in the bagged ensemble (ensemble size M).
    #[arg(long)]
    pub trees: Option<usize>,

    #[arg(long)]
    pub depth_cap: Option<usize>,

    #[arg(long)]
    pub min_leaf: Option<usize>,

    /// Laplace smoothing of leaf distributions.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Features tried per split (default: all).
    #[arg(long)]
    pub max_features: Option<usize>,

    /// Initially labeled points.
    #[arg(long)]
    pub n_labeled: Option<usize>,

    /// Gap-region points in the pool.
    #[arg(long)]
    pub n_gap: Option<usize>,

    /// Acquisition strategies, e.g. `random`, `zero-one`, `log:total`.
    /// Default: random plus every selected rule with the selected component.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<AcquisitionStrategy>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct VerifyFlags {
    /// Suite(s) to run: decompose, aulc, auroc, binary-ordering. Default: all.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,

    /// Corrupt one rule's closed-form epistemic term (self-test of the suites).
    #[arg(long, hide = true, value_name = "RULE")]
    pub inject_fault: Option<ScoringRule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    #[default]
    Empty,
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn items(&self) -> Vec<&str> {
        match self {
            OneOrMany::Empty => Vec::new(),
            OneOrMany::One(s) => vec![s.as_str()],
            OneOrMany::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    task: Option<String>,
    input: Option<PathBuf>,
    input_ood: Option<PathBuf>,
    #[serde(default, alias = "rules")]
    rule: OneOrMany,
    component: Option<String>,
    task_rule: Option<String>,
    direction: Option<String>,
    renormalize: Option<bool>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    threads: Option<usize>,
    #[serde(default)]
    active: ActiveFile,
    #[serde(default)]
    verify: VerifyFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActiveFile {
    rounds: Option<usize>,
    batch: Option<usize>,
    trees: Option<usize>,
    depth_cap: Option<usize>,
    min_leaf: Option<usize>,
    alpha: Option<f64>,
    max_features: Option<usize>,
    n_labeled: Option<usize>,
    n_gap: Option<usize>,
    #[serde(default, alias = "strategies")]
    strategy: OneOrMany,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyFile {
    #[serde(default, alias = "suites")]
    suite: OneOrMany,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut file: ConfigFile = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut file.input, &mut file.input_ood, &mut file.out_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSettings {
    pub learner: LearnerConfig,
    pub rounds: usize,
    pub batch: usize,
    pub n_labeled: usize,
    pub n_gap: usize,
    /// Explicit strategy list; `None` means the default fan-out.
    pub strategies: Option<Vec<AcquisitionStrategy>>,
}

impl Default for ActiveSettings {
    fn default() -> Self {
        Self {
            learner: LearnerConfig::default(),
            rounds: 20,
            batch: 2,
            n_labeled: 10,
            n_gap: 30,
            strategies: None,
        }
    }
}

/// Fully resolved options of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub task: Task,
    pub input: Option<PathBuf>,
    pub input_ood: Option<PathBuf>,
    pub rules: Vec<ScoringRule>,
    pub component: Option<Component>,
    pub task_rule: ScoringRule,
    pub direction: Direction,
    pub renormalize: bool,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub active: ActiveSettings,
    pub suites: Vec<Suite>,
    pub fault: Option<ScoringRule>,
}

impl Settings {
    pub fn component_or(&self, default: Component) -> Component {
        self.component.unwrap_or(default)
    }
}

fn parse_value<T: FromStr<Err = String>>(field: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config field `{field}`: {e}")))
}

fn parse_list<T: FromStr<Err = String>>(field: &str, list: &OneOrMany) -> Result<Option<Vec<T>>> {
    let items = list.items();
    if items.is_empty() {
        return Ok(None);
    }
    items
        .into_iter()
        .map(|s| parse_value(field, s))
        .collect::<Result<Vec<T>>>()
        .map(Some)
}

fn parse_opt<T: FromStr<Err = String>>(field: &str, value: &Option<String>) -> Result<Option<T>> {
    value.as_deref().map(|v| parse_value(field, v)).transpose()
}

/// Merges flags and the optional configuration file.
pub fn resolve(cli: Cli) -> Result<Settings> {
    let task = cli.command.task();
    let file = match &cli.flags.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(t) = parse_opt::<Task>("task", &file.task)? {
        if t != task {
            return Err(CliError::Usage(format!(
                "config file is for `{t}` but the command is `{task}`"
            )));
        }
    }
    let flags = cli.flags;
    let (active_flags, verify_flags) = match cli.command {
        Command::Active(a) => (a, VerifyFlags::default()),
        Command::Verify(v) => (ActiveFlags::default(), v),
        _ => (ActiveFlags::default(), VerifyFlags::default()),
    };

    let rule_choices = parse_list::<RuleChoice>("rule", &file.rule)?.unwrap_or(flags.rule);
    let mut active = ActiveSettings::default();
    let af = &file.active;
    let defaults = LearnerConfig::default();
    active.learner = LearnerConfig {
        n_trees: af.trees.or(active_flags.trees).unwrap_or(defaults.n_trees),
        depth_cap: af
            .depth_cap
            .or(active_flags.depth_cap)
            .unwrap_or(defaults.depth_cap),
        min_leaf: af
            .min_leaf
            .or(active_flags.min_leaf)
            .unwrap_or(defaults.min_leaf),
        alpha: af.alpha.or(active_flags.alpha).unwrap_or(defaults.alpha),
        max_features: af
            .max_features
            .or(active_flags.max_features)
            .or(defaults.max_features),
    };
    active.rounds = af.rounds.or(active_flags.rounds).unwrap_or(active.rounds);
    active.batch = af.batch.or(active_flags.batch).unwrap_or(active.batch);
    active.n_labeled = af
        .n_labeled
        .or(active_flags.n_labeled)
        .unwrap_or(active.n_labeled);
    active.n_gap = af.n_gap.or(active_flags.n_gap).unwrap_or(active.n_gap);
    active.strategies = parse_list("active.strategy", &af.strategy)?
        .or((!active_flags.strategy.is_empty()).then_some(active_flags.strategy));

    Ok(Settings {
        task,
        input: file.input.or(flags.input),
        input_ood: file.input_ood.or(flags.input_ood),
        rules: expand_rules(&rule_choices),
        component: parse_opt("component", &file.component)?.or(flags.component),
        task_rule: parse_opt("task_rule", &file.task_rule)?
            .or(flags.task_rule)
            .unwrap_or(ScoringRule::ZeroOne),
        direction: parse_opt("direction", &file.direction)?
            .or(flags.direction)
            .unwrap_or_default(),
        renormalize: file.renormalize.unwrap_or(flags.renormalize),
        seed: file.seed.or(flags.seed),
        out_dir: file.out_dir.or(flags.out_dir),
        threads: file.threads.or(flags.threads),
        active,
        suites: parse_list("verify.suite", &file.verify.suite)?.unwrap_or(verify_flags.suite),
        fault: verify_flags.inject_fault,
    })
}
