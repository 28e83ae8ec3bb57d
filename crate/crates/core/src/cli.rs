//! The `qcoin` experiment harness.
//!
//! Every subcommand writes one report, either JSON or CSV. The report opens
//! with the canonical command line that produced it; running that command
//! again (adding `--out` if wanted) reproduces the report byte for byte.
//! Output-only flags (`--out`, `--save-scheme`, `--record`,
//! `--valid-list-out`) are left out of the canonical command.
//!
//! Exit codes: 0 success, 2 validation error, 3 experiment failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bills::{self, BillScheme, BillVerifier, EstimationMode, Submission};
use crate::blindverify::{
    self, parse_transcript_header, Bank, BlindOptions, Channel, Merchant, ProtocolOutcome,
};
use crate::coin::{self, Coin, CoinScheme};
use crate::forgery::{self, Bb84CoinSpec, ForgeBoundParams, ForgerReport, SplitStrategy};
use crate::qstate::{QuantumState, Seed, Stream, MAX_QUBITS};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcoin", version, about = "Quantum money experiments on a statevector simulator")]
pub struct Cli {
    /// Root seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include the coin scheme's secret state in the report.
    #[arg(long, global = true)]
    pub reveal_secret: bool,
    /// Use a saved coin scheme instead of deriving one from the seed.
    #[arg(long, global = true)]
    pub load_scheme: Option<PathBuf>,
    /// Save the coin scheme used by the run.
    #[arg(long, global = true)]
    pub save_scheme: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mint one coin per fresh scheme and verify it.
    MintVerify(MintVerifyArgs),
    /// Pass one coin through repeated verifications.
    TransferChain(TransferChainArgs),
    /// Verify noisy copies of the coin state.
    Robustness(RobustnessArgs),
    /// Bank guesses which user spent a coin.
    Anonymity(AnonymityArgs),
    /// Measure-and-retry forger.
    ForgeRetry(ForgeRetryArgs),
    /// Amplitude-amplification forger.
    ForgeGrover(ForgeGroverArgs),
    /// Grid of the query lower bound.
    BoundTable(BoundTableArgs),
    /// Amplification queries against sqrt(2^n).
    Scaling(ScalingArgs),
    /// Spec-recovery attack on BB84-style coins.
    Bb84Attack(Bb84Args),
    /// Mint bills and publish their k values
    BillsMint(BillsArgs),
    /// Mint bills and verify each one
    BillsVerify(BillsArgs),
    /// Submit counterfeit bills claiming a published k
    BillsForge(BillsForgeArgs),
    /// Pad-assisted verification with a minimal bank step.
    BlindVerify(FlowArgs),
    /// Coin sent to the bank and back.
    OnlineVerify(FlowArgs),
    /// Key-averaged views of the blind flow under two schemes.
    BlindnessCheck(BlindnessArgs),
    /// Bank gate counts per flow.
    Workload(WorkloadArgs),
}

#[derive(Args, Debug)]
pub struct MintVerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct TransferChainArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub rounds: usize,
}

#[derive(Args, Debug)]
pub struct RobustnessArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct AnonymityArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub users: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// The bank issues each user a different state.
    #[arg(long)]
    pub cheating: bool,
}

#[derive(Args, Debug)]
pub struct ForgeRetryArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_tries: u64,
}

#[derive(Args, Debug)]
pub struct ForgeGroverArgs {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Genuine coins the forger holds.
    #[arg(long, default_value_t = 0)]
    pub coins: usize,
}

#[derive(Args, Debug)]
pub struct BoundTableArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,16")]
    pub k_values: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Even,
    Adaptive,
}

impl StrategyArg {
    fn name(self) -> &'static str {
        match self {
            StrategyArg::Even => "even",
            StrategyArg::Adaptive => "adaptive",
        }
    }
}

#[derive(Args, Debug)]
pub struct Bb84Args {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub copies: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Forged coins submitted per trial.
    #[arg(long, default_value_t = 100)]
    pub forged: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Adaptive)]
    pub strategy: StrategyArg,
}

#[derive(Args, Debug)]
pub struct BillsArgs {
    #[arg(long, default_value_t = 8)]
    pub m: u64,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Accept readouts within half a step instead of requiring m | 2^t.
    #[arg(long)]
    pub windowed: bool,
    /// Write the published parameter list here.
    #[arg(long)]
    pub valid_list_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SubmissionArg {
    Haar,
    Eigenstate,
    WrongEigenstate,
}

impl SubmissionArg {
    fn name(self) -> &'static str {
        match self {
            SubmissionArg::Haar => "haar",
            SubmissionArg::Eigenstate => "eigenstate",
            SubmissionArg::WrongEigenstate => "wrong-eigenstate",
        }
    }
}

#[derive(Args, Debug)]
pub struct BillsForgeArgs {
    #[arg(long, default_value_t = 8)]
    pub m: u64,
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    /// Parameter the forged bill claims.
    #[arg(long, default_value_t = 0)]
    pub k: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = SubmissionArg::Haar)]
    pub submission: SubmissionArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoinKind {
    Valid,
    Orthogonal,
    Perturbed,
    /// Cycles valid, orthogonal, perturbed by run index.
    Mixed,
}

impl CoinKind {
    fn name(self) -> &'static str {
        match self {
            CoinKind::Valid => "valid",
            CoinKind::Orthogonal => "orthogonal",
            CoinKind::Perturbed => "perturbed",
            CoinKind::Mixed => "mixed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        <CoinKind as ValueEnum>::from_str(s, false).ok()
    }
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = CoinKind::Valid)]
    pub coin: CoinKind,
    /// Noise strength for perturbed coins.
    #[arg(long, default_value_t = 0.3)]
    pub epsilon: f64,
    /// Record the sender as anonymous in transcripts.
    #[arg(long)]
    pub anonymous: bool,
    /// Write the run transcripts here.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Re-run the transcripts in this file and compare byte for byte.
    #[arg(long, conflicts_with = "record")]
    pub replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BlindnessArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Args, Debug)]
pub struct WorkloadArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Failure(m) => write!(f, "experiment failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Format(_) | Error::Io(_) => CliError::Validation(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn ensure(cond: bool, msg: impl Into<String>) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation(msg.into()))
    }
}

fn check_n(n: usize) -> CliResult<()> {
    ensure((1..=MAX_QUBITS).contains(&n), format!("n = {n} outside 1..={MAX_QUBITS}"))
}

fn check_count(name: &str, v: u64) -> CliResult<()> {
    ensure(v >= 1, format!("{name} must be at least 1"))
}

fn check_p(p: f64) -> CliResult<()> {
    ensure(p > 0.0 && p <= 1.0, format!("p = {p} outside (0, 1]"))
}

fn check_epsilon(e: f64) -> CliResult<()> {
    ensure((0.0..=1.0).contains(&e), format!("epsilon = {e} outside [0, 1]"))
}

/// Ordered flag/value pairs echoed into the canonical command and config.
#[derive(Default)]
struct Echo(Vec<(&'static str, Option<String>)>);

impl Echo {
    fn val(mut self, name: &'static str, v: impl ToString) -> Self {
        self.0.push((name, Some(v.to_string())));
        self
    }

    fn flag(mut self, name: &'static str, on: bool) -> Self {
        if on {
            self.0.push((name, None));
        }
        self
    }

    fn opt_path(self, name: &'static str, p: &Option<PathBuf>) -> Self {
        match p {
            Some(p) => self.val(name, p.display()),
            None => self,
        }
    }
}

/// A finished report before rendering.
struct Report {
    summary: Value,
    notes: Vec<String>,
    columns: Vec<&'static str>,
    records: Vec<Vec<Value>>,
    secret: Option<Value>,
}

impl Report {
    fn new(summary: Value) -> Self {
        Report { summary, notes: Vec::new(), columns: Vec::new(), records: Vec::new(), secret: None }
    }

    fn table(mut self, columns: &[&'static str], records: Vec<Vec<Value>>) -> Self {
        self.columns = columns.to_vec();
        self.records = records;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

struct Context<'a> {
    cli: &'a Cli,
    seed: Seed,
}

impl Context<'_> {
    /// The coin scheme for single-scheme subcommands.
    fn scheme(&self, n: usize) -> CliResult<CoinScheme> {
        let scheme = match &self.cli.load_scheme {
            Some(path) => {
                let s = CoinScheme::from_fixture_bytes(&read(path)?)?;
                ensure(s.n() == n, format!("loaded scheme has n = {}, run asks for n = {n}", s.n()))?;
                s
            }
            None => CoinScheme::new(n, self.seed)?,
        };
        if let Some(path) = &self.cli.save_scheme {
            write(path, &scheme.to_fixture_bytes())?;
        }
        Ok(scheme)
    }

    fn secret(&self, scheme: &CoinScheme) -> Option<Value> {
        self.cli.reveal_secret.then(|| state_json(scheme.reveal_secret()))
    }
}

fn state_json(s: &QuantumState) -> Value {
    Value::Array(s.amplitudes().iter().map(|a| json!([a.re, a.im])).collect())
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::MintVerify(_) => "mint-verify",
            Command::TransferChain(_) => "transfer-chain",
            Command::Robustness(_) => "robustness",
            Command::Anonymity(_) => "anonymity",
            Command::ForgeRetry(_) => "forge-retry",
            Command::ForgeGrover(_) => "forge-grover",
            Command::BoundTable(_) => "bound-table",
            Command::Scaling(_) => "scaling",
            Command::Bb84Attack(_) => "bb84-attack",
            Command::BillsMint(_) => "bills-mint",
            Command::BillsVerify(_) => "bills-verify",
            Command::BillsForge(_) => "bills-forge",
            Command::BlindVerify(_) => "blind-verify",
            Command::OnlineVerify(_) => "online-verify",
            Command::BlindnessCheck(_) => "blindness-check",
            Command::Workload(_) => "workload",
        }
    }

    fn echo(&self) -> Echo {
        let e = Echo::default();
        match self {
            Command::MintVerify(a) => e.val("n", a.n).val("trials", a.trials),
            Command::TransferChain(a) => e.val("n", a.n).val("rounds", a.rounds),
            Command::Robustness(a) => e.val("n", a.n).val("epsilon", a.epsilon).val("trials", a.trials),
            Command::Anonymity(a) => {
                e.val("n", a.n).val("users", a.users).val("trials", a.trials).flag("cheating", a.cheating)
            }
            Command::ForgeRetry(a) => e.val("n", a.n).val("trials", a.trials).val("max-tries", a.max_tries),
            Command::ForgeGrover(a) => e.val("n", a.n).val("p", a.p).val("coins", a.coins),
            Command::BoundTable(a) => {
                let ks: Vec<String> = a.k_values.iter().map(u64::to_string).collect();
                e.val("n-min", a.n_min).val("n-max", a.n_max).val("k-values", ks.join(",")).val("p", a.p)
            }
            Command::Scaling(a) => e.val("n-min", a.n_min).val("n-max", a.n_max).val("p", a.p),
            Command::Bb84Attack(a) => e
                .val("n", a.n)
                .val("copies", a.copies)
                .val("trials", a.trials)
                .val("forged", a.forged)
                .val("strategy", a.strategy.name()),
            Command::BillsMint(a) | Command::BillsVerify(a) => {
                e.val("m", a.m).val("t", a.t).val("count", a.count).flag("windowed", a.windowed)
            }
            Command::BillsForge(a) => e
                .val("m", a.m)
                .val("t", a.t)
                .val("k", a.k)
                .val("trials", a.trials)
                .val("submission", a.submission.name()),
            // A replay takes every run parameter from the recording.
            Command::BlindVerify(a) | Command::OnlineVerify(a) if a.replay.is_some() => e.opt_path("replay", &a.replay),
            Command::BlindVerify(a) | Command::OnlineVerify(a) => e
                .val("n", a.n)
                .val("runs", a.runs)
                .val("coin", a.coin.name())
                .val("epsilon", a.epsilon)
                .flag("anonymous", a.anonymous),
            Command::BlindnessCheck(a) => e.val("n", a.n).val("runs", a.runs),
            Command::Workload(a) => e.val("n-min", a.n_min).val("n-max", a.n_max),
        }
    }
}

impl Cli {
    /// `qcoin --seed S --format F [...] <subcommand> [...]`.
    pub fn canonical_command(&self) -> String {
        let mut parts = vec![
            "qcoin".to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--format".into(),
            self.format.name().into(),
        ];
        if self.reveal_secret {
            parts.push("--reveal-secret".into());
        }
        if let Some(p) = &self.load_scheme {
            parts.push("--load-scheme".into());
            parts.push(p.display().to_string());
        }
        parts.push(self.command.name().into());
        for (name, value) in self.command.echo().0 {
            parts.push(format!("--{name}"));
            parts.extend(value);
        }
        parts.join(" ")
    }

    fn config(&self) -> Value {
        let mut m = Map::new();
        m.insert("subcommand".into(), json!(self.command.name()));
        for (name, value) in self.command.echo().0 {
            let v = match value {
                None => json!(true),
                Some(v) => match (v.parse::<u64>(), v.parse::<f64>()) {
                    (Ok(i), _) => json!(i),
                    (_, Ok(f)) => json!(f),
                    _ => Value::String(v),
                },
            };
            m.insert(name.replace('-', "_"), v);
        }
        if let Some(p) = &self.load_scheme {
            m.insert("load_scheme".into(), json!(p.display().to_string()));
        }
        Value::Object(m)
    }
}

/// Parses `args`, runs the experiment, writes the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match write(path, text.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("qcoin: {e}");
                    e.exit_code()
                }
            },
            None => {
                print!("{text}");
                EXIT_OK
            }
        },
        Err(e) => {
            eprintln!("qcoin: {e}");
            e.exit_code()
        }
    }
}

/// Runs the parsed command and renders its report.
pub fn run(cli: &Cli) -> CliResult<String> {
    let ctx = Context { cli, seed: Seed(cli.seed) };
    let report = match &cli.command {
        Command::MintVerify(a) => mint_verify(&ctx, a)?,
        Command::TransferChain(a) => transfer_chain(&ctx, a)?,
        Command::Robustness(a) => robustness(&ctx, a)?,
        Command::Anonymity(a) => anonymity(&ctx, a)?,
        Command::ForgeRetry(a) => forge_retry(&ctx, a)?,
        Command::ForgeGrover(a) => forge_grover(&ctx, a)?,
        Command::BoundTable(a) => emit_bound_table(a)?,
        Command::Scaling(a) => scaling(&ctx, a)?,
        Command::Bb84Attack(a) => bb84(&ctx, a)?,
        Command::BillsMint(a) => bills_mint(&ctx, a)?,
        Command::BillsVerify(a) => bills_verify(&ctx, a)?,
        Command::BillsForge(a) => bills_forge(&ctx, a)?,
        Command::BlindVerify(a) => flow(&ctx, a, blindverify::Flow::Blind)?,
        Command::OnlineVerify(a) => flow(&ctx, a, blindverify::Flow::Online)?,
        Command::BlindnessCheck(a) => blindness(&ctx, a)?,
        Command::Workload(a) => workload(&ctx, a)?,
    };
    render(cli, report)
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render(cli: &Cli, report: Report) -> CliResult<String> {
    let command = cli.canonical_command();
    match cli.format {
        Format::Json => {
            let records: Vec<Value> = report
                .records
                .iter()
                .map(|row| {
                    Value::Object(report.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect())
                })
                .collect();
            let mut top = Map::new();
            top.insert("command".into(), json!(command));
            top.insert("seed".into(), json!(cli.seed));
            top.insert("config".into(), cli.config());
            if !report.notes.is_empty() {
                top.insert("notes".into(), json!(report.notes));
            }
            top.insert("summary".into(), report.summary);
            top.insert("records".into(), Value::Array(records));
            if let Some(secret) = report.secret {
                top.insert("secret".into(), secret);
            }
            let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("json renders");
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut head = format!("# command: {command}\n# seed: {}\n# config: {}\n", cli.seed, cli.config());
            for note in &report.notes {
                head.push_str(&format!("# note: {note}\n"));
            }
            head.push_str(&format!("# summary: {}\n", report.summary));
            if let Some(secret) = &report.secret {
                head.push_str(&format!("# secret: {secret}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.columns).map_err(|e| CliError::Failure(e.to_string()))?;
            for row in &report.records {
                w.write_record(row.iter().map(cell)).map_err(|e| CliError::Failure(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
            Ok(head + &String::from_utf8(body).expect("csv output is utf-8"))
        }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn mint_verify(ctx: &Context<'_>, a: &MintVerifyArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_count("trials", a.trials as u64)?;
    ensure(ctx.cli.load_scheme.is_none(), "mint-verify draws a fresh scheme per trial")?;
    let rows = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = ctx.seed.trial(i);
            let scheme = CoinScheme::new(a.n, seed)?;
            let minted = scheme.mint()?;
            let r = coin::verify(&scheme.oracle(), &minted.state, &mut seed.rng(Stream::Measurement))?;
            Ok((r.accepted, r.post_state.fidelity(scheme.reveal_secret())?))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let accepts = rows.iter().filter(|r| r.0).count();
    let min_fid = rows.iter().filter(|r| r.0).map(|r| r.1).reduce(f64::min);
    let summary = json!({
        "trials": a.trials,
        "accepts": accepts,
        "accept_rate": accepts as f64 / a.trials as f64,
        "min_post_fidelity_given_accept": min_fid,
    });
    let records = rows.iter().enumerate().map(|(i, r)| vec![json!(i), json!(r.0), json!(r.1)]).collect();
    Ok(Report::new(summary).table(&["trial", "accepted", "post_fidelity"], records))
}

fn transfer_chain(ctx: &Context<'_>, a: &TransferChainArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_count("rounds", a.rounds as u64)?;
    let scheme = ctx.scheme(a.n)?;
    let minted = scheme.mint()?;
    let r = coin::transfer_chain(&scheme, minted, a.rounds, ctx.seed)?;
    let summary = json!({
        "rounds": r.rounds,
        "accepts": r.accepts,
        "first_accept": r.first_accept,
        "final_fidelity": r.final_fidelity,
    });
    let records = r.outcomes.iter().enumerate().map(|(i, o)| vec![json!(i + 1), json!(o)]).collect();
    let mut report = Report::new(summary).table(&["round", "accepted"], records);
    report.secret = ctx.secret(&scheme);
    Ok(report)
}

fn robustness(ctx: &Context<'_>, a: &RobustnessArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_epsilon(a.epsilon)?;
    check_count("trials", a.trials as u64)?;
    let scheme = ctx.scheme(a.n)?;
    let r = coin::robustness_experiment(&scheme, a.epsilon, a.trials, ctx.seed)?;
    let row = vec![
        json!(r.epsilon),
        json!(r.trials),
        json!(r.passes),
        json!(r.pass_rate),
        json!(r.mean_post_fidelity_given_pass),
        json!(r.min_post_fidelity_given_pass),
    ];
    let cols = ["epsilon", "trials", "passes", "pass_rate", "mean_post_fidelity_given_pass", "min_post_fidelity_given_pass"];
    let mut report = Report::new(to_value(&r)).table(&cols, vec![row]);
    report.secret = ctx.secret(&scheme);
    Ok(report)
}

fn anonymity(ctx: &Context<'_>, a: &AnonymityArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_count("trials", a.trials as u64)?;
    ensure(a.users >= 2, "users must be at least 2")?;
    let r = coin::anonymity_experiment(!a.cheating, a.n, a.users, a.trials, ctx.seed)?;
    let row = vec![json!(r.honest), json!(r.users), json!(r.trials), json!(r.correct), json!(r.accuracy), json!(r.spend_pass_rate)];
    let cols = ["honest", "users", "trials", "correct", "accuracy", "spend_pass_rate"];
    Ok(Report::new(to_value(&r)).table(&cols, vec![row]))
}

fn forger_rows(reports: &[ForgerReport]) -> Vec<Vec<Value>> {
    reports
        .iter()
        .map(|r| {
            vec![
                json!(r.n),
                json!(r.k),
                json!(r.target_p),
                json!(r.queries),
                json!(r.achieved_overlap),
                json!(r.succeeded),
                json!(r.seed),
            ]
        })
        .collect()
}

fn forge_retry(ctx: &Context<'_>, a: &ForgeRetryArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_count("trials", a.trials)?;
    check_count("max-tries", a.max_tries)?;
    let scheme = ctx.scheme(a.n)?;
    let reports = forgery::retry_forger_trials(&scheme, a.trials, a.max_tries, ctx.seed)?;
    let successes = reports.iter().filter(|r| r.succeeded).count();
    let summary = json!({
        "runs": a.trials,
        "successes": successes,
        "mean_tries": mean(reports.iter().map(|r| r.queries as f64)),
        "expected_tries": (a.n as f64).exp2(),
    });
    let mut report = Report::new(summary).table(&ForgerReport::CSV_HEADER, forger_rows(&reports));
    report.secret = ctx.secret(&scheme);
    Ok(report)
}

fn forge_grover(ctx: &Context<'_>, a: &ForgeGroverArgs) -> CliResult<Report> {
    check_n(a.n)?;
    check_p(a.p)?;
    let scheme = ctx.scheme(a.n)?;
    let coins = (0..a.coins).map(|_| scheme.mint()).collect::<crate::Result<Vec<Coin>>>()?;
    let r = forgery::run_grover_forger_with_coins(&scheme, coins, a.p, ctx.seed)?;
    let summary = json!({
        "iterations": forgery::amplification_iterations(a.n, a.p)?,
        "queries": r.queries,
        "achieved_overlap": r.achieved_overlap,
        "predicted_overlap": forgery::amplification_overlap(
            forgery::amplification_angle(a.n),
            forgery::amplification_iterations(a.n, a.p)?,
        ),
        "succeeded": r.succeeded,
    });
    let mut report = Report::new(summary).table(&ForgerReport::CSV_HEADER, forger_rows(&[r]));
    report.secret = ctx.secret(&scheme);
    Ok(report)
}

/// Grid of `theoretical_bound` over `n_min..=n_max` and the listed `k`.
fn emit_bound_table(a: &BoundTableArgs) -> CliResult<Report> {
    ensure(a.n_min >= 1 && a.n_min <= a.n_max && a.n_max <= 64, "need 1 ≤ n-min ≤ n-max ≤ 64")?;
    ensure(!a.k_values.is_empty(), "k-values must not be empty")?;
    check_p(a.p)?;
    let mut records = Vec::new();
    for n in a.n_min..=a.n_max {
        for &k in &a.k_values {
            let bound = forgery::theoretical_bound(ForgeBoundParams::new(n, k, a.p)?);
            records.push(vec![json!(n), json!(k), json!(a.p), json!(bound)]);
        }
    }
    let summary = json!({ "rows": records.len() });
    Ok(Report::new(summary)
        .note(format!("bound convention: {}", forgery::BOUND_CONVENTION))
        .table(&["n", "k", "p", "bound"], records))
}

fn scaling(ctx: &Context<'_>, a: &ScalingArgs) -> CliResult<Report> {
    ensure(a.n_min >= 1 && a.n_min <= a.n_max && a.n_max <= 14, "need 1 ≤ n-min ≤ n-max ≤ 14")?;
    check_p(a.p)?;
    let rows = forgery::query_scaling_experiment(a.n_min..=a.n_max, a.p, ctx.seed)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let m = mean(ratios.iter().copied()).unwrap_or(0.0);
    let max_dev = ratios.iter().map(|r| ((r - m) / m).abs()).fold(0.0, f64::max);
    let summary = json!({
        "mean_ratio": m,
        "min_ratio": ratios.iter().copied().fold(f64::INFINITY, f64::min),
        "max_ratio": ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "max_relative_deviation": max_dev,
    });
    let records = rows
        .iter()
        .map(|r| {
            vec![
                json!(r.n),
                json!(r.queries),
                json!(r.sqrt_dim),
                json!(r.ratio),
                json!(r.achieved_overlap),
                json!(r.predicted_overlap),
                json!(r.bound_k0),
            ]
        })
        .collect();
    let cols = ["n", "queries", "sqrt_dim", "ratio", "achieved_overlap", "predicted_overlap", "bound_k0"];
    Ok(Report::new(summary).table(&cols, records))
}

fn bb84(ctx: &Context<'_>, a: &Bb84Args) -> CliResult<Report> {
    check_n(a.n)?;
    check_count("trials", a.trials as u64)?;
    check_count("forged", a.forged as u64)?;
    ensure(a.copies >= 2, "copies must be at least 2")?;
    let strategy = match a.strategy {
        StrategyArg::Even => SplitStrategy::Even,
        StrategyArg::Adaptive => SplitStrategy::Adaptive,
    };
    let rows = (0..a.trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = ctx.seed.trial(i);
            let spec = Bb84CoinSpec::random(a.n, &mut seed.rng(Stream::Key))?;
            forgery::bb84_attack(&spec, a.copies, strategy, a.forged, seed)
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let successes = rows.iter().filter(|r| r.success).count();
    let summary = json!({
        "trials": a.trials,
        "successes": successes,
        "success_rate": successes as f64 / a.trials as f64,
        "mean_forged_pass_rate": mean(rows.iter().map(|r| r.forged_pass_rate)),
        "wrong_positions": rows.iter().map(|r| r.wrong_positions).sum::<usize>(),
    });
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vec![json!(i), json!(r.success), json!(r.wrong_positions), json!(r.forged_pass_rate)])
        .collect();
    Ok(Report::new(summary).table(&["trial", "success", "wrong_positions", "forged_pass_rate"], records))
}

fn bill_scheme(ctx: &Context<'_>, m: u64, t: usize, windowed: bool) -> CliResult<BillScheme> {
    let mode = if windowed { EstimationMode::Windowed } else { EstimationMode::Exact };
    Ok(BillScheme::with_mode(m, t, mode, ctx.seed)?)
}

fn save_valid_list(scheme: &BillScheme, path: &Option<PathBuf>) -> CliResult<()> {
    match path {
        Some(p) => write(p, scheme.valid_list().to_text().as_bytes()),
        None => Ok(()),
    }
}

fn bills_mint(ctx: &Context<'_>, a: &BillsArgs) -> CliResult<Report> {
    check_count("count", a.count as u64)?;
    let scheme = bill_scheme(ctx, a.m, a.t, a.windowed)?;
    let mut rng = ctx.seed.rng(Stream::Trial);
    let mut records = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let bill = bills::mint_bill(&scheme, &mut rng)?;
        let fid = bill.state.fidelity(&scheme.eigenstate(bill.k)?)?;
        records.push(vec![json!(i), json!(bill.k), json!(fid)]);
    }
    save_valid_list(&scheme, &a.valid_list_out)?;
    let summary = json!({
        "count": a.count,
        "published": scheme.valid_list().snapshot(),
        "label_width": scheme.label_width(),
    });
    Ok(Report::new(summary).table(&["index", "k", "eigenstate_fidelity"], records))
}

fn bills_verify(ctx: &Context<'_>, a: &BillsArgs) -> CliResult<Report> {
    check_count("count", a.count as u64)?;
    let scheme = bill_scheme(ctx, a.m, a.t, a.windowed)?;
    let mut rng = ctx.seed.rng(Stream::Trial);
    let minted = (0..a.count).map(|_| bills::mint_bill(&scheme, &mut rng)).collect::<crate::Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(a.count);
    let (mut accepted, mut reverified, mut tamper_rejected) = (0, 0, 0);
    for (i, bill) in minted.iter().enumerate() {
        let first = bills::verify_bill(&scheme, bill, &mut rng)?;
        let again = bills::verify_bill(&scheme, &first.post_bill, &mut rng)?;
        let tampered = bills::Bill { k: (bill.k + 1) % scheme.m(), state: bill.state.clone() };
        let tamper = bills::verify_bill(&scheme, &tampered, &mut rng)?;
        accepted += first.accepted as usize;
        reverified += again.accepted as usize;
        tamper_rejected += !tamper.accepted as usize;
        records.push(vec![json!(i), json!(bill.k), json!(first.accepted), json!(again.accepted), json!(!tamper.accepted)]);
    }
    save_valid_list(&scheme, &a.valid_list_out)?;
    let n = a.count as f64;
    let summary = json!({
        "count": a.count,
        "accept_rate": accepted as f64 / n,
        "reverify_rate": reverified as f64 / n,
        "tamper_reject_rate": tamper_rejected as f64 / n,
    });
    Ok(Report::new(summary).table(&["index", "k", "accepted", "reverified", "tampered_rejected"], records))
}

fn bills_forge(ctx: &Context<'_>, a: &BillsForgeArgs) -> CliResult<Report> {
    check_count("trials", a.trials as u64)?;
    let scheme = bill_scheme(ctx, a.m, a.t, false)?;
    ensure(a.k < a.m, format!("k = {} outside [0, {})", a.k, a.m))?;
    // The bank has issued a bill with the claimed parameter.
    scheme.valid_list().insert(a.k);
    let submission = match a.submission {
        SubmissionArg::Haar => Submission::HaarRandom,
        SubmissionArg::Eigenstate => Submission::Fixed(scheme.eigenstate(a.k)?),
        SubmissionArg::WrongEigenstate => Submission::Fixed(scheme.eigenstate((a.k + 1) % a.m)?),
    };
    let r = bills::forge_bill_attempt(&BillVerifier::new(&scheme), a.k, &submission, a.trials, ctx.seed)?;
    let row = vec![json!(r.claimed_k), json!(r.trials), json!(r.passes), json!(r.pass_rate)];
    Ok(Report::new(to_value(&r)).table(&["claimed_k", "trials", "passes", "pass_rate"], vec![row]))
}

fn flow_coin(scheme: &CoinScheme, kind: CoinKind, run: usize, epsilon: f64, seed: Seed) -> crate::Result<(CoinKind, Coin)> {
    let kind = match kind {
        CoinKind::Mixed => [CoinKind::Valid, CoinKind::Orthogonal, CoinKind::Perturbed][run % 3],
        k => k,
    };
    let psi = scheme.reveal_secret();
    let state = match kind {
        CoinKind::Valid | CoinKind::Mixed => psi.clone(),
        CoinKind::Orthogonal => psi.orthogonal_partner()?,
        CoinKind::Perturbed => psi.perturb(epsilon, &mut seed.rng(Stream::Noise))?,
    };
    Ok((kind, Coin::external(state)))
}

fn run_flow(
    scheme: &CoinScheme,
    which: blindverify::Flow,
    coin: Coin,
    seed: Seed,
    anonymous: bool,
) -> crate::Result<ProtocolOutcome> {
    let bank = Bank::new(scheme);
    let merchant = Merchant { coin };
    let mut channel = Channel::new();
    match which {
        blindverify::Flow::Online => {
            let mut out = blindverify::run_online_verification(&bank, merchant, &mut channel, seed)?;
            out.transcript.anonymous_sender = anonymous;
            Ok(out)
        }
        blindverify::Flow::Blind => {
            let options = BlindOptions { anonymous_sender: anonymous, ..Default::default() };
            blindverify::run_blind_verification_with(&bank, merchant, &mut channel, seed, &options)
        }
    }
}

/// Header fields a replay needs to re-run a recorded transcript set.
fn replay_params(text: &str, which: blindverify::Flow) -> CliResult<(usize, Seed, usize, CoinKind, f64, bool)> {
    let h = parse_transcript_header(text)?;
    let get = |k: &str| h.get(k).ok_or_else(|| CliError::Validation(format!("transcript header lacks {k}")));
    let bad = |k: &str| CliError::Validation(format!("unreadable {k} in transcript header"));
    ensure(get("flow")? == which.name(), "transcript was recorded for the other flow")?;
    let n = get("n")?.parse().map_err(|_| bad("n"))?;
    let base = get("base_seed")?.parse().map_err(|_| bad("base_seed"))?;
    let runs = get("runs")?.parse().map_err(|_| bad("runs"))?;
    let coin = CoinKind::parse(get("coin")?).ok_or_else(|| bad("coin"))?;
    let eps = get("epsilon")?.parse().map_err(|_| bad("epsilon"))?;
    let anonymous = get("anonymous")?.parse().map_err(|_| bad("anonymous"))?;
    Ok((n, Seed(base), runs, coin, eps, anonymous))
}

fn flow(ctx: &Context<'_>, a: &FlowArgs, which: blindverify::Flow) -> CliResult<Report> {
    let recorded = a.replay.as_ref().map(|p| read(p)).transpose()?;
    let recorded = recorded
        .map(|b| String::from_utf8(b).map_err(|_| CliError::Validation("transcript is not utf-8".into())))
        .transpose()?;
    let (n, base, runs, kind, epsilon, anonymous) = match &recorded {
        Some(text) => replay_params(text, which)?,
        None => (a.n, ctx.seed, a.runs, a.coin, a.epsilon, a.anonymous),
    };
    check_n(n)?;
    check_count("runs", runs as u64)?;
    check_epsilon(epsilon)?;
    let scheme = match &ctx.cli.load_scheme {
        Some(_) => ctx.scheme(n)?,
        None => {
            let s = CoinScheme::new(n, base)?;
            if let Some(path) = &ctx.cli.save_scheme {
                write(path, &s.to_fixture_bytes())?;
            }
            s
        }
    };
    let outcomes = (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = base.trial(i as u64);
            let (run_kind, coin) = flow_coin(&scheme, kind, i, epsilon, seed)?;
            let mut out = run_flow(&scheme, which, coin, seed, anonymous)?;
            let t = &mut out.transcript;
            t.context.insert("base_seed".into(), base.0.to_string());
            t.context.insert("runs".into(), runs.to_string());
            t.context.insert("run".into(), i.to_string());
            t.context.insert("coin".into(), kind.name().into());
            t.context.insert("run_coin".into(), run_kind.name().into());
            t.context.insert("epsilon".into(), epsilon.to_string());
            Ok((run_kind, out))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let transcripts: String = outcomes.iter().map(|(_, o)| o.transcript.to_text()).collect();
    if let Some(path) = &a.record {
        write(path, transcripts.as_bytes())?;
    }
    let replay_identical = match &recorded {
        Some(text) if *text != transcripts => {
            return Err(CliError::Failure("replayed transcripts differ from the recording".into()))
        }
        Some(_) => Some(true),
        None => None,
    };
    let psi = scheme.reveal_secret();
    let mut records = Vec::with_capacity(runs);
    let mut accepts = 0;
    for (i, (kind, out)) in outcomes.iter().enumerate() {
        let g = out.transcript.bank_gates();
        let f = out.transcript.final_step_gates();
        accepts += out.accepted as usize;
        records.push(vec![
            json!(i),
            json!(kind.name()),
            json!(out.accepted),
            json!(out.post_coin.state.fidelity(psi)?),
            json!(g.x),
            json!(g.z),
            json!(g.other),
            json!(f.x),
            json!(f.z),
            json!(out.transcript.quantum_messages()),
        ]);
    }
    let summary = json!({
        "flow": which.name(),
        "runs": runs,
        "accepts": accepts,
        "accept_rate": accepts as f64 / runs as f64,
        "replay_identical": replay_identical,
    });
    let cols = [
        "run",
        "coin",
        "accepted",
        "fidelity_to_secret",
        "bank_x",
        "bank_z",
        "bank_other",
        "final_step_x",
        "final_step_z",
        "quantum_messages",
    ];
    let mut report = Report::new(summary).table(&cols, records);
    if which == blindverify::Flow::Blind {
        report = report.note("blind flow: pad-assisted realization of the interaction contract, not a measurement-based blind computation");
    }
    report.secret = ctx.secret(&scheme);
    Ok(report)
}

fn blindness(ctx: &Context<'_>, a: &BlindnessArgs) -> CliResult<Report> {
    ensure(
        (1..=blindverify::MAX_BLINDNESS_QUBITS).contains(&a.n),
        format!("blindness check needs 1 ≤ n ≤ {}", blindverify::MAX_BLINDNESS_QUBITS),
    )?;
    ensure(ctx.cli.load_scheme.is_none(), "blindness-check derives both schemes from the seed")?;
    let scheme_a = CoinScheme::new(a.n, ctx.seed)?;
    let scheme_b = CoinScheme::new(a.n, ctx.seed.trial(u64::MAX))?;
    let r = blindverify::blindness_check(&scheme_a, &scheme_b, a.runs, ctx.seed)?;
    let summary = json!({
        "n": r.n,
        "runs": r.runs,
        "max_distance_from_mixed": r.max_distance_from_mixed,
        "max_distance_between": r.max_distance_between,
    });
    let records = r
        .entries
        .iter()
        .map(|e| {
            vec![
                json!(e.run),
                json!(e.step_label),
                json!(e.distance_a_from_mixed),
                json!(e.distance_b_from_mixed),
                json!(e.distance_between),
            ]
        })
        .collect();
    let cols = ["run", "step", "distance_a_from_mixed", "distance_b_from_mixed", "distance_between"];
    Ok(Report::new(summary).table(&cols, records))
}

fn workload(ctx: &Context<'_>, a: &WorkloadArgs) -> CliResult<Report> {
    ensure(a.n_min >= 1 && a.n_min <= a.n_max && a.n_max <= 12, "need 1 ≤ n-min ≤ n-max ≤ 12")?;
    ensure(ctx.cli.load_scheme.is_none(), "workload derives one scheme per n from the seed")?;
    let mut records = Vec::new();
    for n in a.n_min..=a.n_max {
        let scheme = CoinScheme::new(n, ctx.seed.trial(n as u64))?;
        let coin = || Coin::external(scheme.reveal_secret().clone());
        let online = run_flow(&scheme, blindverify::Flow::Online, coin(), ctx.seed, false)?;
        let blind = run_flow(&scheme, blindverify::Flow::Blind, coin(), ctx.seed, false)?;
        for row in blindverify::compare_bank_workload(&online.transcript, &blind.transcript)? {
            records.push(row.csv_record().into_iter().map(Value::String).collect());
        }
    }
    let summary = json!({ "rows": records.len() });
    Ok(Report::new(summary).table(&blindverify::WORKLOAD_HEADER, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliResult<String> {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::Validation(e.to_string()))?;
        run(&cli)
    }

    fn json_of(args: &[&str]) -> Value {
        serde_json::from_str(&run_args(args).unwrap()).unwrap()
    }

    #[test]
    fn mint_verify_example() {
        let v = json_of(&["qcoin", "mint-verify", "--n", "4", "--trials", "100", "--seed", "7"]);
        assert_eq!(v["summary"]["accept_rate"], json!(1.0));
        assert_eq!(v["command"], json!("qcoin --seed 7 --format json mint-verify --n 4 --trials 100"));
        assert_eq!(v["seed"], json!(7));
        assert!(v.get("secret").is_none());
    }

    #[test]
    fn forge_retry_example() {
        let v = json_of(&["qcoin", "forge-retry", "--n", "3", "--trials", "1000", "--seed", "7"]);
        let mean = v["summary"]["mean_tries"].as_f64().unwrap();
        // geometric with p = 1/8: sd 7.48, so 3σ over 1000 runs is ≈ 0.71
        assert!((mean - 8.0).abs() < 0.71, "mean tries {mean}");
    }

    #[test]
    fn reports_are_deterministic() {
        for args in [
            vec!["qcoin", "--seed", "3", "transfer-chain", "--rounds", "20"],
            vec!["qcoin", "--format", "csv", "bb84-attack", "--trials", "5", "--forged", "10"],
            vec!["qcoin", "blind-verify", "--runs", "6", "--coin", "mixed"],
        ] {
            assert_eq!(run_args(&args).unwrap(), run_args(&args).unwrap());
        }
    }

    #[test]
    fn bound_table_example() {
        let text = run_args(&["qcoin", "--format", "csv", "bound-table", "--n-min", "10", "--n-max", "10", "--k-values", "2"]).unwrap();
        assert!(text.contains("# note: bound convention:"));
        assert!(text.contains("k = 0 uses"));
        assert!(text.lines().any(|l| l == "10,2,1.0,14.0"), "{text}");
    }

    #[test]
    fn secret_only_on_request() {
        let hidden = run_args(&["qcoin", "forge-grover", "--n", "3"]).unwrap();
        assert!(!hidden.contains("secret"));
        let shown = json_of(&["qcoin", "--reveal-secret", "forge-grover", "--n", "3"]);
        assert_eq!(shown["secret"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn validation_errors_map_to_exit_two() {
        for args in [
            vec!["qcoin", "mint-verify", "--n", "0"],
            vec!["qcoin", "forge-grover", "--p", "1.5"],
            vec!["qcoin", "bills-mint", "--m", "3", "--t", "2"],
            vec!["qcoin", "blindness-check", "--n", "4"],
        ] {
            assert_eq!(run_args(&args).unwrap_err().exit_code(), EXIT_VALIDATION, "{args:?}");
        }
        assert_eq!(main_with_args(["qcoin", "no-such-command"]), EXIT_VALIDATION);
    }

    #[test]
    fn unwritable_output_is_a_validation_error() {
        let code = main_with_args(["qcoin", "--out", "/nonexistent-dir/x.json", "bound-table", "--n-max", "2"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn record_and_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        let p = path.to_str().unwrap();
        run_args(&["qcoin", "--seed", "4", "blind-verify", "--runs", "3", "--coin", "mixed", "--record", p]).unwrap();
        let v = json_of(&["qcoin", "blind-verify", "--replay", p]);
        assert_eq!(v["summary"]["replay_identical"], json!(true));
        let recorded = fs::read_to_string(&path).unwrap();
        fs::write(&path, recorded.replace("\tquantum\t", "\tclassical\t")).unwrap();
        assert_eq!(run_args(&["qcoin", "blind-verify", "--replay", p]).unwrap_err().exit_code(), EXIT_FAILURE);
        assert!(run_args(&["qcoin", "online-verify", "--replay", p]).is_err());
    }

    #[test]
    fn scheme_save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        let p = path.to_str().unwrap();
        let a = json_of(&["qcoin", "--seed", "9", "--save-scheme", p, "--reveal-secret", "forge-grover", "--n", "4"]);
        let b = json_of(&["qcoin", "--seed", "1", "--load-scheme", p, "--reveal-secret", "forge-grover", "--n", "4"]);
        assert_eq!(a["secret"], b["secret"]);
        assert!(run_args(&["qcoin", "--load-scheme", p, "forge-grover", "--n", "5"]).is_err());
    }
}
