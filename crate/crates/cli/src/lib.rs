//! Command-line front end: runs one sender, receiver, or attacker session
//! over TCP and writes statistics or an attack report as JSON.
//!
//! File formats are plain text. Sender inputs hold `m` lines of `n`
//! whitespace-separated hex values (`ceil(ell/8)` bytes each, LSB-first).
//! Choices hold `m` integers in `[1, n]`, whitespace-separated. Receiver
//! outputs are written one hex value per line.

use std::fs;
use std::io;
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use clap::{ArgGroup, Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use whot::adversary::full_attack;
use whot::bitops::BitVector;
use whot::otext::{run_session, SessionInput, DEFAULT_BATCH_SIZE, DEFAULT_KAPPA, DEFAULT_MU};
use whot::transport::TcpChannel;
use whot::{ChoiceVector, Error, Mode, Params, ValueTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABORT: i32 = 2;
pub const EXIT_TRANSPORT: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

const CONNECT_TIMEOUT: Duration = Duration::from_secs(20);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliRole {
    Sender,
    Receiver,
    Attacker,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    SemiHonest,
    Active,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::SemiHonest => Mode::SemiHonest,
            CliMode::Active => Mode::Active,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "whot", version, about = "1-out-of-n OT extension for short secrets")]
#[command(group(ArgGroup::new("endpoint").required(true).args(["listen", "connect"])))]
pub struct Cli {
    #[arg(long, value_enum)]
    pub role: CliRole,

    #[arg(long, value_enum, default_value = "active")]
    pub mode: CliMode,

    /// Number of OTs
    #[arg(long)]
    pub m: usize,

    /// Values per OT (a power of two, at most kappa)
    #[arg(long)]
    pub n: usize,

    /// Bit length of each sender value
    #[arg(long)]
    pub ell: usize,

    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    pub kappa: usize,

    /// Check count and padding rows [default: 96 active, 0 semi-honest]
    #[arg(long)]
    pub mu: Option<usize>,

    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,

    /// Accept one connection on host:port
    #[arg(long)]
    pub listen: Option<String>,

    /// Connect to host:port
    #[arg(long)]
    pub connect: Option<String>,

    /// Sender values; the attacker reads it as a-priori knowledge and ground truth
    #[arg(long)]
    pub input_file: Option<PathBuf>,

    /// Receiver or attacker choices
    #[arg(long)]
    pub choices_file: Option<PathBuf>,

    /// Where the receiver writes its outputs
    #[arg(long)]
    pub output_file: Option<PathBuf>,

    #[arg(long)]
    pub stats_json: Option<PathBuf>,

    /// Where the attacker writes its report (stdout if absent)
    #[arg(long)]
    pub report_json: Option<PathBuf>,

    /// Deterministic randomness, for testing only
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Cli {
    pub fn params(&self) -> Params {
        let mode = Mode::from(self.mode);
        let mu = self.mu.unwrap_or(match mode {
            Mode::Active => DEFAULT_MU,
            Mode::SemiHonest => 0,
        });
        Params {
            kappa: self.kappa,
            mu,
            m: self.m,
            n: self.n,
            ell: self.ell,
            mode,
            batch_size: self.batch_size,
        }
    }
}

/// JSON report of an attacker run.
#[derive(Clone, Debug, Serialize)]
pub struct AttackJson {
    pub s_recovered: Option<String>,
    pub queries_used: usize,
    pub inputs_matched: bool,
    pub mode_of_peer: Mode,
    pub aborted: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

/// Parses `argv` (program name first), runs the session, and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Transport(_) => EXIT_TRANSPORT,
        e if e.is_abort() => EXIT_ABORT,
        _ => EXIT_USAGE,
    }
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    let params = cli.params();
    params.validate()?;
    let mut rng = match cli.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };

    match cli.role {
        CliRole::Sender => {
            let inputs = match &cli.input_file {
                Some(p) => read_inputs(p, &params)?,
                None => ValueTable::random(params.m, params.n, params.ell, &mut rng),
            };
            let mut chan = open_channel(cli)?;
            let run = run_session(&mut chan, &params, SessionInput::Sender(&inputs), &mut rng);
            write_stats(cli, &run.stats)?;
            run.result?;
            Ok(EXIT_OK)
        }
        CliRole::Receiver => {
            let choices = load_choices(cli, &params, &mut rng)?;
            let mut chan = open_channel(cli)?;
            let run = run_session(&mut chan, &params, SessionInput::Receiver(&choices), &mut rng);
            write_stats(cli, &run.stats)?;
            let outputs = run.result?.unwrap_or_default();
            if let Some(p) = &cli.output_file {
                write_outputs(p, &outputs)?;
            }
            Ok(EXIT_OK)
        }
        CliRole::Attacker => {
            let Some(path) = &cli.input_file else {
                return Err(Failure::Usage(
                    "the attacker needs --input-file for its a-priori knowledge".into(),
                ));
            };
            let truth = read_inputs(path, &params)?;
            let choices = load_choices(cli, &params, &mut rng)?;
            let known: Vec<BitVector> = choices
                .as_slice()
                .iter()
                .enumerate()
                .map(|(i, &r)| truth.get(i, r - 1))
                .collect();
            let mut chan = open_channel(cli)?;
            let report = full_attack(&mut chan, &params, &choices, &known, &mut rng)?;
            let json = AttackJson {
                s_recovered: report.s_recovered.as_ref().map(|s| hex::encode(s.to_bytes())),
                queries_used: report.queries_used(),
                inputs_matched: report.recovered_inputs.as_ref() == Some(&truth),
                mode_of_peer: report.mode_of_peer,
                aborted: report.aborted,
            };
            let text = serde_json::to_string_pretty(&json).expect("report serializes");
            match &cli.report_json {
                Some(p) => write_file(p, &text)?,
                None => println!("{text}"),
            }
            Ok(if report.aborted { EXIT_ABORT } else { EXIT_OK })
        }
    }
}

fn load_choices(cli: &Cli, params: &Params, rng: &mut ChaCha20Rng) -> Result<ChoiceVector, Failure> {
    match &cli.choices_file {
        Some(p) => read_choices(p, params),
        None => Ok(ChoiceVector::random(params.m, params.n, rng)),
    }
}

fn open_channel(cli: &Cli) -> Result<TcpChannel, Failure> {
    let stream = if let Some(addr) = &cli.listen {
        let listener = TcpListener::bind(addr).map_err(Error::Transport)?;
        listener.accept().map_err(Error::Transport)?.0
    } else {
        let addr = cli.connect.as_deref().expect("endpoint group is required");
        connect_with_retry(addr)?
    };
    Ok(TcpChannel::from_tcp(stream).map_err(Error::Transport)?)
}

fn connect_with_retry(addr: &str) -> Result<TcpStream, Failure> {
    let deadline = Instant::now() + CONNECT_TIMEOUT;
    loop {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() < deadline && retryable(&e) => {
                thread::sleep(Duration::from_millis(50));
            }
            Err(e) => return Err(Error::Transport(e).into()),
        }
    }
}

fn retryable(e: &io::Error) -> bool {
    matches!(
        e.kind(),
        io::ErrorKind::ConnectionRefused | io::ErrorKind::ConnectionReset | io::ErrorKind::TimedOut
    )
}

fn write_stats(cli: &Cli, stats: &whot::stats::TranscriptStats) -> Result<(), Failure> {
    if let Some(p) = &cli.stats_json {
        write_file(p, &stats.to_json())?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses a sender input file.
pub fn parse_inputs(text: &str, params: &Params) -> Result<ValueTable, String> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != params.m {
        return Err(format!("{} input lines, expected {}", lines.len(), params.m));
    }
    let mut table = ValueTable::zeros(params.m, params.n, params.ell);
    for (i, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != params.n {
            return Err(format!("line {}: {} values, expected {}", i + 1, fields.len(), params.n));
        }
        for (j, f) in fields.iter().enumerate() {
            let v = parse_value(f, params.ell).map_err(|e| format!("line {}: {e}", i + 1))?;
            table.set(i, j, &v).map_err(|e| e.to_string())?;
        }
    }
    Ok(table)
}

/// Formats a table in the input-file format.
pub fn format_inputs(table: &ValueTable) -> String {
    let mut out = String::new();
    for i in 0..table.rows() {
        let row: Vec<String> = (0..table.n())
            .map(|j| hex::encode(table.get(i, j).to_bytes()))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a choices file.
pub fn parse_choices(text: &str, params: &Params) -> Result<ChoiceVector, String> {
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| format!("bad choice {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != params.m {
        return Err(format!("{} choices, expected {}", values.len(), params.m));
    }
    ChoiceVector::new(values, params.n).map_err(|e| e.to_string())
}

/// Parses an output file back into values.
pub fn parse_outputs(text: &str, ell: usize) -> Result<Vec<BitVector>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_value(l.trim(), ell))
        .collect()
}

fn parse_value(field: &str, ell: usize) -> Result<BitVector, String> {
    let bytes = hex::decode(field).map_err(|e| format!("bad hex {field:?}: {e}"))?;
    if bytes.len() != ell.div_ceil(8) {
        return Err(format!("value {field:?} is {} bytes, expected {}", bytes.len(), ell.div_ceil(8)));
    }
    let v = BitVector::from_bytes(ell, &bytes);
    if v.to_bytes() != bytes {
        return Err(format!("value {field:?} has bits beyond {ell}"));
    }
    Ok(v)
}

fn read_inputs(path: &Path, params: &Params) -> Result<ValueTable, Failure> {
    parse_inputs(&read_file(path)?, params)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_choices(path: &Path, params: &Params) -> Result<ChoiceVector, Failure> {
    parse_choices(&read_file(path)?, params)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_outputs(path: &Path, outputs: &[BitVector]) -> Result<(), Failure> {
    let mut text = String::new();
    for z in outputs {
        text.push_str(&hex::encode(z.to_bytes()));
        text.push('\n');
    }
    write_file(path, &text)
}
