use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use f2orbits::export::{self, Format};
use f2orbits::graph_file::{self, GraphFileError};
use f2orbits::report::{verify_json, GraphReport};
use f2orbits::Runner;
use f2orbits_core::actions::{ActionKind, ActionSpec, Height};
use f2orbits_core::classify::verify_with;
use f2orbits_core::f2la::{QuadraticSpace, BRUTE_FORCE_MAX_DIM};
use f2orbits_core::orbits::OrbitCensus;
use f2orbits_core::tri;
use f2orbits_core::Error;

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_DIFF: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "f2orbits", version, about = "Orbit censuses of transvection-type actions over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all orbits of an action (or of one stratum).
    Census(CensusArgs),
    /// Compare an enumerated census with its closed form.
    Verify(VerifyArgs),
    /// Enumerate the transvection group of a graph file.
    Graph(GraphArgs),
    /// Print the pattern matrices and the lattice graph for order n.
    Patterns(PatternArgs),
    /// Kernel, Arf class and value counts of the lattice quadratic space.
    Arf(PatternArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    First,
    Second,
    FirstConj,
    SecondConj,
}

impl From<Action> for ActionKind {
    fn from(a: Action) -> Self {
        match a {
            Action::First => ActionKind::First,
            Action::Second => ActionKind::Second,
            Action::FirstConj => ActionKind::FirstConjugate,
            Action::SecondConj => ActionKind::SecondConjugate,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_enum)]
    action: Action,
    #[arg(long)]
    n: usize,
    /// Restrict to the stratum with this height, e.g. `10100`.
    #[arg(long)]
    height: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    action: Action,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long)]
    n: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StateSpaceTooLarge { .. } | Error::OrderTooLarge { .. } => EXIT_GUARD,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GraphFileError> for Failure {
    fn from(e: GraphFileError) -> Self {
        match e {
            GraphFileError::Invalid(inner) => inner.into(),
            other => Failure {
                code: EXIT_USAGE,
                message: other.to_string(),
            },
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn runner(output: &Output) -> Result<Runner, Failure> {
    Runner::new(output.threads.map(|t| t as usize))
        .map_err(|e| usage(format!("cannot start worker pool: {e}")))
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write as _;
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn elapsed(start: Instant) -> String {
    let ms = start.elapsed().as_millis();
    format!("{}.{:03}", ms / 1000, ms % 1000)
}

fn summary(census: &OrbitCensus, start: Instant) {
    say!(
        "orbits={} states={} elapsed={}",
        census.orbit_count(),
        census.total_states,
        elapsed(start)
    );
}

fn parse_height(bits: &str) -> Result<Height, Failure> {
    let parsed: Option<Vec<bool>> = bits
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect();
    parsed
        .map(|b| Height::from_bits(&b))
        .ok_or_else(|| usage(format!("height must be a string of 0s and 1s, got {bits:?}")))
}

fn census(args: &CensusArgs) -> Outcome {
    let start = Instant::now();
    let spec = ActionSpec::new(args.n, args.action.into())?;
    let runner = runner(&args.output)?;
    let census = match &args.height {
        Some(bits) => runner.enumerate_stratum(&spec, &parse_height(bits)?)?,
        None => runner.enumerate(&spec)?,
    };
    emit(&args.output, &export::render(&census, args.output.format))?;
    summary(&census, start);
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Outcome {
    let start = Instant::now();
    let runner = runner(&args.output)?;
    let report = verify_with(args.n, args.action.into(), |spec| runner.enumerate(spec))?;
    let text = match args.output.format {
        Format::Json => verify_json(&report),
        Format::Table => format!("{report}\n"),
        Format::Csv => export::to_csv(&report.census),
    };
    emit(&args.output, &text)?;
    summary(&report.census, start);
    Ok(if report.passed() { 0 } else { EXIT_DIFF })
}

fn graph(args: &GraphArgs) -> Outcome {
    let start = Instant::now();
    let file = graph_file::read(&args.input)?;
    let spec = file.lattice()?;
    let census = runner(&args.output)?.enumerate(&spec)?;
    let report = GraphReport::new(&spec, census);
    let text = match args.output.format {
        Format::Json => report.json(&spec),
        Format::Table => format!(
            "{}{}",
            report.text(&spec),
            export::to_table(&report.census)
        ),
        Format::Csv => export::to_csv(&report.census),
    };
    emit(&args.output, &text)?;
    summary(&report.census, start);
    Ok(if report.passed() { 0 } else { EXIT_DIFF })
}

fn print_grid(name: &str, m: &tri::TriMatrix) {
    say!("{name}:");
    for line in m.grid().lines() {
        say!("  {line}");
    }
}

fn patterns(args: &PatternArgs) -> Outcome {
    let n = args.n;
    if n < 2 {
        return Err(usage("patterns need n >= 2"));
    }
    for i in 1..=n {
        print_grid(&format!("E{i}"), &tri::pattern_e(n, i)?);
    }
    for i in 1..=n {
        print_grid(&format!("R{i}"), &tri::pattern_r(n, i)?);
    }
    if n >= 3 {
        let ps = tri::p_patterns(n)?;
        for (i, p) in ps.iter().enumerate() {
            print_grid(&format!("P{}", i + 1), p);
        }
        for i in 1..=ps.len() {
            print_grid(&format!("~P{i}"), &tri::pattern_ptilde(n, i)?);
        }
    }
    let hex = tri::hex_graph(n)?;
    let mut degrees = std::collections::BTreeMap::new();
    for v in 0..hex.vertex_count() {
        *degrees.entry(hex.neighbors(v).len()).or_insert(0) += 1;
    }
    let degrees: Vec<String> = degrees.iter().map(|(d, c)| format!("{c}x{d}")).collect();
    say!(
        "lattice graph H{}: {} vertices, {} edges, degrees {}, kernel dim {}",
        n - 1,
        hex.vertex_count(),
        hex.edges().len(),
        degrees.join(" "),
        hex.form().kernel_basis().len()
    );
    Ok(0)
}

fn arf(args: &PatternArgs) -> Outcome {
    let hex = tri::hex_graph(args.n)?;
    let q = QuadraticSpace::with_unit_values(hex.form());
    let (zeros, ones) = q.value_counts_closed()?;
    say!("dim={} kernel_dim={} m={} arf={}", q.dim(), q.kappa(), q.m(), q.arf());
    say!("value_counts closed: zeros={zeros} ones={ones}");
    if q.dim() <= BRUTE_FORCE_MAX_DIM {
        let (z, o) = q.value_counts_brute()?;
        say!("value_counts brute: zeros={z} ones={o}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Census(a) => census(a),
        Command::Verify(a) => verify(a),
        Command::Graph(a) => graph(a),
        Command::Patterns(a) => patterns(a),
        Command::Arf(a) => arf(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
