use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_solid::config::{parse_decomposition, parse_measure, parse_poly, parse_weight};
use bergman_solid::harness::checks::{
    additivity_report, equivalence_stability_report, khintchine_report, projection_report, sandwich_report,
    KHINTCHINE_A1,
};
use bergman_solid::harness::corpus::{build_block_corpus, build_corpus, CoeffLaw, CorpusSpec};
use bergman_solid::harness::report::{num, ReportDoc};
use bergman_solid::harness::verify::{run_suite, Suite};
use bergman_solid::harness::configure_threads;
use bergman_solid::hull::{dual_pairing, find_condition_b_sequence, find_condition_b_sequence_auto, HullOptions};
use bergman_solid::lacunary::{closed_form_decomposition, solve_balancing, LacunaryDecomposition, MIN_PROFILE_GAPS};
use bergman_solid::measure::Domain;
use bergman_solid::norms::{bergman_norm, equivalent_norm, solid_core_norm};
use bergman_solid::weight::WeightFamily;
use bergman_solid::{Error, LogReal};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Lacunary decompositions and norm estimates for weighted Bergman spaces.
#[derive(Parser, Debug)]
#[command(name = "bergman-solid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a lacunary decomposition of a radial measure.
    Decompose {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        b: f64,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Balanced)]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bergman, block-equivalent and solid-core norms of a polynomial.
    Norms {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a condition (b) sequence for a weight.
    Hull {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, default_value_t = 2.5)]
        b: f64,
        /// Upper constant; searched automatically when omitted.
        #[arg(long = "K")]
        k_upper: Option<f64>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        mu_seed: f64,
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
        #[arg(long, default_value_t = 4096)]
        w_cache_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The pairing of two polynomials against a weight.
    Pairing {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        weight: PathBuf,
    },
    /// Run a built-in check suite.
    Verify {
        #[arg(long, default_value = "trivial")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Randomised corpus checks for a measure.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Balanced,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LawArg {
    ComplexGaussian,
    UnitModulus,
    Sparse,
}

#[derive(clap::Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long, default_value_t = 6.0)]
    b: f64,
    #[arg(long, default_value_t = 4)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of consecutive seeds for the stability criterion.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Degree bound; defaults to floor(m_{N-2}).
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = LawArg::ComplexGaussian)]
    law: LawArg,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Degree bound of the block-aligned corpus; defaults to floor(m_{N-1}).
    #[arg(long)]
    block_degree: Option<usize>,
    #[arg(long, default_value_t = 50)]
    block_count: usize,
    #[arg(long, default_value_t = KHINTCHINE_A1)]
    a1: f64,
    /// Longest coefficient vector for the Khintchine check.
    #[arg(long, default_value_t = 10)]
    khintchine_len: usize,
    /// Also run the hull/core sandwich (weighted-area measures only).
    #[arg(long)]
    sandwich: bool,
    #[arg(long, default_value_t = 2.5)]
    hull_b: f64,
    #[arg(long, default_value_t = 20)]
    hull_count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::UnsupportedFamily(_)
            | Error::UnsupportedWeight(_)
            | Error::InsufficientBlocks { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => stdout_line(text),
    }
}

fn stdout_line(text: &str) -> CliResult {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Runtime(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("output serialises")
}

fn log_real(x: LogReal) -> Value {
    json!({ "value": num(x.value()), "ln": num(x.ln()) })
}

fn decompose(measure: &Path, b: f64, blocks: usize, method: MethodArg, out: Option<&Path>) -> CliResult {
    let measure = parse_measure(&read(measure)?)?;
    let decomp = match method {
        MethodArg::Balanced => solve_balancing(&measure, b, blocks)?,
        MethodArg::ClosedForm => {
            let Some(WeightFamily::Exponential { alpha, beta, ell }) = measure.weight().map(|w| w.family()) else {
                return Err(Failure::Usage("closed-form needs the weighted-area measure of an exponential weight".into()));
            };
            if measure.domain() != Domain::Disc {
                return Err(Failure::Usage("closed-form needs the disc".into()));
            }
            let cf = closed_form_decomposition(*alpha, *beta, *ell, blocks)?;
            LacunaryDecomposition::from_closed_form(&cf, &measure, b)?
        }
    };
    let mut doc = serde_json::to_value(&decomp).expect("decomposition serialises");
    let profile = if decomp.m().len() > MIN_PROFILE_GAPS { Some(decomp.gap_profile()?) } else { None };
    let class = profile.as_ref().map(|p| serde_json::to_value(p.classification).unwrap());
    doc["gap_profile"] = serde_json::to_value(&profile).unwrap();
    emit(&pretty(&doc), out)?;
    if out.is_some() {
        let class = class.map(|c| c.as_str().unwrap_or_default().to_string()).unwrap_or_else(|| "unclassified".into());
        stdout_line(&format!("blocks={} classification={class}", decomp.blocks()))?;
    }
    Ok(())
}

fn norms(poly: &Path, decomp: &Path, measure: &Path, out: Option<&Path>) -> CliResult {
    let f = parse_poly(&read(poly)?)?;
    let decomp = parse_decomposition(&read(decomp)?)?;
    let measure = parse_measure(&read(measure)?)?;
    let doc = json!({
        "bergman_norm": log_real(bergman_norm(&f, &measure, 1.0)?),
        "equivalent_norm": log_real(equivalent_norm(&f, &decomp)?),
        "solid_core_norm": log_real(solid_core_norm(&f, &decomp)?),
    });
    emit(&pretty(&doc), out)
}

#[allow(clippy::too_many_arguments)]
fn hull(
    weight: &Path,
    b: f64,
    k_upper: Option<f64>,
    count: usize,
    opts: HullOptions,
    out: Option<&Path>,
) -> CliResult {
    let weight = parse_weight(&read(weight)?)?;
    let hp = match k_upper {
        Some(k) => find_condition_b_sequence(&weight, b, k, count, &opts),
        None => find_condition_b_sequence_auto(&weight, b, count, &opts),
    };
    match hp {
        Ok(hp) => emit(&pretty(&serde_json::to_value(&hp).expect("hull parameters serialise")), out),
        Err(e @ Error::ConditionBViolation { .. }) => {
            eprintln!("error: {e}");
            Err(Failure::Checks)
        }
        Err(e) => Err(e.into()),
    }
}

fn pairing(f: &Path, g: &Path, weight: &Path) -> CliResult {
    let f = parse_poly(&read(f)?)?;
    let g = parse_poly(&read(g)?)?;
    let weight = parse_weight(&read(weight)?)?;
    let z = dual_pairing(&f, &g, &weight)?;
    stdout_line(&json!({ "re": num(z.re), "im": num(z.im) }).to_string())?;
    Ok(())
}

fn finish(doc: &ReportDoc, out: Option<&Path>, csv: Option<&Path>) -> CliResult {
    emit(&doc.to_json(), out)?;
    if let Some(p) = csv {
        fs::write(p, doc.to_csv()?).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
    }
    eprintln!("{} checks: {} passed, {} failed", doc.summary.total, doc.summary.passed, doc.summary.failed);
    if doc.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn verify(suite: &str, out: Option<&Path>, csv: Option<&Path>) -> CliResult {
    let suite: Suite = suite.parse()?;
    finish(&run_suite(suite), out, csv)
}

fn report(args: &ReportArgs) -> CliResult {
    if args.seeds == 0 || args.count == 0 || args.block_count == 0 {
        return Err(Failure::Usage("--seeds, --count and --block-count must be positive".into()));
    }
    let measure = parse_measure(&read(&args.measure)?)?;
    let decomp = solve_balancing(&measure, args.b, args.blocks)?;
    if decomp.blocks() < 2 {
        return Err(Failure::Usage("--blocks must be at least 2".into()));
    }
    let degree = args.degree.unwrap_or_else(|| decomp.floor_m(decomp.blocks() - 2)).max(1);
    let law = match args.law {
        LawArg::ComplexGaussian => CoeffLaw::ComplexGaussian,
        LawArg::UnitModulus => CoeffLaw::UnitModulus,
        LawArg::Sparse => CoeffLaw::Sparse { density: args.density },
    };
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
    let corpora = seeds
        .iter()
        .map(|&s| Ok((s, build_corpus(&CorpusSpec::new(s, args.count, degree, law))?)))
        .collect::<bergman_solid::Result<Vec<_>>>()?;

    let mut docs = vec![equivalence_stability_report(&corpora, &decomp, &measure)?];

    let block_degree = args.block_degree.unwrap_or_else(|| decomp.floor_m(decomp.blocks() - 1));
    let block_spec = CorpusSpec { block_aligned: true, ..CorpusSpec::new(args.seed, args.block_count, block_degree, law) };
    match build_block_corpus(&block_spec, &decomp) {
        Ok(sums) => docs.push(additivity_report(&sums, &decomp, &measure)?),
        Err(e) => eprintln!("skipping block additivity: {e}"),
    }

    let len = args.khintchine_len.max(1);
    let vectors: Vec<Vec<f64>> = corpora[0]
        .1
        .iter()
        .map(|g| g.coeffs().iter().take(len).map(|c| c.re).collect::<Vec<f64>>())
        .filter(|a| a.iter().any(|x| *x != 0.0))
        .collect();
    if !vectors.is_empty() {
        docs.push(khintchine_report(&vectors, args.a1)?);
    }

    if measure.domain() == Domain::Disc {
        docs.push(projection_report(&decomp, 4096)?);
    }

    if args.sandwich {
        let Some(weight) = measure.weight().filter(|_| measure.domain() == Domain::Disc) else {
            return Err(Failure::Usage("--sandwich needs a weighted-area measure on the disc".into()));
        };
        let hp = find_condition_b_sequence_auto(weight, args.hull_b, args.hull_count, &HullOptions::default())?;
        docs.push(sandwich_report(&corpora, &decomp, &hp, &measure)?);
    }

    finish(&ReportDoc::merge(docs), args.out.as_deref(), args.csv.as_deref())
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Decompose { measure, b, blocks, method, out } => decompose(&measure, b, blocks, method, out.as_deref()),
        Command::Norms { poly, decomp, measure, out } => norms(&poly, &decomp, &measure, out.as_deref()),
        Command::Hull { weight, b, k_upper, count, mu_seed, margin, w_cache_max, out } => {
            let opts = HullOptions { mu_seed, margin, w_cache_max };
            hull(&weight, b, k_upper, count, opts, out.as_deref())
        }
        Command::Pairing { f, g, weight } => pairing(&f, &g, &weight),
        Command::Verify { suite, out, csv } => verify(&suite, out.as_deref(), csv.as_deref()),
        Command::Report(args) => report(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
