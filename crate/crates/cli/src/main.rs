//! Command-line front end: construct generator matrices, verify the
//! batch/PIR property of matrix files, evaluate bounds, and emit tables.
//!
//! Exit codes are a stable contract:
//! 0 = yes/success, 1 = no (proven), 2 = usage/invalid parameters,
//! 3 = inconclusive (search budget), 4 = malformed input file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use batch_codes::bounds::{self, BoundKind, BoundValue};
use batch_codes::construct::{self, ConstructError};
use batch_codes::gf2::BitMatrix;
use batch_codes::verify::{self, Mode, RecoveryCertificate, Verdict, VerifyError, VerifyOptions};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_BAD_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "batchcodes",
    version,
    about = "Binary batch/PIR codes: construction, verification, and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Batch,
    Pir,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Batch => Mode::Batch,
            ModeArg::Pir => Mode::Pir,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a generator matrix for (k, r, t)
    Construct {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        r: usize,
        #[arg(short)]
        t: usize,
        /// Write the matrix file here (with a provenance header); without
        /// this the matrix goes to stdout and the summary to stderr
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide the batch or PIR property of a matrix file by exact search
    Verify {
        matrix: PathBuf,
        #[arg(short)]
        r: usize,
        #[arg(short)]
        t: usize,
        #[arg(long, value_enum, default_value = "batch")]
        mode: ModeArg,
        /// Dump one JSON recovery certificate per query here (1-based indices)
        #[arg(long)]
        certs: Option<PathBuf>,
    },
    /// Minimum distance of the code generated by a matrix file
    Dist { matrix: PathBuf },
    /// Evaluate every applicable length bound at (k, r, t)
    Bounds {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        r: u64,
        #[arg(short)]
        t: u64,
        /// Minimum distance; defaults to t (every batch code has d >= t)
        #[arg(short)]
        d: Option<u64>,
    },
    /// Lower/upper bound grid over ranges of k and r, for t in {2,3,4}
    Table {
        #[arg(long)]
        k_min: u64,
        #[arg(long)]
        k_max: u64,
        #[arg(long)]
        r_min: u64,
        #[arg(long)]
        r_max: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Largest t for which the batch/PIR property holds
    Maxt {
        matrix: PathBuf,
        #[arg(short)]
        r: usize,
        #[arg(long, value_enum, default_value = "batch")]
        mode: ModeArg,
    },
    /// Regenerate the exact k_opt table (q = 2, n <= 14) as CSV
    Koptgen {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        d_max: usize,
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = match verify_options_from_env() {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match cli.command {
        Command::Construct { k, r, t, out } => cmd_construct(k, r, t, out.as_deref()),
        Command::Verify {
            matrix,
            r,
            t,
            mode,
            certs,
        } => cmd_verify(&matrix, r, t, mode.into(), certs.as_deref(), opts),
        Command::Dist { matrix } => cmd_dist(&matrix),
        Command::Bounds { k, r, t, d } => cmd_bounds(k, r, t, d),
        Command::Table {
            k_min,
            k_max,
            r_min,
            r_max,
            format,
        } => cmd_table(k_min, k_max, r_min, r_max, format),
        Command::Maxt { matrix, r, mode } => cmd_maxt(&matrix, r, mode.into(), opts),
        Command::Koptgen { n_max, d_max, out } => cmd_koptgen(n_max, d_max, &out),
    };
    ExitCode::from(code)
}

/// BATCH_SEARCH_BUDGET overrides the default search budget.
fn verify_options_from_env() -> Result<VerifyOptions, String> {
    match std::env::var("BATCH_SEARCH_BUDGET") {
        Ok(raw) => raw
            .parse::<u64>()
            .map(|budget| VerifyOptions { budget })
            .map_err(|_| format!("BATCH_SEARCH_BUDGET is not a number: {raw:?}")),
        Err(_) => Ok(VerifyOptions::default()),
    }
}

fn read_matrix(path: &Path) -> Result<BitMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    BitMatrix::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_construct(k: usize, r: usize, t: usize, out: Option<&Path>) -> u8 {
    let c = match construct::construct(k, r, t) {
        Ok(c) => c,
        Err(e @ ConstructError::NoConstructionKnown { .. }) => {
            eprintln!("error: {e}");
            eprintln!(
                "covered parameter shapes: t=2 (any r>=2); r=2 (2<=t<=max{{ceil(k/2),2}}+2); \
                 r>=3 with r|k (2<t<=max{{k/r,r}}+2); t=3 with r>=3, r not dividing k"
            );
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let summary = format!(
        "family={} n={} k={} r={} t={}",
        c.family, c.params.n, c.params.k, c.params.r, c.params.t
    );
    match out {
        Some(path) => {
            let header = format!(
                "# family={} k={} r={} t={} n={}\n",
                c.family, c.params.k, c.params.r, c.params.t, c.params.n
            );
            if let Err(e) = std::fs::write(path, header + &c.matrix.to_text()) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_BAD_INPUT;
            }
            println!("{summary}");
        }
        None => {
            print!("{}", c.matrix.to_text());
            eprintln!("{summary}");
        }
    }
    EXIT_YES
}

fn certs_json(certs: &[RecoveryCertificate]) -> serde_json::Value {
    serde_json::Value::Array(
        certs
            .iter()
            .map(|cert| {
                serde_json::json!({
                    "query": cert.query.indices().iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "sets": cert
                        .sets
                        .iter()
                        .map(|s| s.indices().iter().map(|c| c + 1).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn one_based(q: &verify::QueryMultiset) -> Vec<usize> {
    q.indices().iter().map(|i| i + 1).collect()
}

fn cmd_verify(
    path: &Path,
    r: usize,
    t: usize,
    mode: Mode,
    certs_out: Option<&Path>,
    opts: VerifyOptions,
) -> u8 {
    let g = match read_matrix(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let label = match mode {
        Mode::Batch => "BATCH",
        Mode::Pir => "PIR",
    };
    match verify::certify(&g, r, t, mode, opts) {
        Ok(Verdict::Served(certs)) => {
            if let Some(out) = certs_out {
                let body = serde_json::to_string_pretty(&certs_json(&certs)).expect("serializable");
                if let Err(e) = std::fs::write(out, body + "\n") {
                    eprintln!("error: {}: {e}", out.display());
                    return EXIT_BAD_INPUT;
                }
            }
            println!("{label}({r},{t})=yes");
            EXIT_YES
        }
        Ok(Verdict::Unserved(query)) => {
            println!("{label}({r},{t})=no");
            eprintln!("unservable query (1-based): {:?}", one_based(&query));
            EXIT_NO
        }
        Err(VerifyError::SearchBudgetExceeded { query }) => {
            println!("{label}({r},{t})=inconclusive");
            if let Some(q) = query {
                eprintln!("budget exhausted at query (1-based): {:?}", one_based(&q));
            }
            EXIT_INCONCLUSIVE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn cmd_dist(path: &Path) -> u8 {
    let g = match read_matrix(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    match g.min_distance() {
        Ok(d) => {
            println!("d={d}");
            EXIT_YES
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn cmd_bounds(k: u64, r: u64, t: u64, d: Option<u64>) -> u8 {
    let report = match bounds::standard_report(k, r, t, d) {
        Ok(rep) => rep,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let d_used = d.unwrap_or(t);
    println!(
        "B({k},{r},{t}) bounds with d={d_used}{}:",
        if d.is_none() { " (defaulted to t)" } else { "" }
    );
    let mut best_lower: Option<u64> = None;
    let mut best_upper: Option<u64> = None;
    for b in &report {
        let rel = match b.kind {
            BoundKind::LowerOnN => "n >=",
            BoundKind::UpperOnN => "n <=",
            BoundKind::UpperOnK => "k <=",
            BoundKind::UpperOnRate => "R <=",
        };
        let beta = b
            .beta_star
            .map(|b| format!("  beta*={b}"))
            .unwrap_or_default();
        let assume = if b.assumptions.is_empty() {
            String::new()
        } else {
            format!("  [{}]", b.assumptions.join(", "))
        };
        println!(
            "  {rel} {:<4} {:<26}{beta}{assume}",
            b.value.to_string(),
            b.name
        );
        if let BoundValue::Count(v) = b.value {
            match b.kind {
                BoundKind::LowerOnN => best_lower = Some(best_lower.map_or(v, |x| x.max(v))),
                BoundKind::UpperOnN => best_upper = Some(best_upper.map_or(v, |x| x.min(v))),
                _ => {}
            }
        }
    }
    match (best_lower, best_upper) {
        (Some(lo), Some(hi)) => println!("summary: {lo} <= B({k},{r},{t}) <= {hi}"),
        (Some(lo), None) => println!("summary: {lo} <= B({k},{r},{t}) (no tabulated upper bound)"),
        _ => {}
    }
    EXIT_YES
}

fn table_cell(value: Result<u64, bounds::BoundsError>) -> String {
    match value {
        Ok(v) => v.to_string(),
        Err(_) => "—".to_string(),
    }
}

fn cmd_table(k_min: u64, k_max: u64, r_min: u64, r_max: u64, format: TableFormat) -> u8 {
    if k_min < 1 || k_min > k_max || r_min < 2 || r_min > r_max {
        eprintln!("error: need 1 <= k_min <= k_max and 2 <= r_min <= r_max");
        return EXIT_USAGE;
    }
    let row_cells = |k: u64, r: u64| -> Vec<String> {
        (2..=4)
            .map(|t| table_cell(bounds::table_lower_bound(k, r, t)))
            .chain((2..=4).map(|t| table_cell(bounds::table_upper_bound(k, r, t))))
            .collect()
    };
    match format {
        TableFormat::Csv => {
            println!("k,r,lb_t2,lb_t3,lb_t4,ub_t2,ub_t3,ub_t4");
            for k in k_min..=k_max {
                for r in r_min..=r_max {
                    println!("{k},{r},{}", row_cells(k, r).join(","));
                }
            }
        }
        TableFormat::Text => {
            println!(
                "{:>3} {:>3} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6}",
                "k", "r", "lb t=2", "lb t=3", "lb t=4", "ub t=2", "ub t=3", "ub t=4"
            );
            for k in k_min..=k_max {
                for r in r_min..=r_max {
                    let c = row_cells(k, r);
                    println!(
                        "{k:>3} {r:>3} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6}",
                        c[0], c[1], c[2], c[3], c[4], c[5]
                    );
                }
            }
        }
    }
    EXIT_YES
}

fn cmd_maxt(path: &Path, r: usize, mode: Mode, opts: VerifyOptions) -> u8 {
    let g = match read_matrix(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let result = verify::max_t(&g, r, mode, opts);
    if result.exact {
        println!("max_t={} exact", result.t);
        EXIT_YES
    } else {
        println!("max_t>={} budget-limited", result.t);
        EXIT_INCONCLUSIVE
    }
}

fn cmd_koptgen(n_max: usize, d_max: usize, out: &Path) -> u8 {
    if n_max > bounds::KOPT_MAX_N {
        eprintln!(
            "error: n_max={n_max} exceeds the exhaustive-oracle cap of {}",
            bounds::KOPT_MAX_N
        );
        return EXIT_USAGE;
    }
    if n_max < 1 || d_max < 1 {
        eprintln!("error: need n_max >= 1 and d_max >= 1");
        return EXIT_USAGE;
    }
    let csv = bounds::kopt_table_csv(n_max, d_max);
    if let Err(e) = std::fs::write(out, &csv) {
        eprintln!("error: {}: {e}", out.display());
        return EXIT_BAD_INPUT;
    }
    println!("wrote {} ({} rows)", out.display(), csv.lines().count() - 1);
    EXIT_YES
}
