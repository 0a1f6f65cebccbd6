use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use berman_pir::berman::{dimension_formula, BermanParams};
use berman_pir::pir::privacy::{verify_privacy_rank, PrivacyMode};
use berman_pir::pir::protocol::{run_retrieval_with, PirScheme};
use berman_pir::pir::scheme::{classify_pair, closed_form, Rate, SchemeConfig};
use berman_pir::tables::{
    cells_to_csv, cells_to_json, format_rate, reproduce_table, table_to_text, Precision, TableId,
};
use berman_pir::verify::{verify_all, CaseStatus};
use berman_pir::Error;
use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde_json::json;

const THREADS_ENV: &str = "BERMAN_PIR_THREADS";
const PRIVACY_SAMPLES: usize = 20_000;

#[derive(Parser)]
#[command(
    name = "berman-pir",
    version,
    about = "Berman-code star-product PIR toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Collusion tolerance and rates of a storage/retrieval pair.
    Params {
        #[arg(long)]
        storage: String,
        #[arg(long)]
        retrieval: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The three comparison tables.
    Tables {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant and star-product sweep over 2 <= n <= nmax, 1 <= m <= mmax.
    Verify {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one simulated retrieval and write its transcript.
    Simulate {
        #[arg(long)]
        storage: String,
        #[arg(long)]
        retrieval: String,
        #[arg(long, default_value_t = 1)]
        files: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Index of the wanted file.
        #[arg(long, default_value_t = 0)]
        demand: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    /// Verification ran but some case failed.
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse(_)) | Failure::Lib(Error::InvalidParams(_)) => 2,
            Failure::Lib(Error::UnsupportedPair(_))
            | Failure::Lib(Error::ZeroRate)
            | Failure::Lib(Error::ParamMismatch(_)) => 3,
            Failure::Verification(_) => 4,
            Failure::Lib(Error::ScheduleNotFound(_)) => 5,
            _ => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Lib(e) => (error_kind(e), e.to_string()),
            Failure::Io(e) => ("Io", e.to_string()),
            Failure::Verification(n) => ("VerificationFailed", format!("{n} case(s) failed")),
        };
        json!({"error": kind, "message": message, "exit_code": self.exit_code()})
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::LengthMismatch { .. } => "LengthMismatch",
        Error::ShapeMismatch(_) => "ShapeMismatch",
        Error::NoSolution => "NoSolution",
        Error::Singular => "Singular",
        Error::Parse(_) => "ParseError",
        Error::InvalidParams(_) => "InvalidParams",
        Error::TooLarge { .. } => "TooLarge",
        Error::ZeroCode => "ZeroCode",
        Error::OverlappingSupport => "OverlappingSupport",
        Error::PreconditionViolated(_) => "PreconditionViolated",
        Error::ParamMismatch(_) => "ParamMismatch",
        Error::UndefinedCase(_) => "UndefinedCase",
        Error::UnsupportedPair(_) => "UnsupportedPair",
        Error::ZeroRate => "ZeroRate",
        Error::ScheduleNotFound(_) => "ScheduleNotFound",
        Error::Incomplete(_) => "Incomplete",
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn parse_pair(storage: &str, retrieval: &str) -> Result<(BermanParams, BermanParams), Error> {
    Ok((storage.parse()?, retrieval.parse()?))
}

fn decimal(rate: Rate) -> String {
    format_rate(rate, Precision::HalfEven(3))
}

fn cmd_params(
    storage: &str,
    retrieval: &str,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let (storage, retrieval) = parse_pair(storage, retrieval)?;
    let kind = classify_pair(storage, retrieval)?;
    let triple = closed_form(storage, retrieval)?;
    let servers = storage.length() as u64;
    let d_perp = (triple.pir_rate * servers).to_integer();
    if d_perp == 0 {
        return Err(Error::ZeroRate.into());
    }
    let k_c = dimension_formula(storage) as u64;
    let g = d_perp.gcd(&k_c);
    let (b, s) = (d_perp / g, k_c / g);
    let text = match format {
        Format::Json => format!(
            "{}\n",
            json!({
                "storage": storage.to_string(),
                "retrieval": retrieval.to_string(),
                "pair": kind.to_string(),
                "t": triple.t,
                "R_st": triple.storage_rate.to_string(),
                "R_pir": triple.pir_rate.to_string(),
                "R_st_decimal": decimal(triple.storage_rate),
                "R_pir_decimal": decimal(triple.pir_rate),
                "servers": servers,
                "b": b,
                "S": s,
            })
        ),
        Format::Csv => format!(
            "storage,retrieval,t,r_st,r_pir,r_st_exact,r_pir_exact\n\"{storage}\",\"{retrieval}\",{},{},{},{},{}\n",
            triple.t,
            decimal(triple.storage_rate),
            decimal(triple.pir_rate),
            triple.storage_rate,
            triple.pir_rate
        ),
        Format::Text => format!(
            "{storage} / {retrieval} ({kind}): t = {}, R_st = {} ({}), R_pir = {} ({}), b = {b}, S = {s}\n",
            triple.t,
            triple.storage_rate,
            decimal(triple.storage_rate),
            triple.pir_rate,
            decimal(triple.pir_rate)
        ),
    };
    emit(out, &text)?;
    Ok(())
}

fn cmd_tables(format: Format, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut cells = Vec::new();
    let mut text = String::new();
    for table in TableId::ALL {
        let t = reproduce_table(table)?;
        if format == Format::Text {
            if !text.is_empty() {
                text.push('\n');
            }
            text.push_str(&table_to_text(table, &t));
        }
        cells.extend(t);
    }
    let body = match format {
        Format::Csv => cells_to_csv(&cells),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&cells_to_json(&cells)).expect("json")
        ),
        Format::Text => text,
    };
    emit(out, &body)?;
    Ok(())
}

fn cmd_verify(
    nmax: usize,
    mmax: usize,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let report = verify_all(nmax, mmax)?;
    let body = match format {
        Format::Json => report.to_json_lines(),
        Format::Csv => {
            let mut s = String::from("check,case,status\n");
            for r in &report.records {
                s.push_str(&format!(
                    "{},\"{}\",{}\n",
                    r.check,
                    r.case,
                    r.status.as_str()
                ));
            }
            s
        }
        Format::Text => report
            .records
            .iter()
            .map(|r| format!("{:<5} {:<12} {}\n", r.status.as_str(), r.check, r.case))
            .collect(),
    };
    emit(out, &body)?;
    let failed = report
        .records
        .iter()
        .filter(|r| r.status == CaseStatus::Fail)
        .count();
    let observed = report
        .records
        .iter()
        .filter(|r| r.status == CaseStatus::Observed)
        .count();
    eprintln!(
        "verify: {} cases, {} failed, {observed} observations",
        report.records.len(),
        failed
    );
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}

struct SimulateArgs<'a> {
    storage: &'a str,
    retrieval: &'a str,
    files: usize,
    seed: u64,
    demand: usize,
    format: Format,
    out: &'a Option<PathBuf>,
}

fn cmd_simulate(args: SimulateArgs<'_>) -> Result<(), Failure> {
    let (storage, retrieval) = parse_pair(args.storage, args.retrieval)?;
    let config = SchemeConfig {
        storage,
        retrieval,
        files: args.files,
        seed: args.seed,
    };
    let scheme = PirScheme::new(config)?;
    let transcript = run_retrieval_with(&scheme, args.seed, args.demand)?;
    let d = &scheme.derived;
    let mode = PrivacyMode::auto(d.servers, d.t.min(d.servers), PRIVACY_SAMPLES, args.seed);
    let private_at_t = verify_privacy_rank(&d.retrieval_code, d.t.min(d.servers), mode)?;
    let body = match args.format {
        Format::Json | Format::Text => format!(
            "{}\n",
            serde_json::to_string_pretty(&transcript.to_json()).expect("json")
        ),
        Format::Csv => {
            let mut s = String::from("iteration,J,responses_hex\n");
            for (tau, it) in transcript.iterations.iter().enumerate() {
                let j: Vec<String> = it.coords.iter().map(|c| c.to_string()).collect();
                s.push_str(&format!(
                    "{tau},{},{}\n",
                    j.join(" "),
                    it.responses.to_hex()
                ));
            }
            s
        }
    };
    emit(args.out, &body)?;
    let summary = format!(
        "{storage} / {retrieval}: reconstructed_ok={} achieved_rate={} ({}) theoretical={} ({}) t={} privacy_rank_check={}",
        transcript.reconstructed_ok(),
        transcript.achieved_rate,
        decimal(transcript.achieved_rate),
        d.pir_rate,
        decimal(d.pir_rate),
        d.t,
        if private_at_t { "pass" } else { "fail" }
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if !transcript.reconstructed_ok() || !private_at_t {
        return Err(Failure::Verification(1));
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Params {
            storage,
            retrieval,
            format,
            out,
        } => cmd_params(storage, retrieval, *format, out),
        Command::Tables { format, out } => cmd_tables(*format, out),
        Command::Verify {
            nmax,
            mmax,
            format,
            out,
        } => cmd_verify(*nmax, *mmax, *format, out),
        Command::Simulate {
            storage,
            retrieval,
            files,
            seed,
            demand,
            format,
            out,
        } => cmd_simulate(SimulateArgs {
            storage,
            retrieval,
            files: *files,
            seed: *seed,
            demand: *demand,
            format: *format,
            out,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
