use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rug::Integer;
use serde::{Deserialize, Serialize};

use hassewitt::curve::normalize;
use hassewitt::driver::{compute_matrices, compute_matrix_single};
use hassewitt::modarith::direct_expansion_matrix;
use hassewitt::zeta::{a1_histogram, zeta_record, ZetaRecord};

#[derive(Parser)]
#[command(name = "hassewitt", about = "Hasse-Witt matrices of hyperelliptic curves y^2 = f(x)")]
struct Cli {
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Matrix,
    Charpoly,
    Trace,
}

#[derive(Subcommand)]
enum Command {
    /// Compute W_p for every odd good prime p <= N.
    Batch {
        /// Coefficients of f, constant term first, comma-separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        curve: Vec<i64>,
        #[arg(long)]
        bound: u64,
        /// Forest subtree parameter; default ceil(2 log2 ell).
        #[arg(long)]
        kappa: Option<u32>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "matrix")]
        emit: Emit,
    },
    /// Compute W_p at a single prime.
    Prime {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        curve: Vec<i64>,
        #[arg(long)]
        p: u64,
        /// Treat the coefficients as residues mod p, skipping the check
        /// that f is squarefree over Q.
        #[arg(long)]
        mod_p: bool,
    },
    /// Verify the batch pipeline against the direct-expansion oracle for
    /// p <= min(N, 1024); exits 1 on any mismatch.
    Check {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        curve: Vec<i64>,
        #[arg(long)]
        bound: u64,
    },
    /// Histogram of a1 = -a_p/sqrt(p) from a prior JSONL batch output.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    p: u64,
    w: Vec<Vec<u64>>,
    charpoly: Vec<u64>,
    trace: Option<i64>,
}

fn writer(out: &Option<PathBuf>) -> std::io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn parse_curve(coeffs: &[i64]) -> Result<hassewitt::curve::CurveData, String> {
    if coeffs.is_empty() {
        return Err("empty curve".into());
    }
    let f: Vec<Integer> = coeffs.iter().map(|&x| Integer::from(x)).collect();
    normalize(&f).map_err(|e| e.to_string())
}

fn print_matrix(entries: &[Vec<u64>]) {
    for row in entries {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        println!("{}", line.join(","));
    }
}

fn csv_line(emit: Emit, w: &[Vec<u64>], rec: &ZetaRecord) -> String {
    let mut fields = vec![rec.p.to_string()];
    match emit {
        Emit::Matrix => {
            fields.extend(w.iter().flatten().map(|x| x.to_string()));
        }
        Emit::Charpoly => {
            fields.extend(rec.lp_modp.iter().map(|x| x.to_string()));
        }
        Emit::Trace => {
            fields.push(rec.trace_lifted.map(|t| t.to_string()).unwrap_or_default());
        }
    }
    fields.join(",")
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    match cli.command {
        Command::Batch {
            curve,
            bound,
            kappa,
            format,
            out,
            emit,
        } => {
            let cd = parse_curve(&curve)?;
            let mats = compute_matrices(&cd, bound, kappa).map_err(|e| e.to_string())?;
            eprintln!("computed {} primes up to {}", mats.len(), bound);
            let mut w = writer(&out).map_err(|e| e.to_string())?;
            for m in &mats {
                let rec = zeta_record(m);
                let line = match format {
                    Format::Csv => csv_line(emit, &m.entries, &rec),
                    Format::Jsonl => serde_json::to_string(&JsonRecord {
                        p: m.p,
                        w: m.entries.clone(),
                        charpoly: rec.charpoly_modp.clone(),
                        trace: rec.trace_lifted,
                    })
                    .map_err(|e| e.to_string())?,
                };
                writeln!(w, "{line}").map_err(|e| e.to_string())?;
            }
            Ok(0)
        }
        Command::Prime { curve, p, mod_p } => {
            let m = if mod_p {
                let pp = p as i64;
                let fbar: Vec<u64> = curve.iter().map(|&c| c.rem_euclid(pp) as u64).collect();
                compute_matrix_single(&fbar, p).map_err(|e| e.to_string())?
            } else {
                let cd = parse_curve(&curve)?;
                compute_matrix_single(&cd.reduce_mod(p), p).map_err(|e| e.to_string())?
            };
            print_matrix(&m.entries);
            Ok(0)
        }
        Command::Check { curve, bound } => {
            let cd = parse_curve(&curve)?;
            let mats = compute_matrices(&cd, bound, None).map_err(|e| e.to_string())?;
            let cap = bound.min(1024);
            let mut checked = 0usize;
            for m in mats.iter().filter(|m| m.p <= cap) {
                let oracle = direct_expansion_matrix(&cd.reduce_mod(m.p), cd.g, m.p);
                if m.entries != oracle {
                    eprintln!("mismatch at p = {}", m.p);
                    return Ok(1);
                }
                checked += 1;
            }
            eprintln!("verified {checked} primes against direct expansion");
            Ok(0)
        }
        Command::Stats { input, bins, out } => {
            let file = File::open(&input).map_err(|e| e.to_string())?;
            let mut records = Vec::new();
            let mut genus = 0usize;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| e.to_string())?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| e.to_string())?;
                genus = genus.max(rec.w.len());
                records.push(ZetaRecord {
                    p: rec.p,
                    charpoly_modp: rec.charpoly.clone(),
                    lp_modp: rec.charpoly.iter().rev().copied().collect(),
                    trace_lifted: rec.trace,
                    a1: rec.trace.map(|t| -(t as f64) / (rec.p as f64).sqrt()),
                });
            }
            let hist = a1_histogram(&records, genus, bins).map_err(|e| e.to_string())?;
            let mut w = writer(&out).map_err(|e| e.to_string())?;
            writeln!(w, "bin_lo,bin_hi,count,density").map_err(|e| e.to_string())?;
            for b in &hist {
                writeln!(w, "{},{},{},{}", b.lo, b.hi, b.count, b.density)
                    .map_err(|e| e.to_string())?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
