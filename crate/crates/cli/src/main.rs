use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use k3monodromy::catalog::{
    attach_lifts, build_catalog, enumerate_records, expand_records, find, read_file, to_dot,
    write_file, CatalogError, DessinRecord, ReadMode,
};
use k3monodromy::report::{render, Table};
use k3monodromy::verify::{verify, VerifyOptions};
use k3monodromy::EnumerationConstraints;

#[derive(Parser)]
#[command(
    name = "k3monodromy",
    version,
    about = "Catalog of genus-0 modular subgroups for elliptic K3 surfaces"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Keep unknown record fields instead of rejecting them.
    #[arg(long, global = true)]
    lax: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate conjugacy classes of a given index.
    Enumerate {
        #[arg(long)]
        index: usize,
        #[arg(long)]
        torsion_free: bool,
        #[arg(long)]
        genus: Option<usize>,
        /// Only classes with index + 3e2 + 2e3 at most this value.
        #[arg(long)]
        max_tf_index: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expand torsion-free records into every class retracting onto them.
    Expand {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add lift counts to each record.
    Lifts {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a summary table.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// One of tf-counts, k6, k12, k18, k24, k24sym, totals.
        #[arg(long)]
        table: Table,
    },
    /// Write one dessin as a Graphviz graph.
    ExportDot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check catalog invariants; exits with status 1 on any failure.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
    },
    /// Enumerate, expand and add lifts in one step.
    Build {
        #[arg(long, default_value_t = 24)]
        max_tf_index: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path, lax: bool) -> Result<Vec<DessinRecord>, Failure> {
    let mode = if lax { ReadMode::Lax } else { ReadMode::Strict };
    read_file(path, mode).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match cli.command {
        Command::Enumerate {
            index,
            torsion_free,
            genus,
            max_tf_index,
            out,
        } => {
            let c = EnumerationConstraints {
                index,
                genus,
                torsion_free,
                max_tf_index,
            };
            write_file(&out, &enumerate_records(&c)?)?;
        }
        Command::Expand { input, out } => {
            let tf = read(&input, cli.lax)?;
            if let Some(r) = tf.iter().find(|r| !r.is_torsion_free()) {
                return Err(Failure::Input(format!(
                    "record {} is not torsion-free",
                    r.id
                )));
            }
            write_file(&out, &expand_records(&tf)?)?;
        }
        Command::Lifts { input, out } => {
            let mut records = read(&input, cli.lax)?;
            attach_lifts(&mut records)?;
            write_file(&out, &records)?;
        }
        Command::Report { input, table } => {
            let records = read(&input, cli.lax)?;
            let text = render(&records, table).map_err(|e| Failure::Input(e.to_string()))?;
            print!("{text}");
        }
        Command::ExportDot { input, id, out } => {
            let records = read(&input, cli.lax)?;
            let dot = to_dot(find(&records, &id)?)?;
            fs::write(&out, dot).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
        }
        Command::Verify {
            input,
            samples,
            seed,
        } => {
            let records = read(&input, cli.lax)?;
            let report = verify(&records, VerifyOptions { samples, seed });
            for check in &report.checks {
                let status = if check.passed() { "ok" } else { "FAILED" };
                println!("{status:>6}  {} ({} checked)", check.name, check.checked);
                for failure in check.failures.iter().take(5) {
                    println!("        {failure}");
                }
            }
            if !report.passed() {
                let failed = report.checks.iter().filter(|c| !c.passed()).count();
                return Err(Failure::Verification(format!("{failed} checks failed")));
            }
        }
        Command::Build { max_tf_index, out } => {
            if max_tf_index % 6 != 0 {
                return Err(Failure::Input(format!(
                    "max-tf-index {max_tf_index} is not a multiple of 6"
                )));
            }
            write_file(&out, &build_catalog(max_tf_index)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, kind, message) = match run(cli) {
        Ok(()) => return ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => (1, "verification", m),
        Err(Failure::Input(m)) => (2, "input", m),
    };
    eprintln!("error[{kind}]: {}", message.replace('\n', " "));
    ExitCode::from(code)
}
