//! `extsym`: batch front end for the catalog, verification suites, weak
//! extensions and embedded orbits. Every command emits a JSON run report;
//! `--format text` renders that same report for reading.

mod commands;
mod run_report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use extsym::geom::Tolerances;

use run_report::RunReport;

#[derive(Parser)]
#[command(name = "extsym", version, about = "Catalog, verify and embed full extrinsic symmetric triples")]
struct Cli {
    /// How the run report is printed on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog families; FILTER is a family id prefix or a full descriptor.
    Catalog { filter: Option<String> },
    /// Run the axiom, triple, balanced and fullness suites.
    Verify {
        /// Descriptor such as `tfull-4:k=1,l=0,m=0:c=1`, or a quadext.v1/algebra.v1 file.
        input: String,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a catalog entry as quadext.v1 (or the assembled algebra as algebra.v1).
    Build {
        descriptor: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        algebra: bool,
    },
    /// Build the weak extension of a catalog entry by a classifier datum or an omega file.
    Extend {
        descriptor: String,
        /// weakext.v1 document (path or inline JSON).
        #[arg(long)]
        datum: String,
        /// Where to write the extended algebra (algebra.v1).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample an embedded orbit on a parameter grid.
    Embed {
        /// `item-1`, `item-2:+`, `item-2:-`, `item-3`, `item-4:k=..,l=..,m=..:c=..`, `item-5:...`.
        item: String,
        /// `N` or `N:R`: N points per axis on [-R, R] (R defaults to 1).
        #[arg(long, default_value = "5")]
        grid: String,
        /// Evaluate through the group orbit instead of the closed form.
        #[arg(long)]
        orbit: bool,
        /// Point cloud destination; `.json` selects JSON, anything else CSV. Stdout gets CSV when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signature, reflection, mean curvature and curvature probes at one point.
    Geomcheck {
        item: String,
        /// Comma separated parameters of the base point (default: origin).
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long, default_value_t = 0.3)]
        probe_radius: f64,
        /// Seed for probe sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Tolerances::default().manifold)]
        tolerance_manifold: f64,
        #[arg(long, default_value_t = Tolerances::default().curvature)]
        tolerance_curvature: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a saved run report; the exit code follows its checks.
    Report { file: PathBuf },
}

fn emit(format: Format, r: &RunReport) {
    match format {
        Format::Json => print!("{}", r.to_json()),
        Format::Text => print!("{}", r.render_text()),
    }
}

fn save(out: &Option<PathBuf>, r: &RunReport) -> Result<()> {
    match out {
        Some(p) => commands::write_out(p, &r.to_json()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<RunReport> {
    let report = match cli.command {
        Command::Catalog { filter } => commands::catalog(filter.as_deref())?,
        Command::Verify { input, out } => {
            let r = commands::verify(&input)?;
            save(&out, &r)?;
            r
        }
        Command::Build { descriptor, out, algebra } => {
            let (mut r, doc) = commands::build(&descriptor, algebra)?;
            match out {
                Some(p) => {
                    commands::write_out(&p, &doc)?;
                    r.set("written", p.display().to_string());
                }
                None => {
                    print!("{doc}");
                    return Ok(r);
                }
            }
            r
        }
        Command::Extend { descriptor, datum, out } => {
            let (mut r, doc) = commands::extend(&descriptor, &datum)?;
            if let Some(p) = out {
                commands::write_out(&p, &doc)?;
                r.set("written", p.display().to_string());
            }
            r
        }
        Command::Embed { item, grid, orbit, out } => {
            let (mut r, cloud) = commands::embed(&item, &grid, orbit)?;
            match out {
                Some(p) => {
                    let json = p.extension().is_some_and(|e| e == "json");
                    let text = if json { serde_json::to_string_pretty(&cloud.to_json())? + "\n" } else { cloud.to_csv() };
                    commands::write_out(&p, &text)?;
                    r.set("written", p.display().to_string());
                }
                None => {
                    print!("{}", cloud.to_csv());
                    return Ok(r);
                }
            }
            r
        }
        Command::Geomcheck { item, at, probes, probe_radius, seed, tolerance_manifold, tolerance_curvature, out } => {
            let tol = Tolerances { manifold: tolerance_manifold, curvature: tolerance_curvature, ..Tolerances::default() };
            let r = commands::geomcheck(&commands::GeomArgs { item: &item, at: at.as_deref(), probes, probe_radius, seed, tol })?;
            save(&out, &r)?;
            r
        }
        Command::Report { file } => {
            let r = commands::load_report(&file)?;
            print!("{}", r.render_text());
            return Ok(r);
        }
    };
    emit(cli.format, &report);
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(r) => ExitCode::from(r.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
