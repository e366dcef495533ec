use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ripsnet_cli::report::Outcome;
use ripsnet_cli::{
    emit_svg, exit, run_complexity_sweep, run_scenario, CliError, Scenario, OUT_DIR_ENV,
};

#[derive(Parser)]
#[command(
    name = "ripsnet",
    version,
    about = "Coverage-hole and wormhole localization on simulated sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of the rank-deficiency test.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Growth sweeps before classifying a cycle.
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// Power-iteration cap (default: 10 times the edge count).
    #[arg(long, global = true)]
    max_iters: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its report.
    Run {
        scenario: PathBuf,
        /// Also write an SVG figure.
        #[arg(long)]
        svg: bool,
        /// Output directory (the environment variable RIPSNET_OUT_DIR wins).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure broadcast cost against network size.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, scenario: Option<&str>) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or(flag)
        .or_else(|| scenario.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(path: &Path, svg: bool, out: Option<PathBuf>, common: &Common) -> Result<i32, CliError> {
    let mut s = Scenario::load(path)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(tol) = common.tol {
        s.algorithm.tol = tol;
    }
    if let Some(sweeps) = common.sweeps {
        s.algorithm.sweeps = sweeps;
    }
    if common.max_iters.is_some() {
        s.algorithm.max_iters = common.max_iters;
    }
    s.output.svg |= svg;
    let dir = out_dir(out, s.output.dir.as_deref());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let report = run_scenario(&s)?;
    let report_path = dir.join(format!("{}.report.json", s.name));
    write(&report_path, &report.to_json())?;
    println!("{}", report_path.display());
    if s.output.svg {
        let svg_path = dir.join(format!("{}.svg", s.name));
        write(&svg_path, &emit_svg(&report, &s.output.layers))?;
        println!("{}", svg_path.display());
    }
    let loc = &report.localization;
    eprintln!(
        "{}: {} partitions, {} survivors, {} inconclusive, {} verdicts",
        s.name,
        loc.partitions.len(),
        loc.survivors.len(),
        loc.inconclusive.len(),
        report.verdicts.len()
    );
    Ok(match report.outcome {
        Outcome::Ok => exit::OK,
        Outcome::Inconclusive => exit::INCONCLUSIVE,
    })
}

fn sweep(
    sizes: &[usize],
    repeats: usize,
    out: Option<PathBuf>,
    common: &Common,
) -> Result<i32, CliError> {
    let mut cfg = ripsnet::locator::LocatorConfig::default();
    if let Some(tol) = common.tol {
        cfg.tol = tol;
    }
    cfg.power.max_iters = common.max_iters;
    let seed = common.seed.unwrap_or(0);
    cfg.power.seed = seed;
    let dir = out_dir(out, None);
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let table = run_complexity_sweep(sizes, repeats, seed, &cfg)?;
    let csv_path = dir.join("sweep.csv");
    let f = fs::File::create(&csv_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    table.write_csv(f)?;
    let slopes = serde_json::json!({ "slopes": table.slopes, "error": table.error });
    write(&dir.join("sweep_slopes.json"), &format!("{slopes:#}\n"))?;
    println!("{}", csv_path.display());
    if let Some(sl) = table.slopes {
        eprintln!(
            "f-phase slope: total {:.3}, per node {:.3}; max-phase: total {:.3}, per node {:.3}; detection: total {:.3}, per node {:.3}",
            sl.f_total, sl.f_per_node, sl.max_total, sl.max_per_node, sl.detection_total, sl.detection_per_node
        );
    }
    match table.error {
        Some(e) => {
            eprintln!("sweep aborted, partial table written: {e}");
            Ok(exit::INCONCLUSIVE)
        }
        None => Ok(exit::OK),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, svg, out } => run(&scenario, svg, out, &cli.common),
        Command::Sweep {
            sizes,
            repeats,
            out,
        } => sweep(&sizes, repeats, out, &cli.common),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
