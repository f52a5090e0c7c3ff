use clap::{Args, Parser, Subcommand};
use hycut::harness::{output, run_condnum_study, run_convergence, run_cut_robustness, run_solve, Config};
use hycut::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Hybridized cut finite element solver for 2D interface problems.
#[derive(Parser)]
#[command(name = "hycut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON study configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.csv and report.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write zero wall times so reports are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on the finest configured grid.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Raster CSV of the bulk solution (x, y, value, subdomain_id).
        #[arg(long)]
        dump_field: Option<PathBuf>,
    },
    /// Error convergence over the configured grids.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Schur complement condition numbers over the configured grids.
    Condnum {
        #[command(flatten)]
        common: Common,
    },
    /// Interface offset sweep with and without stabilization.
    Robustness {
        #[command(flatten)]
        common: Common,
    },
    /// Active cells and ghost faces on the finest configured grid.
    DumpGeometry {
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<i32, Error> {
    let (common, dump_field) = match &cli.command {
        Command::Solve { common, dump_field } => (common, dump_field.clone()),
        Command::Converge { common }
        | Command::Condnum { common }
        | Command::Robustness { common }
        | Command::DumpGeometry { common } => (common, None),
    };
    let config = Config::load(&common.config)?;
    let timing = !common.no_timing;
    let report = match cli.command {
        Command::Solve { .. } => {
            let (report, solved) = run_solve(&config, timing)?;
            if let (Some(path), Some(s)) = (dump_field, &solved) {
                output::write_field(&path, &output::field_raster(s, config.raster))?;
            }
            report
        }
        Command::Converge { .. } => run_convergence(&config, timing)?,
        Command::Condnum { .. } => run_condnum_study(&config, timing)?,
        Command::Robustness { .. } => run_cut_robustness(&config, timing)?,
        Command::DumpGeometry { .. } => {
            let part = config.build_partition()?;
            let n = *config.grids.iter().max().expect("validated grids");
            let meshes = output::active_meshes(&part, &config.grid(&part, n))?;
            output::write_geometry(&common.out, &meshes)?;
            return Ok(0);
        }
    };
    output::write_report(&common.out, &report)?;
    for row in &report.rows {
        println!(
            "h={:.6} p={} dofs={}+{} energy={} l2={} kappa={} status={}",
            row.h,
            row.p,
            row.dofs_bulk,
            row.dofs_skeleton,
            fmt(row.energy_error),
            fmt(row.l2_error),
            fmt(row.kappa),
            row.status
        );
    }
    if let Some(f) = &report.failure {
        eprintln!("error: {}", f.message);
    }
    Ok(report.exit_code())
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
