//! Survey planner command line.
//!
//! Exit codes: 0 success, 2 input error, 3 mission abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swathplan_cli::{resolve_out_dir, run_experiment, run_single, write_atomic, ExperimentSpec};
use swathplan_core::{
    analyze_grid, layout_tracks, polygon_adaptation, Error, RangeInterval, RiskGrid, Strategy,
};

const EXIT_INPUT: u8 = 2;
const EXIT_ABORT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "swathplan",
    about = "Coverage path planning with adaptive track spacing for side-looking sonar surveys",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose the adapted sensor range for a width and lay out the tracks.
    Plan {
        /// Sweep-axis width of the area, metres.
        #[arg(long)]
        width: f64,
        /// Nadir half-gap, metres.
        #[arg(long)]
        rmin: f64,
        /// Lower bound of the candidate range interval, metres.
        #[arg(long)]
        rlow: f64,
        /// Upper bound of the candidate range interval, metres.
        #[arg(long)]
        rhigh: f64,
        /// Candidate step, metres.
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Write the track table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one mission (control or adaptive) from an experiment spec.
    Simulate {
        /// Experiment spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Which strategy to run.
        #[arg(long)]
        strategy: String,
        /// Output directory (defaults to the spec's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze an exported risk grid: coverage, histogram, mixture fit.
    Analyze {
        /// Risk grid file as written by simulate/experiment.
        #[arg(long)]
        grid: PathBuf,
        /// Mixture components to fit.
        #[arg(long, default_value_t = 2)]
        components: usize,
        /// Perimeter margin, in cells, excluded from the analysis.
        #[arg(long, default_value_t = 2)]
        margin: usize,
        /// Histogram bin count.
        #[arg(long, default_value_t = 25)]
        bins: usize,
        /// Seed for the mixture fit.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the control and adaptive missions of a spec and compare them.
    Experiment {
        /// Experiment spec file.
        #[arg(long)]
        spec: PathBuf,
        /// Output directory (defaults to the spec's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &Error) -> u8 {
    match e {
        Error::NoAdmissibleRange { .. } => EXIT_ABORT,
        _ => EXIT_INPUT,
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Plan {
            width,
            rmin,
            rlow,
            rhigh,
            step,
            out,
        } => {
            let interval = RangeInterval::bounded(rmin, rlow, rhigh)?.with_step(step)?;
            let r_adpt = polygon_adaptation(width, &interval)?;
            let plan = layout_tracks(width, r_adpt, rmin, 0.0)?;
            println!("r_adpt = {r_adpt} m");
            println!("tracks = {}", plan.n_tracks());
            match out {
                Some(path) => {
                    write_atomic(&path, &plan.to_table())?;
                    println!("plan written to {}", path.display());
                }
                None => print!("{}", plan.to_table()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            spec,
            strategy,
            out,
        } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let strategy: Strategy = strategy.parse()?;
            let out_dir = resolve_out_dir(&spec, out.as_deref());
            let result = run_single(&spec, strategy, &out_dir)?;
            println!(
                "{}: {} tracks, {} uncovered cells ({:.4}%), artifacts in {}",
                spec.name,
                result.plan.n_tracks(),
                result.metrics.uncovered_cells,
                100.0 * result.metrics.uncovered_fraction,
                out_dir.display()
            );
            if let Some(reason) = &result.aborted {
                eprintln!("mission aborted: {reason}");
                return Ok(ExitCode::from(EXIT_ABORT));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            grid,
            components,
            margin,
            bins,
            seed,
        } => {
            let text = std::fs::read_to_string(&grid).map_err(|e| Error::Parse {
                line: 0,
                message: format!("cannot read {}: {e}", grid.display()),
            })?;
            let grid = RiskGrid::from_text(&text)?;
            if 2 * margin >= grid.n_sweep().min(grid.n_along()) {
                return Err(Error::InvalidParams(format!(
                    "margin {margin} leaves no cells in a {}x{} grid",
                    grid.n_sweep(),
                    grid.n_along()
                )));
            }
            let report = analyze_grid(&grid, components, margin, bins, seed)?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { spec, out } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let out_dir = resolve_out_dir(&spec, out.as_deref());
            let outcome = run_experiment(&spec, &out_dir)?;
            println!("experiment {} -> {}", spec.name, out_dir.display());
            println!(
                "control : {} tracks, {} uncovered cells ({:.4}%)",
                outcome.control.plan.n_tracks(),
                outcome.control.metrics.uncovered_cells,
                100.0 * outcome.control.metrics.uncovered_fraction
            );
            println!(
                "adaptive: {} tracks, {} uncovered cells ({:.4}%)",
                outcome.adaptive.plan.n_tracks(),
                outcome.adaptive.metrics.uncovered_cells,
                100.0 * outcome.adaptive.metrics.uncovered_fraction
            );
            let hist: Vec<String> = outcome
                .adaptive
                .r_adpt_history
                .iter()
                .map(|(i, r)| format!("{r} (after track {i})"))
                .collect();
            println!("adaptive r_adpt history: {}", hist.join(", "));
            if let Some(report) = &outcome.report {
                println!();
                print!("{}", report.render_table());
            }
            if outcome.aborted() {
                for (label, m) in [
                    ("control", &outcome.control),
                    ("adaptive", &outcome.adaptive),
                ] {
                    if let Some(reason) = &m.aborted {
                        eprintln!("{label} mission aborted: {reason}");
                    }
                }
                return Ok(ExitCode::from(EXIT_ABORT));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
