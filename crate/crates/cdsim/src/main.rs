//! Command-line front end: spectra, single evolutions, duration sweeps, and
//! benchmark dataset reproduction, all driven by scenario files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdsim::harness::{
    parse_grid, reproduce, run_scenario, sweep_tf, Scenario, DATASET_IDS, WORKERS_ENV,
};
use cdsim::spectral::spectral_flow;
use cdsim::Real;

#[derive(Parser)]
#[command(
    name = "cdsim",
    about = "Singlet-triplet transfer simulator: sweep spectra, state evolution, \
             fidelity sweeps, and benchmark datasets",
    after_help = format!(
        "Concurrency for sweeps is taken from {WORKERS_ENV} (default: all cores).\n\
         Energies are in ns^-1 and times in ns throughout."
    )
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the adiabatic branch energies across the sweep as CSV.
    Spectrum {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Number of nominal sweep-coordinate samples.
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the scenario once and print a JSON summary.
    Evolve {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Also write the population trajectory as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario across a grid of durations and emit fidelity CSV.
    Sweep {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Duration grid as lo:hi:n (uniform) or lo:hi:nlog (logarithmic).
        #[arg(long = "tf-grid")]
        tf_grid: String,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a pinned benchmark dataset.
    Reproduce {
        /// Dataset id; one of: spectra-reduced, spectra-full,
        /// dressed-transfer, fidelity-sweep, cd-pulses.
        id: String,
        /// Directory the files are written into.
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Writes `text` to `out`, or to stdout when no file was requested.
fn emit(out: Option<&PathBuf>, text: &str) -> cdsim::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn warn_if_reduction_is_strained(s: &Scenario) {
    if s.kind == cdsim::model::ModelKind::ThreeLevel && !s.drive.elimination_ok() {
        eprintln!(
            "warning: reduced model at |delta_c| = {} < 5 omega_c = {}; \
             the adiabatic elimination behind it is strained",
            s.drive.delta_c.abs(),
            5.0 * s.drive.omega_c
        );
    }
}

fn csv_cell(x: Real) -> String {
    format!("{x:.11e}")
}

fn run(cli: Cli) -> cdsim::Result<()> {
    match cli.command {
        Command::Spectrum {
            scenario,
            samples,
            out,
        } => {
            let s = Scenario::from_path(&scenario)?;
            warn_if_reduction_is_strained(&s);
            let flow = spectral_flow(s.kind, &s.manifold, &s.drive, &s.protocol, samples)?;
            let mut text = String::new();
            text.push_str("tau,nominal");
            for b in 0..flow.n_branches() {
                text.push_str(&format!(",e_branch{b}"));
            }
            text.push('\n');
            for i in 0..flow.n_samples() {
                text.push_str(&csv_cell(flow.taus()[i]));
                text.push_str(if flow.nominal_mask()[i] { ",1" } else { ",0" });
                for b in 0..flow.n_branches() {
                    text.push(',');
                    text.push_str(&csv_cell(flow.branch_energies(b)[i]));
                }
                text.push('\n');
            }
            emit(out.as_ref(), &text)
        }
        Command::Evolve { scenario, out } => {
            let s = Scenario::from_path(&scenario)?;
            warn_if_reduction_is_strained(&s);
            let outcome = run_scenario(&s)?;
            if let Some(path) = &out {
                let view = &outcome.measured;
                let labels = view.basis().labels();
                let mut text = String::from("t");
                for &label in labels {
                    let column = match label {
                        "+" => "plus".to_string(),
                        "-" => "minus".to_string(),
                        other => other.to_string(),
                    };
                    text.push_str(&format!(",p_{column}"));
                }
                text.push('\n');
                let pops: Vec<Vec<Real>> = labels
                    .iter()
                    .map(|&l| view.populations(l).expect("own labels resolve"))
                    .collect();
                for (i, &t) in view.times().iter().enumerate() {
                    text.push_str(&csv_cell(t));
                    for p in &pops {
                        text.push(',');
                        text.push_str(&csv_cell(p[i]));
                    }
                    text.push('\n');
                }
                std::fs::write(path, text)?;
            }
            let summary = serde_json::json!({
                "fidelity": outcome.fidelity,
                "infidelity": outcome.infidelity,
                "validity_flag": outcome.valid,
                "params": s.params_json(),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            Ok(())
        }
        Command::Sweep {
            scenario,
            tf_grid,
            out,
        } => {
            let s = Scenario::from_path(&scenario)?;
            warn_if_reduction_is_strained(&s);
            let grid = parse_grid(&tf_grid)?;
            let sweep = sweep_tf(&s, &grid)?;
            for (i, msg) in &sweep.failures {
                eprintln!("warning: grid point {i} failed: {msg}");
            }
            let mut text = String::from("t_f,valid_before_decay,fidelity,infidelity\n");
            for i in 0..grid.len() {
                text.push_str(&csv_cell(sweep.t_f[i]));
                text.push_str(if sweep.valid[i] { ",1" } else { ",0" });
                for value in [sweep.fidelity[i], sweep.infidelity[i]] {
                    text.push(',');
                    text.push_str(&csv_cell(value.unwrap_or(Real::NAN)));
                }
                text.push('\n');
            }
            emit(out.as_ref(), &text)
        }
        Command::Reproduce { id, outdir } => {
            if !DATASET_IDS.contains(&id.as_str()) {
                // Fail before writing anything for a typo'd id.
                return reproduce(&id, &outdir).map(|_| ());
            }
            let paths = reproduce(&id, &outdir)?;
            for path in paths {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}
