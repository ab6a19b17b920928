//! Command-line surface: build measurement files, certify them, sweep bound
//! curves to CSV, run the seesaw, run verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage,
//! parse or validation errors. Every command is deterministic given its
//! flags, so rerunning produces byte-identical output files.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::certify::{
    ideal_asp, incompatibility_bound_from_asp, norm_sum_lower_bound, overlap_entropy_lower_bound,
    thresholds, uncertainty_bound_from_asp, uncertainty_nontrivial_threshold, P_BAR_HEADROOM,
};
use crate::error::{Error, Result};
use crate::measurements::{
    depolarize, fourier_mub_pair, pair_from_json, pair_to_json, MeasurementPair,
};
use crate::oracles::{run_suite, SuiteOutcome, SUITE_NAMES};
use crate::qrac::{seesaw_optimize, seesaw_result_to_json, SeesawParams};
use crate::serialize::{csv_cell, read_file, write_file};

#[derive(Debug, Parser)]
#[command(
    name = "mubcert",
    about = "Simulate the 2^d -> 1 quantum random access code and certify mutually unbiased bases from its success probability",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the computational/Fourier mutually unbiased pair to a JSON file.
    Mub {
        /// Hilbert space dimension (at least 2).
        #[arg(long)]
        dim: usize,
        /// Output path for the measurement-pair JSON document.
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify a measurement pair and write the full report.
    Certify {
        /// Measurement-pair JSON file to certify.
        #[arg(long, conflicts_with = "dim")]
        measurements: Option<PathBuf>,
        /// Certify the built-in Fourier pair of this dimension instead.
        #[arg(long)]
        dim: Option<usize>,
        /// Depolarising noise applied to both POVMs before certifying.
        #[arg(long)]
        noise: Option<f64>,
        /// Output path for the certification report JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate bound curves against the success probability into CSV.
    Sweep {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        bound: BoundKind,
        /// Number of grid points (inclusive of both endpoints).
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Success probability range `lo hi`; defaults to the bound's
        /// nontrivial region.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        range: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seesaw optimisation of the success probability over states and POVMs.
    Optimize {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Maximum outer iterations per restart.
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run verification suites; exits 1 when any suite fails.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Trials per suite (grid budget for hlemma).
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Emit machine-readable JSON instead of one line per suite.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Entropy,
    Norms,
    Incompat,
    Uncertainty,
    All,
}

impl BoundKind {
    fn columns(self) -> Vec<&'static str> {
        match self {
            BoundKind::Entropy => vec!["entropy"],
            BoundKind::Norms => vec!["norms"],
            BoundKind::Incompat => vec!["incompat"],
            BoundKind::Uncertainty => vec!["uncertainty"],
            BoundKind::All => vec!["entropy", "norms", "incompat", "uncertainty"],
        }
    }
}

/// One sweep row: the grid point plus one optional value per column.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub p_bar: f64,
    pub values: Vec<Option<f64>>,
}

/// A tabulated sweep ready for CSV serialisation.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    /// Number of cells left empty because the grid point sits outside the
    /// bound's nontrivial region.
    pub absent_cells: usize,
}

impl SweepTable {
    /// CSV with header `p_bar,<bound columns>`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p_bar");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_cell(Some(row.p_bar)));
            for v in &row.values {
                out.push(',');
                out.push_str(&csv_cell(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Default sweep range: the bound's nontrivial region.
pub fn default_range(bound: BoundKind, d: usize) -> Result<(f64, f64)> {
    let p_q = ideal_asp(d)?;
    let t = thresholds(d)?;
    let lo = match bound {
        BoundKind::Entropy | BoundKind::All => t.entropy_threshold,
        BoundKind::Norms | BoundKind::Incompat => t.p_0,
        BoundKind::Uncertainty => uncertainty_nontrivial_threshold(d)?,
    };
    Ok((lo, p_q))
}

fn column_value(column: &str, p_bar: f64, d: usize) -> Option<f64> {
    match column {
        "entropy" => overlap_entropy_lower_bound(p_bar, d).ok(),
        "norms" => norm_sum_lower_bound(p_bar, d).ok(),
        "incompat" => incompatibility_bound_from_asp(p_bar, d).ok(),
        "uncertainty" => uncertainty_bound_from_asp(p_bar, d).ok(),
        _ => unreachable!("column names come from BoundKind::columns"),
    }
}

/// Evaluate the selected bounds on a uniform inclusive grid.
pub fn sweep(
    dim: usize,
    bound: BoundKind,
    points: usize,
    range: Option<(f64, f64)>,
) -> Result<SweepTable> {
    if points < 2 {
        return Err(Error::InvalidParams(format!(
            "a sweep needs at least 2 grid points, got {points}"
        )));
    }
    let p_q = ideal_asp(dim)?;
    let (lo, hi) = match range {
        Some(r) => r,
        None => default_range(bound, dim)?,
    };
    if !(0.5..=p_q + P_BAR_HEADROOM).contains(&lo) || hi > p_q + P_BAR_HEADROOM || lo >= hi {
        return Err(Error::OutOfRange {
            quantity: "sweep range",
            value: if lo >= hi { hi } else { lo },
            lo: 0.5,
            hi: p_q,
        });
    }
    let columns = bound.columns();
    let mut rows = Vec::with_capacity(points);
    let mut absent_cells = 0;
    for k in 0..points {
        let p_bar = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let values: Vec<Option<f64>> = columns
            .iter()
            .map(|c| {
                let v = column_value(c, p_bar, dim);
                if v.is_none() {
                    absent_cells += 1;
                }
                v
            })
            .collect();
        rows.push(SweepRow { p_bar, values });
    }
    Ok(SweepTable {
        columns,
        rows,
        absent_cells,
    })
}

fn format_suite_line(o: &SuiteOutcome) -> String {
    format!(
        "{} {:<13} worst_margin={:+.6e} trials={} tolerance={:.0e}",
        if o.passed { "PASS" } else { "FAIL" },
        o.suite_name,
        o.worst_margin,
        o.trials,
        o.tolerance
    )
}

fn load_pair(measurements: Option<&PathBuf>, dim: Option<usize>) -> Result<MeasurementPair> {
    match (measurements, dim) {
        (Some(path), None) => {
            let text = read_file(path)?;
            pair_from_json(&text, &path.display().to_string())
        }
        (None, Some(d)) => fourier_mub_pair(d),
        _ => Err(Error::InvalidParams(
            "pass exactly one of --measurements or --dim".into(),
        )),
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Mub { dim, out } => {
            let pair = fourier_mub_pair(dim)?;
            write_file(&out, &pair_to_json(&pair))?;
            println!(
                "wrote dimension-{dim} mutually unbiased pair to {}",
                out.display()
            );
            Ok(0)
        }
        Command::Certify {
            measurements,
            dim,
            noise,
            out,
        } => {
            let mut pair = load_pair(measurements.as_ref(), dim)?;
            if let Some(eta) = noise {
                pair =
                    MeasurementPair::new(depolarize(pair.a(), eta)?, depolarize(pair.b(), eta)?)?;
            }
            let report = crate::certify::certification_report(&pair)?;
            write_file(&out, &report.to_json())?;
            println!(
                "p_bar={:.12}  mub={}  consistency_ok={}  report={}",
                report.p_bar,
                report.direct.mub_flag,
                report.consistency.all_ok,
                out.display()
            );
            Ok(0)
        }
        Command::Sweep {
            dim,
            bound,
            points,
            range,
            out,
        } => {
            let range = range.map(|r| (r[0], r[1]));
            let table = sweep(dim, bound, points, range)?;
            if table.absent_cells > 0 {
                eprintln!(
                    "warning: {} cells fall outside their nontrivial region and were left empty",
                    table.absent_cells
                );
            }
            write_file(&out, &table.to_csv())?;
            println!(
                "wrote {} rows x {} bound columns to {}",
                table.rows.len(),
                table.columns.len(),
                out.display()
            );
            Ok(0)
        }
        Command::Optimize {
            dim,
            restarts,
            iters,
            seed,
            out,
        } => {
            let params = SeesawParams::new(dim, restarts, iters, seed);
            let result = seesaw_optimize(&params)?;
            write_file(&out, &seesaw_result_to_json(&result))?;
            let p_q = ideal_asp(dim)?;
            println!(
                "best_asp={:.12}  gap_to_ideal={:+.6e}  converged={}",
                result.best_asp,
                p_q - result.best_asp,
                result.converged
            );
            Ok(0)
        }
        Command::Verify {
            suite,
            trials,
            dim,
            seed,
            json,
        } => {
            let names: Vec<&str> = if suite == "all" {
                SUITE_NAMES.to_vec()
            } else {
                match SUITE_NAMES.iter().find(|&&n| n == suite) {
                    Some(&n) => vec![n],
                    None => return Err(Error::UnknownSuite(suite)),
                }
            };
            let outcomes: Vec<SuiteOutcome> = names
                .iter()
                .map(|n| run_suite(n, trials, dim, seed))
                .collect::<Result<Vec<_>>>()?;
            if json {
                println!("{}", crate::serialize::to_json(&outcomes));
            } else {
                for o in &outcomes {
                    println!("{}", format_suite_line(o));
                }
            }
            Ok(if outcomes.iter().all(|o| o.passed) {
                0
            } else {
                1
            })
        }
    }
}

/// Run a parsed command; maps errors onto the documented exit codes.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
