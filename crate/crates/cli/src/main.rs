use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qtraj_core::runner::{
    gnuplot_script, is_singular, load_scenario, run_metric, run_trajectory, run_verify,
    sidecar_path, termination_json, to_json, trajectory_csv, write_atomic, RunError,
};
use qtraj_core::scenario::{Diagnostic, ScenarioError};
use qtraj_core::Vec3;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

/// Quantum Hamilton-Jacobi fields, quantum metric and quantum trajectories.
#[derive(Parser)]
#[command(name = "qtraj", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the QSHJE and continuity residuals on a grid.
    Verify {
        scenario: PathBuf,
        /// Points per axis, as NX,NY,NZ.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<[usize; 3]>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a trajectory and write it as CSV.
    Trajectory {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_point)]
        r0: Option<Vec3<f64>>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// CSV path; defaults to the scenario name with a .csv extension.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Report the metric, canonical Jacobian and transformation residuals.
    Metric {
        scenario: PathBuf,
        /// Points as x,y,z[;x,y,z...]; defaults to the scenario's points.
        #[arg(long, value_parser = parse_points)]
        at: Option<PointList>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", v.trim()))
        })
        .collect()
}

fn parse_point(s: &str) -> Result<Vec3<f64>, String> {
    match parse_numbers(s)?.as_slice() {
        &[x, y, z] => Ok([x, y, z]),
        other => Err(format!("expected x,y,z, got {} values", other.len())),
    }
}

#[derive(Clone)]
struct PointList(Vec<Vec3<f64>>);

fn parse_points(s: &str) -> Result<PointList, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_point)
        .collect::<Result<_, _>>()
        .map(PointList)
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let counts = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{}` is not a count", v.trim()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    match counts.as_slice() {
        &[x, y, z] if x > 0 && y > 0 && z > 0 => Ok([x, y, z]),
        _ => Err("expected three positive counts NX,NY,NZ".into()),
    }
}

fn exit_code(err: &RunError) -> u8 {
    match err {
        RunError::Scenario(_) => EXIT_VALIDATION,
        RunError::Numerical(_) => EXIT_NUMERICAL,
        RunError::Io { .. } => EXIT_IO,
    }
}

fn verify(scenario: &Path, grid: Option<[usize; 3]>, out: Option<&Path>) -> Result<u8, RunError> {
    let s = load_scenario(scenario)?;
    let report = run_verify(&s, grid)?;
    let json = to_json(&report);
    match out {
        Some(path) => {
            write_atomic(path, &json)?;
            println!(
                "{}: max |residual| {:.3e} over {} points ({} nodal skipped)",
                if report.passed { "PASS" } else { "FAIL" },
                report.max_qshje_residual,
                report.points_evaluated,
                report.nodal_skipped
            );
        }
        None => print!("{json}"),
    }
    Ok(if report.passed { 0 } else { EXIT_NUMERICAL })
}

fn trajectory(
    scenario: &Path,
    r0: Option<Vec3<f64>>,
    t_end: Option<f64>,
    out: Option<PathBuf>,
    plot: bool,
) -> Result<u8, RunError> {
    let s = load_scenario(scenario)?;
    let traj = run_trajectory(&s, r0, t_end)?;
    let out = out.unwrap_or_else(|| {
        let stem = scenario.file_stem().unwrap_or_default();
        PathBuf::from(stem).with_extension("csv")
    });
    write_atomic(&out, &trajectory_csv(&traj))?;
    let sidecar = sidecar_path(&out);
    write_atomic(&sidecar, &to_json(&termination_json(&traj)))?;
    if plot {
        write_atomic(&out.with_extension("gp"), &gnuplot_script(&out))?;
    }
    println!(
        "{} states written to {}; termination in {}",
        traj.states.len(),
        out.display(),
        sidecar.display()
    );
    Ok(if is_singular(&traj) {
        EXIT_NUMERICAL
    } else {
        0
    })
}

fn metric(scenario: &Path, at: Option<PointList>, out: Option<&Path>) -> Result<u8, RunError> {
    let s = load_scenario(scenario)?;
    let points = at.map(|p| p.0).unwrap_or_else(|| s.metric.points.clone());
    if points.is_empty() {
        return Err(RunError::Scenario(ScenarioError {
            diagnostics: vec![Diagnostic::Validation {
                field: "metric.points".into(),
                message: "no points given (use --at or [metric] points)".into(),
            }],
        }));
    }
    let report = run_metric(&s, &points)?;
    print!("{report}");
    if let Some(path) = out {
        write_atomic(path, &to_json(&report))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            scenario,
            grid,
            out,
        } => verify(&scenario, grid, out.as_deref()),
        Command::Trajectory {
            scenario,
            r0,
            t_end,
            out,
            plot,
        } => trajectory(&scenario, r0, t_end, out, plot),
        Command::Metric { scenario, at, out } => metric(&scenario, at, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
