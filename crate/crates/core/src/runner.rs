//! Scenario-driven runs: verification sweeps, trajectories and metric reports.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::dynamics::{integrate_first_order, SingularityKind, Termination, Trajectory};
use crate::error::{Axis, Error};
use crate::metric::{canonical_jacobian, metric_from_sample, verify_transformation};
use crate::scalar::Vec3;
use crate::scenario::{parse_scenario, Diagnostic, Scenario, ScenarioError};

pub const DEFAULT_GRID: [usize; 3] = [21, 21, 21];
pub const DEFAULT_THRESHOLD: f64 = 1e-9;
/// Half-width of the default sweep along axes with an unbounded domain.
pub const DEFAULT_HALF_WIDTH: f64 = 5.0;
pub const WRONSKIAN_THRESHOLD: f64 = 1e-9;
const WRONSKIAN_SAMPLES: usize = 1001;

pub const CSV_HEADER: &str = "t,x,y,z,vx,vy,vz,dS0dx,dS0dy,dS0dz,law_residual,energy_residual";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn missing(field: &str) -> Self {
        Self::Scenario(ScenarioError::single(Diagnostic::validation(
            field, "missing",
        )))
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

pub fn load_scenario(path: &Path) -> RunResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    Ok(parse_scenario(&text)?)
}

/// Writes `contents` next to `path` under a temporary name and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> RunResult<()> {
    let name = path.file_name().ok_or_else(|| {
        RunError::io(
            path,
            io::Error::new(io::ErrorKind::InvalidInput, "no file name"),
        )
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, contents).map_err(|e| RunError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        RunError::io(path, e)
    })
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescription {
    pub counts: [usize; 3],
    pub lower: Vec3<f64>,
    pub upper: Vec3<f64>,
}

impl GridDescription {
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let n = self.counts[axis];
        if n == 1 {
            return self.lower[axis];
        }
        let (lo, hi) = (self.lower[axis], self.upper[axis]);
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        x.min(hi)
    }

    /// Point number `index` in x-fastest order.
    pub fn point(&self, index: usize) -> Vec3<f64> {
        let [nx, ny, _] = self.counts;
        let (i, j, k) = (index % nx, (index / nx) % ny, index / (nx * ny));
        [
            self.coordinate(0, i),
            self.coordinate(1, j),
            self.coordinate(2, k),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub grid: GridDescription,
    pub points_total: usize,
    pub points_evaluated: usize,
    pub nodal_skipped: usize,
    /// Evaluated points where some `∂_μS0` vanishes with a nonzero quantum term.
    pub metric_undefined: usize,
    pub max_qshje_residual: f64,
    pub mean_qshje_residual: f64,
    pub max_continuity_residual: f64,
    pub wronskian_drift: BTreeMap<Axis, f64>,
    /// Evaluated points per metric signature, e.g. `(+,+,+)`.
    pub signature_census: BTreeMap<String, usize>,
    pub threshold: f64,
    pub passed: bool,
}

enum PointOutcome {
    Nodal,
    Evaluated {
        residual: f64,
        continuity: f64,
        signature: Option<String>,
    },
}

fn sweep_grid(
    scenario: &Scenario,
    grid: Option<[usize; 3]>,
    domain: [(f64, f64); 3],
) -> GridDescription {
    let spec = &scenario.verify;
    let edge = |k: usize, hi: bool| {
        let (lo_d, hi_d) = domain[k];
        let bound = if hi { hi_d } else { lo_d };
        if bound.is_finite() {
            bound
        } else if hi {
            DEFAULT_HALF_WIDTH
        } else {
            -DEFAULT_HALF_WIDTH
        }
    };
    GridDescription {
        counts: grid.or(spec.grid).unwrap_or(DEFAULT_GRID),
        lower: spec
            .lower
            .unwrap_or(std::array::from_fn(|k| edge(k, false))),
        upper: spec.upper.unwrap_or(std::array::from_fn(|k| edge(k, true))),
    }
}

/// Evaluates the residuals and the metric signature on a grid.
///
/// Points are evaluated in parallel; nodal points are counted and skipped.
pub fn run_verify(scenario: &Scenario, grid: Option<[usize; 3]>) -> RunResult<VerificationReport> {
    let action = scenario.build()?;
    let grid = sweep_grid(scenario, grid, action.field().domain());
    let outcomes = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let r = grid.point(index);
            let sample = match action.sample(&r) {
                Ok(s) => s,
                Err(Error::NodalPoint { .. }) => return Ok(PointOutcome::Nodal),
                Err(e) => return Err(e),
            };
            let residual = action.qshje_residual_of(&sample).abs();
            let continuity = action.continuity_identity_residual(&r)?;
            let signature = match metric_from_sample(&action, &sample, &r) {
                Ok(m) => Some(m.signature.to_string()),
                Err(Error::NodeSingularity { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(PointOutcome::Evaluated {
                residual,
                continuity,
                signature,
            })
        })
        .collect::<crate::error::Result<Vec<_>>>()?;

    let mut nodal_skipped = 0;
    let mut metric_undefined = 0;
    let mut evaluated = 0;
    let mut max_residual: f64 = 0.0;
    let mut sum_residual = 0.0;
    let mut max_continuity: f64 = 0.0;
    let mut census = BTreeMap::new();
    for outcome in outcomes {
        match outcome {
            PointOutcome::Nodal => nodal_skipped += 1,
            PointOutcome::Evaluated {
                residual,
                continuity,
                signature,
            } => {
                evaluated += 1;
                max_residual = max_residual.max(residual);
                sum_residual += residual;
                max_continuity = max_continuity.max(continuity);
                match signature {
                    Some(s) => *census.entry(s).or_insert(0) += 1,
                    None => metric_undefined += 1,
                }
            }
        }
    }

    let mut wronskian_drift = BTreeMap::new();
    for pair in action.field().pairs() {
        wronskian_drift.insert(pair.axis, pair.wronskian_drift(WRONSKIAN_SAMPLES)?);
    }
    let threshold = scenario.verify.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let passed = evaluated > 0
        && max_residual < threshold
        && wronskian_drift.values().all(|d| *d < WRONSKIAN_THRESHOLD);
    Ok(VerificationReport {
        points_total: grid.len(),
        grid,
        points_evaluated: evaluated,
        nodal_skipped,
        metric_undefined,
        max_qshje_residual: max_residual,
        mean_qshje_residual: if evaluated > 0 {
            sum_residual / evaluated as f64
        } else {
            0.0
        },
        max_continuity_residual: max_continuity,
        wronskian_drift,
        signature_census: census,
        threshold,
        passed,
    })
}

/// Integrates the first-order trajectory from `[trajectory]`, with `r0` and
/// `t_end` overridable.
pub fn run_trajectory(
    scenario: &Scenario,
    r0: Option<Vec3<f64>>,
    t_end: Option<f64>,
) -> RunResult<Trajectory<f64>> {
    let r0 = r0
        .or(scenario.trajectory.r0)
        .ok_or_else(|| RunError::missing("trajectory.r0"))?;
    let config = scenario
        .integrator_config(t_end)
        .ok_or_else(|| RunError::missing("trajectory.t_end"))?;
    let action = scenario.build()?;
    Ok(integrate_first_order(&action, r0, &config)?)
}

/// One row per accepted state, every number with 17 significant digits.
pub fn trajectory_csv(trajectory: &Trajectory<f64>) -> String {
    let mut out = String::with_capacity(256 * (trajectory.states.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (s, d) in trajectory.states.iter().zip(&trajectory.diagnostics) {
        let row = [
            s.t,
            s.position[0],
            s.position[1],
            s.position[2],
            s.velocity[0],
            s.velocity[1],
            s.velocity[2],
            d.grad_s0[0],
            d.grad_s0[1],
            d.grad_s0[2],
            d.law_residual,
            d.energy_residual,
        ];
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Sidecar record describing how a trajectory ended.
pub fn termination_json(trajectory: &Trajectory<f64>) -> serde_json::Value {
    let summary = json!({
        "states": trajectory.states.len(),
        "max_law_residual": trajectory.max_law_residual(),
        "max_energy_residual": trajectory.max_energy_residual(),
    });
    let termination = match &trajectory.termination {
        Termination::Completed => json!({ "type": "completed" }),
        Termination::SingularityEvent { kind, t, position } => json!({
            "type": "singularity_event",
            "singularity": kind,
            "t": t,
            "position": position,
        }),
        Termination::DomainExit { t, position } => json!({
            "type": "domain_exit",
            "t": t,
            "position": position,
        }),
    };
    json!({ "termination": termination, "summary": summary })
}

/// Path of the termination sidecar for a trajectory CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("termination.json")
}

/// Gnuplot script plotting the trajectory and its residuals from `csv`.
pub fn gnuplot_script(csv: &Path) -> String {
    let name = csv
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set multiplot layout 2,1\n\
         set xlabel 't'\n\
         plot '{name}' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n\
         set logscale y\n\
         plot '{name}' using 1:(abs($11)+1e-300) with lines title 'law residual', \
         '' using 1:(abs($12)+1e-300) with lines title 'energy residual'\n\
         unset multiplot\n"
    )
}

/// Whether the trajectory stopped at a singularity.
pub fn is_singular(trajectory: &Trajectory<f64>) -> bool {
    matches!(trajectory.termination, Termination::SingularityEvent { .. })
}

pub fn singularity_kind(trajectory: &Trajectory<f64>) -> Option<SingularityKind> {
    match trajectory.termination {
        Termination::SingularityEvent { kind, .. } => Some(kind),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricPointReport {
    pub point: Vec3<f64>,
    pub a_upper: Option<Vec3<f64>>,
    pub a_lower: Option<Vec3<f64>>,
    pub signature: Option<String>,
    pub jacobian: Option<[[f64; 3]; 3]>,
    pub residuals: Option<[f64; 12]>,
    /// Why the metric or the Jacobian is unavailable.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub points: Vec<MetricPointReport>,
}

/// Metric, canonical Jacobian and transformation residuals at each point.
pub fn run_metric(scenario: &Scenario, points: &[Vec3<f64>]) -> RunResult<MetricReport> {
    let action = scenario.build()?;
    let mut out = Vec::with_capacity(points.len());
    for &r in points {
        let mut report = MetricPointReport {
            point: r,
            a_upper: None,
            a_lower: None,
            signature: None,
            jacobian: None,
            residuals: None,
            error: None,
        };
        let metric = action
            .sample(&r)
            .and_then(|s| metric_from_sample(&action, &s, &r));
        match metric {
            Ok(m) => {
                report.a_upper = Some(m.a_upper);
                report.a_lower = Some(m.a_lower);
                report.signature = Some(m.signature.to_string());
                match canonical_jacobian(&m) {
                    Ok(j) => {
                        report.jacobian = Some(j.entries);
                        report.residuals = Some(verify_transformation(&j, &m).values);
                    }
                    Err(e) => report.error = Some(e.to_string()),
                }
            }
            Err(e @ (Error::NodalPoint { .. } | Error::NodeSingularity { .. })) => {
                report.error = Some(e.to_string())
            }
            Err(e) => return Err(e.into()),
        }
        out.push(report);
    }
    Ok(MetricReport { points: out })
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &Vec3<f64>| format!("({:.12e}, {:.12e}, {:.12e})", v[0], v[1], v[2]);
        for p in &self.points {
            writeln!(f, "point {}", vec(&p.point))?;
            if let (Some(up), Some(low), Some(sig)) = (&p.a_upper, &p.a_lower, &p.signature) {
                writeln!(f, "  a_upper   {}", vec(up))?;
                writeln!(f, "  a_lower   {}", vec(low))?;
                writeln!(f, "  signature {sig}")?;
            }
            if let Some(j) = &p.jacobian {
                for (m, row) in j.iter().enumerate() {
                    let label = if m == 0 { "  jacobian " } else { "           " };
                    writeln!(f, "{label}{}", vec(row))?;
                }
            }
            if let Some(res) = &p.residuals {
                let max = res.iter().fold(0.0f64, |a, b| a.max(*b));
                writeln!(f, "  residuals max {max:.3e}")?;
                let strs: Vec<String> = res.iter().map(|r| format!("{r:.3e}")).collect();
                writeln!(f, "    {}", strs.join(" "))?;
            }
            if let Some(e) = &p.error {
                writeln!(f, "  error     {e}")?;
            }
        }
        Ok(())
    }
}
