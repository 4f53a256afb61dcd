//! Quantum trajectories.
//!
//! The primary route integrates `ẋ_μ = a^{μμ} ∂_μS0 / m0`, which makes
//! `v·∇S0 = 2(E − V)` an identity of the velocity field. The second route
//! integrates the Euler–Lagrange equations of
//! `L = (m0/2) Σ a_{μμ} ẋ_μ² − V` and serves as an independent check.

mod integrator;

use rayon::prelude::*;
use serde::Serialize;

use crate::action::{ActionSample, ReducedActionField};
use crate::error::{Axis, Error, Result};
use crate::metric::{metric_at, metric_from_sample, QuantumMetric};
use crate::scalar::{dot, Scalar, Vec3};
use integrator::{integrate, Guard, Run, Stop, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState<T> {
    pub t: T,
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub t_end: T,
    /// Threshold on `R` and on `min_μ |∂_μ S0|` below which integration stops.
    pub singularity_eps: T,
    /// Length scale of the finite-difference metric gradients used by the
    /// second-order route (step = `1e-6 * fd_scale * max(1, |x_μ|)`).
    pub fd_scale: T,
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(t_end: T) -> Self {
        Self {
            rel_tol: T::lit(1e-9),
            abs_tol: T::lit(1e-11),
            max_step: t_end.max(T::one()),
            t_end,
            singularity_eps: T::lit(1e-10),
            fd_scale: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("t_end", self.t_end),
            ("fd_scale", self.fd_scale),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.singularity_eps >= T::zero()) {
            return Err(Error::InvalidConfig(
                "singularity_eps must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances<T> {
        Tolerances {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            t_end: self.t_end,
        }
    }
}

/// Why integration stopped at a singular configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularityKind {
    /// `R` fell below the threshold.
    NodalPoint,
    /// A conjugate momentum component fell below the threshold.
    MomentumNode { axis: Axis },
    /// The step controller could not make progress.
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination<T> {
    Completed,
    SingularityEvent {
        kind: SingularityKind,
        t: T,
        position: Vec3<T>,
    },
    DomainExit {
        t: T,
        position: Vec3<T>,
    },
}

/// Residuals recorded for every accepted state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics<T> {
    /// `v·∇S0 − 2(E − V)`.
    pub law_residual: T,
    /// `(m0/2) Σ a_{μμ} v_μ² + V − E`.
    pub energy_residual: T,
    pub grad_s0: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub states: Vec<TrajectoryState<T>>,
    pub diagnostics: Vec<StateDiagnostics<T>>,
    pub termination: Termination<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn max_law_residual(&self) -> T {
        self.diagnostics
            .iter()
            .fold(T::zero(), |acc, d| acc.max(d.law_residual.abs()))
    }

    pub fn max_energy_residual(&self) -> T {
        self.diagnostics
            .iter()
            .fold(T::zero(), |acc, d| acc.max(d.energy_residual.abs()))
    }

    pub fn last(&self) -> Option<&TrajectoryState<T>> {
        self.states.last()
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// `v_μ = a^{μμ} ∂_μ S0 / m0`.
pub fn velocity_field<T: Scalar>(action: &ReducedActionField<T>, r: &Vec3<T>) -> Result<Vec3<T>> {
    let s = action.sample(r)?;
    let metric = metric_from_sample(action, &s, r)?;
    Ok(velocity_from(action, &s, &metric))
}

fn velocity_from<T: Scalar>(
    action: &ReducedActionField<T>,
    s: &ActionSample<T>,
    metric: &QuantumMetric<T>,
) -> Vec3<T> {
    let m = action.mass();
    std::array::from_fn(|k| {
        if metric.inert[k] {
            T::zero()
        } else {
            metric.a_upper[k] * s.grad_s0[k] / m
        }
    })
}

/// `v·∇S0 − 2(E − V)` at the state.
pub fn law_residual<T: Scalar>(
    action: &ReducedActionField<T>,
    state: &TrajectoryState<T>,
) -> Result<T> {
    let s = action.sample(&state.position)?;
    Ok(law_residual_of(action, &s, &state.velocity))
}

fn law_residual_of<T: Scalar>(
    action: &ReducedActionField<T>,
    s: &ActionSample<T>,
    v: &Vec3<T>,
) -> T {
    dot(v, &s.grad_s0) - T::lit(2.0) * (action.energy() - s.potential)
}

fn kinetic<T: Scalar>(action: &ReducedActionField<T>, metric: &QuantumMetric<T>, v: &Vec3<T>) -> T {
    let sum = (0..3).fold(T::zero(), |acc, k| acc + metric.a_lower[k] * v[k] * v[k]);
    T::lit(0.5) * action.mass() * sum
}

/// `(m0/2) Σ a_{μμ} v_μ² + V − E`.
pub fn energy_residual<T: Scalar>(
    action: &ReducedActionField<T>,
    state: &TrajectoryState<T>,
) -> Result<T> {
    let s = action.sample(&state.position)?;
    let metric = metric_from_sample(action, &s, &state.position)?;
    Ok(kinetic(action, &metric, &state.velocity) + s.potential - action.energy())
}

/// `(m0/2) Σ a_{μμ} v_μ² − V`.
pub fn quantum_lagrangian<T: Scalar>(
    action: &ReducedActionField<T>,
    state: &TrajectoryState<T>,
) -> Result<T> {
    let s = action.sample(&state.position)?;
    let metric = metric_from_sample(action, &s, &state.position)?;
    Ok(kinetic(action, &metric, &state.velocity) - s.potential)
}

/// Largest `|ẋ ∂_x S0 − 2(E − V)|` over a trajectory of a field varying along x only.
pub fn reduce_1d_check<T: Scalar>(
    action: &ReducedActionField<T>,
    trajectory: &Trajectory<T>,
) -> Result<T> {
    if let Some(reason) = action.field().one_dimensional_reason() {
        return Err(Error::NotOneDimensional(reason));
    }
    let mut worst = T::zero();
    for state in &trajectory.states {
        let s = action.sample(&state.position)?;
        let r = state.velocity[0] * s.grad_s0[0] - T::lit(2.0) * (action.energy() - s.potential);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Why a candidate position is unusable.
#[derive(Debug, Clone, PartialEq)]
enum Blocked {
    Singular(SingularityKind),
    OutOfDomain(Error),
}

fn classify_error(e: &Error) -> Blocked {
    match e {
        Error::OutOfDomain { .. } => Blocked::OutOfDomain(e.clone()),
        Error::NodeSingularity { axis, .. } => {
            Blocked::Singular(SingularityKind::MomentumNode { axis: *axis })
        }
        _ => Blocked::Singular(SingularityKind::NodalPoint),
    }
}

fn position_guard<T: Scalar>(
    action: &ReducedActionField<T>,
    r: &Vec3<T>,
    eps: T,
) -> Guard<Blocked> {
    let s = match action.sample(r) {
        Ok(s) => s,
        Err(e) => return Guard::Stop(classify_error(&e)),
    };
    if s.amplitude < eps {
        return Guard::Stop(Blocked::Singular(SingularityKind::NodalPoint));
    }
    let metric = match metric_from_sample(action, &s, r) {
        Ok(m) => m,
        Err(e) => return Guard::Stop(classify_error(&e)),
    };
    for k in 0..3 {
        if !metric.inert[k] && s.grad_s0[k].abs() < eps {
            return Guard::Stop(Blocked::Singular(SingularityKind::MomentumNode {
                axis: Axis::from_index(k).unwrap(),
            }));
        }
    }
    Guard::Admissible
}

fn diagnostics_for<T: Scalar>(
    action: &ReducedActionField<T>,
    position: &Vec3<T>,
    velocity: &Vec3<T>,
) -> Result<StateDiagnostics<T>> {
    let s = action.sample(position)?;
    let metric = metric_from_sample(action, &s, position)?;
    Ok(StateDiagnostics {
        law_residual: law_residual_of(action, &s, velocity),
        energy_residual: kinetic(action, &metric, velocity) + s.potential - action.energy(),
        grad_s0: s.grad_s0,
    })
}

fn blocked_start<T: Scalar>(r0: &Vec3<T>, blocked: Blocked) -> Result<Trajectory<T>> {
    match blocked {
        Blocked::Singular(kind) => Ok(Trajectory {
            states: Vec::new(),
            diagnostics: Vec::new(),
            termination: Termination::SingularityEvent {
                kind,
                t: T::zero(),
                position: *r0,
            },
        }),
        Blocked::OutOfDomain(e) => Err(e),
    }
}

fn finish<T: Scalar, const N: usize>(
    action: &ReducedActionField<T>,
    run: Run<T, N, Blocked>,
    split: impl Fn(&[T; N]) -> Result<(Vec3<T>, Vec3<T>)>,
) -> Result<Trajectory<T>> {
    let mut states = Vec::with_capacity(run.states.len());
    let mut diagnostics = Vec::with_capacity(run.states.len());
    for (t, y) in run.times.iter().zip(run.states.iter()) {
        let (position, velocity) = split(y)?;
        diagnostics.push(diagnostics_for(action, &position, &velocity)?);
        states.push(TrajectoryState {
            t: *t,
            position,
            velocity,
        });
    }
    let last_position = |i: usize| states[i].position;
    let termination = match run.stop {
        Stop::Completed => Termination::Completed,
        Stop::StepUnderflow {
            t,
            cause: Some(Error::OutOfDomain { .. }),
        } => Termination::DomainExit {
            t,
            position: last_position(states.len() - 1),
        },
        Stop::StepUnderflow { t, .. } => Termination::SingularityEvent {
            kind: SingularityKind::StepUnderflow,
            t,
            position: last_position(states.len() - 1),
        },
        Stop::Event { kind, t, y_index } => match kind {
            Blocked::Singular(kind) => Termination::SingularityEvent {
                kind,
                t,
                position: last_position(y_index),
            },
            Blocked::OutOfDomain(_) => Termination::DomainExit {
                t,
                position: last_position(y_index),
            },
        },
    };
    Ok(Trajectory {
        states,
        diagnostics,
        termination,
    })
}

/// Integrates `dr/dt = velocity_field(r)` from `r0`.
///
/// A start point that is itself singular yields an empty trajectory whose
/// termination is a singularity event at `t = 0`.
pub fn integrate_first_order<T: Scalar>(
    action: &ReducedActionField<T>,
    r0: Vec3<T>,
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    if let Guard::Stop(blocked) = position_guard(action, &r0, config.singularity_eps) {
        return blocked_start(&r0, blocked);
    }
    let run = integrate(
        |r: &Vec3<T>| velocity_field(action, r),
        |r: &Vec3<T>| position_guard(action, r, config.singularity_eps),
        r0,
        &config.tolerances(),
    );
    finish(action, run, |r| Ok((*r, velocity_field(action, r)?)))
}

/// `∂_ν a_{μμ}` as `grad[ν][μ]`, by central differences.
fn lower_metric_gradient<T: Scalar>(
    action: &ReducedActionField<T>,
    r: &Vec3<T>,
    fd_scale: T,
) -> Result<[Vec3<T>; 3]> {
    let mut grad = [[T::zero(); 3]; 3];
    for nu in 0..3 {
        let h = T::lit(1e-6) * fd_scale * r[nu].abs().max(T::one());
        let mut plus = *r;
        let mut minus = *r;
        plus[nu] = plus[nu] + h;
        minus[nu] = minus[nu] - h;
        let mp = metric_at(action, &plus)?;
        let mm = metric_at(action, &minus)?;
        grad[nu] = std::array::from_fn(|mu| (mp.a_lower[mu] - mm.a_lower[mu]) / (h + h));
    }
    Ok(grad)
}

/// Accelerations from the Euler–Lagrange equations of the quantum Lagrangian.
fn euler_lagrange_rhs<T: Scalar>(
    action: &ReducedActionField<T>,
    y: &[T; 6],
    fd_scale: T,
) -> Result<[T; 6]> {
    let r = [y[0], y[1], y[2]];
    let v = [y[3], y[4], y[5]];
    let metric = metric_at(action, &r)?;
    let grad = lower_metric_gradient(action, &r, fd_scale)?;
    let dv = action.field().potential().gradient(&r)?;
    let m = action.mass();
    let half = T::lit(0.5);
    let mut out = [v[0], v[1], v[2], T::zero(), T::zero(), T::zero()];
    for mu in 0..3 {
        let along_path = (0..3).fold(T::zero(), |acc, nu| acc + v[nu] * grad[nu][mu]);
        let from_metric = (0..3).fold(T::zero(), |acc, nu| acc + v[nu] * v[nu] * grad[mu][nu]);
        out[3 + mu] = (-v[mu] * along_path + half * from_metric - dv[mu] / m) / metric.a_lower[mu];
    }
    Ok(out)
}

/// Integrates the Euler–Lagrange form as a six-dimensional system.
///
/// The initial velocity is `velocity_field(r0)`; an explicit `v0` is only
/// accepted when it agrees with that value to `1e-9`.
pub fn integrate_second_order<T: Scalar>(
    action: &ReducedActionField<T>,
    r0: Vec3<T>,
    v0: Option<Vec3<T>>,
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    if let Guard::Stop(blocked) = position_guard(action, &r0, config.singularity_eps) {
        return blocked_start(&r0, blocked);
    }
    let field_v = velocity_field(action, &r0)?;
    let v = match v0 {
        Some(v) => {
            let deviation = (0..3).fold(T::zero(), |acc, k| acc.max((v[k] - field_v[k]).abs()));
            if deviation > T::lit(1e-9) {
                return Err(Error::InconsistentInitialVelocity {
                    deviation: deviation.as_f64(),
                });
            }
            v
        }
        None => field_v,
    };
    let y0 = [r0[0], r0[1], r0[2], v[0], v[1], v[2]];
    let run = integrate(
        |y: &[T; 6]| euler_lagrange_rhs(action, y, config.fd_scale),
        |y: &[T; 6]| position_guard(action, &[y[0], y[1], y[2]], config.singularity_eps),
        y0,
        &config.tolerances(),
    );
    finish(action, run, |y| {
        Ok(([y[0], y[1], y[2]], [y[3], y[4], y[5]]))
    })
}

/// First-order trajectories from many start points, integrated in parallel.
pub fn integrate_ensemble<T: Scalar>(
    action: &ReducedActionField<T>,
    starts: &[Vec3<T>],
    config: &IntegratorConfig<T>,
) -> Vec<Result<Trajectory<T>>> {
    starts
        .par_iter()
        .map(|r0| integrate_first_order(action, *r0, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{
        assemble_field, solve_axis_analytic, CatalogEntry, ProductTerm, Selector::*,
    };
    use std::f64::consts::PI;

    fn free_1d(a: f64, b: f64) -> ReducedActionField<f64> {
        let p = |axis, e| solve_axis_analytic(axis, e, None, 1.0, 1.0).unwrap();
        let field = assemble_field(
            [
                p(Axis::X, CatalogEntry::Free { k: 1.0 }),
                p(Axis::Y, CatalogEntry::ZeroEnergyFree),
                p(Axis::Z, CatalogEntry::ZeroEnergyFree),
            ],
            vec![ProductTerm::new(1.0, [U1, U1, U1])],
            vec![ProductTerm::new(1.0, [U2, U1, U1])],
        )
        .unwrap();
        ReducedActionField::new(field, a, b).unwrap()
    }

    fn state(position: Vec3<f64>, velocity: Vec3<f64>) -> TrajectoryState<f64> {
        TrajectoryState {
            t: 0.0,
            position,
            velocity,
        }
    }

    #[test]
    fn velocity_examples() {
        let v = velocity_field(&free_1d(1.0, 0.0), &[1.3, 2.0, -1.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1] == 0.0 && v[2] == 0.0);
        let f = free_1d(2.0, 0.0);
        assert!((velocity_field(&f, &[0.0; 3]).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((velocity_field(&f, &[PI / 2.0, 0.0, 0.0]).unwrap()[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn residual_examples() {
        let f = free_1d(1.0, 0.0);
        assert_eq!(
            law_residual(&f, &state([0.2, 0.0, 0.0], [1.0, 0.0, 0.0])).unwrap(),
            0.0
        );
        let r = law_residual(&f, &state([0.2, 0.0, 0.0], [2.0, 0.0, 0.0])).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        assert!(
            energy_residual(&f, &state([0.2, 0.0, 0.0], [1.0, 0.0, 0.0]))
                .unwrap()
                .abs()
                < 1e-15
        );
        assert!(
            (quantum_lagrangian(&f, &state([0.2, 0.0, 0.0], [1.0, 0.0, 0.0])).unwrap() - 0.5).abs()
                < 1e-15
        );

        let f = free_1d(2.0, 0.0);
        let good = state([0.0; 3], [0.5, 0.0, 0.0]);
        assert!(energy_residual(&f, &good).unwrap().abs() < 1e-14);
        assert!((quantum_lagrangian(&f, &good).unwrap() - 0.5).abs() < 1e-14);
        let bad = state([0.0; 3], [1.0, 0.0, 0.0]);
        assert!((energy_residual(&f, &bad).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn time_reversal() {
        let f = free_1d(1.7, 0.4);
        let g = free_1d(-1.7, -0.4);
        for x in [0.1, 0.9, 2.3] {
            let v = velocity_field(&f, &[x, 0.0, 0.0]).unwrap();
            let w = velocity_field(&g, &[x, 0.0, 0.0]).unwrap();
            assert_eq!(v[0], -w[0]);
        }
    }

    #[test]
    fn inconsistent_initial_velocity() {
        let f = free_1d(1.0, 0.0);
        let err = integrate_second_order(
            &f,
            [0.0; 3],
            Some([1.1, 0.0, 0.0]),
            &IntegratorConfig::new(1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentInitialVelocity { .. }));
    }

    #[test]
    fn invalid_config() {
        let mut c = IntegratorConfig::new(1.0);
        c.rel_tol = 0.0;
        assert!(integrate_first_order(&free_1d(1.0, 0.0), [0.0; 3], &c).is_err());
    }
}
