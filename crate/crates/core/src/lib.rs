//! Solutions of the three-dimensional quantum stationary Hamilton-Jacobi
//! equation built from pairs of real Schrödinger solutions, the quantum
//! metric they induce, and trajectories obeying `v·∇S0 = 2(E − V)`.
//!
//! All numerical modules are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which the scenario runner
//! and the command-line front end use.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod dynamics;
pub mod error;
pub mod metric;
pub mod potentials;
pub mod runner;
pub mod scalar;
pub mod scenario;
pub mod schrodinger;

pub use action::{ActionSample, ReducedActionField};
pub use dynamics::{IntegratorConfig, Termination, Trajectory, TrajectoryState};
pub use error::{Axis, Error, Result, Signature};
pub use metric::{JacobianMatrix, QuantumMetric, TransformationResiduals};
pub use potentials::{AxisPotential, SeparablePotential};
pub use scalar::{Scalar, Vec3};
pub use schrodinger::{AxisSolutionPair, FieldSample, SolutionField3D};

pub type AxisPotential64 = AxisPotential<f64>;
pub type SeparablePotential64 = SeparablePotential<f64>;
pub type AxisSolutionPair64 = AxisSolutionPair<f64>;
pub type SolutionField64 = SolutionField3D<f64>;
pub type ReducedActionField64 = ReducedActionField<f64>;
pub type ActionSample64 = ActionSample<f64>;
pub type QuantumMetric64 = QuantumMetric<f64>;
pub type JacobianMatrix64 = JacobianMatrix<f64>;
pub type IntegratorConfig64 = IntegratorConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type TrajectoryState64 = TrajectoryState<f64>;

pub type SolutionField32 = SolutionField3D<f32>;
pub type ReducedActionField32 = ReducedActionField<f32>;
