use std::fmt;

use thiserror::Error;

/// Cartesian axis label.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign pattern of the diagonal quantum metric, e.g. `(-,+,+)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature(pub [i8; 3]);

impl Signature {
    pub fn is_riemannian(&self) -> bool {
        self.0.iter().all(|&s| s > 0)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |s: i8| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        write!(
            f,
            "({},{},{})",
            sym(self.0[0]),
            sym(self.0[1]),
            sym(self.0[2])
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {x} on axis {axis} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain {
        axis: Axis,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid potential on axis {axis}: {reason}")]
    InvalidPotential { axis: Axis, reason: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("energy {given} conflicts with catalog energy {expected}")]
    InconsistentEnergy { expected: f64, given: f64 },

    #[error("initial conditions are linearly dependent")]
    DegenerateIcs,

    #[error("solution magnitude overflowed near x = {x}; shrink the domain")]
    Overflow { x: f64 },

    #[error("invalid Numerov setup: {0}")]
    InvalidNumerovSetup(String),

    #[error("invalid product term list: {0}")]
    InvalidTerms(String),

    #[error("theta and phi are proportional on the probe grid (max |phi grad theta - theta grad phi| = {max_cross})")]
    ProportionalSolutions { max_cross: f64 },

    #[error("parameter `a` must be nonzero")]
    ZeroActionParameter,

    #[error("nodal point at {position:?}: R = {amplitude}")]
    NodalPoint { position: [f64; 3], amplitude: f64 },

    #[error("conjugate momentum component along {axis} vanishes at {position:?}")]
    NodeSingularity { axis: Axis, position: [f64; 3] },

    #[error("1D conjugate momentum vanishes (|S0'| = {value})")]
    ZeroConjugateMomentum { value: f64 },

    #[error("classical turning point: |E - V| = {gap}")]
    ClassicalTurningPoint { gap: f64 },

    #[error("metric signature {signature} is not Riemannian; no real Jacobian exists")]
    NonRiemannianPoint { signature: Signature },

    #[error("field is not one-dimensional along x: {0}")]
    NotOneDimensional(String),

    #[error("initial velocity deviates from the velocity field by {deviation}")]
    InconsistentInitialVelocity { deviation: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
