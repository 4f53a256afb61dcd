//! Real solutions of the stationary Schrödinger equation.
//!
//! Each axis carries a pair of independent solutions `u1`, `u2` of
//! `u'' = (2 m0 / hbar^2) (V_axis - E_axis) u`, either from a closed-form
//! catalog or tabulated by Numerov. Three such pairs at energies summing to
//! `E` generate 3D solutions as sums of product terms.

mod catalog;
mod field;
mod numerov;

pub use catalog::{solve_axis_analytic, CatalogEntry};
pub use field::{assemble_field, FieldSample, ProductTerm, Selector, SolutionField3D};
pub use numerov::{solve_axis_numerov, NumerovSetup, NumerovTable};

use crate::error::{Axis, Error, Result};
use crate::potentials::AxisPotential;
use crate::scalar::Scalar;

/// Where the two solutions of an axis pair come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSource<T> {
    Analytic(CatalogEntry<T>),
    Numerov(NumerovTable<T>),
}

/// Values and derivatives of both solutions at one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisValue<T> {
    pub u: [T; 2],
    pub du: [T; 2],
    pub d2u: [T; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSolutionPair<T> {
    pub axis: Axis,
    pub energy: T,
    pub hbar: T,
    pub mass: T,
    pub potential: AxisPotential<T>,
    pub source: PairSource<T>,
    /// `u1 u2' - u2 u1'` at the left edge of the domain (or at 0 when unbounded).
    pub wronskian_ref: T,
}

impl<T: Scalar> AxisSolutionPair<T> {
    /// `2 m0 / hbar^2`.
    pub fn coupling(&self) -> T {
        T::lit(2.0) * self.mass / (self.hbar * self.hbar)
    }

    pub fn domain(&self) -> (T, T) {
        match &self.source {
            PairSource::Analytic(entry) => entry.domain(),
            PairSource::Numerov(table) => table.domain(),
        }
    }

    pub fn check_domain(&self, x: T) -> Result<()> {
        let (lo, hi) = self.domain();
        if x.is_nan() || x < lo || x > hi {
            return Err(Error::OutOfDomain {
                axis: self.axis,
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(())
    }

    /// Values, slopes and curvatures of `u1`, `u2` at `x`.
    pub fn eval(&self, x: T) -> Result<AxisValue<T>> {
        self.check_domain(x)?;
        match &self.source {
            PairSource::Analytic(entry) => Ok(entry.eval(x)),
            PairSource::Numerov(table) => {
                let (u, du) = table.interpolate(x);
                // Curvature from the ODE itself, never from differencing the table.
                let f = self.coupling() * (self.potential.value(x)? - self.energy);
                Ok(AxisValue {
                    u,
                    du,
                    d2u: [f * u[0], f * u[1]],
                })
            }
        }
    }

    /// ODE coefficient `f(x)` in `u'' = f(x) u`.
    pub fn ode_coefficient(&self, x: T) -> Result<T> {
        Ok(self.coupling() * (self.potential.value(x)? - self.energy))
    }

    pub fn is_zero_energy_free(&self) -> bool {
        matches!(
            self.source,
            PairSource::Analytic(CatalogEntry::ZeroEnergyFree)
        )
    }

    /// Maximum relative deviation of the Wronskian from `wronskian_ref`
    /// over `samples` evenly spaced points of the domain (or of `[-10, 10]`
    /// when the domain is unbounded).
    pub fn wronskian_drift(&self, samples: usize) -> Result<T> {
        let (lo, hi) = self.domain();
        let lo = if lo.is_finite() { lo } else { T::lit(-10.0) };
        let hi = if hi.is_finite() { hi } else { T::lit(10.0) };
        let n = samples.max(2);
        let scale = self.wronskian_ref.abs().max(T::min_positive_value());
        let mut worst = T::zero();
        for i in 0..n {
            let x = lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
            let x = x.min(hi).max(lo);
            let w = wronskian(self, x)?;
            worst = worst.max((w - self.wronskian_ref).abs() / scale);
        }
        Ok(worst)
    }
}

/// `u1(x) u2'(x) - u2(x) u1'(x)`.
pub fn wronskian<T: Scalar>(pair: &AxisSolutionPair<T>, x: T) -> Result<T> {
    let v = pair.eval(x)?;
    Ok(v.u[0] * v.du[1] - v.u[1] * v.du[0])
}

pub(crate) fn reference_point<T: Scalar>(domain: (T, T)) -> T {
    if domain.0.is_finite() {
        domain.0
    } else if domain.1.is_finite() {
        domain.1
    } else {
        T::zero()
    }
}
