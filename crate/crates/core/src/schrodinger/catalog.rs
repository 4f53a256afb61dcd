use std::collections::BTreeMap;

use super::{reference_point, wronskian, AxisSolutionPair, AxisValue, PairSource};
use crate::error::{Axis, Error, Result};
use crate::potentials::AxisPotential;
use crate::scalar::Scalar;

/// Closed-form solution pairs of the free axis equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogEntry<T> {
    /// `u1 = sin(kx)`, `u2 = cos(kx)`, `E = hbar^2 k^2 / 2 m0`.
    Free { k: T },
    /// `u1 = 1`, `u2 = x`, `E = 0`.
    ZeroEnergyFree,
    /// `u1 = sin(n pi x / L)`, `u2 = cos(n pi x / L)` on `[0, L]`.
    Box { length: T, n: u32 },
}

impl<T: Scalar> CatalogEntry<T> {
    /// Looks up a catalog entry by id (`free`, `zero_energy_free`, `box`).
    pub fn from_id(id: &str, params: &BTreeMap<String, T>) -> Result<Self> {
        let get = |key: &str| {
            params.get(key).copied().ok_or_else(|| {
                Error::UnknownCatalogEntry(format!("{id}: missing parameter `{key}`"))
            })
        };
        match id {
            "free" => Ok(Self::Free { k: get("k")? }),
            "zero_energy_free" => Ok(Self::ZeroEnergyFree),
            "box" => {
                let n = get("n")?;
                if n.fract() != T::zero() || n < T::one() {
                    return Err(Error::UnknownCatalogEntry(format!(
                        "box: mode number must be a positive integer, got {n}"
                    )));
                }
                Ok(Self::Box {
                    length: get("length")?,
                    n: n.to_u32().unwrap_or(1),
                })
            }
            other => Err(Error::UnknownCatalogEntry(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Free { .. } => "free",
            Self::ZeroEnergyFree => "zero_energy_free",
            Self::Box { .. } => "box",
        }
    }

    pub fn wavenumber(&self) -> T {
        match *self {
            Self::Free { k } => k,
            Self::ZeroEnergyFree => T::zero(),
            Self::Box { length, n } => T::PI() * T::from_u32(n).unwrap() / length,
        }
    }

    pub fn energy(&self, mass: T, hbar: T) -> T {
        let k = self.wavenumber();
        hbar * hbar * k * k / (T::lit(2.0) * mass)
    }

    pub fn domain(&self) -> (T, T) {
        match *self {
            Self::Box { length, .. } => (T::zero(), length),
            _ => (T::neg_infinity(), T::infinity()),
        }
    }

    pub(crate) fn eval(&self, x: T) -> AxisValue<T> {
        match self {
            Self::ZeroEnergyFree => AxisValue {
                u: [T::one(), x],
                du: [T::zero(), T::one()],
                d2u: [T::zero(), T::zero()],
            },
            _ => {
                let k = self.wavenumber();
                let (s, c) = (k * x).sin_cos();
                AxisValue {
                    u: [s, c],
                    du: [k * c, -k * s],
                    d2u: [-k * k * s, -k * k * c],
                }
            }
        }
    }
}

/// Builds the closed-form pair for `entry` on `axis`.
///
/// `energy`, when given, must agree with the energy implied by the entry.
pub fn solve_axis_analytic<T: Scalar>(
    axis: Axis,
    entry: CatalogEntry<T>,
    energy: Option<T>,
    mass: T,
    hbar: T,
) -> Result<AxisSolutionPair<T>> {
    match entry {
        CatalogEntry::Free { k } if !(k != T::zero() && k.is_finite()) => {
            return Err(Error::UnknownCatalogEntry(format!(
                "free: wavenumber must be finite and nonzero, got {k}"
            )))
        }
        CatalogEntry::Box { length, .. } if !(length > T::zero() && length.is_finite()) => {
            return Err(Error::UnknownCatalogEntry(format!(
                "box: length must be positive, got {length}"
            )))
        }
        _ => {}
    }
    let expected = entry.energy(mass, hbar);
    if let Some(given) = energy {
        let tol = T::lit(1e-12) * expected.abs().max(T::one());
        if (given - expected).abs() > tol {
            return Err(Error::InconsistentEnergy {
                expected: expected.as_f64(),
                given: given.as_f64(),
            });
        }
    }
    let mut pair = AxisSolutionPair {
        axis,
        energy: expected,
        hbar,
        mass,
        potential: AxisPotential::free(axis),
        source: PairSource::Analytic(entry),
        wronskian_ref: T::zero(),
    };
    pair.wronskian_ref = wronskian(&pair, reference_point(entry.domain()))?;
    Ok(pair)
}
