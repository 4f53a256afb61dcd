//! Diagonal quantum metric and the pointwise quantum-coordinate Jacobian.
//!
//! With `∂S0` and `R` from [`ReducedActionField`], the contravariant metric is
//! `a^{μμ} = 1 − ħ² (∂_μ S0)^{-2} ∂²_μ R / R` and the covariant one its
//! reciprocal. A Jacobian `J[μ][ν] = ∂x^μ/∂x̂^ν` is acceptable when its rows
//! are orthogonal with squared norms `a^{μμ}`, and its columns are orthonormal
//! under the weight `a_{μμ}`. Those twelve conditions fix `J` only up to a
//! right rotation; [`canonical_jacobian`] returns the positive diagonal member.

use serde::Serialize;

use crate::action::{ActionSample, ReducedActionField, MOMENTUM_THRESHOLD};
use crate::error::{Axis, Error, Result, Signature};
use crate::scalar::{to_f64_3, Scalar, Vec3};

/// Smallest `|E − V|` accepted by [`fm_factor_1d`].
pub const TURNING_POINT_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumMetric<T> {
    pub point: Vec3<T>,
    /// `a^{xx}, a^{yy}, a^{zz}`.
    pub a_upper: Vec3<T>,
    /// `a_{xx}, a_{yy}, a_{zz}`.
    pub a_lower: Vec3<T>,
    pub signature: Signature,
    /// Axes with no conjugate momentum and no quantum correction; their
    /// metric component is the classical value 1.
    pub inert: [bool; 3],
}

impl<T: Scalar> QuantumMetric<T> {
    /// Builds a metric directly from its contravariant diagonal.
    pub fn from_upper(point: Vec3<T>, a_upper: Vec3<T>) -> Self {
        Self {
            point,
            a_upper,
            a_lower: a_upper.map(|a| T::one() / a),
            signature: signature_of(&a_upper),
            inert: [false; 3],
        }
    }

    pub fn euclidean(point: Vec3<T>) -> Self {
        Self::from_upper(point, [T::one(); 3])
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.is_riemannian()
    }
}

fn signature_of<T: Scalar>(a: &Vec3<T>) -> Signature {
    Signature(a.map(|v| {
        if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            0
        }
    }))
}

/// `entry[μ][ν] = ∂x^μ / ∂x̂^ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianMatrix<T> {
    pub entries: [[T; 3]; 3],
}

impl<T: Scalar> JacobianMatrix<T> {
    pub fn identity() -> Self {
        Self::diagonal([T::one(); 3])
    }

    pub fn diagonal(d: Vec3<T>) -> Self {
        let mut entries = [[T::zero(); 3]; 3];
        for (m, row) in entries.iter_mut().enumerate() {
            row[m] = d[m];
        }
        Self { entries }
    }

    /// `J · Q` for an orthogonal `Q`; another member of the solution family.
    pub fn rotated(&self, q: &[[T; 3]; 3]) -> Self {
        let mut entries = [[T::zero(); 3]; 3];
        for (m, row) in entries.iter_mut().enumerate() {
            for (n, slot) in row.iter_mut().enumerate() {
                *slot = (0..3).fold(T::zero(), |acc, k| acc + self.entries[m][k] * q[k][n]);
            }
        }
        Self { entries }
    }
}

/// Absolute residuals of the twelve transformation conditions.
///
/// Order: three row norms (`Σ_ν J[μ][ν]² = a^{μμ}`), three row
/// orthogonality conditions for `(x,y), (x,z), (y,z)`, three weighted column
/// norms (`Σ_μ J[μ][ν]² a_{μμ} = 1`) and three weighted column orthogonality
/// conditions for `(x̂,ŷ), (x̂,ẑ), (ŷ,ẑ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformationResiduals<T> {
    pub values: [T; 12],
}

impl<T: Scalar> TransformationResiduals<T> {
    pub fn max(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc.max(*v))
    }

    pub fn metric_rows(&self) -> &[T] {
        &self.values[..6]
    }

    pub fn inverse_columns(&self) -> &[T] {
        &self.values[6..]
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Quantum metric at `r`.
pub fn metric_at<T: Scalar>(
    action: &ReducedActionField<T>,
    r: &Vec3<T>,
) -> Result<QuantumMetric<T>> {
    let s = action.sample(r)?;
    metric_from_sample(action, &s, r)
}

pub(crate) fn metric_from_sample<T: Scalar>(
    action: &ReducedActionField<T>,
    s: &ActionSample<T>,
    r: &Vec3<T>,
) -> Result<QuantumMetric<T>> {
    let hbar = action.hbar();
    let threshold = T::lit(MOMENTUM_THRESHOLD);
    let mut a_upper = [T::one(); 3];
    let mut inert = [false; 3];
    for m in 0..3 {
        let g = s.grad_s0[m];
        let quantum = hbar * hbar * s.hessian_r_diag[m] / s.amplitude;
        if g.abs() < threshold {
            if quantum.abs() <= threshold * threshold {
                inert[m] = true;
                continue;
            }
            return Err(Error::NodeSingularity {
                axis: Axis::from_index(m).unwrap(),
                position: to_f64_3(r),
            });
        }
        a_upper[m] = T::one() - quantum / (g * g);
    }
    let mut metric = QuantumMetric::from_upper(*r, a_upper);
    metric.inert = inert;
    Ok(metric)
}

/// Positive diagonal Jacobian `diag(√a^{xx}, √a^{yy}, √a^{zz})`.
pub fn canonical_jacobian<T: Scalar>(metric: &QuantumMetric<T>) -> Result<JacobianMatrix<T>> {
    if !metric.a_upper.iter().all(|&a| a > T::zero()) {
        return Err(Error::NonRiemannianPoint {
            signature: metric.signature,
        });
    }
    Ok(JacobianMatrix::diagonal(metric.a_upper.map(|a| a.sqrt())))
}

/// Residuals of all twelve conditions for `jacobian` against `metric`.
pub fn verify_transformation<T: Scalar>(
    jacobian: &JacobianMatrix<T>,
    metric: &QuantumMetric<T>,
) -> TransformationResiduals<T> {
    let j = &jacobian.entries;
    let mut values = [T::zero(); 12];
    for m in 0..3 {
        let row = (0..3).fold(T::zero(), |acc, n| acc + j[m][n] * j[m][n]);
        values[m] = (row - metric.a_upper[m]).abs();
    }
    for (slot, &(p, q)) in PAIRS.iter().enumerate() {
        let cross = (0..3).fold(T::zero(), |acc, n| acc + j[p][n] * j[q][n]);
        values[3 + slot] = cross.abs();
    }
    for n in 0..3 {
        let col = (0..3).fold(T::zero(), |acc, m| {
            acc + j[m][n] * j[m][n] * metric.a_lower[m]
        });
        values[6 + n] = (col - T::one()).abs();
    }
    for (slot, &(p, q)) in PAIRS.iter().enumerate() {
        let cross = (0..3).fold(T::zero(), |acc, m| {
            acc + j[m][p] * j[m][q] * metric.a_lower[m]
        });
        values[9 + slot] = cross.abs();
    }
    TransformationResiduals { values }
}

/// Schwarzian derivative `S0'''/S0' − (3/2)(S0''/S0')²`.
pub fn schwarzian_1d<T: Scalar>(derivs: (T, T, T)) -> Result<T> {
    let (d1, d2, d3) = derivs;
    if !(d1.abs() >= T::lit(MOMENTUM_THRESHOLD)) {
        return Err(Error::ZeroConjugateMomentum { value: d1.as_f64() });
    }
    let ratio = d2 / d1;
    Ok(d3 / d1 - T::lit(1.5) * ratio * ratio)
}

/// The three equivalent expressions of `(dx/dx̂)²` in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateFactorForms<T> {
    /// `2m0(E − V)/(S0')²`.
    pub from_energy: T,
    /// `1 + (ħ²/2)(S0')^{-2} {S0, x}`.
    pub from_schwarzian: T,
    /// `1 − ħ²(S0')^{-2} R''/R`, i.e. `a^{xx}`.
    pub from_metric: T,
}

impl<T: Scalar> CoordinateFactorForms<T> {
    pub fn max_spread(&self) -> T {
        let v = [self.from_energy, self.from_schwarzian, self.from_metric];
        let hi = v.iter().fold(T::neg_infinity(), |a, b| a.max(*b));
        let lo = v.iter().fold(T::infinity(), |a, b| a.min(*b));
        hi - lo
    }
}

pub fn fm_factor_forms<T: Scalar>(
    action: &ReducedActionField<T>,
    x: T,
) -> Result<CoordinateFactorForms<T>> {
    let derivs = action.s0_derivatives_1d(x)?;
    let d1 = derivs.0;
    let curly = schwarzian_1d(derivs)?;
    let r = [x, T::zero(), T::zero()];
    let v = action.potential_at(&r)?;
    let gap = action.energy() - v;
    if gap.abs() < T::lit(TURNING_POINT_THRESHOLD) {
        return Err(Error::ClassicalTurningPoint { gap: gap.as_f64() });
    }
    let hbar = action.hbar();
    let metric = metric_at(action, &r)?;
    Ok(CoordinateFactorForms {
        from_energy: T::lit(2.0) * action.mass() * gap / (d1 * d1),
        from_schwarzian: T::one() + hbar * hbar / T::lit(2.0) * curly / (d1 * d1),
        from_metric: metric.a_upper[0],
    })
}

/// `(dx/dx̂)²` of the one-dimensional quantum coordinate, `2m0(E − V)/(S0')²`.
pub fn fm_factor_1d<T: Scalar>(action: &ReducedActionField<T>, x: T) -> Result<T> {
    Ok(fm_factor_forms(action, x)?.from_energy)
}
