//! Reduced action `S0 = ħ arctan((aθ + bφ)/φ)` and amplitude
//! `R = ((aθ + bφ)² + φ²)^{1/2}` built from a pair of 3D solutions, together
//! with the residuals of the stationary quantum Hamilton-Jacobi system.
//!
//! The constant in `R² ∇S0 = k (φ∇θ − θ∇φ)` is fixed to `k = ħa`, which sets
//! the prefactor of `R` to one. Neither `R''/R` nor `∇S0` depend on it.

use crate::error::{Error, Result};
use crate::scalar::{dot, sum3, to_f64_3, Scalar, Vec3};
use crate::schrodinger::{FieldSample, SolutionField3D};

/// Relative amplitude below which a point counts as nodal.
pub const NODAL_THRESHOLD: f64 = 1e-12;
/// Smallest `|S0'|` accepted by the one-dimensional checks.
pub const MOMENTUM_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedActionField<T> {
    field: SolutionField3D<T>,
    a: T,
    b: T,
}

/// Everything the metric and the dynamics need at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionSample<T> {
    /// `ħ arctan(θ'/φ)` on the principal branch `(−πħ/2, πħ/2]`.
    pub s0_principal: T,
    pub grad_s0: Vec3<T>,
    pub amplitude: T,
    /// `∂²R/∂x_μ²` for each axis.
    pub hessian_r_diag: Vec3<T>,
    pub potential: T,
}

/// θ' = aθ + bφ and φ together with their derivatives.
#[derive(Debug, Clone, Copy)]
struct Mixed<T> {
    tp: T,
    phi: T,
    grad_tp: Vec3<T>,
    grad_phi: Vec3<T>,
    second_tp: Vec3<T>,
    second_phi: Vec3<T>,
}

impl<T: Scalar> Mixed<T> {
    fn new(s: &FieldSample<T>, a: T, b: T) -> Self {
        Self {
            tp: a * s.theta + b * s.phi,
            phi: s.phi,
            grad_tp: std::array::from_fn(|m| a * s.grad_theta[m] + b * s.grad_phi[m]),
            grad_phi: s.grad_phi,
            second_tp: std::array::from_fn(|m| a * s.second_theta[m] + b * s.second_phi[m]),
            second_phi: s.second_phi,
        }
    }

    fn rho(&self) -> T {
        self.tp * self.tp + self.phi * self.phi
    }
}

impl<T: Scalar> ReducedActionField<T> {
    pub fn new(field: SolutionField3D<T>, a: T, b: T) -> Result<Self> {
        if a == T::zero() || !a.is_finite() {
            return Err(Error::ZeroActionParameter);
        }
        if !b.is_finite() {
            return Err(Error::InvalidTerms("parameter `b` must be finite".into()));
        }
        Ok(Self { field, a, b })
    }

    pub fn field(&self) -> &SolutionField3D<T> {
        &self.field
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn hbar(&self) -> T {
        self.field.hbar()
    }

    pub fn mass(&self) -> T {
        self.field.mass()
    }

    pub fn energy(&self) -> T {
        self.field.energy()
    }

    /// The integration constant `k`, fixed to `ħa`.
    pub fn k(&self) -> T {
        self.hbar() * self.a
    }

    pub fn potential_at(&self, r: &Vec3<T>) -> Result<T> {
        Ok(self.field.potential().evaluate(r)?.0)
    }

    fn mixed(&self, r: &Vec3<T>) -> Result<(Mixed<T>, FieldSample<T>)> {
        let s = self.field.evaluate(r)?;
        let m = Mixed::new(&s, self.a, self.b);
        let amplitude = m.rho().sqrt();
        let scale = m.tp.abs().max(m.phi.abs()).max(T::one());
        if !(amplitude >= T::lit(NODAL_THRESHOLD) * scale) {
            return Err(Error::NodalPoint {
                position: to_f64_3(r),
                amplitude: amplitude.as_f64(),
            });
        }
        Ok((m, s))
    }

    /// S0, ∇S0, R and the diagonal Hessian of R at `r`.
    pub fn sample(&self, r: &Vec3<T>) -> Result<ActionSample<T>> {
        let (m, _) = self.mixed(r)?;
        let hbar = self.hbar();
        let rho = m.rho();
        let amplitude = rho.sqrt();
        let s0_principal = if m.phi == T::zero() {
            hbar * T::FRAC_PI_2()
        } else {
            hbar * (m.tp / m.phi).atan()
        };
        let grad_s0 =
            std::array::from_fn(|k| hbar * (m.phi * m.grad_tp[k] - m.tp * m.grad_phi[k]) / rho);
        let hessian_r_diag = std::array::from_fn(|k| {
            let first = m.tp * m.grad_tp[k] + m.phi * m.grad_phi[k];
            let curvature = m.grad_tp[k] * m.grad_tp[k]
                + m.tp * m.second_tp[k]
                + m.grad_phi[k] * m.grad_phi[k]
                + m.phi * m.second_phi[k];
            curvature / amplitude - first * first / (amplitude * rho)
        });
        Ok(ActionSample {
            s0_principal,
            grad_s0,
            amplitude,
            hessian_r_diag,
            potential: self.potential_at(r)?,
        })
    }

    /// `(∇S0)²/2m0 − (ħ²/2m0) ΔR/R + V − E`.
    pub fn qshje_residual(&self, r: &Vec3<T>) -> Result<T> {
        let s = self.sample(r)?;
        Ok(self.qshje_residual_of(&s))
    }

    pub fn qshje_residual_of(&self, s: &ActionSample<T>) -> T {
        let two_m = T::lit(2.0) * self.mass();
        let hbar = self.hbar();
        dot(&s.grad_s0, &s.grad_s0) / two_m
            - hbar * hbar / two_m * sum3(&s.hessian_r_diag) / s.amplitude
            + s.potential
            - self.energy()
    }

    /// Largest component of `|R²∇S0 − ħa(φ∇θ − θ∇φ)|`.
    pub fn continuity_identity_residual(&self, r: &Vec3<T>) -> Result<T> {
        let (m, f) = self.mixed(r)?;
        let hbar = self.hbar();
        let rho = m.rho();
        let amplitude = rho.sqrt();
        let grad_s0: Vec3<T> =
            std::array::from_fn(|k| hbar * (m.phi * m.grad_tp[k] - m.tp * m.grad_phi[k]) / rho);
        let worst = (0..3).fold(T::zero(), |acc, k| {
            let flux = amplitude * amplitude * grad_s0[k];
            let expected = self.k() * (f.phi * f.grad_theta[k] - f.theta * f.grad_phi[k]);
            acc.max((flux - expected).abs())
        });
        Ok(worst)
    }

    /// `R²∇S0` at `r`.
    pub fn flux(&self, r: &Vec3<T>) -> Result<Vec3<T>> {
        let s = self.sample(r)?;
        let r2 = s.amplitude * s.amplitude;
        Ok(s.grad_s0.map(|g| r2 * g))
    }

    /// Central-difference estimate of `∇·(R²∇S0)` with spacing `step`.
    pub fn continuity_divergence(&self, r: &Vec3<T>, step: T) -> Result<T> {
        let mut div = T::zero();
        for k in 0..3 {
            let mut plus = *r;
            let mut minus = *r;
            plus[k] = plus[k] + step;
            minus[k] = minus[k] - step;
            div = div + (self.flux(&plus)?[k] - self.flux(&minus)?[k]) / (T::lit(2.0) * step);
        }
        Ok(div)
    }

    /// `(S0', S0'', S0''')` along x for a field that varies along x only.
    ///
    /// In one dimension `φθ'_x − θ'φ_x` is the Wronskian of two solutions of
    /// the same ODE and hence constant, so `S0' = ħW/ρ` and the higher
    /// derivatives follow from derivatives of `ρ = θ'² + φ²` alone.
    pub fn s0_derivatives_1d(&self, x: T) -> Result<(T, T, T)> {
        if let Some(reason) = self.field.one_dimensional_reason() {
            return Err(Error::NotOneDimensional(reason));
        }
        let r = [x, T::zero(), T::zero()];
        let (m, _) = self.mixed(&r)?;
        let hbar = self.hbar();
        let two = T::lit(2.0);
        let w = m.phi * m.grad_tp[0] - m.tp * m.grad_phi[0];
        let rho = m.rho();
        let rho1 = two * (m.tp * m.grad_tp[0] + m.phi * m.grad_phi[0]);
        let rho2 = two
            * (m.grad_tp[0] * m.grad_tp[0]
                + m.tp * m.second_tp[0]
                + m.grad_phi[0] * m.grad_phi[0]
                + m.phi * m.second_phi[0]);
        let d1 = hbar * w / rho;
        let d2 = -hbar * w * rho1 / (rho * rho);
        let d3 = -hbar * w * (rho2 / (rho * rho) - two * rho1 * rho1 / (rho * rho * rho));
        Ok((d1, d2, d3))
    }

    /// Residual of the one-dimensional third-order form
    /// `(S0')²/2m0 − (ħ²/4m0)[(3/2)(S0''/S0')² − S0'''/S0'] + V − E`.
    pub fn floyd_residual_1d(&self, x: T) -> Result<T> {
        let (d1, d2, d3) = self.s0_derivatives_1d(x)?;
        if !(d1.abs() >= T::lit(MOMENTUM_THRESHOLD)) {
            return Err(Error::ZeroConjugateMomentum { value: d1.as_f64() });
        }
        let m = self.mass();
        let hbar = self.hbar();
        let ratio = d2 / d1;
        let bracket = T::lit(1.5) * ratio * ratio - d3 / d1;
        let v = self.potential_at(&[x, T::zero(), T::zero()])?;
        Ok(
            d1 * d1 / (T::lit(2.0) * m) - hbar * hbar / (T::lit(4.0) * m) * bracket + v
                - self.energy(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Axis;
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

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_a_rejected() {
        let f = free_1d(1.0, 0.0).field().clone();
        assert_eq!(
            ReducedActionField::new(f, 0.0, 1.0).unwrap_err(),
            Error::ZeroActionParameter
        );
    }

    #[test]
    fn plane_wave_sample() {
        let f = free_1d(1.0, 0.0);
        for r in [[0.3, 1.0, -2.0], [2.9, 0.0, 0.0], [-7.0, 3.0, 3.0]] {
            let s = f.sample(&r).unwrap();
            assert!(close(s.grad_s0[0], 1.0, 1e-15));
            assert_eq!(&s.grad_s0[1..], &[0.0, 0.0]);
            assert!(close(s.amplitude, 1.0, 1e-15));
            assert!(s.hessian_r_diag.iter().all(|h| h.abs() < 1e-15));
        }
    }

    #[test]
    fn a_equal_two_samples() {
        let f = free_1d(2.0, 0.0);
        let s = f.sample(&[0.0, 0.0, 0.0]).unwrap();
        assert!(close(s.grad_s0[0], 2.0, 1e-15));
        assert!(close(s.amplitude, 1.0, 1e-15));
        assert!(close(s.hessian_r_diag[0], 3.0, 1e-14));
        let s = f.sample(&[PI / 2.0, 0.0, 0.0]).unwrap();
        assert!(close(s.grad_s0[0], 0.5, 1e-15));
        assert!(close(s.amplitude, 2.0, 1e-15));
        assert!(close(s.hessian_r_diag[0], -1.5, 1e-14));
    }

    #[test]
    fn principal_branch() {
        let f = free_1d(1.0, 0.0);
        let s = f.sample(&[PI / 2.0, 0.0, 0.0]).unwrap();
        assert!(s.s0_principal <= PI / 2.0 && s.s0_principal > 1.5);
        let s = f.sample(&[3.0, 0.0, 0.0]).unwrap();
        assert!(close(s.s0_principal, 3.0 - PI, 1e-14));
    }

    #[test]
    fn residuals_on_free_fields() {
        assert!(
            free_1d(1.0, 0.0)
                .qshje_residual(&[0.3, 0.0, 0.0])
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            free_1d(2.0, 0.0)
                .qshje_residual(&[0.7, 1.0, 1.0])
                .unwrap()
                .abs()
                < 1e-10
        );
        assert!(free_1d(1.0, 0.0).floyd_residual_1d(0.9).unwrap().abs() < 1e-12);
        assert!(free_1d(2.0, 0.0).floyd_residual_1d(0.4).unwrap().abs() < 1e-9);
    }

    #[test]
    fn continuity_modes() {
        let f = free_1d(3.0, -1.0);
        assert!(f.continuity_identity_residual(&[0.2, 0.1, 0.0]).unwrap() < 1e-13);
        let div = free_1d(1.0, 0.0)
            .continuity_divergence(&[1.0, 1.0, 1.0], 1e-5)
            .unwrap();
        assert!(div.abs() < 1e-6);
    }
}
