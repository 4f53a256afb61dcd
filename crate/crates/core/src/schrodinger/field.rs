use super::{AxisSolutionPair, AxisValue};
use crate::error::{Axis, Error, Result};
use crate::potentials::SeparablePotential;
use crate::scalar::{norm, Scalar, Vec3};

/// Which solution of an axis pair a product term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    U1,
    U2,
}

impl Selector {
    fn index(self) -> usize {
        match self {
            Selector::U1 => 0,
            Selector::U2 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Selector::U1 => "u1",
            Selector::U2 => "u2",
        }
    }
}

/// `coefficient * u_sx(x) * u_sy(y) * u_sz(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTerm<T> {
    pub coefficient: T,
    pub selectors: [Selector; 3],
}

impl<T> ProductTerm<T> {
    pub fn new(coefficient: T, selectors: [Selector; 3]) -> Self {
        Self {
            coefficient,
            selectors,
        }
    }
}

/// Values, gradients and diagonal second partials of θ and φ at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<T> {
    pub theta: T,
    pub phi: T,
    pub grad_theta: Vec3<T>,
    pub grad_phi: Vec3<T>,
    pub second_theta: Vec3<T>,
    pub second_phi: Vec3<T>,
}

/// Two 3D solutions θ, φ at the common energy `E = Ex + Ey + Ez`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField3D<T> {
    pairs: [AxisSolutionPair<T>; 3],
    theta_terms: Vec<ProductTerm<T>>,
    phi_terms: Vec<ProductTerm<T>>,
    potential: SeparablePotential<T>,
    energy: T,
}

const PROBE_POINTS: usize = 5;
const INDEPENDENCE_THRESHOLD: f64 = 1e-12;

/// Assembles θ and φ from product terms and checks on a 5×5×5 probe grid
/// that they are not proportional.
pub fn assemble_field<T: Scalar>(
    pairs: [AxisSolutionPair<T>; 3],
    theta_terms: Vec<ProductTerm<T>>,
    phi_terms: Vec<ProductTerm<T>>,
) -> Result<SolutionField3D<T>> {
    for (pair, want) in pairs.iter().zip(Axis::ALL) {
        if pair.axis != want {
            return Err(Error::InvalidTerms(format!(
                "pair for axis {want} is labelled {}",
                pair.axis
            )));
        }
    }
    let (hbar, mass) = (pairs[0].hbar, pairs[0].mass);
    if pairs.iter().any(|p| p.hbar != hbar || p.mass != mass) {
        return Err(Error::InvalidTerms(
            "axis pairs disagree on hbar or mass".into(),
        ));
    }
    for (name, terms) in [("theta", &theta_terms), ("phi", &phi_terms)] {
        if terms.is_empty() {
            return Err(Error::InvalidTerms(format!(
                "{name} needs at least one term"
            )));
        }
        if terms.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(Error::InvalidTerms(format!(
                "{name} has a non-finite coefficient"
            )));
        }
    }
    let energy = pairs[0].energy + pairs[1].energy + pairs[2].energy;
    let potential = SeparablePotential::new(
        pairs[0].potential.clone(),
        pairs[1].potential.clone(),
        pairs[2].potential.clone(),
    )?;
    let field = SolutionField3D {
        pairs,
        theta_terms,
        phi_terms,
        potential,
        energy,
    };
    let max_cross = field.probe_independence()?;
    if !(max_cross > T::lit(INDEPENDENCE_THRESHOLD)) {
        return Err(Error::ProportionalSolutions {
            max_cross: max_cross.as_f64(),
        });
    }
    Ok(field)
}

impl<T: Scalar> SolutionField3D<T> {
    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn hbar(&self) -> T {
        self.pairs[0].hbar
    }

    pub fn mass(&self) -> T {
        self.pairs[0].mass
    }

    pub fn pairs(&self) -> &[AxisSolutionPair<T>; 3] {
        &self.pairs
    }

    pub fn pair(&self, axis: Axis) -> &AxisSolutionPair<T> {
        &self.pairs[axis.index()]
    }

    pub fn theta_terms(&self) -> &[ProductTerm<T>] {
        &self.theta_terms
    }

    pub fn phi_terms(&self) -> &[ProductTerm<T>] {
        &self.phi_terms
    }

    pub fn potential(&self) -> &SeparablePotential<T> {
        &self.potential
    }

    /// Per-axis domains of the underlying pairs.
    pub fn domain(&self) -> [(T, T); 3] {
        [
            self.pairs[0].domain(),
            self.pairs[1].domain(),
            self.pairs[2].domain(),
        ]
    }

    /// Same field with every θ and φ coefficient multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        let scale = |terms: &[ProductTerm<T>]| {
            terms
                .iter()
                .map(|t| ProductTerm::new(t.coefficient * c, t.selectors))
                .collect()
        };
        Self {
            theta_terms: scale(&self.theta_terms),
            phi_terms: scale(&self.phi_terms),
            ..self.clone()
        }
    }

    /// True when the field varies along x only: the y and z pairs are the
    /// zero-energy free pair and every term selects its constant solution.
    pub fn is_one_dimensional_x(&self) -> bool {
        self.one_dimensional_reason().is_none()
    }

    pub(crate) fn one_dimensional_reason(&self) -> Option<String> {
        for axis in [Axis::Y, Axis::Z] {
            if !self.pair(axis).is_zero_energy_free() {
                return Some(format!("axis {axis} is not the zero-energy free pair"));
            }
            let i = axis.index();
            if self
                .theta_terms
                .iter()
                .chain(self.phi_terms.iter())
                .any(|t| t.selectors[i] != Selector::U1)
            {
                return Some(format!(
                    "a term selects the non-constant solution on axis {axis}"
                ));
            }
        }
        None
    }

    /// θ, φ, their gradients and diagonal second partials at `r`.
    ///
    /// Second partials come from the per-axis ODE identity through the
    /// product rule, so `Δθ = (2 m0/ħ²)(V − E) θ` holds to rounding.
    pub fn evaluate(&self, r: &Vec3<T>) -> Result<FieldSample<T>> {
        let values = [
            self.pairs[0].eval(r[0])?,
            self.pairs[1].eval(r[1])?,
            self.pairs[2].eval(r[2])?,
        ];
        let (theta, grad_theta, second_theta) = combine(&values, &self.theta_terms);
        let (phi, grad_phi, second_phi) = combine(&values, &self.phi_terms);
        Ok(FieldSample {
            theta,
            phi,
            grad_theta,
            grad_phi,
            second_theta,
            second_phi,
        })
    }

    fn probe_axis(&self, axis: usize) -> [T; PROBE_POINTS] {
        let (lo, hi) = self.pairs[axis].domain();
        let n = T::from_usize(PROBE_POINTS + 1).unwrap();
        let (lo, hi, interior) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi, true),
            (true, false) => (lo, lo + T::lit(2.0), true),
            (false, true) => (hi - T::lit(2.0), hi, true),
            (false, false) => (T::lit(-1.0), T::one(), false),
        };
        std::array::from_fn(|i| {
            let i = T::from_usize(i).unwrap();
            if interior {
                lo + (hi - lo) * (i + T::one()) / n
            } else {
                lo + (hi - lo) * i / T::from_usize(PROBE_POINTS - 1).unwrap()
            }
        })
    }

    /// Largest `|φ∇θ − θ∇φ|` over the probe grid.
    pub fn probe_independence(&self) -> Result<T> {
        let px = self.probe_axis(0);
        let py = self.probe_axis(1);
        let pz = self.probe_axis(2);
        let mut worst = T::zero();
        for &x in &px {
            for &y in &py {
                for &z in &pz {
                    let s = self.evaluate(&[x, y, z])?;
                    let cross: Vec3<T> =
                        std::array::from_fn(|m| s.phi * s.grad_theta[m] - s.theta * s.grad_phi[m]);
                    worst = worst.max(norm(&cross));
                }
            }
        }
        Ok(worst)
    }
}

fn combine<T: Scalar>(
    values: &[AxisValue<T>; 3],
    terms: &[ProductTerm<T>],
) -> (T, Vec3<T>, Vec3<T>) {
    let mut total = T::zero();
    let mut grad = [T::zero(); 3];
    let mut second = [T::zero(); 3];
    for term in terms {
        let idx = term.selectors.map(Selector::index);
        let f: Vec3<T> = std::array::from_fn(|m| values[m].u[idx[m]]);
        let c = term.coefficient;
        total = total + c * f[0] * f[1] * f[2];
        for m in 0..3 {
            let others = f[(m + 1) % 3] * f[(m + 2) % 3];
            grad[m] = grad[m] + c * values[m].du[idx[m]] * others;
            second[m] = second[m] + c * values[m].d2u[idx[m]] * others;
        }
    }
    (total, grad, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{solve_axis_analytic, CatalogEntry};
    use std::f64::consts::PI;
    use Selector::{U1, U2};

    fn free(axis: Axis) -> AxisSolutionPair<f64> {
        solve_axis_analytic(axis, CatalogEntry::Free { k: 1.0 }, None, 1.0, 1.0).unwrap()
    }

    fn flat(axis: Axis) -> AxisSolutionPair<f64> {
        solve_axis_analytic(axis, CatalogEntry::ZeroEnergyFree, None, 1.0, 1.0).unwrap()
    }

    fn field_1d() -> SolutionField3D<f64> {
        assemble_field(
            [free(Axis::X), flat(Axis::Y), flat(Axis::Z)],
            vec![ProductTerm::new(1.0, [U1, U1, U1])],
            vec![ProductTerm::new(1.0, [U2, U1, U1])],
        )
        .unwrap()
    }

    fn field_2d() -> SolutionField3D<f64> {
        assemble_field(
            [free(Axis::X), free(Axis::Y), flat(Axis::Z)],
            vec![
                ProductTerm::new(1.0, [U1, U2, U1]),
                ProductTerm::new(1.0, [U2, U1, U1]),
            ],
            vec![ProductTerm::new(1.0, [U2, U2, U1])],
        )
        .unwrap()
    }

    #[test]
    fn embedded_1d_field() {
        let f = field_1d();
        assert_eq!(f.energy(), 0.5);
        assert!(f.is_one_dimensional_x());
        let s = f.evaluate(&[0.0, 5.0, -2.0]).unwrap();
        assert_eq!((s.theta, s.phi), (0.0, 1.0));
        assert_eq!(s.grad_theta, [1.0, 0.0, 0.0]);
        assert_eq!(s.grad_phi, [0.0, 0.0, 0.0]);
        assert_eq!(s.second_theta, [0.0, 0.0, 0.0]);
        assert_eq!(s.second_phi, [-1.0, 0.0, 0.0]);
        let s = f.evaluate(&[PI / 2.0, 0.0, 0.0]).unwrap();
        assert!((s.theta - 1.0).abs() < 1e-15 && s.phi.abs() < 1e-15);
        assert!((s.second_theta[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_field() {
        let f = field_2d();
        assert_eq!(f.energy(), 1.0);
        assert!(!f.is_one_dimensional_x());
        let s = f.evaluate(&[PI / 4.0, PI / 4.0, 0.0]).unwrap();
        assert!((s.theta - 1.0).abs() < 1e-15);
        assert!(s.grad_theta.iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn proportional_pair_rejected() {
        let err = assemble_field(
            [free(Axis::X), flat(Axis::Y), flat(Axis::Z)],
            vec![ProductTerm::new(1.0, [U1, U1, U1])],
            vec![ProductTerm::new(2.0, [U1, U1, U1])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ProportionalSolutions { .. }));
    }

    #[test]
    fn empty_terms_rejected() {
        let err = assemble_field(
            [free(Axis::X), flat(Axis::Y), flat(Axis::Z)],
            vec![],
            vec![ProductTerm::new(2.0, [U1, U1, U1])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTerms(_)));
    }

    #[test]
    fn laplacian_follows_ode_identity() {
        let f = field_2d();
        for r in [[0.3, -0.2, 1.0], [1.1, 0.7, -3.0], [-2.0, 2.5, 0.0]] {
            let s = f.evaluate(&r).unwrap();
            let lap: f64 = s.second_theta.iter().sum();
            // Δθ = 2m(V − E)θ/ħ² with V = 0, E = 1.
            assert!((lap + 2.0 * s.theta).abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let f = field_2d();
        let h = 1e-5;
        for r in [[0.3, -0.2, 1.0], [1.1, 0.7, -3.0]] {
            let s = f.evaluate(&r).unwrap();
            for m in 0..3 {
                let mut rp = r;
                let mut rm = r;
                rp[m] += h;
                rm[m] -= h;
                let fd =
                    (f.evaluate(&rp).unwrap().theta - f.evaluate(&rm).unwrap().theta) / (2.0 * h);
                assert!((fd - s.grad_theta[m]).abs() < 1e-6 * s.grad_theta[m].abs().max(1.0));
            }
        }
    }
}
