//! Separable potentials `V(r) = Vx(x) + Vy(y) + Vz(z)`.

use crate::error::{Axis, Error, Result};
use crate::scalar::{Scalar, Vec3};

/// Natural cubic spline through tabulated potential values.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline<T> {
    grid: Vec<T>,
    values: Vec<T>,
    /// Second derivatives at the nodes.
    curvature: Vec<T>,
}

impl<T: Scalar> CubicSpline<T> {
    fn new(grid: Vec<T>, values: Vec<T>) -> Self {
        let n = grid.len();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        // Tridiagonal solve with natural end conditions (M_0 = M_{n-1} = 0).
        let mut m = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        let mut rhs = vec![T::zero(); n];
        for i in 1..n - 1 {
            let h0 = grid[i] - grid[i - 1];
            let h1 = grid[i + 1] - grid[i];
            diag[i] = two * (h0 + h1);
            rhs[i] = six * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
        }
        for i in 2..n - 1 {
            let h0 = grid[i] - grid[i - 1];
            let w = h0 / diag[i - 1];
            diag[i] = diag[i] - w * h0;
            rhs[i] = rhs[i] - w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let h1 = grid[i + 1] - grid[i];
            let upper = if i + 1 < n - 1 {
                h1 * m[i + 1]
            } else {
                T::zero()
            };
            m[i] = (rhs[i] - upper) / diag[i];
        }
        Self {
            grid,
            values,
            curvature: m,
        }
    }

    fn segment(&self, x: T) -> usize {
        let n = self.grid.len();
        match self.grid.iter().position(|&g| g > x) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        }
    }

    /// Value, first and second derivative at `x` (caller checks the domain).
    pub fn eval(&self, x: T) -> (T, T, T) {
        let i = self.segment(x);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let h = x1 - x0;
        let six = T::lit(6.0);
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / six;
        let slope = (y1 - y0) / h
            + (-(T::lit(3.0) * a * a - T::one()) * m0 + (T::lit(3.0) * b * b - T::one()) * m1) * h
                / six;
        let curvature = a * m0 + b * m1;
        (value, slope, curvature)
    }

    pub fn domain(&self) -> (T, T) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }
}

/// Shape of one axis contribution.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisKind<T> {
    Free,
    /// `V = m0 omega^2 x^2 / 2`.
    HarmonicOscillator {
        omega: T,
        mass: T,
    },
    /// `V = slope * x`.
    LinearRamp {
        slope: T,
    },
    Tabulated(CubicSpline<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisPotential<T> {
    pub axis: Axis,
    pub kind: AxisKind<T>,
}

impl<T: Scalar> AxisPotential<T> {
    pub fn free(axis: Axis) -> Self {
        Self {
            axis,
            kind: AxisKind::Free,
        }
    }

    pub fn harmonic(axis: Axis, omega: T, mass: T) -> Result<Self> {
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidPotential {
                axis,
                reason: format!("omega must be positive, got {omega}"),
            });
        }
        if !(mass > T::zero()) {
            return Err(Error::InvalidPotential {
                axis,
                reason: format!("mass must be positive, got {mass}"),
            });
        }
        Ok(Self {
            axis,
            kind: AxisKind::HarmonicOscillator { omega, mass },
        })
    }

    pub fn linear_ramp(axis: Axis, slope: T) -> Result<Self> {
        if !slope.is_finite() {
            return Err(Error::InvalidPotential {
                axis,
                reason: "slope must be finite".into(),
            });
        }
        Ok(Self {
            axis,
            kind: AxisKind::LinearRamp { slope },
        })
    }

    /// Tabulated potential interpolated by a natural cubic spline.
    pub fn tabulated(axis: Axis, grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPotential { axis, reason };
        if grid.len() != values.len() {
            return Err(invalid(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 4 {
            return Err(invalid(
                "tabulated potentials need at least 4 points".into(),
            ));
        }
        if grid.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("tabulated entries must be finite".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("grid must be strictly ascending".into()));
        }
        Ok(Self {
            axis,
            kind: AxisKind::Tabulated(CubicSpline::new(grid, values)),
        })
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, AxisKind::Free)
    }

    /// Closed interval on which the potential is defined.
    pub fn domain(&self) -> (T, T) {
        match &self.kind {
            AxisKind::Tabulated(s) => s.domain(),
            _ => (T::neg_infinity(), T::infinity()),
        }
    }

    fn check(&self, x: T) -> Result<()> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi || x.is_nan() {
            return Err(Error::OutOfDomain {
                axis: self.axis,
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(())
    }

    pub fn value(&self, x: T) -> Result<T> {
        self.check(x)?;
        Ok(match &self.kind {
            AxisKind::Free => T::zero(),
            AxisKind::HarmonicOscillator { omega, mass } => {
                T::lit(0.5) * *mass * *omega * *omega * x * x
            }
            AxisKind::LinearRamp { slope } => *slope * x,
            AxisKind::Tabulated(s) => s.eval(x).0,
        })
    }

    /// dV/dx along this axis.
    pub fn derivative(&self, x: T) -> Result<T> {
        self.check(x)?;
        Ok(match &self.kind {
            AxisKind::Free => T::zero(),
            AxisKind::HarmonicOscillator { omega, mass } => *mass * *omega * *omega * x,
            AxisKind::LinearRamp { slope } => *slope,
            AxisKind::Tabulated(s) => s.eval(x).1,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePotential<T> {
    axes: [AxisPotential<T>; 3],
}

impl<T: Scalar> SeparablePotential<T> {
    pub fn new(x: AxisPotential<T>, y: AxisPotential<T>, z: AxisPotential<T>) -> Result<Self> {
        for (p, want) in [&x, &y, &z].into_iter().zip(Axis::ALL) {
            if p.axis != want {
                return Err(Error::InvalidPotential {
                    axis: want,
                    reason: format!("received a potential labelled {}", p.axis),
                });
            }
        }
        Ok(Self { axes: [x, y, z] })
    }

    pub fn free() -> Self {
        Self {
            axes: Axis::ALL.map(AxisPotential::free),
        }
    }

    pub fn axis(&self, axis: Axis) -> &AxisPotential<T> {
        &self.axes[axis.index()]
    }

    pub fn axes(&self) -> &[AxisPotential<T>; 3] {
        &self.axes
    }

    /// Total potential together with its three per-axis contributions.
    pub fn evaluate(&self, r: &Vec3<T>) -> Result<(T, Vec3<T>)> {
        let per_axis = [
            self.axes[0].value(r[0])?,
            self.axes[1].value(r[1])?,
            self.axes[2].value(r[2])?,
        ];
        Ok((per_axis[0] + per_axis[1] + per_axis[2], per_axis))
    }

    pub fn gradient(&self, r: &Vec3<T>) -> Result<Vec3<T>> {
        Ok([
            self.axes[0].derivative(r[0])?,
            self.axes[1].derivative(r[1])?,
            self.axes[2].derivative(r[2])?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn free_potential_is_zero() {
        let v = SeparablePotential::<f64>::free();
        assert_eq!(
            v.evaluate(&[3.0, -1.0, 2.0]).unwrap(),
            (0.0, [0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn harmonic_x_axis() {
        let v = SeparablePotential::new(
            AxisPotential::harmonic(Axis::X, 1.0, 1.0).unwrap(),
            AxisPotential::free(Axis::Y),
            AxisPotential::free(Axis::Z),
        )
        .unwrap();
        assert_eq!(
            v.evaluate(&[2.0, 0.0, 0.0]).unwrap(),
            (2.0, [2.0, 0.0, 0.0])
        );
    }

    #[test]
    fn linear_ramp_x_axis() {
        let v = SeparablePotential::new(
            AxisPotential::linear_ramp(Axis::X, 3.0).unwrap(),
            AxisPotential::free(Axis::Y),
            AxisPotential::free(Axis::Z),
        )
        .unwrap();
        assert_eq!(
            v.evaluate(&[1.5, 7.0, -7.0]).unwrap(),
            (4.5, [4.5, 0.0, 0.0])
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AxisPotential::<f64>::harmonic(Axis::X, 0.0, 1.0).is_err());
        assert!(AxisPotential::<f64>::harmonic(Axis::X, -1.0, 1.0).is_err());
        assert!(
            AxisPotential::<f64>::tabulated(Axis::X, vec![0.0, 1.0, 2.0], vec![0.0; 3]).is_err()
        );
        assert!(
            AxisPotential::<f64>::tabulated(Axis::X, vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4])
                .is_err()
        );
        assert!(AxisPotential::<f64>::tabulated(
            Axis::X,
            vec![0.0, 1.0, 2.0, 3.0],
            vec![0.0, f64::NAN, 0.0, 0.0]
        )
        .is_err());
    }

    #[test]
    fn tabulated_out_of_domain() {
        let p =
            AxisPotential::tabulated(Axis::Y, vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0, 4.0])
                .unwrap();
        assert!(matches!(
            p.value(3.5),
            Err(Error::OutOfDomain { axis: Axis::Y, .. })
        ));
        assert!(matches!(p.value(-0.1), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn tabulated_reproduces_quadratic_closely() {
        let grid: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
        let values: Vec<f64> = grid.iter().map(|x| 0.5 * x * x).collect();
        let p = AxisPotential::tabulated(Axis::X, grid, values).unwrap();
        for &x in &[-2.95, -1.23, 0.0, 0.77, 2.5] {
            assert!((p.value(x).unwrap() - 0.5 * x * x).abs() < 1e-6);
            assert!((p.derivative(x).unwrap() - x).abs() < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn tabulated_hits_nodes(values in proptest::collection::vec(-10.0f64..10.0, 4..20)) {
            let grid: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.5 - 1.0).collect();
            let p = AxisPotential::tabulated(Axis::Z, grid.clone(), values.clone()).unwrap();
            for (x, v) in grid.iter().zip(values.iter()) {
                prop_assert!((p.value(*x).unwrap() - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }

        #[test]
        fn separability(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, y2 in -3.0f64..3.0) {
            let v = SeparablePotential::new(
                AxisPotential::harmonic(Axis::X, 1.3, 0.7).unwrap(),
                AxisPotential::linear_ramp(Axis::Y, -2.0).unwrap(),
                AxisPotential::tabulated(Axis::Z, vec![-3.0, -1.0, 0.5, 2.0, 3.0], vec![1.0, 0.0, 2.0, -1.0, 0.0]).unwrap(),
            ).unwrap();
            let (t1, p1) = v.evaluate(&[x, y, z]).unwrap();
            let (t2, p2) = v.evaluate(&[x, y2, z]).unwrap();
            prop_assert!(((t1 - t2) - (p1[1] - p2[1])).abs() < 1e-12);
            prop_assert!((t1 - (p1[0] + p1[1] + p1[2])).abs() < 1e-12);
        }
    }
}
