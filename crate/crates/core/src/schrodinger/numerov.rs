use super::{reference_point, wronskian, AxisSolutionPair, PairSource};
use crate::error::{Error, Result};
use crate::potentials::AxisPotential;
use crate::scalar::Scalar;

const OVERFLOW_LIMIT: f64 = 1e300;
const START_SUBSTEPS: usize = 64;

/// Grid and initial data for a Numerov solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumerovSetup<T> {
    pub domain: (T, T),
    pub step: T,
    /// `(value, slope)` of `u1` at `anchor`.
    pub ic1: (T, T),
    /// `(value, slope)` of `u2` at `anchor`.
    pub ic2: (T, T),
    /// Point where the initial conditions apply; defaults to the left edge.
    pub anchor: Option<T>,
}

/// Tabulated pair on the uniform grid `start + j * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumerovTable<T> {
    start: T,
    step: T,
    u: [Vec<T>; 2],
    du: [Vec<T>; 2],
}

impl<T: Scalar> NumerovTable<T> {
    pub fn len(&self) -> usize {
        self.u[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.u[0].is_empty()
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn node(&self, j: usize) -> T {
        self.start + self.step * T::from_usize(j).unwrap()
    }

    pub fn domain(&self) -> (T, T) {
        (self.start, self.node(self.len() - 1))
    }

    /// Tabulated `(u, u')` of solution `which` at node `j`.
    pub fn at_node(&self, which: usize, j: usize) -> (T, T) {
        (self.u[which][j], self.du[which][j])
    }

    /// Four-point Lagrange interpolation of `u` and `u'`, each independently.
    pub(crate) fn interpolate(&self, x: T) -> ([T; 2], [T; 2]) {
        let n = self.len();
        let pos = (x - self.start) / self.step;
        let base = pos.floor().to_isize().unwrap_or(0).clamp(1, n as isize - 3) as usize;
        let t = pos - T::from_usize(base).unwrap();
        let one = T::one();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let w = [
            -t * (t - one) * (t - two) / six,
            (t + one) * (t - one) * (t - two) / two,
            -(t + one) * t * (t - two) / two,
            (t + one) * t * (t - one) / six,
        ];
        let mix =
            |v: &[T]| w[0] * v[base - 1] + w[1] * v[base] + w[2] * v[base + 1] + w[3] * v[base + 2];
        (
            [mix(&self.u[0]), mix(&self.u[1])],
            [mix(&self.du[0]), mix(&self.du[1])],
        )
    }
}

/// Integrates two solutions of `u'' = (2 m0 / hbar^2)(V - E) u` with the
/// three-point Numerov recurrence, outward from the anchor in both directions.
///
/// The grid is anchored at the initial-condition point and trimmed to lie
/// inside `setup.domain`, so the effective domain may be shorter than the
/// requested one by less than one step at each end.
pub fn solve_axis_numerov<T: Scalar>(
    potential: &AxisPotential<T>,
    energy: T,
    setup: &NumerovSetup<T>,
    mass: T,
    hbar: T,
) -> Result<AxisSolutionPair<T>> {
    let (lo, hi) = setup.domain;
    let h = setup.step;
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidNumerovSetup(format!(
            "step must be positive, got {h}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidNumerovSetup(
            "domain must be a finite ascending interval".into(),
        ));
    }
    if (hi - lo) / h < T::lit(16.0) {
        return Err(Error::InvalidNumerovSetup(
            "domain must span at least 16 steps".into(),
        ));
    }
    let anchor = setup.anchor.unwrap_or(lo);
    if anchor < lo || anchor > hi {
        return Err(Error::InvalidNumerovSetup(format!(
            "anchor {anchor} lies outside the domain"
        )));
    }
    let (v1, s1) = setup.ic1;
    let (v2, s2) = setup.ic2;
    let det = v1 * s2 - v2 * s1;
    let scale = (v1.hypot(s1) * v2.hypot(s2)).max(T::min_positive_value());
    if !(det.abs() > T::lit(1e-14) * scale) {
        return Err(Error::DegenerateIcs);
    }

    let slack = T::lit(1e-9);
    let n_left = ((anchor - lo) / h + slack).floor().to_usize().unwrap_or(0);
    let n_right = ((hi - anchor) / h + slack).floor().to_usize().unwrap_or(0);
    let nodes = n_left + n_right + 1;
    let start = anchor - h * T::from_usize(n_left).unwrap();
    let coupling = T::lit(2.0) * mass / (hbar * hbar);

    let coefficient = |x: T| -> Result<T> { Ok(coupling * (potential.value(x)? - energy)) };
    let f: Vec<T> = (0..nodes)
        .map(|j| coefficient(start + h * T::from_usize(j).unwrap()))
        .collect::<Result<_>>()?;

    let mut u = [vec![T::zero(); nodes], vec![T::zero(); nodes]];
    for (which, (value, slope)) in [setup.ic1, setup.ic2].into_iter().enumerate() {
        let col = &mut u[which];
        col[n_left] = value;
        if n_right > 0 {
            col[n_left + 1] = rk4_start(&coefficient, anchor, value, slope, h)?;
        }
        if n_left > 0 {
            col[n_left - 1] = rk4_start(&coefficient, anchor, value, slope, -h)?;
        }
        let h2 = h * h / T::lit(12.0);
        let ten = T::lit(10.0);
        for j in n_left + 1..nodes - 1 {
            let next = ((T::lit(2.0) + ten * h2 * f[j]) * col[j]
                - (T::one() - h2 * f[j - 1]) * col[j - 1])
                / (T::one() - h2 * f[j + 1]);
            guard_overflow(next, start + h * T::from_usize(j + 1).unwrap())?;
            col[j + 1] = next;
        }
        for j in (1..n_left).rev() {
            let prev = ((T::lit(2.0) + ten * h2 * f[j]) * col[j]
                - (T::one() - h2 * f[j + 1]) * col[j + 1])
                / (T::one() - h2 * f[j - 1]);
            guard_overflow(prev, start + h * T::from_usize(j - 1).unwrap())?;
            col[j - 1] = prev;
        }
    }

    let du = [five_point_slopes(&u[0], h), five_point_slopes(&u[1], h)];
    let table = NumerovTable {
        start,
        step: h,
        u,
        du,
    };
    let mut pair = AxisSolutionPair {
        axis: potential.axis,
        energy,
        hbar,
        mass,
        potential: potential.clone(),
        source: PairSource::Numerov(table),
        wronskian_ref: T::zero(),
    };
    let domain = pair.domain();
    pair.wronskian_ref = wronskian(&pair, reference_point(domain))?;
    Ok(pair)
}

fn guard_overflow<T: Scalar>(v: T, x: T) -> Result<()> {
    if !v.is_finite() || v.abs() > T::lit(OVERFLOW_LIMIT) {
        return Err(Error::Overflow { x: x.as_f64() });
    }
    Ok(())
}

/// Second starting value: classical RK4 on `(u, u')` with fine substeps.
fn rk4_start<T: Scalar>(
    coefficient: &impl Fn(T) -> Result<T>,
    x0: T,
    value: T,
    slope: T,
    h: T,
) -> Result<T> {
    let dt = h / T::from_usize(START_SUBSTEPS).unwrap();
    let half = T::lit(0.5);
    let (mut x, mut y, mut p) = (x0, value, slope);
    for i in 0..START_SUBSTEPS {
        let f0 = coefficient(x)?;
        let fm = coefficient(x + half * dt)?;
        // Land exactly on the neighbouring node.
        let x1 = if i + 1 == START_SUBSTEPS {
            x0 + h
        } else {
            x + dt
        };
        let f1 = coefficient(x1)?;
        let k1 = (p, f0 * y);
        let k2 = (p + half * dt * k1.1, fm * (y + half * dt * k1.0));
        let k3 = (p + half * dt * k2.1, fm * (y + half * dt * k2.0));
        let k4 = (p + dt * k3.1, f1 * (y + dt * k3.0));
        let sixth = dt / T::lit(6.0);
        y = y + sixth * (k1.0 + T::lit(2.0) * (k2.0 + k3.0) + k4.0);
        p = p + sixth * (k1.1 + T::lit(2.0) * (k2.1 + k3.1) + k4.1);
        x = x1;
    }
    Ok(y)
}

/// Fourth-order slopes: centered five-point stencil inside, one-sided at the ends.
fn five_point_slopes<T: Scalar>(u: &[T], h: T) -> Vec<T> {
    let n = u.len();
    let c = |v: f64| T::lit(v);
    let denom = c(12.0) * h;
    let mut du = vec![T::zero(); n];
    for j in 2..n - 2 {
        du[j] = (-u[j + 2] + c(8.0) * u[j + 1] - c(8.0) * u[j - 1] + u[j - 2]) / denom;
    }
    du[0] = (c(-25.0) * u[0] + c(48.0) * u[1] - c(36.0) * u[2] + c(16.0) * u[3] - c(3.0) * u[4])
        / denom;
    du[1] = (c(-3.0) * u[0] - c(10.0) * u[1] + c(18.0) * u[2] - c(6.0) * u[3] + u[4]) / denom;
    du[n - 1] = -(c(-25.0) * u[n - 1] + c(48.0) * u[n - 2] - c(36.0) * u[n - 3]
        + c(16.0) * u[n - 4]
        - c(3.0) * u[n - 5])
        / denom;
    du[n - 2] = -(c(-3.0) * u[n - 1] - c(10.0) * u[n - 2] + c(18.0) * u[n - 3] - c(6.0) * u[n - 4]
        + u[n - 5])
        / denom;
    du
}
