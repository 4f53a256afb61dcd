//! Dormand–Prince 5(4) with step-size control and event location.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const STAGE_FAILURE_SHRINK: f64 = 0.25;
const LOCATE_FRACTION: f64 = 1e-3;
const UNDERFLOW_FRACTION: f64 = 1e-14;

/// Outcome of checking a candidate state.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Guard<K> {
    Admissible,
    /// Integration must stop before this state; `K` describes why.
    Stop(K),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Stop<T, K> {
    Completed,
    /// Guard stopped integration; the event is placed at `(t, y)`, the last
    /// admissible state, within `1e-3` of the rejected step of the crossing.
    Event {
        kind: K,
        t: T,
        y_index: usize,
    },
    /// The step shrank below the floor. `cause` is the last stage evaluation
    /// error since the previous accepted step, if any.
    StepUnderflow {
        t: T,
        cause: Option<Error>,
    },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub t_end: T,
}

pub(crate) struct Run<T, const N: usize, K> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
    pub stop: Stop<T, K>,
}

/// One embedded step. `Err` when a stage evaluation fails.
fn dopri_step<T: Scalar, const N: usize>(
    rhs: &impl Fn(&[T; N]) -> Result<[T; N]>,
    y: &[T; N],
    k1: &[T; N],
    h: T,
) -> Result<([T; N], [T; N])> {
    let mut k = [[T::zero(); N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (i, slot) in ys.iter_mut().enumerate() {
            let incr = (0..s).fold(T::zero(), |acc, j| acc + T::lit(A[s][j]) * k[j][i]);
            *slot = *slot + h * incr;
        }
        k[s] = rhs(&ys)?;
    }
    let mut y5 = *y;
    let mut err = [T::zero(); N];
    for i in 0..N {
        let mut high = T::zero();
        let mut diff = T::zero();
        for s in 0..7 {
            high = high + T::lit(B5[s]) * k[s][i];
            diff = diff + T::lit(B5[s] - B4[s]) * k[s][i];
        }
        y5[i] = y[i] + h * high;
        err[i] = h * diff;
    }
    Ok((y5, err))
}

fn error_norm<T: Scalar, const N: usize>(
    y: &[T; N],
    y_new: &[T; N],
    err: &[T; N],
    tol: &Tolerances<T>,
) -> T {
    (0..N).fold(T::zero(), |acc, i| {
        let scale = tol.abs_tol + tol.rel_tol * y[i].abs().max(y_new[i].abs());
        acc.max(err[i].abs() / scale)
    })
}

/// Integrates the autonomous system `y' = rhs(y)` from `t = 0` to `t_end`.
///
/// Every accepted state satisfies `guard`. When a candidate state fails the
/// guard, the step is bisected until the admissible prefix is known to within
/// `1e-3` of the step, the admissible end point is accepted, and integration
/// stops with the guard's reason.
pub(crate) fn integrate<T: Scalar, const N: usize, K: Clone>(
    rhs: impl Fn(&[T; N]) -> Result<[T; N]>,
    guard: impl Fn(&[T; N]) -> Guard<K>,
    y0: [T; N],
    tol: &Tolerances<T>,
) -> Run<T, N, K> {
    let mut times = vec![T::zero()];
    let mut states = vec![y0];
    let mut t = T::zero();
    let mut y = y0;
    let mut h = tol.max_step.min(tol.t_end / T::lit(100.0));
    let underflow = T::lit(UNDERFLOW_FRACTION) * tol.t_end;

    let try_step = |y: &[T; N], h: T| -> Result<([T; N], [T; N])> {
        let k1 = rhs(y)?;
        dopri_step(&rhs, y, &k1, h)
    };
    let mut cause = None;

    loop {
        let remaining = tol.t_end - t;
        if remaining <= T::zero() {
            return Run {
                times,
                states,
                stop: Stop::Completed,
            };
        }
        let last = h >= remaining;
        let h_try = if last { remaining } else { h }.min(tol.max_step);
        let last = last && h_try == remaining;
        if h_try < underflow {
            return Run {
                times,
                states,
                stop: Stop::StepUnderflow { t, cause },
            };
        }
        let (y_new, err) = match try_step(&y, h_try) {
            Ok(step) => step,
            Err(e) => {
                cause = Some(e);
                h = h_try * T::lit(STAGE_FAILURE_SHRINK);
                continue;
            }
        };
        let e = error_norm(&y, &y_new, &err, tol);
        if !(e <= T::one()) {
            let factor = if e.is_finite() {
                (T::lit(SAFETY) * e.powf(T::lit(-0.2))).max(T::lit(MIN_FACTOR))
            } else {
                T::lit(STAGE_FAILURE_SHRINK)
            };
            h = h_try * factor;
            continue;
        }
        match guard(&y_new) {
            Guard::Admissible => {
                t = if last { tol.t_end } else { t + h_try };
                y = y_new;
                cause = None;
                times.push(t);
                states.push(y);
                let factor = if e > T::zero() {
                    (T::lit(SAFETY) * e.powf(T::lit(-0.2)))
                        .min(T::lit(MAX_FACTOR))
                        .max(T::lit(MIN_FACTOR))
                } else {
                    T::lit(MAX_FACTOR)
                };
                h = h_try * factor;
            }
            Guard::Stop(kind) => {
                let admissible = |tau: T| match try_step(&y, tau) {
                    Ok((cand, _)) => matches!(guard(&cand), Guard::Admissible).then_some(cand),
                    Err(_) => None,
                };
                let mut lo = T::zero();
                let mut hi = h_try;
                let mut best: Option<[T; N]> = None;
                let width = T::lit(LOCATE_FRACTION) * h_try;
                while hi - lo > width {
                    let mid = T::lit(0.5) * (lo + hi);
                    match admissible(mid) {
                        Some(cand) => {
                            lo = mid;
                            best = Some(cand);
                        }
                        None => hi = mid,
                    }
                }
                if let Some(cand) = best {
                    t = t + lo;
                    times.push(t);
                    states.push(cand);
                }
                let y_index = states.len() - 1;
                return Run {
                    times,
                    states,
                    stop: Stop::Event { kind, t, y_index },
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(t_end: f64) -> Tolerances<f64> {
        Tolerances {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            t_end,
        }
    }

    #[test]
    fn exponential_decay() {
        let run = integrate(
            |y: &[f64; 1]| Ok([-y[0]]),
            |_: &[f64; 1]| Guard::<()>::Admissible,
            [1.0],
            &tol(3.0),
        );
        assert_eq!(run.stop, Stop::Completed);
        assert_eq!(*run.times.last().unwrap(), 3.0);
        assert!((run.states.last().unwrap()[0] - (-3.0f64).exp()).abs() < 1e-9);
        assert!(run.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn harmonic_oscillator_period() {
        let run = integrate(
            |y: &[f64; 2]| Ok([y[1], -y[0]]),
            |_: &[f64; 2]| Guard::<()>::Admissible,
            [1.0, 0.0],
            &tol(2.0 * std::f64::consts::PI),
        );
        let end = run.states.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-8 && end[1].abs() < 1e-8);
    }

    #[test]
    fn event_located_within_step_fraction() {
        // y' = 1 crosses y = 0.7371 at t = 0.7371.
        let run = integrate(
            |_: &[f64; 1]| Ok([1.0]),
            |y: &[f64; 1]| {
                if y[0] < 0.7371 {
                    Guard::Admissible
                } else {
                    Guard::Stop("wall")
                }
            },
            [0.0],
            &tol(5.0),
        );
        match run.stop {
            Stop::Event { kind, t, y_index } => {
                assert_eq!(kind, "wall");
                assert!(t < 0.7371 && t > 0.7371 - 1e-3 * 1.0);
                assert_eq!(y_index, run.states.len() - 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_underflow_when_rhs_always_fails() {
        let run = integrate(
            |y: &[f64; 1]| {
                if y[0] > 0.5 {
                    Err(Error::DegenerateIcs)
                } else {
                    Ok([1.0])
                }
            },
            |_: &[f64; 1]| Guard::<()>::Admissible,
            [0.5],
            &tol(1.0),
        );
        assert!(matches!(run.stop, Stop::StepUnderflow { .. }));
    }
}
