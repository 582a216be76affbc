//! Adaptive Dormand–Prince 5(4) integration with PI-free step control.
//!
//! Small fixed-dimension systems only; the state is a `[f64; N]`. Steps are
//! accepted against a mixed absolute/relative error norm and the step size is
//! adjusted by the usual fifth-root rule with a [0.2, 5] change clamp.

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Why integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The observer requested a stop.
    Observer,
    /// Reached the time limit.
    TimeLimit,
    /// Exhausted the step budget.
    StepBudget,
    /// The step size collapsed below the floor.
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct RkOptions {
    pub rtol: f64,
    pub atol: f64,
    pub t_max: f64,
    pub max_steps: u64,
    pub initial_step: f64,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            t_max: 1e12,
            max_steps: 10_000_000,
            initial_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RkOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted_steps: u64,
    pub reason: StopReason,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrate `y' = f(t, y)` from `(t0, y0)`; `observer` sees every accepted
/// step (including the initial state) and may stop the run.
pub fn integrate_adaptive<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    opts: &RkOptions,
    mut observer: impl FnMut(f64, &[f64; N], f64) -> Control,
) -> RkOutcome<N> {
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.initial_step;
    let mut steps: u64 = 0;
    if observer(t, &y, 0.0) == Control::Stop {
        return RkOutcome {
            t,
            y,
            accepted_steps: 0,
            reason: StopReason::Observer,
        };
    }
    let mut k1 = f(t, &y);
    loop {
        if t >= opts.t_max {
            return RkOutcome {
                t,
                y,
                accepted_steps: steps,
                reason: StopReason::TimeLimit,
            };
        }
        if steps >= opts.max_steps {
            return RkOutcome {
                t,
                y,
                accepted_steps: steps,
                reason: StopReason::StepBudget,
            };
        }
        h = h.min(opts.t_max - t).max(f64::MIN_POSITIVE);
        if h < 1e-14 * t.abs().max(1.0) {
            return RkOutcome {
                t,
                y,
                accepted_steps: steps,
                reason: StopReason::StepUnderflow,
            };
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y5 = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y5);
        let y4 = axpy(
            &y,
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );

        let mut err_sq = 0.0;
        for i in 0..N {
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / scale;
            err_sq += e * e;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 || !err.is_finite() {
            if !err.is_finite() {
                // A non-finite stage: shrink hard and retry unless hopeless.
                h *= 0.1;
                if h < 1e-300 {
                    return RkOutcome {
                        t,
                        y,
                        accepted_steps: steps,
                        reason: StopReason::StepUnderflow,
                    };
                }
                continue;
            }
            t += h;
            y = y5;
            k1 = k7; // FSAL
            steps += 1;
            if observer(t, &y, h) == Control::Stop {
                return RkOutcome {
                    t,
                    y,
                    accepted_steps: steps,
                    reason: StopReason::Observer,
                };
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let out = integrate_adaptive(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            &RkOptions {
                t_max: 5.0,
                ..Default::default()
            },
            |_, _, _| Control::Continue,
        );
        assert_eq!(out.reason, StopReason::TimeLimit);
        assert!((out.y[0] - (-5.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let out = integrate_adaptive(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            &RkOptions {
                t_max: 20.0 * std::f64::consts::PI,
                rtol: 1e-10,
                atol: 1e-12,
                ..Default::default()
            },
            |_, _, _| Control::Continue,
        );
        let energy = out.y[0] * out.y[0] + out.y[1] * out.y[1];
        assert!((energy - 1.0).abs() < 1e-7, "energy drift {energy}");
        assert!((out.y[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn observer_can_stop() {
        let out = integrate_adaptive(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            &RkOptions::default(),
            |_, y, _| {
                if y[0] > 10.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        );
        assert_eq!(out.reason, StopReason::Observer);
        assert!(out.y[0] >= 10.0 && out.t < 3.0);
    }
}
