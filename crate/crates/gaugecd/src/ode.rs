//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)).
//!
//! All ODEs in this crate are small, smooth and non-stiff (linear matrix
//! systems and geodesic flows), so a classical explicit embedded pair with
//! proportional step control is both accurate and cheap. The integrator
//! works on flat `&[f64]` state vectors to avoid allocation in hot loops.

use crate::error::{Error, Result};

/// Dormand–Prince 5(4) Butcher tableau: stage nodes.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

/// Stage coefficients (row `i` feeds stage `i+1`).
const A: [[f64; 6]; 6] = [
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

/// 5th-order solution weights (identical to the last row of `A`: FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Embedded 4th-order weights used for the error estimate.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince 5(4) integrator with absolute/relative error
/// control per component.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    /// Relative tolerance (per step, per component).
    pub rtol: f64,
    /// Absolute tolerance floor (per step, per component).
    pub atol: f64,
}

impl Dopri5 {
    /// Integrator with equal absolute and relative tolerance `tol`.
    pub fn with_tol(tol: f64) -> Self {
        Dopri5 { rtol: tol, atol: tol }
    }

    /// Advance `y` in place from `t0` to `t1` (`t1 >= t0`).
    pub fn integrate<F>(&self, mut f: F, t0: f64, t1: f64, y: &mut [f64]) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        self.integrate_checkpoints(&mut f, t0, &[t1], y, |_, _| {})
    }

    /// Advance `y` in place from `t0` through every time in `checkpoints`
    /// (which must be non-decreasing and `>= t0`), invoking `on_checkpoint`
    /// with the state at each one. The integrator steps exactly onto each
    /// checkpoint, so no interpolation error is introduced.
    pub fn integrate_checkpoints<F, G>(
        &self,
        f: &mut F,
        t0: f64,
        checkpoints: &[f64],
        y: &mut [f64],
        mut on_checkpoint: G,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        G: FnMut(f64, &[f64]),
    {
        let n = y.len();
        let mut k = vec![vec![0.0; n]; 7];
        let mut y_stage = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        let mut t = t0;
        f(t, y, &mut k[0]);
        let mut fresh_k0 = true;

        for &tc in checkpoints {
            if tc < t - 1e-15 {
                return Err(Error::InvalidInput(
                    "checkpoints must be non-decreasing".into(),
                ));
            }
            if tc <= t {
                on_checkpoint(t, y);
                continue;
            }
            if !fresh_k0 {
                f(t, y, &mut k[0]);
                fresh_k0 = true;
            }
            // Initial step: a conservative fraction of the remaining span.
            let mut h = ((tc - t) * 0.1).min(0.1).max(1e-8);
            let span = tc - t0;
            while t < tc {
                h = h.min(tc - t);
                if h < 1e-14 * span.max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
                // Stages 2..7.
                for s in 1..7 {
                    for i in 0..n {
                        let mut acc = 0.0;
                        for (j, kj) in k.iter().enumerate().take(s) {
                            let a = A[s - 1][j];
                            if a != 0.0 {
                                acc += a * kj[i];
                            }
                        }
                        y_stage[i] = y[i] + h * acc;
                    }
                    let (head, tail) = k.split_at_mut(s);
                    let _ = head;
                    f(t + C[s] * h, &y_stage, &mut tail[0]);
                }
                // 5th-order solution and embedded error estimate.
                let mut err_norm: f64 = 0.0;
                for i in 0..n {
                    let mut y5 = 0.0;
                    let mut e = 0.0;
                    for (s, ks) in k.iter().enumerate() {
                        y5 += B5[s] * ks[i];
                        e += (B5[s] - B4[s]) * ks[i];
                    }
                    y_new[i] = y[i] + h * y5;
                    let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    let r = h * e / scale;
                    err_norm += r * r;
                }
                err_norm = (err_norm / n as f64).sqrt();

                if err_norm <= 1.0 {
                    t += h;
                    y.copy_from_slice(&y_new);
                    // FSAL: stage 7 is the derivative at the accepted point.
                    let k6 = k[6].clone();
                    k[0].copy_from_slice(&k6);
                }
                // Proportional controller with safety factor and clamps.
                let factor = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            }
            on_checkpoint(t, y);
            // The FSAL derivative was computed at the pre-clip argument; it
            // is valid at the checkpoint because the step landed exactly on
            // it, so keep `fresh_k0 = true`.
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let ode = Dopri5::with_tol(1e-10);
        let mut y = vec![1.0];
        ode.integrate(|_, y, dy| dy[0] = -y[0], 0.0, 2.0, &mut y).unwrap();
        assert_relative_eq!(y[0], (-2.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let ode = Dopri5::with_tol(1e-11);
        let mut y = vec![1.0, 0.0];
        let w = 3.0;
        ode.integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -w * w * y[0];
            },
            0.0,
            2.0 * std::f64::consts::PI / w,
            &mut y,
        )
        .unwrap();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-8);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn checkpoints_match_direct_integration() {
        let ode = Dopri5::with_tol(1e-10);
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = t * y[0];
        let mut collected = Vec::new();
        let mut y = vec![1.0];
        ode.integrate_checkpoints(
            &mut { rhs },
            0.0,
            &[0.5, 1.0, 1.5],
            &mut y,
            |t, y| collected.push((t, y[0])),
        )
        .unwrap();
        for (t, v) in collected {
            assert_relative_eq!(v, (t * t / 2.0).exp(), max_relative = 1e-9);
        }
    }
}
