//! Distortion coefficients built from model functions.
//!
//! A *model function* is a continuous `s` with `s(theta) = c theta^N +
//! o(theta^N)` at zero and first zero `D` (possibly `+inf`). Its
//! *distortion coefficient* is
//!
//! ```text
//! beta_t(theta) = t^N                 theta = 0,
//!                 s(t theta)/s(theta) 0 < theta < D,
//!                 +inf                theta >= D, t in (0,1),
//! ```
//!
//! with `beta_0 = 0` and `beta_1 = 1`. The `+inf` value is a deliberate
//! extended-real sentinel (`f64::INFINITY` set explicitly), never an
//! overflow artifact. For real-analytic `s` with an isolated zero at `D`
//! the directional lim inf defining `beta` at `theta >= D` is `+inf` for
//! `t` in `(0,1)`; this is implemented directly rather than by a numeric
//! lim inf. Vector-valued model functions dispatch on membership in the
//! star-shaped positivity domain DOM, with a directional mesh evaluation
//! at the boundary.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lq::{self, build_row_model, conjugate_time, s_det, ClosedForm, VectorKappa};
use crate::report::linear_fit_slope;

/// Search lattice step for the lower-bound exponent `N'`.
const NPRIME_STEP: f64 = 0.01;

/// `sin(x)/x`, with the removable singularity at zero filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sin(x) - x cos(x)`, evaluated by series for small `x` where the direct
/// expression loses all significant digits to cancellation.
pub fn sin_minus_x_cos(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * x2
            * (1.0 / 3.0
                + x2 * (-1.0 / 30.0
                    + x2 * (1.0 / 840.0 + x2 * (-1.0 / 45_360.0 + x2 / 3_991_680.0))))
    } else {
        x.sin() - x * x.cos()
    }
}

/// `(sin(x) - x cos(x)) / x^3`, stable down to `x = 0` (value `1/3`).
pub fn sin_minus_x_cos_over_x3(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        1.0 / 3.0
            + x2 * (-1.0 / 30.0
                + x2 * (1.0 / 840.0 + x2 * (-1.0 / 45_360.0 + x2 / 3_991_680.0)))
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// `(2 - 2 cos x - x sin x)` for `x = sqrt(a) * scale`, divided by `a^2`,
/// extended analytically to `a < 0` (hyperbolic branch) and evaluated by
/// series for small `a * scale^2`. This is the common core of the
/// length-two model families; as a function of `scale` it is the model
/// function `s_{a,0}(scale)`.
pub fn osc_core(a: f64, scale: f64) -> f64 {
    let arg = a * scale * scale;
    if arg.abs() < 0.25 {
        let t4 = scale.powi(4);
        return t4
            * (1.0 / 12.0
                + arg
                    * (-1.0 / 180.0
                        + arg * (1.0 / 6_720.0
                            + arg * (-1.0 / 453_600.0 + arg / 47_900_160.0))));
    }
    if a > 0.0 {
        let x = a.sqrt() * scale;
        (2.0 - 2.0 * x.cos() - x * x.sin()) / (a * a)
    } else {
        let x = (-a).sqrt() * scale;
        (2.0 - 2.0 * x.cosh() + x * x.sinh()) / (a * a)
    }
}

/// A scalar model function: evaluator, order at zero, first zero.
pub struct ModelFunction {
    /// The evaluator `s` on `[0, inf)`.
    pub eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Order `N >= 1` at zero (`s ~ c theta^N`).
    pub order: f64,
    /// First zero `D` (`+inf` when `s` never vanishes).
    pub first_zero: f64,
}

impl ModelFunction {
    /// The Heisenberg model function of degree `d >= 1`:
    /// `s(theta) = theta sin(theta/2)^(2d-1) [sin(theta/2) - (theta/2)
    /// cos(theta/2)]`, of order `2d + 3` with first zero `2 pi`.
    pub fn heisenberg(d: u32) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidInput("d must be >= 1".into()));
        }
        Ok(ModelFunction {
            eval: Box::new(move |theta: f64| heisenberg_s(d, theta)),
            order: (2 * d + 3) as f64,
            first_zero: 2.0 * PI,
        })
    }

    /// Model function of a row model (`s = det N`), with the first zero
    /// located by the conjugate-time search on `(0, horizon]`.
    pub fn from_row_model(ell: usize, kappa: &[f64], horizon: f64) -> Result<Self> {
        let model = build_row_model(ell, kappa)?;
        let first_zero = conjugate_time(&model, horizon)?.value;
        Ok(ModelFunction {
            eval: Box::new(move |theta: f64| s_det(&model, theta).unwrap_or(f64::NAN)),
            order: (ell * ell) as f64,
            first_zero,
        })
    }

    /// Estimate the order at zero by least squares of `log s` against
    /// `log theta` on `theta` in `[1e-4, 1e-2]`; returns `(slope,
    /// std_error)`.
    pub fn fitted_order(&self) -> (f64, f64) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..20 {
            let theta = 1e-4 * 10f64.powf(2.0 * i as f64 / 19.0);
            let v = (self.eval)(theta);
            if v > 0.0 && v.is_finite() {
                xs.push(theta.ln());
                ys.push(v.ln());
            }
        }
        linear_fit_slope(&xs, &ys)
    }
}

/// The Heisenberg model function.
pub fn heisenberg_s(d: u32, theta: f64) -> f64 {
    let half = theta / 2.0;
    theta * half.sin().powi(2 * d as i32 - 1) * sin_minus_x_cos(half)
}

/// A scalar distortion coefficient.
pub struct DistortionCoefficient {
    /// The generating model function.
    pub model: ModelFunction,
}

impl DistortionCoefficient {
    /// Evaluate `beta_t(theta)` (extended real).
    ///
    /// Panics if the model function is corrupt (non-positive strictly
    /// inside its claimed positivity interval `(0, D)`).
    pub fn eval(&self, t: f64, theta: f64) -> f64 {
        assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
        assert!(theta >= 0.0, "theta must be >= 0");
        if t == 0.0 {
            return 0.0;
        }
        if t == 1.0 {
            return 1.0;
        }
        if theta == 0.0 {
            return t.powf(self.model.order);
        }
        if theta >= self.model.first_zero {
            return f64::INFINITY;
        }
        let denom = (self.model.eval)(theta);
        assert!(
            denom > 0.0,
            "corrupt model function: s({theta}) = {denom} <= 0 inside (0, D)"
        );
        (self.model.eval)(t * theta) / denom
    }
}

/// Wrap a model function into its distortion coefficient.
pub fn make_beta(s: ModelFunction) -> DistortionCoefficient {
    DistortionCoefficient { model: s }
}

/// A vector-valued model function on the nonnegative orthant of `R^m`.
pub struct VectorModelFunction {
    /// Gauge arity.
    pub m: usize,
    /// The evaluator `s`.
    pub eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    /// Order at zero along rays.
    pub order: f64,
    /// Radial DOM boundary: unit direction -> `D_theta` (`+inf` allowed).
    pub dom_radius: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl VectorModelFunction {
    /// Build from a vector curvature bound: `s(theta) =
    /// s_{kappa(theta/|theta|)}(|theta|)`, with the radial DOM boundary
    /// given by the conjugate time of the direction's row model.
    pub fn from_vector_kappa(
        ell: usize,
        kbar: std::sync::Arc<VectorKappa>,
        horizon: f64,
    ) -> Self {
        let m = kbar.m;
        let kb_eval = kbar.clone();
        let kb_dom = kbar;
        VectorModelFunction {
            m,
            eval: Box::new(move |theta: &[f64]| {
                lq::s_vector(ell, &kb_eval, theta).unwrap_or(f64::NAN)
            }),
            order: (ell * ell) as f64,
            dom_radius: Box::new(move |dir: &[f64]| {
                let kappa = kb_dom.eval(dir);
                match build_row_model(ell, &kappa)
                    .and_then(|model| conjugate_time(&model, horizon))
                {
                    Ok(tc) => tc.value,
                    Err(_) => f64::NAN,
                }
            }),
        }
    }
}

/// A vector-argument distortion coefficient.
pub struct VectorDistortionCoefficient {
    /// The generating vector model function.
    pub model: VectorModelFunction,
}

impl VectorDistortionCoefficient {
    /// Evaluate `beta_t(theta)` for `theta` in the nonnegative orthant.
    ///
    /// Inside DOM this is `s(t theta)/s(theta)`; outside, the directional
    /// lim inf is estimated on a mesh approaching the boundary from
    /// inside, returning `+inf` when the ratio exceeds `1e12`.
    pub fn eval(&self, t: f64, theta: &[f64]) -> f64 {
        assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
        if t == 0.0 {
            return 0.0;
        }
        if t == 1.0 {
            return 1.0;
        }
        let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return t.powf(self.model.order);
        }
        let dir: Vec<f64> = theta.iter().map(|x| x / norm).collect();
        let d_theta = (self.model.dom_radius)(&dir);
        if norm < d_theta {
            let scaled: Vec<f64> = theta.iter().map(|x| x * t).collect();
            return (self.model.eval)(&scaled) / (self.model.eval)(theta);
        }
        // Directional lim inf toward the boundary, from inside. For an
        // isolated radial zero the denominator decays to the evaluator's
        // noise floor while the numerator stays positive, so the ratio
        // either crosses the divergence threshold or the denominator
        // stops being reliably positive; both are reported as +inf.
        let mut last = f64::INFINITY;
        for j in 3..=40 {
            let r = d_theta * (1.0 - 2f64.powi(-j));
            let phi: Vec<f64> = dir.iter().map(|x| x * r).collect();
            let tphi: Vec<f64> = phi.iter().map(|x| x * t).collect();
            let denom = (self.model.eval)(&phi);
            if !(denom > 0.0) {
                return f64::INFINITY;
            }
            let ratio = (self.model.eval)(&tphi) / denom;
            if !ratio.is_finite() || ratio > 1e12 {
                return f64::INFINITY;
            }
            last = ratio;
        }
        last
    }
}

/// Wrap a vector model function into its distortion coefficient.
pub fn make_beta_vector(s: VectorModelFunction) -> VectorDistortionCoefficient {
    VectorDistortionCoefficient { model: s }
}

/// Which classical coefficient family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalKind {
    /// The `sigma` family (`N`-th power of the one-dimensional ratio).
    Sigma,
    /// The `tau` family (flat factor `t` times an `(N-1)`-power ratio).
    Tau,
}

/// The classical distortion coefficients of constant-curvature comparison.
///
/// `sigma`: `+inf` if `K theta^2 >= N pi^2`; `(sin(t theta sqrt(K/N)) /
/// sin(theta sqrt(K/N)))^N` for `0 < K theta^2 < N pi^2`; `t^N` when
/// `K theta^2 = 0`; the `sinh` branch for `K theta^2 < 0`.
///
/// `tau`: same structure with `N - 1` in place of `N` inside the ratio and
/// an extra flat factor `t`, and threshold `(N-1) pi^2`.
///
/// Endpoint conventions: `beta_0 = 0` and `beta_1 = 1` in every branch.
pub fn beta_classical(kind: ClassicalKind, k: f64, n: f64, t: f64, theta: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
    assert!(theta >= 0.0, "theta must be >= 0");
    match kind {
        ClassicalKind::Sigma => assert!(n >= 1.0, "sigma requires N >= 1"),
        ClassicalKind::Tau => assert!(
            n > 1.0 || k == 0.0,
            "tau requires N > 1 when K is nonzero"
        ),
    }
    if t == 0.0 {
        return 0.0;
    }
    if t == 1.0 {
        return 1.0;
    }
    let (m, flat) = match kind {
        ClassicalKind::Sigma => (n, 1.0),
        ClassicalKind::Tau => (n - 1.0, t),
    };
    let kt2 = k * theta * theta;
    if kt2 >= m * PI * PI && kt2 > 0.0 {
        return f64::INFINITY;
    }
    if kt2 == 0.0 {
        return t.powf(n);
    }
    if kt2 > 0.0 {
        let a = theta * (k / m).sqrt();
        flat * ((t * a).sin() / a.sin()).powf(m)
    } else {
        let a = theta * (-k / m).sqrt();
        flat * ((t * a).sinh() / a.sinh()).powf(m)
    }
}

/// The Heisenberg distortion coefficient of degree `d`:
/// order `2d + 3`, first zero `2 pi`.
pub fn beta_heisenberg(d: u32, t: f64, theta: f64) -> f64 {
    assert!(d >= 1, "d must be >= 1");
    assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
    assert!(theta >= 0.0, "theta must be >= 0");
    if t == 0.0 {
        return 0.0;
    }
    if t == 1.0 {
        return 1.0;
    }
    if theta == 0.0 {
        return t.powi(2 * d as i32 + 3);
    }
    if theta >= 2.0 * PI {
        return f64::INFINITY;
    }
    let p = 2 * d as i32 - 1;
    let th = theta / 2.0;
    let tth = t * theta / 2.0;
    t * (tth.sin().powi(p) * sin_minus_x_cos(tth))
        / (th.sin().powi(p) * sin_minus_x_cos(th))
}

/// Smallest `N'` on a lattice of step 0.01 such that `beta_t(theta) >=
/// t^(N')` on the whole grid (and `N' >= N`, the order of the model).
///
/// Since `log t < 0` for `t` in `(0,1)`, the constraint is `N' >=
/// log beta / log t` pointwise, so the answer is the lattice ceiling of the
/// grid supremum. A zero (or negative) `beta` at an interior `t` admits no
/// finite power bound and is reported as an unbounded search.
pub fn find_nprime(
    beta: &DistortionCoefficient,
    t_grid: &[f64],
    theta_grid: &[f64],
) -> Result<f64> {
    let mut required = beta.model.order;
    for &theta in theta_grid {
        if theta >= beta.model.first_zero {
            return Err(Error::InvalidInput(
                "theta grid must stay inside [0, D)".into(),
            ));
        }
        for &t in t_grid {
            if t <= 0.0 || t >= 1.0 {
                continue; // endpoints hold for every exponent
            }
            let b = beta.eval(t, theta);
            if b <= 0.0 {
                return Err(Error::Unbounded(format!(
                    "beta_{t}({theta}) = {b}: no power t^N' lies below"
                )));
            }
            if b.is_finite() {
                required = required.max(b.ln() / t.ln());
            }
        }
    }
    Ok((required / NPRIME_STEP - 1e-9).ceil() * NPRIME_STEP)
}

/// The composite model function of compact fat structures:
/// `s(theta) = theta e^(C theta) s_{kb,ka}(theta)^(n-k) s_{kc}(theta)^(2k-n-1)`,
/// of order `3n - 2k`, with the last factor omitted when its exponent
/// vanishes (`2k - n = 1`, and the corresponding level absent when
/// `n = 2k`). The first zero is the minimum of the conjugate times of the
/// participating factors; the exponential factor never vanishes.
pub fn compose_fat_s(
    n: usize,
    k: usize,
    c: f64,
    kappa_a: f64,
    kappa_b: f64,
    kappa_c: f64,
) -> Result<ModelFunction> {
    if !(2 <= k && k < n && n <= 2 * k) {
        return Err(Error::InvalidInput(format!(
            "invalid fat ranks (n, k) = ({n}, {k}): need 2 <= k < n <= 2k"
        )));
    }
    let exp_two_col = (n - k) as i32;
    let exp_riem = (2 * k).saturating_sub(n + 1) as i32; // 2k - n - 1, clamped at 0
    let mut first_zero = conjugate_time(&build_row_model(2, &[kappa_b, kappa_a])?, lq::DEFAULT_HORIZON)?.value;
    if exp_riem >= 1 {
        let tc = conjugate_time(&build_row_model(1, &[kappa_c])?, lq::DEFAULT_HORIZON)?.value;
        first_zero = first_zero.min(tc);
    }
    let order = (3 * n - 2 * k) as f64;
    Ok(ModelFunction {
        eval: Box::new(move |theta: f64| {
            let two_col = closed_two_columns(kappa_b, kappa_a, theta);
            let mut v = theta * (c * theta).exp() * two_col.powi(exp_two_col);
            if exp_riem >= 1 {
                let riem = match kappa_c {
                    kc if kc > 0.0 => (kc.sqrt() * theta).sin() / kc.sqrt(),
                    kc if kc < 0.0 => ((-kc).sqrt() * theta).sinh() / (-kc).sqrt(),
                    _ => theta,
                };
                v *= riem.powi(exp_riem);
            }
            v
        }),
        order,
        first_zero,
    })
}

fn closed_two_columns(kappa1: f64, kappa2: f64, theta: f64) -> f64 {
    lq::closed_form_s(ClosedForm::TwoColumns { kappa1, kappa2 }, theta).unwrap_or(f64::NAN)
}

/// Radial DOM boundary of a vector model function: for each unit direction,
/// the first radial zero of `s` located through the conjugate-time
/// machinery of the direction's row model. Entries may be `+inf`.
pub fn dom_region(
    ell: usize,
    kbar: &VectorKappa,
    directions: &[Vec<f64>],
    horizon: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(directions.len());
    for dir in directions {
        if dir.len() != kbar.m {
            return Err(Error::Dimension("direction arity mismatch".into()));
        }
        let kappa = kbar.eval(dir);
        let model = build_row_model(ell, &kappa)?;
        out.push(conjugate_time(&model, horizon)?.value);
    }
    Ok(out)
}

/// The model coefficient of the three-dimensional unimodular families:
/// `beta = t * s(t theta)/s(theta)` for the vector bound
/// `kappa_1(theta) = theta_1^2 + K theta_2^2` (second component zero),
/// with `+inf` outside DOM. The positivity domain is
/// `sqrt(theta_1^2 + K theta_2^2) < 2 pi` (membership along each ray is
/// governed by the conjugate time `2 pi / sqrt(kappa_1)`).
pub fn beta_3d_model(k: f64, t: f64, theta1: f64, theta2: f64) -> f64 {
    assert!(theta1 >= 0.0 && theta2 >= 0.0, "theta must be >= 0");
    assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
    if t == 0.0 {
        return 0.0;
    }
    if t == 1.0 {
        return 1.0;
    }
    let c = theta1 * theta1 + k * theta2 * theta2;
    if theta1 == 0.0 && theta2 == 0.0 {
        return t.powi(5);
    }
    if c >= 4.0 * PI * PI {
        return f64::INFINITY;
    }
    t * osc_core(c, t) / osc_core(c, 1.0)
}
