//! Linear-quadratic (LQ) comparison models.
//!
//! An LQ model is the data `(A, B, Q)` of a linear-dynamics, quadratic-cost
//! optimal control problem. Its Hamiltonian flow propagates the matrix pair
//! `(M(t), N(t))` by the linear system
//!
//! ```text
//! d/dt [M; N] = [[-Aᵀ, -Q], [B, A]] [M; N],   M(0) = I,  N(0) = 0,
//! ```
//!
//! and the scalar model function is `s(t) = det N(t)`. Everything downstream
//! (distortion coefficients, conjugate times, DOM regions) is built from
//! this determinant. The *row models* are the one-parameter family indexed
//! by a row length `ell` and a curvature vector `kappa`, with `A` the shift
//! matrix, `B` the rank-one projector on the first coordinate, and
//! `Q = diag(kappa)`.
//!
//! Normalization: the library treats `s` and `c·s` as the same model
//! function, since distortion coefficients are ratios. Closed forms keep
//! their customary constants; determinant-based evaluations keep theirs;
//! all cross-checks compare ratios `s(t)/s(1)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::report::VerificationReport;

/// Default integration tolerance for the Hamiltonian system.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default horizon for conjugate-time searches.
pub const DEFAULT_HORIZON: f64 = 50.0;

/// Number of pre-scan points for conjugate-time bracketing.
const SCAN_POINTS: usize = 10_000;

/// Below this time, `s_det` of a row model is evaluated through the exact
/// rescaling identity `s_kappa(t) = t^(ell^2) * s_{t·kappa}(1)` instead of a
/// direct determinant at time `t`. A direct evaluation is numerically
/// hopeless for small `t`: the entries of `N(t)` span many orders of
/// magnitude (`t` up to `t^(2*ell-1)`), so the fixed-precision integration
/// error destroys all relative accuracy of the tiny determinant
/// `det N(t) ~ c t^(ell^2)`. The rescaled model is evaluated at time 1,
/// where all entries are O(1).
const RESCALE_THRESHOLD: f64 = 0.05;

/// An LQ optimal-control comparison model.
#[derive(Debug, Clone)]
pub struct LQModel {
    /// Row length (state dimension).
    pub ell: usize,
    /// Drift matrix.
    pub a: DMatrix<f64>,
    /// Control matrix (symmetric positive semi-definite).
    pub b: DMatrix<f64>,
    /// Potential matrix (symmetric).
    pub q: DMatrix<f64>,
    /// For row models, the curvature vector with `Q = diag(kappa)`.
    pub kappa: Option<Vec<f64>>,
}

impl LQModel {
    /// Build a general LQ model, checking symmetry of `B` and `Q`, positive
    /// semi-definiteness of `B`, and the Kalman controllability condition
    /// `rank [B, AB, ..., A^(ell-1) B] = ell`.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, q: DMatrix<f64>) -> Result<Self> {
        let ell = a.nrows();
        if a.ncols() != ell || b.nrows() != ell || b.ncols() != ell || q.nrows() != ell
            || q.ncols() != ell
        {
            return Err(Error::Dimension("A, B, Q must be square of equal size".into()));
        }
        let sym_tol = 1e-12;
        if (&b - b.transpose()).abs().max() > sym_tol {
            return Err(Error::InvalidInput("B must be symmetric".into()));
        }
        if (&q - q.transpose()).abs().max() > sym_tol {
            return Err(Error::InvalidInput("Q must be symmetric".into()));
        }
        let eig = b.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(Error::InvalidInput(
                "B must be positive semi-definite".into(),
            ));
        }
        // Kalman condition.
        let mut kal = DMatrix::<f64>::zeros(ell, ell * ell);
        let mut pow = DMatrix::<f64>::identity(ell, ell);
        for j in 0..ell {
            let block = &pow * &b;
            kal.view_mut((0, j * ell), (ell, ell)).copy_from(&block);
            pow = &a * pow;
        }
        if kal.rank(1e-10) != ell {
            return Err(Error::InvalidInput(
                "Kalman condition fails: (A, B) is not controllable".into(),
            ));
        }
        Ok(LQModel { ell, a, b, q, kappa: None })
    }
}

/// Build the row model of length `ell` with curvatures `kappa`:
/// `A` is the lower shift, `B = e1 e1ᵀ`, `Q = diag(kappa)`.
pub fn build_row_model(ell: usize, kappa: &[f64]) -> Result<LQModel> {
    if ell == 0 {
        return Err(Error::Dimension("ell must be >= 1".into()));
    }
    if kappa.len() != ell {
        return Err(Error::Dimension(format!(
            "kappa has length {}, expected {}",
            kappa.len(),
            ell
        )));
    }
    let mut a = DMatrix::<f64>::zeros(ell, ell);
    for i in 1..ell {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DMatrix::<f64>::zeros(ell, ell);
    b[(0, 0)] = 1.0;
    let q = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_row_slice(kappa));
    let mut model = LQModel::new(a, b, q)?;
    model.kappa = Some(kappa.to_vec());
    Ok(model)
}

/// Solution of the Hamiltonian matrix system on a time grid.
#[derive(Debug, Clone)]
pub struct HamiltonianTrajectory {
    /// Grid of times in `[0, t_max]`.
    pub times: Vec<f64>,
    /// `M(t)` at each grid time.
    pub m: Vec<DMatrix<f64>>,
    /// `N(t)` at each grid time.
    pub n: Vec<DMatrix<f64>>,
    /// `det N(t)` at each grid time.
    pub det_n: Vec<f64>,
}

/// Flat state layout for the Hamiltonian system: `M` column-major followed
/// by `N` column-major.
fn hamiltonian_rhs(model: &LQModel, y: &[f64], dy: &mut [f64]) {
    let l = model.ell;
    let sz = l * l;
    let (m, n) = y.split_at(sz);
    // dM = -Aᵀ M - Q N ; dN = B M + A N  (all column-major, entry (i,j) at j*l+i).
    for j in 0..l {
        for i in 0..l {
            let mut dm = 0.0;
            let mut dn = 0.0;
            for k in 0..l {
                dm -= model.a[(k, i)] * m[j * l + k] + model.q[(i, k)] * n[j * l + k];
                dn += model.b[(i, k)] * m[j * l + k] + model.a[(i, k)] * n[j * l + k];
            }
            dy[j * l + i] = dm;
            dy[sz + j * l + i] = dn;
        }
    }
}

/// Initial state `(M, N) = (I, 0)`.
fn hamiltonian_init(ell: usize) -> Vec<f64> {
    let sz = ell * ell;
    let mut y = vec![0.0; 2 * sz];
    for i in 0..ell {
        y[i * ell + i] = 1.0;
    }
    y
}

fn det_from_state(ell: usize, y: &[f64]) -> f64 {
    let sz = ell * ell;
    match ell {
        1 => y[sz],
        2 => y[sz] * y[sz + 3] - y[sz + 2] * y[sz + 1],
        _ => DMatrix::from_column_slice(ell, ell, &y[sz..]).determinant(),
    }
}

/// Integrate the Hamiltonian system up to `t_max` with local tolerance
/// `tol`, recording the solution on a uniform grid (201 points).
pub fn integrate_hamiltonian(
    model: &LQModel,
    t_max: f64,
    tol: f64,
) -> Result<HamiltonianTrajectory> {
    if t_max <= 0.0 || tol <= 0.0 {
        return Err(Error::InvalidInput("t_max and tol must be positive".into()));
    }
    let l = model.ell;
    let sz = l * l;
    let grid = crate::grid::linspace(0.0, t_max, 201);
    let mut traj = HamiltonianTrajectory {
        times: Vec::with_capacity(grid.len()),
        m: Vec::with_capacity(grid.len()),
        n: Vec::with_capacity(grid.len()),
        det_n: Vec::with_capacity(grid.len()),
    };
    let ode = Dopri5::with_tol(tol);
    let mut y = hamiltonian_init(l);
    ode.integrate_checkpoints(
        &mut |_t, y: &[f64], dy: &mut [f64]| hamiltonian_rhs(model, y, dy),
        0.0,
        &grid,
        &mut y,
        |t, y| {
            traj.times.push(t);
            traj.m.push(DMatrix::from_column_slice(l, l, &y[..sz]));
            traj.n.push(DMatrix::from_column_slice(l, l, &y[sz..]));
            traj.det_n.push(det_from_state(l, y));
        },
    )?;
    Ok(traj)
}

/// `det N` at each requested time (times must be non-decreasing, `>= 0`).
pub fn det_n_at(model: &LQModel, times: &[f64], tol: f64) -> Result<Vec<f64>> {
    let ode = Dopri5::with_tol(tol);
    let mut y = hamiltonian_init(model.ell);
    let mut out = Vec::with_capacity(times.len());
    ode.integrate_checkpoints(
        &mut |_t, y: &[f64], dy: &mut [f64]| hamiltonian_rhs(model, y, dy),
        0.0,
        times,
        &mut y,
        |_t, y| out.push(det_from_state(model.ell, y)),
    )?;
    Ok(out)
}

/// `det N` together with the Hadamard bound of `N` (product of column
/// norms) at each requested time. The Hadamard bound sets the roundoff
/// noise floor of the determinant: when the entries of `N` grow
/// exponentially (negative curvature invariants) the determinant is a
/// cancellation of terms of size `~bound`, so computed values below
/// `~1e-10 * bound` in magnitude carry no sign information.
fn det_scan(model: &LQModel, times: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    let l = model.ell;
    let sz = l * l;
    let ode = Dopri5::with_tol(tol);
    let mut y = hamiltonian_init(l);
    let mut out = Vec::with_capacity(times.len());
    ode.integrate_checkpoints(
        &mut |_t, y: &[f64], dy: &mut [f64]| hamiltonian_rhs(model, y, dy),
        0.0,
        times,
        &mut y,
        |_t, y| {
            let mut bound = 1.0;
            for col in 0..l {
                let norm: f64 = y[sz + col * l..sz + (col + 1) * l]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                bound *= norm;
            }
            out.push((det_from_state(l, y), bound));
        },
    )?;
    Ok(out)
}

/// `(M(s), N(s))` at a single time.
fn mn_at(model: &LQModel, s: f64, tol: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let l = model.ell;
    let sz = l * l;
    let ode = Dopri5::with_tol(tol);
    let mut y = hamiltonian_init(l);
    ode.integrate(
        |_t, y: &[f64], dy: &mut [f64]| hamiltonian_rhs(model, y, dy),
        0.0,
        s,
        &mut y,
    )?;
    Ok((
        DMatrix::from_column_slice(l, l, &y[..sz]),
        DMatrix::from_column_slice(l, l, &y[sz..]),
    ))
}

/// The model function `s(t) = det N(t)`.
///
/// For row models and `t` below [`RESCALE_THRESHOLD`], the value is obtained
/// through the exact rescaling identity `s_kappa(t) = t^(ell^2) *
/// s_{t⊙kappa}(1)` (see the module docs for why this is the numerically
/// sound evaluation near zero). `t⊙kappa` denotes `(kappa_1 t^2, ...,
/// kappa_ell t^(2 ell))`.
pub fn s_det(model: &LQModel, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidInput("t must be >= 0".into()));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t < RESCALE_THRESHOLD {
        if let Some(kappa) = &model.kappa {
            let scaled = rescale_kappa(kappa, t);
            let scaled_model = build_row_model(model.ell, &scaled)?;
            let s1 = det_n_at(&scaled_model, &[1.0], DEFAULT_TOL)?[0];
            let n2 = (model.ell * model.ell) as i32;
            return Ok(t.powi(n2) * s1);
        }
    }
    Ok(det_n_at(model, &[t], DEFAULT_TOL)?[0])
}

/// The rescaled curvature vector `lambda ⊙ kappa = (kappa_i lambda^(2i))_i`.
pub fn rescale_kappa(kappa: &[f64], lambda: f64) -> Vec<f64> {
    kappa
        .iter()
        .enumerate()
        .map(|(i, &k)| k * lambda.powi(2 * (i as i32 + 1)))
        .collect()
}

/// First zero of `det N` located by pre-scan and bisection.
#[derive(Debug, Clone)]
pub struct ConjugateTime {
    /// The conjugate time, or `+inf` when no zero was found within the
    /// horizon.
    pub value: f64,
    /// Bracketing interval from the sign scan, if a zero was found.
    pub bracket: Option<(f64, f64)>,
    /// Search horizon that was used.
    pub horizon: f64,
}

impl ConjugateTime {
    /// Whether a conjugate time was found within the horizon.
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Locate the first zero of `det N` in `(0, horizon]`: a uniform pre-scan
/// with 10^4 points brackets the first sign change, then bisection refines
/// it to 1e-9 relative width. Returns the `+inf` sentinel when no sign
/// change is found.
///
/// Near `t = 0` the determinant is a tiny positive power of `t`, below the
/// integration noise floor; sign changes are therefore only accepted once
/// they are resolved relative to the running maximum of the scan. In
/// addition, negative values within roundoff of the Hadamard bound of the
/// entries are rejected: with exponentially growing entries the determinant
/// is a near-total cancellation and its computed sign is meaningless below
/// that floor.
pub fn conjugate_time(model: &LQModel, horizon: f64) -> Result<ConjugateTime> {
    if horizon <= 0.0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let grid: Vec<f64> = (1..=SCAN_POINTS)
        .map(|i| horizon * i as f64 / SCAN_POINTS as f64)
        .collect();
    let dets = det_scan(model, &grid, DEFAULT_TOL)?;
    let mut running_max: f64 = 0.0;
    let mut bracket = None;
    for (i, &(d, bound)) in dets.iter().enumerate() {
        let floor = (1e-12 * running_max).max(1e-10 * bound);
        if d < -floor && running_max > 0.0 {
            let lo = if i == 0 { 0.0 } else { grid[i - 1] };
            bracket = Some((lo, grid[i]));
            break;
        }
        running_max = running_max.max(d);
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(ConjugateTime {
            value: f64::INFINITY,
            bracket: None,
            horizon,
        });
    };
    let saved = (lo, hi);
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        let d = det_n_at(model, &[mid], DEFAULT_TOL)?[0];
        if d < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ConjugateTime {
        value: 0.5 * (lo + hi),
        bracket: Some(saved),
        horizon,
    })
}

/// Distortion value `beta_t = det N(t) / det N(1)`, defined for models whose
/// conjugate time exceeds 1. Returns 0 at `t = 0` and 1 at `t = 1` exactly.
pub fn beta_lq(model: &LQModel, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput("t must be in [0, 1]".into()));
    }
    let tc = conjugate_time(model, 1.0)?;
    if tc.is_finite() {
        return Err(Error::ConjugateTime { t_c: tc.value });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let num = s_det(model, t)?;
    let den = s_det(model, 1.0)?;
    Ok(num / den)
}

/// Distortion value through the Riccati representation
/// `beta_t = exp(-∫_t^1 tr(B V(s) + A) ds)` with `V = M N^{-1}`.
///
/// `V` blows up like `1/s` near `s = 0`, so the Riccati equation is started
/// at a small `s0` (with `V(s0)` obtained from a short Hamiltonian
/// integration) and, when `t < s0`, the missing piece of the integral is
/// compensated exactly by the determinant ratio `det N(t)/det N(s0)`.
pub fn beta_riccati(model: &LQModel, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidInput("t must be in (0, 1]".into()));
    }
    let tc = conjugate_time(model, 1.0)?;
    if tc.is_finite() {
        return Err(Error::ConjugateTime { t_c: tc.value });
    }
    let l = model.ell;
    let sz = l * l;
    let s0: f64 = 0.05;
    let start = t.max(s0);
    let (m0, n0) = mn_at(model, start, DEFAULT_TOL)?;
    let v0 = &m0 * n0
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NonConvergence("N(s0) is singular".into()))?;
    // State: V column-major, then the accumulator ∫ tr(BV + A).
    let mut y = vec![0.0; sz + 1];
    y[..sz].copy_from_slice(v0.as_slice());
    let ode = Dopri5::with_tol(DEFAULT_TOL);
    ode.integrate(
        |_s, y: &[f64], dy: &mut [f64]| {
            // dV = -(Aᵀ V + V A + V B V + Q)
            let v = &y[..sz];
            let mut bv = vec![0.0; sz];
            for j in 0..l {
                for i in 0..l {
                    let mut acc = 0.0;
                    for k in 0..l {
                        acc += model.b[(i, k)] * v[j * l + k];
                    }
                    bv[j * l + i] = acc;
                }
            }
            for j in 0..l {
                for i in 0..l {
                    let mut acc = model.q[(i, j)];
                    for k in 0..l {
                        acc += model.a[(k, i)] * v[j * l + k]
                            + v[k * l + i] * model.a[(k, j)]
                            + v[k * l + i] * bv[j * l + k];
                    }
                    dy[j * l + i] = -acc;
                }
            }
            let mut tr = 0.0;
            for i in 0..l {
                tr += bv[i * l + i] + model.a[(i, i)];
            }
            dy[sz] = tr;
        },
        start,
        1.0,
        &mut y,
    )?;
    let integral = y[sz];
    let mut beta = (-integral).exp();
    if t < s0 {
        let dets = det_n_at(model, &[t, s0], DEFAULT_TOL)?;
        beta *= dets[0] / dets[1];
    }
    Ok(beta)
}

/// Closed-form model-function families.
#[derive(Debug, Clone, Copy)]
pub enum ClosedForm {
    /// `sin(sqrt(kappa) t)/sqrt(kappa)`, extended by `sinh` for negative
    /// curvature and by `t` at zero.
    Riemannian { kappa: f64 },
    /// `(2 - 2cos(a t) - a t sin(a t))/a^4` with `a = sqrt(kappa1)`,
    /// extended analytically for `kappa1 <= 0`.
    Sasakian { kappa1: f64 },
    /// The two-columns family in terms of the complex frequencies `xi±`.
    TwoColumns { kappa1: f64, kappa2: f64 },
}

/// Evaluate a closed-form model function at `t`.
///
/// The two-columns formula has removable singularities when the two
/// frequencies coalesce or vanish; in that regime the evaluation falls back
/// to the determinant of the corresponding row model (same normalization,
/// checked by the flat limit `t^4/12`).
pub fn closed_form_s(family: ClosedForm, t: f64) -> Result<f64> {
    match family {
        ClosedForm::Riemannian { kappa } => Ok(riemannian_s(kappa, t)),
        ClosedForm::Sasakian { kappa1 } => Ok(sasakian_s(kappa1, t)),
        ClosedForm::TwoColumns { kappa1, kappa2 } => two_columns_s(kappa1, kappa2, t),
    }
}

fn riemannian_s(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let a = kappa.sqrt();
        (a * t).sin() / a
    } else if kappa < 0.0 {
        let a = (-kappa).sqrt();
        (a * t).sinh() / a
    } else {
        t
    }
}

/// `(2 - 2cos(x) - x sin(x)) / x^4` evaluated stably (series for small `x`,
/// extended to `x^2 < 0` through `cosh`/`sinh`). The argument is `x^2`.
fn sasakian_core(x2: f64, scale: f64) -> f64 {
    // Returns (2 - 2cos(x) - x sin(x)) / kappa1^2 with x = sqrt(x2)*scale,
    // kappa1 = x2; i.e. the Sasakian s at t = scale for kappa1 = x2.
    let arg = x2 * scale * scale;
    if arg.abs() < 1e-2 {
        // Series in arg = (a t)^2: s = t^4 (1/12 - arg/180 + arg^2/6720 - arg^3/453600 + ...)
        let t4 = scale.powi(4);
        return t4
            * (1.0 / 12.0 - arg / 180.0 + arg * arg / 6720.0 - arg * arg * arg / 453_600.0);
    }
    if x2 > 0.0 {
        let a = x2.sqrt();
        let x = a * scale;
        (2.0 - 2.0 * x.cos() - x * x.sin()) / (x2 * x2)
    } else {
        let a = (-x2).sqrt();
        let x = a * scale;
        (2.0 - 2.0 * x.cosh() + x * x.sinh()) / (x2 * x2)
    }
}

fn sasakian_s(kappa1: f64, t: f64) -> f64 {
    sasakian_core(kappa1, t)
}

fn two_columns_s(kappa1: f64, kappa2: f64, t: f64) -> Result<f64> {
    use num_complex::Complex64;
    let disc = 4.0 * kappa2 + kappa1 * kappa1;
    let x = Complex64::new(kappa1 / 2.0, 0.0);
    let y = Complex64::new(disc, 0.0).sqrt() / 2.0;
    let xp = ((x + y).sqrt() + (x - y).sqrt()) / 2.0;
    let xm = ((x + y).sqrt() - (x - y).sqrt()) / 2.0;
    let xp2 = xp * xp;
    let xm2 = xm * xm;
    let scale = 1.0 + kappa1.abs() + kappa2.abs();
    // Removable singularities: coalescing or vanishing frequencies.
    if (xp2 - xm2).norm() < 1e-4 * scale || xp.norm() < 1e-4 || xm.norm() < 1e-4 {
        let model = build_row_model(2, &[kappa1, kappa2])?;
        return s_det(&model, t);
    }
    let sp = (xp * t).sin();
    let sm = (xm * t).sin();
    let num = xm2 * sp * sp - xp2 * sm * sm;
    let den = 4.0 * xm2 * xp2 * (xm2 - xp2);
    let val = num / den;
    Ok(val.re)
}

/// Verify the rescaling identity `s_{lambda⊙kappa}(t) = s_kappa(t lambda) /
/// lambda^(ell^2)` on a time grid, in ratio form (each side normalized by
/// the magnitude of the reference side). For `lambda = 0` the identity
/// degenerates to `s_0(t) = c t^(ell^2)`, checked through the ratio
/// `s_0(t)/s_0(1) = t^(ell^2)` (the constant is a normalization choice).
pub fn check_rescaling(
    ell: usize,
    kappa: &[f64],
    lambda: f64,
    t_grid: &[f64],
) -> Result<VerificationReport> {
    if lambda < 0.0 {
        return Err(Error::InvalidInput("lambda must be >= 0".into()));
    }
    let tol = 1e-8;
    let mut report = VerificationReport::new("rescaling", 0.0);
    let mut max_err: f64 = 0.0;
    if lambda == 0.0 {
        let flat = build_row_model(ell, &vec![0.0; ell])?;
        let s1 = s_det(&flat, 1.0)?;
        for &t in t_grid {
            if t <= 0.0 {
                continue;
            }
            let lhs = s_det(&flat, t)? / s1;
            let rhs = t.powi((ell * ell) as i32);
            let err = (lhs - rhs).abs() / rhs.abs().max(1e-300);
            max_err = max_err.max(err);
            report.push_check(
                "flat-power",
                vec![("t".into(), t), ("lambda".into(), lambda)],
                -err,
                -tol,
            );
        }
    } else {
        let scaled = build_row_model(ell, &rescale_kappa(kappa, lambda))?;
        let base = build_row_model(ell, kappa)?;
        let pow = lambda.powi((ell * ell) as i32);
        for &t in t_grid {
            if t <= 0.0 {
                continue;
            }
            let lhs = s_det(&scaled, t)?;
            let rhs = s_det(&base, t * lambda)? / pow;
            let err = (lhs - rhs).abs() / rhs.abs().max(1e-300);
            max_err = max_err.max(err);
            report.push_check(
                "rescaling",
                vec![
                    ("t".into(), t),
                    ("lambda".into(), lambda),
                    ("s_rescaled".into(), lhs),
                    ("s_reference".into(), rhs),
                ],
                -err,
                -tol,
            );
        }
    }
    report
        .notes
        .push(format!("max relative identity error: {max_err:.3e}"));
    report.finalize();
    Ok(report)
}

/// A vector-valued curvature bound: `ell` component functions on the
/// nonnegative orthant of `R^m`, the `i`-th homogeneous of degree `2i`.
pub struct VectorKappa {
    /// Gauge arity (dimension of the argument).
    pub m: usize,
    /// Component evaluators, indexed `i = 1..=ell` (0-based storage).
    pub components: Vec<Box<dyn Fn(&[f64]) -> f64 + Send + Sync>>,
}

impl VectorKappa {
    /// Evaluate all components at `theta`.
    pub fn eval(&self, theta: &[f64]) -> Vec<f64> {
        self.components.iter().map(|f| f(theta)).collect()
    }

    /// Maximum homogeneity violation `|kappa_i(lambda theta) - lambda^(2i)
    /// kappa_i(theta)| / (1 + |kappa_i(theta)|)` over the given samples.
    pub fn homogeneity_violation(&self, samples: &[(f64, Vec<f64>)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (lambda, theta) in samples {
            let scaled: Vec<f64> = theta.iter().map(|x| x * lambda).collect();
            for (i, f) in self.components.iter().enumerate() {
                let base = f(theta);
                let expect = lambda.powi(2 * (i as i32 + 1)) * base;
                let got = f(&scaled);
                worst = worst.max((got - expect).abs() / (1.0 + base.abs()));
            }
        }
        worst
    }
}

/// The vector model function `s(theta) = s_{kappa(theta/|theta|)}(|theta|)`,
/// with `s(0) = 0`.
pub fn s_vector(ell: usize, kbar: &VectorKappa, theta: &[f64]) -> Result<f64> {
    if theta.len() != kbar.m {
        return Err(Error::Dimension(format!(
            "theta has length {}, expected {}",
            theta.len(),
            kbar.m
        )));
    }
    if theta.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput(
            "theta must lie in the nonnegative orthant".into(),
        ));
    }
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let dir: Vec<f64> = theta.iter().map(|x| x / norm).collect();
    let kappa = kbar.eval(&dir);
    let model = build_row_model(ell, &kappa)?;
    s_det(&model, norm)
}
