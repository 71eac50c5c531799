//! The Heisenberg group and the canonical variation of its metrics.
//!
//! Points are exponential coordinates `(x, y, z)` with group law
//! `(x,y,z) * (x',y',z') = (x+x', y+y', z+z' + (x y' - y x')/2)`.
//!
//! The metric family is parameterized by `eps >= 0` through the
//! Hamiltonian `H_eps = (hX^2 + hY^2 + eps^2 hZ^2)/2` in the
//! left-invariant frame; `eps = 0` is the sub-Riemannian metric, `eps > 0`
//! a Riemannian one. Geodesics from the origin are computed by
//! integrating the Hamiltonian system; the closed-form endpoint map is
//! deliberately *not* used here so that integration tests can hold it as
//! an independent oracle.
//!
//! The covector solver inverts the time-1 endpoint map for the
//! minimal-energy covector. It warm-starts from a cached numeric
//! inversion table (built once from the integrator itself), polishes with
//! a damped Newton iteration on the endpoint residual, and falls back to
//! a multi-start grid when the warm starts fail.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::distortion::{sin_minus_x_cos_over_x3, sinc};
use crate::error::{Error, Result};
use crate::ode::Dopri5;

/// Integration tolerance for the endpoint map.
const EXP_TOL: f64 = 1e-11;
/// Default Newton residual target, relative to `1 + |target|`.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;
/// Maximum Newton iterations per start.
const NEWTON_MAX_ITERS: usize = 100;
/// Finite-difference step scale for Jacobians.
const FD_STEP: f64 = 1e-5;
/// Points closer than this to the z-axis are rejected at `eps = 0`
/// (they lie on the cut/abnormal set and the solver is ill-posed there).
const AXIS_MARGIN: f64 = 1e-4;
/// Covector vertical momenta are confined to `|p_z| < 2 pi` (the minimal
/// covector of an off-axis point lies strictly inside this band).
const PZ_CAP: f64 = 2.0 * PI - 1e-7;
/// Two converged solutions with energies within this (relative) gap are
/// flagged as ambiguous.
const AMBIGUITY_GAP: f64 = 1e-6;
/// Multi-start fallback grid size.
const MULTISTART_PZ: usize = 32;
const MULTISTART_ANGLES: usize = 8;

/// A point of the Heisenberg group in exponential coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisenbergPoint {
    /// The group identity.
    pub fn origin() -> Self {
        HeisenbergPoint { x: 0.0, y: 0.0, z: 0.0 }
    }

    /// Group multiplication.
    pub fn group_mul(&self, other: &HeisenbergPoint) -> HeisenbergPoint {
        HeisenbergPoint {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z + (self.x * other.y - self.y * other.x) / 2.0,
        }
    }

    /// Group inverse.
    pub fn group_inv(&self) -> HeisenbergPoint {
        HeisenbergPoint { x: -self.x, y: -self.y, z: -self.z }
    }

    /// Horizontal radius `sqrt(x^2 + y^2)`.
    pub fn horizontal_radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// An initial covector at the origin, in the left-invariant frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergCovector {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl HeisenbergCovector {
    /// Build from cylindrical components `(phi, rho, pz)` with `rho >= 0`.
    pub fn from_cylindrical(phi: f64, rho: f64, pz: f64) -> Self {
        HeisenbergCovector { px: rho * phi.cos(), py: rho * phi.sin(), pz }
    }

    /// Horizontal magnitude `rho = sqrt(px^2 + py^2)`.
    pub fn rho(&self) -> f64 {
        self.px.hypot(self.py)
    }

    /// Horizontal angle.
    pub fn phi(&self) -> f64 {
        self.py.atan2(self.px)
    }

    /// Scalar multiple.
    pub fn scale(&self, t: f64) -> Self {
        HeisenbergCovector { px: t * self.px, py: t * self.py, pz: t * self.pz }
    }

    fn dist(&self, other: &HeisenbergCovector) -> f64 {
        ((self.px - other.px).powi(2)
            + (self.py - other.py).powi(2)
            + (self.pz - other.pz).powi(2))
        .sqrt()
    }
}

/// Result of a covector solve.
#[derive(Debug, Clone, Copy)]
pub struct CovectorSolution {
    /// The minimal-energy covector found.
    pub covector: HeisenbergCovector,
    /// Its Hamiltonian energy `H_eps`.
    pub hamiltonian: f64,
    /// True when a second, essentially distinct covector with energy
    /// within the ambiguity gap was also found.
    pub ambiguous: bool,
}

/// One member of the canonical variation, `eps >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalVariation {
    pub eps: f64,
}

/// A precomputed row of the sub-Riemannian inversion table: the time-1
/// endpoint of the unit covector `(phi = 0, rho = 1, pz)`.
struct TableRow {
    pz: f64,
    /// `z / r^2` of the endpoint — strictly increasing in `pz`.
    zeta: f64,
    /// Horizontal radius of the endpoint.
    r_unit: f64,
    /// Horizontal angle of the endpoint.
    alpha: f64,
}

static SR_TABLE: OnceLock<Vec<TableRow>> = OnceLock::new();

fn sr_table() -> &'static Vec<TableRow> {
    SR_TABLE.get_or_init(|| {
        let geo = CanonicalVariation { eps: 0.0 };
        let n = 1024;
        let top = 2.0 * PI - 1e-3;
        (0..=n)
            .map(|i| {
                let pz = top * i as f64 / n as f64;
                geo.unit_row(pz)
            })
            .collect()
    })
}

impl CanonicalVariation {
    /// A member of the variation; `eps = 0` is the sub-Riemannian limit.
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidInput("eps must be >= 0".into()));
        }
        Ok(CanonicalVariation { eps })
    }

    /// The Hamiltonian energy of a covector.
    pub fn hamiltonian(&self, lambda: &HeisenbergCovector) -> f64 {
        0.5 * (lambda.px * lambda.px
            + lambda.py * lambda.py
            + self.eps * self.eps * lambda.pz * lambda.pz)
    }

    /// Endpoint at time `t` of the geodesic with initial covector
    /// `lambda`, by integration of the Hamiltonian system.
    pub fn exp_map(&self, lambda: &HeisenbergCovector, t: f64) -> Result<HeisenbergPoint> {
        if t == 0.0 {
            return Ok(HeisenbergPoint::origin());
        }
        let mut state = [0.0, 0.0, 0.0, lambda.px, lambda.py];
        let pz = lambda.pz;
        let eps2 = self.eps * self.eps;
        let solver = Dopri5::with_tol(EXP_TOL);
        solver.integrate(
            |_t, s: &[f64], ds: &mut [f64]| {
                let (x, y, hx, hy) = (s[0], s[1], s[3], s[4]);
                ds[0] = hx;
                ds[1] = hy;
                ds[2] = (x * hy - y * hx) / 2.0 + eps2 * pz;
                ds[3] = -pz * hy;
                ds[4] = pz * hx;
            },
            0.0,
            t,
            &mut state,
        )?;
        Ok(HeisenbergPoint { x: state[0], y: state[1], z: state[2] })
    }

    /// Endpoint of the unit-radius covector `(phi=0, rho=1, pz)` reduced
    /// to table coordinates.
    fn unit_row(&self, pz: f64) -> TableRow {
        let lam = HeisenbergCovector { px: 1.0, py: 0.0, pz };
        let p = self.exp_map(&lam, 1.0).expect("endpoint integration failed");
        let r = p.horizontal_radius();
        TableRow { pz, zeta: p.z / (r * r), r_unit: r, alpha: p.y.atan2(p.x) }
    }

    /// Sub-Riemannian warm start: table lookup in `zeta = z / r^2` with a
    /// bisection extension past the table's top for near-axis targets.
    fn warm_start_sr(&self, target: &HeisenbergPoint) -> Option<HeisenbergCovector> {
        let r = target.horizontal_radius();
        if r <= 0.0 {
            return None;
        }
        let sign = if target.z >= 0.0 { 1.0 } else { -1.0 };
        let zeta = target.z.abs() / (r * r);
        let table = sr_table();
        let row = if zeta >= table.last().unwrap().zeta {
            // Bisect on pz in (table top, cap) with fresh unit runs.
            let geo = CanonicalVariation { eps: 0.0 };
            let (mut lo, mut hi) = (table.last().unwrap().pz, PZ_CAP);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if geo.unit_row(mid).zeta < zeta {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            geo.unit_row(0.5 * (lo + hi))
        } else {
            let idx = table.partition_point(|row| row.zeta < zeta);
            if idx == 0 {
                TableRow { ..table[0].clone_row() }
            } else {
                let (a, b) = (&table[idx - 1], &table[idx]);
                let w = (zeta - a.zeta) / (b.zeta - a.zeta).max(1e-300);
                TableRow {
                    pz: a.pz + w * (b.pz - a.pz),
                    zeta,
                    r_unit: a.r_unit + w * (b.r_unit - a.r_unit),
                    alpha: a.alpha + w * (b.alpha - a.alpha),
                }
            }
        };
        let rho = r / row.r_unit;
        let phi = target.y.atan2(target.x) - sign * row.alpha;
        Some(HeisenbergCovector::from_cylindrical(phi, rho, sign * row.pz))
    }

    /// Damped Newton on the time-1 endpoint residual from one start.
    fn newton(
        &self,
        target: &HeisenbergPoint,
        start: HeisenbergCovector,
        tol: f64,
    ) -> Option<HeisenbergCovector> {
        let scale = 1.0 + (target.x.abs() + target.y.abs() + target.z.abs());
        let residual = |lam: &HeisenbergCovector| -> Option<[f64; 3]> {
            let p = self.exp_map(lam, 1.0).ok()?;
            Some([p.x - target.x, p.y - target.y, p.z - target.z])
        };
        let norm = |f: &[f64; 3]| (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
        let mut lam = start;
        let mut f = residual(&lam)?;
        for _ in 0..NEWTON_MAX_ITERS {
            if norm(&f) <= tol * scale {
                return Some(lam);
            }
            // Central-difference Jacobian of the endpoint map.
            let h = FD_STEP * (1.0 + lam.rho() + lam.pz.abs());
            let mut jac = [[0.0f64; 3]; 3];
            for j in 0..3 {
                let mut plus = lam;
                let mut minus = lam;
                match j {
                    0 => {
                        plus.px += h;
                        minus.px -= h;
                    }
                    1 => {
                        plus.py += h;
                        minus.py -= h;
                    }
                    _ => {
                        plus.pz += h;
                        minus.pz -= h;
                    }
                }
                let pp = self.exp_map(&plus, 1.0).ok()?;
                let pm = self.exp_map(&minus, 1.0).ok()?;
                jac[0][j] = (pp.x - pm.x) / (2.0 * h);
                jac[1][j] = (pp.y - pm.y) / (2.0 * h);
                jac[2][j] = (pp.z - pm.z) / (2.0 * h);
            }
            let step = solve3(&jac, &f)?;
            // Damped update, keeping pz inside the admissible band.
            let mut s = 1.0;
            let mut advanced = false;
            while s >= 1.0 / 64.0 {
                let mut cand = HeisenbergCovector {
                    px: lam.px - s * step[0],
                    py: lam.py - s * step[1],
                    pz: lam.pz - s * step[2],
                };
                cand.pz = cand.pz.clamp(-PZ_CAP, PZ_CAP);
                if let Some(fc) = residual(&cand) {
                    if norm(&fc) < norm(&f) {
                        lam = cand;
                        f = fc;
                        advanced = true;
                        break;
                    }
                }
                s /= 2.0;
            }
            if !advanced {
                return None;
            }
        }
        if norm(&f) <= tol * scale {
            Some(lam)
        } else {
            None
        }
    }

    /// The minimal-energy covector whose time-1 endpoint is `target`,
    /// found to endpoint residual `tol` (relative to `1 + |target|`).
    ///
    /// The identity target is rejected as degenerate. At `eps = 0`,
    /// targets within the axis margin of the z-axis are rejected
    /// (`Error::CutLocus`): they lie on the cut set where the minimizer
    /// is non-unique.
    pub fn solve_covector(&self, target: &HeisenbergPoint, tol: f64) -> Result<CovectorSolution> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput("tol must be > 0".into()));
        }
        let r = target.horizontal_radius();
        if target.x == 0.0 && target.y == 0.0 && target.z == 0.0 {
            return Err(Error::InvalidInput(
                "target equals the base point (degenerate solve)".into(),
            ));
        }
        if self.eps == 0.0 && r < AXIS_MARGIN {
            return Err(Error::CutLocus(format!(
                "target ({}, {}, {}) lies within {AXIS_MARGIN} of the z-axis",
                target.x, target.y, target.z
            )));
        }

        // Warm starts: the sub-Riemannian table solution, and (for
        // eps > 0) the small-pz planar expansion pz ~ z / (eps^2 + r^2/12).
        let mut starts: Vec<HeisenbergCovector> = Vec::new();
        if let Some(s) = self.warm_start_sr(target) {
            starts.push(s);
        }
        if self.eps > 0.0 {
            let pz = (target.z / (self.eps * self.eps + r * r / 12.0)).clamp(-PZ_CAP, PZ_CAP);
            let phi = target.y.atan2(target.x) - pz / 2.0;
            starts.push(HeisenbergCovector::from_cylindrical(phi, r, pz));
        }

        let mut found: Vec<HeisenbergCovector> = Vec::new();
        for s in &starts {
            if let Some(lam) = self.newton(target, *s, tol) {
                found.push(lam);
                break; // warm starts aim at the same minimal solution
            }
        }

        if found.is_empty() {
            // Multi-start fallback over a (pz, angle) grid in the open
            // band (-2 pi + 0.05, 2 pi - 0.05).
            let phi_base = target.y.atan2(target.x);
            let (lo, hi) = (-2.0 * PI + 0.05, 2.0 * PI - 0.05);
            for k in 0..MULTISTART_PZ {
                let pz = lo + (hi - lo) * (k as f64 + 0.5) / MULTISTART_PZ as f64;
                let half = pz / 2.0;
                let chord = if half.abs() < 1e-9 { 1.0 } else { (half.sin() / half).abs() };
                let rho = if r > 0.0 { r / chord.max(1e-6) } else { target.z.abs().sqrt() };
                for j in 0..MULTISTART_ANGLES {
                    let phi = phi_base + 2.0 * PI * j as f64 / MULTISTART_ANGLES as f64;
                    let s = HeisenbergCovector::from_cylindrical(phi, rho, pz);
                    if let Some(lam) = self.newton(target, s, tol) {
                        if !found.iter().any(|g| g.dist(&lam) < 1e-6) {
                            found.push(lam);
                        }
                    }
                }
            }
        }

        let best = found
            .iter()
            .copied()
            .min_by(|a, b| self.hamiltonian(a).total_cmp(&self.hamiltonian(b)))
            .ok_or_else(|| {
                Error::NonConvergence(format!(
                    "no covector found for target ({}, {}, {})",
                    target.x, target.y, target.z
                ))
            })?;
        let h_best = self.hamiltonian(&best);
        let ambiguous = found.iter().any(|g| {
            g.dist(&best) >= 1e-6
                && (self.hamiltonian(g) - h_best).abs() <= AMBIGUITY_GAP * (1.0 + h_best)
        });
        Ok(CovectorSolution { covector: best, hamiltonian: h_best, ambiguous })
    }

    /// The relative position `inv(p) * q` (left-translation reduction).
    pub fn relative(p: &HeisenbergPoint, q: &HeisenbergPoint) -> HeisenbergPoint {
        p.group_inv().group_mul(q)
    }

    /// The minimal covector of the geodesic from `p` to `q`.
    pub fn solve_covector_pair(
        &self,
        p: &HeisenbergPoint,
        q: &HeisenbergPoint,
        tol: f64,
    ) -> Result<CovectorSolution> {
        self.solve_covector(&Self::relative(p, q), tol)
    }

    /// The distance `d_eps(p, q) = sqrt(2 H_eps)` of the minimal covector;
    /// left-invariant by construction.
    pub fn cc_distance(&self, p: &HeisenbergPoint, q: &HeisenbergPoint) -> Result<f64> {
        let rel = Self::relative(p, q);
        if rel.x == 0.0 && rel.y == 0.0 && rel.z == 0.0 {
            return Ok(0.0);
        }
        Ok((2.0 * self.solve_covector(&rel, DEFAULT_SOLVE_TOL)?.hamiltonian).sqrt())
    }

    /// The gauge function `G_eps(p, q)`: `|pz|` of the minimal covector.
    pub fn gauge_theta(&self, p: &HeisenbergPoint, q: &HeisenbergPoint) -> Result<f64> {
        Ok(self
            .solve_covector(&Self::relative(p, q), DEFAULT_SOLVE_TOL)?
            .covector
            .pz
            .abs())
    }

    /// Finite-difference estimate of the reference norm of the frame
    /// gradient of `c(., q) = d_eps(., q)^2 / 2` at `p`, differentiating
    /// along the flows of the frame fields (right translations) with
    /// Richardson-extrapolated central differences over steps `{h, h/2}`.
    /// The reference is the unit-frame metric (all three frame directions
    /// of weight one).
    pub fn d_function_fd(&self, p: &HeisenbergPoint, q: &HeisenbergPoint, h: f64) -> Result<f64> {
        let shift = |i: usize, s: f64| -> HeisenbergPoint {
            let inc = match i {
                0 => HeisenbergPoint { x: s, y: 0.0, z: 0.0 },
                1 => HeisenbergPoint { x: 0.0, y: s, z: 0.0 },
                _ => HeisenbergPoint { x: 0.0, y: 0.0, z: s },
            };
            p.group_mul(&inc)
        };
        let mut sq = 0.0;
        for i in 0..3 {
            let central = |step: f64| -> Result<f64> {
                let cp = 0.5 * self.cc_distance(&shift(i, step), q)?.powi(2);
                let cm = 0.5 * self.cc_distance(&shift(i, -step), q)?.powi(2);
                Ok((cp - cm) / (2.0 * step))
            };
            let d1 = central(h)?;
            let d2 = central(h / 2.0)?;
            let g = (4.0 * d2 - d1) / 3.0;
            sq += g * g;
        }
        Ok(sq.sqrt())
    }

    /// Jacobian determinant of the time-1 endpoint map at `lambda`, by
    /// central differences.
    fn exp_jacobian_det(&self, lambda: &HeisenbergCovector) -> Result<f64> {
        let h = FD_STEP * (1.0 + lambda.rho() + lambda.pz.abs());
        let mut jac = [[0.0f64; 3]; 3];
        for j in 0..3 {
            let mut plus = *lambda;
            let mut minus = *lambda;
            match j {
                0 => {
                    plus.px += h;
                    minus.px -= h;
                }
                1 => {
                    plus.py += h;
                    minus.py -= h;
                }
                _ => {
                    plus.pz += h;
                    minus.pz -= h;
                }
            }
            let pp = self.exp_map(&plus, 1.0)?;
            let pm = self.exp_map(&minus, 1.0)?;
            jac[0][j] = (pp.x - pm.x) / (2.0 * h);
            jac[1][j] = (pp.y - pm.y) / (2.0 * h);
            jac[2][j] = (pp.z - pm.z) / (2.0 * h);
        }
        Ok(det3(&jac))
    }

    /// The measured distortion coefficient along the geodesic of `lambda`:
    /// `t^3 |det J(t lambda)| / |det J(lambda)|`, where `J` is the
    /// endpoint-map Jacobian. The `t^3` factor is the covector-space
    /// scaling of the geodesic homothety.
    pub fn true_beta_covector(&self, t: f64, lambda: &HeisenbergCovector) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidInput("t must be in [0, 1]".into()));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let num = self.exp_jacobian_det(&lambda.scale(t))?;
        let den = self.exp_jacobian_det(lambda)?;
        Ok(t.powi(3) * num.abs() / den.abs())
    }

    /// The measured distortion coefficient between two points, solving for
    /// the minimal covector first.
    pub fn true_beta(
        &self,
        x: &HeisenbergPoint,
        y: &HeisenbergPoint,
        t: f64,
    ) -> Result<f64> {
        let sol = self.solve_covector_pair(x, y, DEFAULT_SOLVE_TOL)?;
        self.true_beta_covector(t, &sol.covector)
    }
}

/// Closed-form distortion coefficient of the canonical variation, in the
/// cylindrical covector data `(rho, pz)`:
///
/// ```text
/// beta = t^2 h(t pz/2) [eps^2 t h(t pz/2) + rho^2 t^3 k(t pz/2)/4]
///        ---------------------------------------------------------
///        h(pz/2)       [eps^2   h(pz/2)   + rho^2     k(pz/2)/4]
/// ```
///
/// with `h(s) = sin(s)/s` and `k(s) = (sin s - s cos s)/s^3`. Exact 1 at
/// `t = 1`, and 0 at `t = 0`. At `eps = 0` the `rho` dependence cancels;
/// at `pz = 0` the value is `t^3 (eps^2 + rho^2 t^2 / 12)/(eps^2 +
/// rho^2 / 12)`.
pub fn beta_canvar_closed(eps: f64, t: f64, rho: f64, pz: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "t must be in [0, 1]");
    assert!(rho >= 0.0 && eps >= 0.0);
    assert!(eps > 0.0 || rho > 0.0, "eps = 0 requires rho > 0");
    if t == 0.0 {
        return 0.0;
    }
    if t == 1.0 {
        return 1.0;
    }
    let e2 = eps * eps;
    let r2 = rho * rho;
    let ht = sinc(t * pz / 2.0);
    let h1 = sinc(pz / 2.0);
    let ktilde_t = sin_minus_x_cos_over_x3(t * pz / 2.0);
    let ktilde_1 = sin_minus_x_cos_over_x3(pz / 2.0);
    let numerator = t * t * ht * (e2 * t * ht + r2 * t.powi(3) * ktilde_t / 4.0);
    let denominator = h1 * (e2 * h1 + r2 * ktilde_1 / 4.0);
    numerator / denominator
}

/// Solve a 3x3 linear system by Gaussian elimination with partial
/// pivoting; `None` on (numerical) singularity.
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = m[i][3];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

fn det3(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl TableRow {
    fn clone_row(&self) -> TableRow {
        TableRow { pz: self.pz, zeta: self.zeta, r_unit: self.r_unit, alpha: self.alpha }
    }
}
