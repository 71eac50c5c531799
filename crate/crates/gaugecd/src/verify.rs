//! Monte Carlo and grid verification suites for the comparison
//! inequalities on the Heisenberg group.
//!
//! Every suite returns a [`VerificationReport`]; inequality checks are
//! recorded as `lhs >= rhs` with deficits, Monte Carlo estimates carry
//! CLT confidence radii, and exponent fits carry standard errors.
//!
//! Determinism: sampling uses one ChaCha8 stream per worker index derived
//! from `(seed, worker)`, samples are assigned to workers in fixed
//! blocks, and reductions run in sample order, so reports are
//! bit-identical for a fixed `(seed, samples, worker_count)` regardless
//! of thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distortion::beta_heisenberg;
use crate::error::{Error, Result};
use crate::heisenberg::{
    beta_canvar_closed, CanonicalVariation, HeisenbergCovector, HeisenbergPoint,
    DEFAULT_SOLVE_TOL,
};
use crate::report::{ConfidenceRadius, FittedExponent, VerificationReport, linear_fit_slope};

/// Radius of the near-axis band excluded from sub-Riemannian solves.
const AXIS_BAND: f64 = 1e-4;

/// Deterministic Monte Carlo sampling configuration.
#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    /// Base seed; each worker stream is derived from it.
    pub seed: u64,
    /// Total number of samples.
    pub samples: usize,
    /// Axis-aligned sampling region, one `(lo, hi)` pair per coordinate.
    pub bounds: [(f64, f64); 3],
    /// Number of RNG streams; affects the sample values but not
    /// determinism.
    pub worker_count: usize,
}

impl MonteCarloConfig {
    /// Volume of the sampling region.
    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// The full deterministic sample sequence: worker `w` draws its block
    /// from stream `w` of the base seed, blocks are concatenated in
    /// worker order.
    pub fn sample_points(&self) -> Result<Vec<HeisenbergPoint>> {
        if self.samples == 0 || self.worker_count == 0 {
            return Err(Error::InvalidInput(
                "samples and worker_count must be positive".into(),
            ));
        }
        let per = self.samples / self.worker_count;
        let extra = self.samples % self.worker_count;
        let mut out = Vec::with_capacity(self.samples);
        for w in 0..self.worker_count {
            let count = per + usize::from(w < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(w as u64);
            for _ in 0..count {
                let mut c = [0.0f64; 3];
                for (i, slot) in c.iter_mut().enumerate() {
                    let (lo, hi) = self.bounds[i];
                    slot.clone_from(&(lo + (hi - lo) * rng.random::<f64>()));
                }
                out.push(HeisenbergPoint { x: c[0], y: c[1], z: c[2] });
            }
        }
        Ok(out)
    }
}

/// The model coefficient used by every comparison on H^1: the degree-1
/// Heisenberg coefficient evaluated at the gauge value.
fn model_beta(t: f64, gauge: f64) -> f64 {
    beta_heisenberg(1, t, gauge)
}

/// The Heisenberg model function divided by its argument,
/// `s(theta)/theta = 2 - 2 cos(theta) - theta sin(theta)`.
fn s_over_theta(theta: f64) -> f64 {
    2.0 - 2.0 * theta.cos() - theta * theta.sin()
}

/// Composite Simpson quadrature on `[a, b]` with `2n` panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Solve targets against the origin in parallel, preserving order.
/// Returns one `Option<(covector, distance)>` per target; `None` marks a
/// solver failure (near-axis targets must be filtered by the caller).
fn solve_all(
    geo: &CanonicalVariation,
    targets: &[HeisenbergPoint],
) -> Vec<Option<(HeisenbergCovector, f64)>> {
    targets
        .par_iter()
        .map(|q| {
            geo.solve_covector(q, DEFAULT_SOLVE_TOL)
                .ok()
                .map(|sol| (sol.covector, (2.0 * sol.hamiltonian).sqrt()))
        })
        .collect()
}

/// Pointwise comparison sweep: for every grid point and every `t`,
/// checks `true_beta >= beta_model(gauge)` and that the quotient
/// `true_beta / beta_model` is non-increasing in `t`, both within `tol`.
///
/// Grid points are targets from the origin; points whose solve fails are
/// excluded and counted.
pub fn comparison_sweep(
    eps: f64,
    points: &[HeisenbergPoint],
    t_grid: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    let geo = CanonicalVariation::new(eps)?;
    let mut report = VerificationReport::new("comparison_sweep", tol);
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("t grid must be strictly increasing".into()));
    }

    let solved = solve_all(&geo, points);
    for (point, sol) in points.iter().zip(&solved) {
        let Some((lam, _d)) = sol else {
            report.excluded += 1;
            continue;
        };
        let gauge = lam.pz.abs();
        let mut prev_ratio: Option<f64> = None;
        for &t in t_grid {
            if !(0.0 < t && t <= 1.0) {
                return Err(Error::InvalidInput("t grid must lie in (0, 1]".into()));
            }
            let true_b = geo.true_beta_covector(t, lam)?;
            let model_b = model_beta(t, gauge);
            let ratio = true_b / model_b;
            report.push_check(
                "beta-comparison",
                vec![
                    ("eps".into(), eps),
                    ("t".into(), t),
                    ("rho".into(), lam.rho()),
                    ("pz".into(), lam.pz),
                    ("beta_true".into(), true_b),
                    ("beta_model".into(), model_b),
                    ("ratio".into(), ratio),
                    ("x".into(), point.x),
                    ("y".into(), point.y),
                    ("z".into(), point.z),
                ],
                true_b,
                model_b,
            );
            if let Some(prev) = prev_ratio {
                report.push_check(
                    "quotient-monotone",
                    vec![("t".into(), t), ("gauge".into(), gauge)],
                    prev,
                    ratio,
                );
            }
            prev_ratio = Some(ratio);
        }
    }
    report.finalize();
    Ok(report)
}

/// Entropy form of the measure-contraction inequality with a Dirac
/// source at the origin and a uniform target measure on `mc.bounds`:
/// checks `E[log true_beta] >= E[log beta_model(gauge)]` at every `t`,
/// with a paired 3-sigma CLT allowance.
///
/// With `use_true_as_model` the model side is replaced by `true_beta`
/// itself: the per-sample difference is then computed from identical
/// floats and the reported deficit is exactly zero (bookkeeping oracle).
pub fn mcp_entropy_check(
    eps: f64,
    t_grid: &[f64],
    mc: &MonteCarloConfig,
    use_true_as_model: bool,
    tol: f64,
) -> Result<VerificationReport> {
    if mc.samples < 2 {
        return Err(Error::InvalidInput(
            "at least 2 samples required for a confidence radius".into(),
        ));
    }
    let geo = CanonicalVariation::new(eps)?;
    let mut report = VerificationReport::new("mcp_entropy_check", tol);
    let targets = mc.sample_points()?;

    let mut kept: Vec<(HeisenbergCovector, f64)> = Vec::new();
    for (q, sol) in targets.iter().zip(solve_all(&geo, &targets)) {
        if eps == 0.0 && q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, _)) => kept.push((lam, lam.pz.abs())),
            None => report.excluded += 1,
        }
    }
    if kept.len() < 2 {
        return Err(Error::NonConvergence("all samples excluded".into()));
    }

    for &t in t_grid {
        let diffs: Vec<f64> = kept
            .par_iter()
            .map(|(lam, gauge)| {
                match geo.true_beta_covector(t, lam).map(f64::ln) {
                    Ok(lt) => {
                        let lm = if use_true_as_model { lt } else { model_beta(t, *gauge).ln() };
                        lt - lm
                    }
                    Err(_) => f64::NAN,
                }
            })
            .collect();
        let valid: Vec<f64> = diffs.iter().copied().filter(|d| d.is_finite()).collect();
        let n = valid.len();
        if n < 2 {
            report.fail(format!("t = {t}: fewer than 2 usable samples"));
            continue;
        }
        let mean = valid.iter().sum::<f64>() / n as f64;
        let var = valid.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma = (var / n as f64).sqrt();
        report.mc_radii.push(ConfidenceRadius {
            name: format!("log-beta-diff t={t}"),
            sigma,
            radius: 3.0 * sigma,
        });
        report.push_check(
            "entropy-deficit",
            vec![("t".into(), t), ("sigma".into(), sigma)],
            mean + 3.0 * sigma,
            0.0,
        );
    }
    report.finalize();
    Ok(report)
}

/// Half Brunn-Minkowski: the volume of the `t`-intermediate set of
/// (origin, A) — computed as the Jacobian integral
/// `vol(A_t) = int_A true_beta` — dominates
/// `inf_{y in A} beta_model(gauge(y)) * vol(A)` up to a 3-sigma MC
/// allowance plus `tol * vol(A)`. The infimum is the sample infimum.
pub fn half_brunn_minkowski_check(
    eps: f64,
    t_grid: &[f64],
    mc: &MonteCarloConfig,
    tol: f64,
) -> Result<VerificationReport> {
    let geo = CanonicalVariation::new(eps)?;
    let mut report = VerificationReport::new("half_brunn_minkowski_check", tol);
    let targets = mc.sample_points()?;
    let vol_a = mc.volume();

    let mut kept: Vec<(HeisenbergCovector, f64)> = Vec::new();
    for (q, sol) in targets.iter().zip(solve_all(&geo, &targets)) {
        if eps == 0.0 && q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, _)) => kept.push((lam, lam.pz.abs())),
            None => report.excluded += 1,
        }
    }
    if kept.len() < 2 {
        return Err(Error::NonConvergence("all samples excluded".into()));
    }

    for &t in t_grid {
        let betas: Vec<(f64, f64)> = kept
            .par_iter()
            .map(|(lam, gauge)| {
                let tb = geo.true_beta_covector(t, lam).unwrap_or(f64::NAN);
                (tb, model_beta(t, *gauge))
            })
            .collect();
        let valid: Vec<&(f64, f64)> = betas.iter().filter(|(tb, _)| tb.is_finite()).collect();
        let n = valid.len();
        if n < 2 {
            report.fail(format!("t = {t}: fewer than 2 usable samples"));
            continue;
        }
        let mean = valid.iter().map(|(tb, _)| tb).sum::<f64>() / n as f64;
        let var = valid.iter().map(|(tb, _)| (tb - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma = (var / n as f64).sqrt() * vol_a;
        let inf_model = valid.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
        report.mc_radii.push(ConfidenceRadius {
            name: format!("midpoint-volume t={t}"),
            sigma,
            radius: 3.0 * sigma,
        });
        report.push_check(
            "half-brunn-minkowski",
            vec![("t".into(), t), ("vol_A".into(), vol_a)],
            mean * vol_a + 3.0 * sigma + tol * vol_a,
            inf_model * vol_a,
        );
    }
    report.finalize();
    Ok(report)
}

/// Bishop-Gromov monotonicity for gauge balls: with
/// `v(r) = vol{y : gauge <= r, d <= rho}`, the normalized quotient
/// `(v(r) - v(r0)) / int_0^r s(u)/u du` must be non-increasing in `r` up
/// to 3-sigma MC noise, with `s` the Heisenberg model function and
/// `r0 = 1e-3` approximating `v(0+)`.
///
/// Degenerate estimates (a gauge ball indistinguishable from `v(0+)`
/// within noise, or empty) are marked inconclusive, not failed.
pub fn bishop_gromov_check(
    rho: f64,
    r_grid: &[f64],
    mc: &MonteCarloConfig,
    tol: f64,
) -> Result<VerificationReport> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput("rho must be > 0".into()));
    }
    if r_grid.iter().any(|&r| !(0.0 < r && r < 2.0 * PI)) {
        return Err(Error::InvalidInput("r grid must lie in (0, 2 pi)".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("r grid must be strictly increasing".into()));
    }
    let geo = CanonicalVariation::new(0.0)?;
    let mut report = VerificationReport::new("bishop_gromov_check", tol);
    let targets = mc.sample_points()?;
    let box_vol = mc.volume();

    // One shared solve pass; every radius is counted from the same
    // sample set.
    let mut gauges_dists: Vec<(f64, f64)> = Vec::new();
    for (q, sol) in targets.iter().zip(solve_all(&geo, &targets)) {
        if q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, d)) => gauges_dists.push((lam.pz.abs(), d)),
            None => report.excluded += 1,
        }
    }
    let n_total = targets.len() as f64;

    let r0 = 1e-3;
    let volume_at = |r: f64| -> (f64, f64) {
        let count = gauges_dists
            .iter()
            .filter(|(g, d)| *g <= r && *d <= rho)
            .count();
        let p = count as f64 / n_total;
        let v = p * box_vol;
        let sigma = box_vol * (p * (1.0 - p) / n_total).sqrt();
        (v, sigma)
    };
    let (v0, v0_sigma) = volume_at(r0);

    let mut normalized: Vec<(f64, f64, f64)> = Vec::new(); // (r, value, sigma)
    for &r in r_grid {
        let (v, v_sigma) = volume_at(r);
        let denom = simpson(s_over_theta, 0.0, r, 200);
        if v - v0 <= 3.0 * (v_sigma + v0_sigma) {
            report.inconclusive = true;
            report.notes.push(format!(
                "r = {r}: gauge-ball volume {v} indistinguishable from v(0+) = {v0} at 3 sigma"
            ));
            continue;
        }
        let value = (v - v0) / denom;
        let sigma = (v_sigma + v0_sigma) / denom;
        report.mc_radii.push(ConfidenceRadius {
            name: format!("normalized-volume r={r}"),
            sigma,
            radius: 3.0 * sigma,
        });
        normalized.push((r, value, sigma));
    }
    for pair in normalized.windows(2) {
        let (r1, val1, s1) = pair[0];
        let (r2, val2, s2) = pair[1];
        report.push_check(
            "bishop-gromov-monotone",
            vec![("r1".into(), r1), ("r2".into(), r2)],
            val1 + 3.0 * (s1 * s1 + s2 * s2).sqrt(),
            val2,
        );
    }
    if normalized.is_empty() {
        report.inconclusive = true;
    }
    report.finalize();
    Ok(report)
}

/// Gauge diameter bound: among admissible MC targets (off the axis
/// band), no solved gauge may reach `2 pi`. Solver failures are counted
/// separately from genuine violations.
pub fn gauge_diameter_check(mc: &MonteCarloConfig, tol: f64) -> Result<VerificationReport> {
    let geo = CanonicalVariation::new(0.0)?;
    let mut report = VerificationReport::new("gauge_diameter_check", tol);
    let targets = mc.sample_points()?;

    let mut failures = 0usize;
    let mut violations = 0usize;
    let mut sup_gauge = 0.0f64;
    let mut admissible = 0usize;
    for (q, sol) in targets.iter().zip(solve_all(&geo, &targets)) {
        if q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, _)) => {
                admissible += 1;
                let g = lam.pz.abs();
                sup_gauge = sup_gauge.max(g);
                if g >= 2.0 * PI {
                    violations += 1;
                }
            }
            None => failures += 1,
        }
    }
    report.push_check(
        "gauge-diameter",
        vec![("admissible".into(), admissible as f64)],
        2.0 * PI,
        sup_gauge,
    );
    report.notes.push(format!(
        "admissible: {admissible}, solver failures: {failures}, violations: {violations}"
    ));
    if violations > 0 {
        report.fail(format!("{violations} samples with gauge >= 2 pi"));
    }
    if failures > 0 {
        report.fail(format!("{failures} solver failures"));
    }
    report.finalize();
    Ok(report)
}

/// Geodesic-dimension fit: least-squares slope of `log vol(A_t)` against
/// `log t` over a small-`t` grid, with `vol(A_t)` the Jacobian integral
/// of `true_beta` over a deterministic tensor grid in `bounds`. The fit
/// is recorded with band `0.1` around `expected_slope`.
pub fn geodesic_dimension_fit(
    eps: f64,
    bounds: [(f64, f64); 3],
    t_grid_small: &[f64],
    expected_slope: f64,
) -> Result<VerificationReport> {
    if t_grid_small.iter().any(|&t| !(0.0 < t && t <= 0.2)) {
        return Err(Error::InvalidInput("t grid must lie in (0, 0.2]".into()));
    }
    let geo = CanonicalVariation::new(eps)?;
    let mut report = VerificationReport::new("geodesic_dimension_fit", 0.0);

    // Deterministic 6x6x6 midpoint tensor grid over the box.
    let n = 6usize;
    let mut targets = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let frac = |idx: usize| (idx as f64 + 0.5) / n as f64;
                targets.push(HeisenbergPoint {
                    x: bounds[0].0 + (bounds[0].1 - bounds[0].0) * frac(i),
                    y: bounds[1].0 + (bounds[1].1 - bounds[1].0) * frac(j),
                    z: bounds[2].0 + (bounds[2].1 - bounds[2].0) * frac(k),
                });
            }
        }
    }

    let mut lams: Vec<HeisenbergCovector> = Vec::new();
    for (q, sol) in targets.iter().zip(solve_all(&geo, &targets)) {
        if eps == 0.0 && q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, _)) => lams.push(lam),
            None => report.excluded += 1,
        }
    }
    if lams.len() < targets.len() / 2 {
        return Err(Error::NonConvergence("too many solver failures in the box".into()));
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in t_grid_small {
        let mean: f64 = lams
            .par_iter()
            .map(|lam| geo.true_beta_covector(t, lam).unwrap_or(f64::NAN))
            .filter(|b| b.is_finite())
            .sum::<f64>()
            / lams.len() as f64;
        xs.push(t.ln());
        ys.push(mean.ln());
    }
    let (slope, se) = linear_fit_slope(&xs, &ys);
    report.fits.push(FittedExponent {
        name: "geodesic-dimension".into(),
        value: slope,
        std_error: se,
        expected: expected_slope,
        band: 0.1,
    });
    report.finalize();
    Ok(report)
}

/// Gauge limits along the canonical variation:
/// (a) `sup |G_eps - G_0|` over sampled targets is decreasing along
/// `eps_down` and small at its last entry; (b) `sup |G_eps|` is
/// decreasing along `eps_up` toward zero; (c) the closed-form
/// coefficients satisfy `beta^eps >= beta^0` on a `(t, rho, pz, eps)`
/// grid.
pub fn canvar_limits_check(
    eps_down: &[f64],
    eps_up: &[f64],
    mc: &MonteCarloConfig,
    tol: f64,
) -> Result<VerificationReport> {
    if eps_down.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("eps_down must be strictly decreasing".into()));
    }
    if eps_up.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("eps_up must be strictly increasing".into()));
    }
    let mut report = VerificationReport::new("canvar_limits_check", tol);
    let sr = CanonicalVariation::new(0.0)?;
    let targets = mc.sample_points()?;

    let mut kept: Vec<(HeisenbergPoint, f64)> = Vec::new(); // (target, G_0)
    for (q, sol) in targets.iter().zip(solve_all(&sr, &targets)) {
        if q.horizontal_radius() < AXIS_BAND {
            report.excluded += 1;
            continue;
        }
        match sol {
            Some((lam, _)) => kept.push((*q, lam.pz.abs())),
            None => report.excluded += 1,
        }
    }
    if kept.is_empty() {
        return Err(Error::NonConvergence("all samples excluded".into()));
    }

    let sup_gauge_gap = |eps: f64, against_g0: bool| -> Result<f64> {
        let geo = CanonicalVariation::new(eps)?;
        let gaps: Vec<f64> = kept
            .par_iter()
            .map(|(q, g0)| match geo.solve_covector(q, DEFAULT_SOLVE_TOL) {
                Ok(sol) => {
                    let g = sol.covector.pz.abs();
                    if against_g0 { (g - g0).abs() } else { g }
                }
                Err(_) => f64::NAN,
            })
            .collect();
        let sup = gaps.iter().copied().filter(|g| g.is_finite()).fold(0.0, f64::max);
        Ok(sup)
    };

    // (a) sub-Riemannian limit.
    let sups_down: Vec<f64> = eps_down
        .iter()
        .map(|&e| sup_gauge_gap(e, true))
        .collect::<Result<_>>()?;
    for (pair_e, pair_s) in eps_down.windows(2).zip(sups_down.windows(2)) {
        report.push_check(
            "gauge-gap-decreasing",
            vec![("eps1".into(), pair_e[0]), ("eps2".into(), pair_e[1])],
            pair_s[0],
            pair_s[1],
        );
    }
    report.push_check(
        "gauge-gap-small",
        vec![("eps".into(), *eps_down.last().unwrap())],
        0.05,
        *sups_down.last().unwrap(),
    );

    // (b) adiabatic limit.
    let sups_up: Vec<f64> = eps_up
        .iter()
        .map(|&e| sup_gauge_gap(e, false))
        .collect::<Result<_>>()?;
    for (pair_e, pair_s) in eps_up.windows(2).zip(sups_up.windows(2)) {
        report.push_check(
            "gauge-sup-decreasing",
            vec![("eps1".into(), pair_e[0]), ("eps2".into(), pair_e[1])],
            pair_s[0],
            pair_s[1],
        );
    }
    report.push_check(
        "gauge-sup-small",
        vec![("eps".into(), *eps_up.last().unwrap())],
        0.1,
        *sups_up.last().unwrap(),
    );

    // (c) closed-form monotonicity in eps.
    let all_eps: Vec<f64> = eps_down.iter().chain(eps_up.iter()).copied().collect();
    for &eps in &all_eps {
        for i in 1..10 {
            let t = i as f64 / 10.0;
            for rho in [0.5, 1.0, 2.0] {
                for pz in [0.5, 2.0, 5.0] {
                    report.push_check(
                        "beta-eps-monotone",
                        vec![
                            ("eps".into(), eps),
                            ("t".into(), t),
                            ("rho".into(), rho),
                            ("pz".into(), pz),
                        ],
                        beta_canvar_closed(eps, t, rho, pz),
                        beta_canvar_closed(0.0, t, rho, pz),
                    );
                }
            }
        }
    }
    report.finalize();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_box() -> [(f64, f64); 3] {
        [(1.0, 2.0), (0.5, 1.5), (-0.5, 0.5)]
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let mc = MonteCarloConfig {
            seed: 42,
            samples: 20_000,
            bounds: [(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
            worker_count: 4,
        };
        let a = mc.sample_points().unwrap();
        let b = mc.sample_points().unwrap();
        assert_eq!(a.len(), 20_000);
        assert!(a
            .iter()
            .zip(&b)
            .all(|(p, q)| p.x == q.x && p.y == q.y && p.z == q.z));
        // Euclidean unit-ball volume estimate within 3 sigma.
        let inside = a
            .iter()
            .filter(|p| p.x * p.x + p.y * p.y + p.z * p.z <= 1.0)
            .count() as f64;
        let p_hat = inside / 20_000.0;
        let est = p_hat * 8.0;
        let sigma = 8.0 * (p_hat * (1.0 - p_hat) / 20_000.0).sqrt();
        let exact = 4.0 * PI / 3.0;
        assert!(
            (est - exact).abs() <= 3.0 * sigma,
            "est {est}, exact {exact}, sigma {sigma}"
        );
    }

    #[test]
    fn comparison_sweep_sharp_at_eps_zero() {
        let points: Vec<HeisenbergPoint> = (0..5)
            .map(|i| HeisenbergPoint {
                x: 0.8 + 0.1 * i as f64,
                y: 0.3,
                z: 0.2 + 0.1 * i as f64,
            })
            .collect();
        let t_grid = [0.25, 0.5, 0.75, 1.0];
        let report = comparison_sweep(0.0, &points, &t_grid, 1e-3).unwrap();
        assert!(report.pass, "violations: {}", report.violations);
        // Sharpness: every ratio within 1e-3 of 1.
        for c in report.checks.iter().filter(|c| c.label == "beta-comparison") {
            assert!(
                (c.lhs / c.rhs - 1.0).abs() <= 1e-3,
                "ratio {} at {:?}",
                c.lhs / c.rhs,
                c.inputs
            );
        }
    }

    #[test]
    fn comparison_sweep_positive_eps() {
        let points: Vec<HeisenbergPoint> = (0..4)
            .map(|i| HeisenbergPoint {
                x: 0.6 + 0.2 * i as f64,
                y: -0.4,
                z: 0.3,
            })
            .collect();
        let t_grid = [0.2, 0.5, 0.8, 1.0];
        let report = comparison_sweep(1.0, &points, &t_grid, 1e-3).unwrap();
        assert!(report.pass, "min deficit {}", report.min_deficit);
    }

    #[test]
    fn mcp_entropy_exact_zero_mode() {
        let mc = MonteCarloConfig {
            seed: 7,
            samples: 200,
            bounds: small_box(),
            worker_count: 2,
        };
        let report = mcp_entropy_check(0.0, &[0.3, 0.7], &mc, true, 1e-12).unwrap();
        assert!(report.pass);
        for c in &report.checks {
            assert_eq!(c.deficit, 0.0, "bookkeeping must be exact");
        }
        // Ordinary mode holds with MC margin.
        let report = mcp_entropy_check(0.0, &[0.3, 0.7], &mc, false, 1e-3).unwrap();
        assert!(report.pass, "min deficit {}", report.min_deficit);
    }

    #[test]
    fn hbm_holds_on_small_box() {
        let mc = MonteCarloConfig {
            seed: 11,
            samples: 300,
            bounds: small_box(),
            worker_count: 1,
        };
        let report = half_brunn_minkowski_check(0.0, &[0.5, 1.0], &mc, 1e-3).unwrap();
        assert!(report.pass, "min deficit {}", report.min_deficit);
        // t = 1: both sides equal vol(A) up to the allowance.
        let c = report
            .checks
            .iter()
            .find(|c| c.inputs.iter().any(|(k, v)| k == "t" && *v == 1.0))
            .unwrap();
        assert_relative_eq!(c.rhs, mc.volume(), max_relative = 1e-9);
    }

    #[test]
    fn gauge_diameter_small_run() {
        let mc = MonteCarloConfig {
            seed: 3,
            samples: 500,
            bounds: [(-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0)],
            worker_count: 2,
        };
        let report = gauge_diameter_check(&mc, 0.0).unwrap();
        assert!(report.pass, "notes: {:?}", report.notes);
        assert!(report.checks[0].rhs < 2.0 * PI);
    }

    #[test]
    fn geodim_fit_small() {
        let t_grid = [0.05, 0.08, 0.12, 0.2];
        let report =
            geodesic_dimension_fit(0.0, small_box(), &t_grid, 5.0).unwrap();
        assert!(report.pass, "fit: {:?}", report.fits);
        let report = geodesic_dimension_fit(1.0, small_box(), &t_grid, 3.0).unwrap();
        assert!(report.pass, "fit: {:?}", report.fits);
    }

    #[test]
    fn canvar_limits_small_run() {
        let mc = MonteCarloConfig {
            seed: 19,
            samples: 40,
            bounds: small_box(),
            worker_count: 1,
        };
        let report =
            canvar_limits_check(&[1.0, 0.3, 0.1, 0.03], &[1.0, 3.0, 10.0, 30.0], &mc, 1e-9)
                .unwrap();
        assert!(report.pass, "min deficit {}, notes {:?}", report.min_deficit, report.notes);
    }

    #[test]
    fn bishop_gromov_tiny_run() {
        // Small sample count: the point here is plumbing, monotonicity at
        // scale is the acceptance suite's job.
        let mc = MonteCarloConfig {
            seed: 5,
            samples: 4_000,
            bounds: [(-3.0, 3.0), (-3.0, 3.0), (-0.8, 0.8)],
            worker_count: 2,
        };
        let report = bishop_gromov_check(3.0, &[PI / 2.0, PI, 3.0 * PI / 2.0], &mc, 0.0).unwrap();
        assert!(
            report.pass || report.inconclusive,
            "min deficit {}, notes {:?}",
            report.min_deficit,
            report.notes
        );
    }
}
