//! Cross-check of the numerically integrated Heisenberg exponential map
//! against an independently coded closed-form solution of the geodesic
//! equations.
//!
//! With initial covector `(phi, rho, pz)` the horizontal projection of a
//! geodesic of the canonical-variation Hamiltonian is a circular arc and
//! the vertical coordinate integrates the swept area plus the drift of
//! the vertical momentum:
//!
//! ```text
//! x + i y = rho e^{i phi} (e^{i pz t} - 1) / (i pz)
//! z       = rho^2 (pz t - sin(pz t)) / (2 pz^2) + eps^2 pz t
//! ```
//!
//! (straight line and `z = eps^2 pz t` when `pz = 0`).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaugecd::heisenberg::{CanonicalVariation, HeisenbergCovector, HeisenbergPoint};

fn closed_form_exp(eps: f64, lam: &HeisenbergCovector, t: f64) -> HeisenbergPoint {
    let rho = lam.rho();
    let phi = lam.phi();
    let pz = lam.pz;
    if pz.abs() < 1e-12 {
        return HeisenbergPoint {
            x: rho * phi.cos() * t,
            y: rho * phi.sin() * t,
            z: eps * eps * pz * t,
        };
    }
    let w = rho * Complex64::new(0.0, phi).exp() * (Complex64::new(0.0, pz * t).exp() - 1.0)
        / Complex64::new(0.0, pz);
    HeisenbergPoint {
        x: w.re,
        y: w.im,
        z: rho * rho * (pz * t - (pz * t).sin()) / (2.0 * pz * pz) + eps * eps * pz * t,
    }
}

fn dist(a: &HeisenbergPoint, b: &HeisenbergPoint) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt()
}

#[test]
fn exp_map_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for eps in [0.0, 0.5, 1.0] {
        let geo = CanonicalVariation::new(eps).unwrap();
        for _ in 0..200 {
            let lam = HeisenbergCovector::from_cylindrical(
                rng.random::<f64>() * 2.0 * PI,
                rng.random::<f64>() * 3.0,
                (rng.random::<f64>() * 2.0 - 1.0) * 8.0,
            );
            let t = rng.random::<f64>() * 1.5;
            let got = geo.exp_map(&lam, t).unwrap();
            let want = closed_form_exp(eps, &lam, t);
            assert!(
                dist(&got, &want) < 1e-8,
                "eps={eps}, lam=({}, {}, {}), t={t}: got {got:?}, want {want:?}",
                lam.px,
                lam.py,
                lam.pz
            );
        }
    }
}

#[test]
fn exp_map_special_values() {
    let geo = CanonicalVariation::new(0.0).unwrap();
    // Unit horizontal covector travels straight to (1, 0, 0).
    let p = geo
        .exp_map(&HeisenbergCovector { px: 1.0, py: 0.0, pz: 0.0 }, 1.0)
        .unwrap();
    assert!(dist(&p, &HeisenbergPoint { x: 1.0, y: 0.0, z: 0.0 }) < 1e-10);
    // pz = 2 pi closes the horizontal circle: endpoint on the vertical
    // axis at z = rho^2 / (4 pi).
    let lam = HeisenbergCovector::from_cylindrical(0.7, 1.3, 2.0 * PI);
    let q = geo.exp_map(&lam, 1.0).unwrap();
    let want = HeisenbergPoint { x: 0.0, y: 0.0, z: 1.3f64.powi(2) / (4.0 * PI) };
    assert!(dist(&q, &want) < 1e-9, "got {q:?}, want {want:?}");
}

#[test]
fn closed_form_roundtrip_through_solver() {
    // Solve back to the covector from closed-form endpoints (rather than
    // endpoints produced by the same integrator the solver uses).
    let geo = CanonicalVariation::new(0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let lam = HeisenbergCovector::from_cylindrical(
            rng.random::<f64>() * 2.0 * PI,
            0.2 + rng.random::<f64>() * 2.0,
            (rng.random::<f64>() * 2.0 - 1.0) * (2.0 * PI - 0.2),
        );
        let target = closed_form_exp(0.0, &lam, 1.0);
        let sol = geo.solve_covector(&target, 1e-12).unwrap();
        let err = ((sol.covector.px - lam.px).powi(2)
            + (sol.covector.py - lam.py).powi(2)
            + (sol.covector.pz - lam.pz).powi(2))
        .sqrt();
        assert!(err < 1e-8, "covector error {err:.3e}");
    }
}
