//! Shared fixtures for the integration suites: reference parameter sets,
//! seeded random model/matrix generators, and an eigenvalue oracle that
//! goes through the characteristic polynomial instead of QR iteration.

#![allow(dead_code)]

use dicke_ep::model::{ep_detuning, Matrix6, ModelParams, Phase};
use dicke_ep::spectral::eigen_spectrum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn exc_params(g: f64) -> ModelParams {
    let delta = ep_detuning(1.0, 0.5).unwrap();
    ModelParams::new(1.0, 1.0, 0.5, delta, g).unwrap()
}

pub fn nonexc_params(g: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, 0.5, 1.0, g).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random validated parameter set with the coupling placed a relative
/// distance `eps` on the requested side of its critical point.
pub fn random_physical(rng: &mut ChaCha8Rng, eps_range: (f64, f64)) -> (ModelParams, Phase) {
    let omega = rng.gen_range(0.5..2.0);
    let kappa = rng.gen_range(0.5..2.0);
    let dk = kappa * rng.gen_range(0.15..0.85);
    let delta = if rng.gen_bool(0.5) {
        ep_detuning(kappa, dk).unwrap()
    } else {
        rng.gen_range(0.5..2.5)
    };
    let base = ModelParams::new(omega, kappa, dk, delta, 0.0).unwrap();
    let g_c = base.critical_coupling();
    let eps = rng.gen_range(eps_range.0..eps_range.1);
    let (sign, eps, phase) = if rng.gen_bool(0.5) {
        // the normal side only exists down to g = 0
        (-1.0, eps.min(0.9), Phase::Normal)
    } else {
        (1.0, eps, Phase::Superradiant)
    };
    (base.with_g(g_c * (1.0 + sign * eps)).unwrap(), phase)
}

/// A random Hurwitz drift matrix paired with a random PSD diffusion
/// matrix; the spectrum is shifted at least 0.3 into the left half plane
/// so every downstream solve is well conditioned.
pub fn random_hurwitz_pair(rng: &mut ChaCha8Rng) -> (Matrix6, Matrix6) {
    let m = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let max_re = -eigen_spectrum(&m).unwrap().adr;
    let a = m - Matrix6::identity() * (max_re + rng.gen_range(0.3..1.0));
    let g = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let d = g.transpose() * g * (rng.gen_range(0.1..2.0) / 6.0);
    (a, d)
}

/// Coefficients of the characteristic polynomial
/// `p(l) = l^6 + c_1 l^5 + ... + c_6` by the Faddeev-LeVerrier
/// recurrence; `coeffs[i]` holds the coefficient of `l^i`.
pub fn char_poly(a: &Matrix6) -> [f64; 7] {
    let mut coeffs = [0.0f64; 7];
    coeffs[6] = 1.0;
    let mut m = *a;
    let mut c = -m.trace();
    coeffs[5] = c;
    for k in 2..=6usize {
        m = a * (m + Matrix6::identity() * c);
        c = -m.trace() / k as f64;
        coeffs[6 - k] = c;
    }
    coeffs
}

/// All six roots of a monic degree-6 polynomial by Durand-Kerner
/// iteration. Independent of any eigensolver.
pub fn poly_roots(coeffs: &[f64; 7]) -> Vec<Complex64> {
    let eval = |z: Complex64| {
        let mut p = Complex64::new(coeffs[6], 0.0);
        for i in (0..6).rev() {
            p = p * z + coeffs[i];
        }
        p
    };
    let radius = 1.0 + coeffs[..6].iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (1..=6).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..1000 {
        let snapshot = roots.clone();
        let mut max_step = 0.0f64;
        for i in 0..6 {
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, other) in snapshot.iter().enumerate() {
                if j != i {
                    denom *= snapshot[i] - other;
                }
            }
            let step = eval(snapshot[i]) / denom;
            roots[i] = snapshot[i] - step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius {
            break;
        }
    }
    roots
}

/// Greedy nearest matching between two six-element spectra; returns the
/// largest pairing distance.
pub fn spectrum_distance(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    assert_eq!(lhs.len(), rhs.len());
    let mut used = vec![false; rhs.len()];
    let mut worst = 0.0f64;
    for l in lhs {
        let mut best = f64::INFINITY;
        let mut best_j = 0;
        for (j, r) in rhs.iter().enumerate() {
            if !used[j] {
                let d = (l - r).norm();
                if d < best {
                    best = d;
                    best_j = j;
                }
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}
