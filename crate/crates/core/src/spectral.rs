//! Spectrum of the drift matrix: exact eigenvalues, the asymptotic decay
//! rate, the closed-form slow-mode approximation valid near the EP-tuned
//! critical point, and the Jordan-defect diagnostic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Matrix6, ModelParams};

/// Default relative threshold on singular values for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Eigenvalues of a drift matrix, slowest (largest real part) first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumResult {
    /// Sorted by descending real part, ties broken by descending
    /// imaginary part; complex values come in conjugate pairs.
    pub eigenvalues: [Complex64; 6],
    /// Asymptotic decay rate, `-max Re lambda`.
    pub adr: f64,
}

/// Eigenvalues of `a`, deterministically ordered.
pub fn eigen_spectrum(a: &Matrix6) -> Result<SpectrumResult> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure);
    }
    let raw = a.complex_eigenvalues();
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure);
    }
    let mut eigenvalues = [Complex64::ZERO; 6];
    for (slot, z) in eigenvalues.iter_mut().zip(raw.iter()) {
        *slot = Complex64::new(z.re, z.im);
    }
    eigenvalues.sort_by(|p, q| q.re.total_cmp(&p.re).then_with(|| q.im.total_cmp(&p.im)));
    let adr = -eigenvalues[0].re;
    Ok(SpectrumResult { eigenvalues, adr })
}

/// Asymptotic decay rate `-max Re lambda`; vanishes at a phase boundary.
pub fn asymptotic_decay_rate(spectrum: &SpectrumResult) -> f64 {
    spectrum.adr
}

/// Coefficients of the reduced characteristic equation
/// `a (kappa + lambda) + b lambda^2 = 0` governing the two slow modes
/// near the EP-tuned critical point. `a` is exactly linear in
/// `g_c - g`; `b` does not depend on `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowModeCoefficients {
    pub a: f64,
    pub b: f64,
}

pub fn slow_mode_coefficients(params: &ModelParams) -> SlowModeCoefficients {
    let k2 = params.kappa() * params.kappa();
    let dk2 = params.delta_kappa() * params.delta_kappa();
    let omega = params.omega();
    let g_c = params.critical_coupling();
    // kept as written, sqrt(kappa^2 (kappa^2 - dk^2)), not kappa sqrt(...)
    let root = (k2 * (k2 - dk2)).sqrt();
    let a = 32.0
        * g_c
        * omega
        * params.delta_kappa()
        * (k2 - dk2 + 2.0 * root).sqrt()
        * (g_c - params.g());
    let b = 4.0 * ((2.0 * k2 + omega * omega) * (k2 - dk2 + root) + k2 * omega * omega);
    SlowModeCoefficients { a, b }
}

/// Closed-form approximation to the two slowest eigenvalues,
/// `lambda = (-a +- 2i sqrt(kappa b) sqrt(a)) / (2b)`, derived for the
/// EP-tuned detuning on the normal side. The caller is responsible for
/// the tuning; `g > g_c` flips the sign of the `a` coefficient and is
/// rejected.
pub fn slow_mode_approx(params: &ModelParams) -> Result<[Complex64; 2]> {
    let coeffs = slow_mode_coefficients(params);
    if coeffs.a < 0.0 {
        return Err(Error::Domain(format!(
            "slow-mode expansion needs g <= g_c (coefficient a = {:e} < 0)",
            coeffs.a
        )));
    }
    let re = -coeffs.a / (2.0 * coeffs.b);
    let im = (params.kappa() * coeffs.b).sqrt() * coeffs.a.sqrt() / coeffs.b;
    Ok([Complex64::new(re, im), Complex64::new(re, -im)])
}

/// Defect diagnostic of a drift matrix: counts slow eigenvalues against
/// the dimension of the numerical kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefectReport {
    /// Eigenvalues with `|lambda| < slow_tol`.
    pub n_slow: usize,
    /// Singular values above `rank_tol * sigma_max`.
    pub numerical_rank: usize,
    /// `6 - numerical_rank`.
    pub geometric_multiplicity: usize,
    /// True when the slow cluster outnumbers the kernel, i.e. the matrix
    /// carries a nontrivial Jordan block at (numerical) zero.
    pub defective: bool,
}

/// Classifies the near-zero structure of `a`.
///
/// `slow_tol` is an absolute bound on `|lambda|`; `rank_tol` is relative
/// to the largest singular value. See [`default_slow_tol`] for the
/// spectral-scale default.
pub fn ep_defect(a: &Matrix6, slow_tol: f64, rank_tol: f64) -> Result<DefectReport> {
    if slow_tol.is_nan() || slow_tol <= 0.0 || rank_tol.is_nan() || rank_tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerances must be positive, got slow_tol = {slow_tol}, rank_tol = {rank_tol}"
        )));
    }
    let spectrum = eigen_spectrum(a)?;
    let n_slow = spectrum
        .eigenvalues
        .iter()
        .filter(|z| z.norm() < slow_tol)
        .count();
    let svals = a.singular_values();
    let sigma_max = svals.max();
    let numerical_rank = svals.iter().filter(|&&s| s > rank_tol * sigma_max).count();
    let geometric_multiplicity = 6 - numerical_rank;
    Ok(DefectReport {
        n_slow,
        numerical_rank,
        geometric_multiplicity,
        defective: n_slow > geometric_multiplicity,
    })
}

/// Slow-mode threshold at `1e-6` of the spectral scale `max |lambda|`.
pub fn default_slow_tol(spectrum: &SpectrumResult) -> f64 {
    let scale = spectrum
        .eigenvalues
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    1e-6 * scale.max(f64::MIN_POSITIVE)
}

/// [`ep_defect`] with the default tolerances derived from `a` itself.
pub fn ep_defect_auto(a: &Matrix6) -> Result<DefectReport> {
    let spectrum = eigen_spectrum(a)?;
    ep_defect(a, default_slow_tol(&spectrum), DEFAULT_RANK_TOL)
}
