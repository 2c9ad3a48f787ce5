//! Steady-state second moments: the Lyapunov covariance, its
//! integral-form cross-check, the physical observables read off the
//! covariance, and the symmetrized noise spectrum.
//!
//! The covariance `V` of the stable linear Langevin system
//! `dv/dt = A v + xi`, `<xi xi^T> = D delta(t - t')`, solves
//! `A V + V A^T + D = 0` and equivalently equals the integral
//! `int_0^inf exp(A u) D exp(A^T u) du`. Both routes are implemented
//! independently so that one can serve as an oracle for the other.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Matrix6, DIM};
use crate::spectral::eigen_spectrum;

/// Hurwitz gate: `max Re lambda` must lie below `-STABILITY_TOL` for a
/// steady-state solve to be accepted.
pub const STABILITY_TOL: f64 = 1e-12;

/// Complex 6x6 matrix (resolvents, noise spectra).
pub type CMatrix6 = nalgebra::Matrix6<Complex64>;

/// Symmetrized steady-state covariance over `(dx1, dp1, dx2, dp2, xb, pb)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    v: Matrix6,
}

impl CovarianceMatrix {
    /// Wraps a matrix as a covariance, symmetrizing it first.
    pub fn from_matrix(v: Matrix6) -> Self {
        Self {
            v: 0.5 * (v + v.transpose()),
        }
    }

    pub fn matrix(&self) -> &Matrix6 {
        &self.v
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.v[(i, j)]
    }
}

/// Frobenius norm of `A V + V A^T + D`; the defect of a candidate
/// steady-state covariance.
pub fn lyapunov_residual(a: &Matrix6, d: &Matrix6, v: &CovarianceMatrix) -> f64 {
    (a * v.matrix() + v.matrix() * a.transpose() + d).norm()
}

fn hurwitz_gate(a: &Matrix6) -> Result<f64> {
    let spectrum = eigen_spectrum(a)?;
    let max_re = -spectrum.adr;
    if max_re >= -STABILITY_TOL {
        return Err(Error::NotHurwitz { max_re });
    }
    Ok(spectrum.adr)
}

/// Solves `A V + V A^T + D = 0` for the steady-state covariance.
///
/// The equation is vectorized through the Kronecker identity into a
/// dense 36x36 system, LU-factored, and polished by iterative
/// refinement; the result is symmetrized. Rejects non-Hurwitz `A` with
/// [`Error::NotHurwitz`] carrying the offending `max Re lambda`.
///
/// ```
/// use dicke_ep::model::Matrix6;
/// use dicke_ep::steady::solve_lyapunov;
///
/// let a = -Matrix6::identity();
/// let d = 2.0 * Matrix6::identity();
/// let v = solve_lyapunov(&a, &d).unwrap();
/// assert!((v.matrix() - Matrix6::identity()).norm() < 1e-12);
/// ```
pub fn solve_lyapunov(a: &Matrix6, d: &Matrix6) -> Result<CovarianceMatrix> {
    hurwitz_gate(a)?;

    // M vec(V) = -vec(D) with M = I (x) A + A (x) I (column-major vec).
    let n = DIM;
    let mut m = DMatrix::<f64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // I (x) A: block (j, j) is A
                m[(j * n + i, j * n + k)] += a[(i, k)];
                // A (x) I: entry couples column blocks
                m[(j * n + i, k * n + i)] += a[(j, k)];
            }
        }
    }
    let mut b = DVector::<f64>::zeros(n * n);
    for j in 0..n {
        for i in 0..n {
            b[j * n + i] = -d[(i, j)];
        }
    }

    let lu = m.clone().lu();
    let mut x = lu.solve(&b).ok_or(Error::NumericalFailure)?;
    // Refinement drives the residual down to the rounding floor of the
    // stored solution; keep the best iterate seen.
    let mut best_res = (&b - &m * &x).norm();
    for _ in 0..4 {
        if best_res <= 1e-13 * b.norm().max(1e-300) {
            break;
        }
        let r = &b - &m * &x;
        let Some(dx) = lu.solve(&r) else { break };
        let candidate = &x + &dx;
        let res = (&b - &m * &candidate).norm();
        if res >= best_res {
            break;
        }
        x = candidate;
        best_res = res;
    }

    let mut v = Matrix6::zeros();
    for j in 0..n {
        for i in 0..n {
            v[(i, j)] = x[j * n + i];
        }
    }
    Ok(CovarianceMatrix::from_matrix(v))
}

/// Covariance from the truncated integral `int_0^H exp(Au) D exp(A^T u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralCovariance {
    pub cov: CovarianceMatrix,
    /// Estimated norm of the discarded tail, `exp(-2 adr H) * ||V||`.
    pub tail_estimate: f64,
    /// Set when the tail estimate is large enough to matter; the
    /// quadrature result should not be trusted as an oracle then.
    pub truncated: bool,
}

/// Quadrature evaluation of the formal integral solution.
///
/// Composite Simpson over `steps` panels (rounded up to even) with the
/// propagator advanced one step at a time from a single
/// scaling-and-squaring matrix exponential. Independent of
/// [`solve_lyapunov`] by construction, which is the point: the two must
/// agree for any Hurwitz `a` once `horizon >= 10 / adr` and the step
/// resolves the fastest oscillation.
pub fn covariance_integral_oracle(
    a: &Matrix6,
    d: &Matrix6,
    horizon: f64,
    steps: usize,
) -> Result<IntegralCovariance> {
    let adr = hurwitz_gate(a)?;
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::Domain(format!("horizon = {horizon} must be >= 0")));
    }
    if horizon == 0.0 || steps == 0 {
        let d_norm = d.norm();
        return Ok(IntegralCovariance {
            cov: CovarianceMatrix::from_matrix(Matrix6::zeros()),
            tail_estimate: d_norm / (2.0 * adr),
            truncated: true,
        });
    }

    let steps = steps + steps % 2;
    let h = horizon / steps as f64;
    let propagator = (a * h).exp();

    // f(u) = exp(Au) D exp(A^T u), accumulated with Simpson weights
    // 1, 4, 2, 4, ..., 4, 1.
    let mut acc: Matrix6 = *d;
    let mut exp_au = Matrix6::identity();
    for i in 1..=steps {
        exp_au = propagator * exp_au;
        let f = exp_au * d * exp_au.transpose();
        let w = if i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f;
    }
    let v = CovarianceMatrix::from_matrix(acc * (h / 3.0));

    let v_norm = v.matrix().norm();
    let tail_estimate = (-2.0 * adr * horizon).exp() * v_norm.max(d.norm() / (2.0 * adr));
    let truncated = tail_estimate > 1e-8 * v_norm.max(1.0);
    Ok(IntegralCovariance {
        cov: v,
        tail_estimate,
        truncated,
    })
}

/// Excess quadrature variance over vacuum for the three bosonic modes,
/// `dn_j = (<dx_j^2> + <dp_j^2> - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberFluctuations {
    pub dn1: f64,
    pub dn2: f64,
    pub dnb: f64,
}

pub fn number_fluctuations(v: &CovarianceMatrix) -> NumberFluctuations {
    let m = v.matrix();
    NumberFluctuations {
        dn1: 0.5 * (m[(0, 0)] + m[(1, 1)] - 1.0),
        dn2: 0.5 * (m[(2, 2)] + m[(3, 3)] - 1.0),
        dnb: 0.5 * (m[(4, 4)] + m[(5, 5)] - 1.0),
    }
}

/// Purity of the Gaussian state, `mu = 1 / (2^3 sqrt(det V))` for three
/// modes under the vacuum-variance-1/2 convention (vacuum gives 1).
pub fn purity(v: &CovarianceMatrix) -> Result<f64> {
    let det = v.matrix().determinant();
    if det <= 0.0 {
        return Err(Error::Domain(format!(
            "purity needs det V > 0, got {det:e}"
        )));
    }
    Ok(1.0 / (8.0 * det.sqrt()))
}

/// The nine per-mode second moments tracked for exponent fits: both
/// variances and the symmetrized cross moment of each mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub xx1: f64,
    pub pp1: f64,
    pub xp1: f64,
    pub xx2: f64,
    pub pp2: f64,
    pub xp2: f64,
    pub xxb: f64,
    pub ppb: f64,
    pub xpb: f64,
}

/// Column labels for [`QuadratureMoments`], in field order.
pub const QUADRATURE_LABELS: [&str; 9] = [
    "xx1", "pp1", "xp1", "xx2", "pp2", "xp2", "xxb", "ppb", "xpb",
];

impl QuadratureMoments {
    pub fn values(&self) -> [f64; 9] {
        [
            self.xx1, self.pp1, self.xp1, self.xx2, self.pp2, self.xp2, self.xxb, self.ppb,
            self.xpb,
        ]
    }

    pub fn labeled(&self) -> [(&'static str, f64); 9] {
        let vals = self.values();
        let mut out = [("", 0.0); 9];
        for (slot, (label, value)) in out.iter_mut().zip(QUADRATURE_LABELS.iter().zip(vals)) {
            *slot = (label, value);
        }
        out
    }
}

pub fn quadrature_moments(v: &CovarianceMatrix) -> QuadratureMoments {
    let m = v.matrix();
    QuadratureMoments {
        xx1: m[(0, 0)],
        pp1: m[(1, 1)],
        xp1: m[(0, 1)],
        xx2: m[(2, 2)],
        pp2: m[(3, 3)],
        xp2: m[(2, 3)],
        xxb: m[(4, 4)],
        ppb: m[(5, 5)],
        xpb: m[(4, 5)],
    }
}

/// Symmetrized noise spectrum on a frequency grid: one Hermitian PSD
/// matrix `S(w) = R(w) D R(w)^dagger`, `R(w) = (iwI - A)^{-1}`, per
/// grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub omegas: Vec<f64>,
    pub matrices: Vec<CMatrix6>,
}

/// Evaluates the noise spectrum at each frequency in `omegas`.
///
/// Works at a singular `A` (criticality) as long as no grid frequency
/// coincides with an undamped eigenfrequency; each resolvent is solved
/// with a full-pivot LU, and a rank-deficient solve reports the
/// offending frequency via [`Error::SingularResolvent`].
pub fn noise_spectrum(a: &Matrix6, d: &Matrix6, omegas: &[f64]) -> Result<NoiseSpectrum> {
    let a_c = a.map(|x| Complex64::new(x, 0.0));
    let d_c = d.map(|x| Complex64::new(x, 0.0));
    let mut matrices = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let m = CMatrix6::identity() * Complex64::new(0.0, omega) - a_c;
        let lu = m.full_piv_lu();
        // Rank gate on the pivot magnitudes; the exact-zero check built
        // into the factorization misses resolvents that are singular
        // only up to rounding.
        let u = lu.u();
        let pivots: Vec<f64> = (0..DIM).map(|i| u[(i, i)].norm()).collect();
        let pmax = pivots.iter().fold(0.0f64, |acc, &p| acc.max(p));
        let pmin = pivots.iter().fold(f64::INFINITY, |acc, &p| acc.min(p));
        if !pmin.is_finite() || pmin <= 1e-12 * pmax {
            return Err(Error::SingularResolvent { omega });
        }
        let resolvent = lu
            .solve(&CMatrix6::identity())
            .ok_or(Error::SingularResolvent { omega })?;
        let s = resolvent * d_c * resolvent.adjoint();
        matrices.push((s + s.adjoint()) * Complex64::new(0.5, 0.0));
    }
    Ok(NoiseSpectrum {
        omegas: omegas.to_vec(),
        matrices,
    })
}
