//! Physical parameters, mean-field steady states and the linearized
//! drift/diffusion matrices of the two-cavity Dicke model.
//!
//! Two cavity modes with asymmetric single-photon loss rates
//! `kappa -+ delta_kappa` couple to a collective spin of frequency
//! `omega` with strength `g`. Everything here works in intensive
//! (N-free) variables: condensates are stored as `alpha / sqrt(N)` and
//! spin components as `S / N`, so the thermodynamic limit is explicit
//! and no particle number ever appears.
//!
//! The fluctuation problem lives on the six quadratures
//! `(dx1, dp1, dx2, dp2, xb, pb)`: two cavity fluctuation pairs and the
//! magnon pair from the Holstein-Primakoff expansion about the rotated
//! mean-field spin.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Phase-space dimension of the fluctuation problem.
pub const DIM: usize = 6;

/// 6x6 real matrix over the quadrature ordering `(dx1, dp1, dx2, dp2, xb, pb)`.
pub type Matrix6 = nalgebra::Matrix6<f64>;

/// Validated physical parameters of the model, all in the same energy
/// units (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    kappa: f64,
    delta_kappa: f64,
    delta: f64,
    g: f64,
}

impl ModelParams {
    /// Validates the five raw parameters and returns them as `ModelParams`.
    ///
    /// Requirements: `omega > 0`, `0 < delta_kappa < kappa` (both loss
    /// rates `kappa -+ delta_kappa` stay positive and the critical
    /// coupling stays finite), `delta > 0`, `g >= 0`, all finite.
    pub fn new(omega: f64, kappa: f64, delta_kappa: f64, delta: f64, g: f64) -> Result<Self> {
        for (name, value) in [
            ("omega", omega),
            ("kappa", kappa),
            ("delta_kappa", delta_kappa),
            ("delta", delta),
            ("g", g),
        ] {
            if !value.is_finite() {
                return Err(Error::Domain(format!("{name} = {value} is not finite")));
            }
        }
        if omega <= 0.0 {
            return Err(Error::Domain(format!(
                "omega = {omega} must be > 0 (atomic transition frequency)"
            )));
        }
        if kappa <= 0.0 {
            return Err(Error::Domain(format!(
                "kappa = {kappa} must be > 0 (mean photon loss rate)"
            )));
        }
        if delta_kappa <= 0.0 {
            return Err(Error::Domain(format!(
                "delta_kappa = {delta_kappa} must be > 0; the critical coupling diverges \
                 for a symmetric loss split"
            )));
        }
        if delta_kappa >= kappa {
            return Err(Error::Domain(format!(
                "delta_kappa = {delta_kappa} must be < kappa = {kappa}; otherwise \
                 kappa - delta_kappa <= 0 and cavity 1 is not dissipative"
            )));
        }
        if delta <= 0.0 {
            return Err(Error::Domain(format!(
                "delta = {delta} must be > 0 (cavity detuning)"
            )));
        }
        if g < 0.0 {
            return Err(Error::Domain(format!("g = {g} must be >= 0 (coupling)")));
        }
        Ok(Self {
            omega,
            kappa,
            delta_kappa,
            delta,
            g,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta_kappa(&self) -> f64 {
        self.delta_kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Loss rate of cavity 1, `kappa - delta_kappa`.
    pub fn kappa_minus(&self) -> f64 {
        self.kappa - self.delta_kappa
    }

    /// Loss rate of cavity 2, `kappa + delta_kappa`.
    pub fn kappa_plus(&self) -> f64 {
        self.kappa + self.delta_kappa
    }

    /// Same parameters with a different coupling.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.kappa, self.delta_kappa, self.delta, g)
    }

    /// The combination `D = 4 Delta^2 dk^2 + (Delta^2 + kappa^2 - dk^2)^2`
    /// entering the critical coupling and the superradiant spin tilt.
    pub fn big_d(&self) -> f64 {
        let d2 = self.delta * self.delta;
        let m = d2 + self.kappa * self.kappa - self.delta_kappa * self.delta_kappa;
        4.0 * d2 * self.delta_kappa * self.delta_kappa + m * m
    }

    /// Critical coupling `g_c = (1/4) sqrt(omega D / (Delta kappa dk))`
    /// separating the normal and superradiant phases. The stored `g` is
    /// ignored.
    pub fn critical_coupling(&self) -> f64 {
        0.25 * (self.omega * self.big_d() / (self.delta * self.kappa * self.delta_kappa)).sqrt()
    }
}

/// Detuning that places the exceptional point exactly at the critical
/// coupling: `Delta = sqrt(kappa^2 - dk^2 + 2 kappa sqrt(kappa^2 - dk^2))`.
pub fn ep_detuning(kappa: f64, delta_kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && delta_kappa.is_finite()) {
        return Err(Error::Domain("kappa and delta_kappa must be finite".into()));
    }
    if !(delta_kappa > 0.0 && kappa > delta_kappa) {
        return Err(Error::Domain(format!(
            "ep_detuning requires kappa > delta_kappa > 0, got kappa = {kappa}, \
             delta_kappa = {delta_kappa}"
        )));
    }
    let s = kappa * kappa - delta_kappa * delta_kappa;
    Ok((s + 2.0 * kappa * s.sqrt()).sqrt())
}

/// Mean-field phase label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Normal,
    Superradiant,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Normal => write!(f, "normal"),
            Phase::Superradiant => write!(f, "superradiant"),
        }
    }
}

/// Sign of the transverse spin component in the superradiant phase; the
/// two values are the two parity-broken steady states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A mean-field steady state in intensive variables.
///
/// `alpha1`, `alpha2` are the condensates divided by `sqrt(N)`; `sx`,
/// `sy`, `sz` are the spin components divided by `N`, so
/// `sx^2 + sy^2 + sz^2 = 1/4`. `theta` is the (unsigned) spin rotation
/// angle about the y axis, with the sign of the tilt carried by `branch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub phase: Phase,
    pub theta: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub branch: Branch,
}

impl MeanFieldState {
    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    /// Signed sine of the tilt angle, `branch * sin(theta)`.
    pub fn sin_theta_signed(&self) -> f64 {
        self.branch.sign() * self.theta.sin()
    }
}

/// Mean-field steady state at the stored coupling.
///
/// For `g <= g_c` this is the normal state (`alpha = 0`, spin fully
/// down). For `g > g_c` the spin tilts by `cos(theta) = (g_c/g)^2` and
/// both cavities condense; the superradiant solution degenerates
/// continuously into the normal one at `g = g_c`, which is assigned to
/// the normal phase.
pub fn mean_field_steady_state(params: &ModelParams, branch: Branch) -> MeanFieldState {
    let g = params.g();
    let g_c = params.critical_coupling();
    if g <= g_c {
        return MeanFieldState {
            phase: Phase::Normal,
            theta: 0.0,
            alpha1: Complex64::ZERO,
            alpha2: Complex64::ZERO,
            sx: 0.0,
            sy: 0.0,
            sz: -0.5,
            branch,
        };
    }

    let cos_t = (g_c / g).powi(2);
    let sin_t = branch.sign() * (1.0 - cos_t * cos_t).sqrt();
    let sx = 0.5 * sin_t;

    // alpha_j = 2 g sx * numer_j / (Delta^2 + kappa^2 - dk^2 + 2i Delta dk)
    let delta = params.delta();
    let denom = Complex64::new(
        delta * delta + params.kappa() * params.kappa()
            - params.delta_kappa() * params.delta_kappa(),
        2.0 * delta * params.delta_kappa(),
    );
    let amp = 2.0 * g * sx;
    let alpha1 = amp * Complex64::new(-delta, -params.kappa_plus()) / denom;
    let alpha2 = amp * Complex64::new(params.kappa_minus(), delta) / denom;

    MeanFieldState {
        phase: Phase::Superradiant,
        theta: cos_t.acos(),
        alpha1,
        alpha2,
        sx,
        sy: 0.0,
        sz: -0.5 * cos_t,
        branch,
    }
}

/// Right-hand sides of the first-moment equations of motion at `state`,
/// in intensive variables. A steady state returns the zero vector.
///
/// Layout: `[Re da1, Im da1, Re da2, Im da2, dsx, dsy]`. The `dsz`
/// component is omitted: the equations conserve the spin length, and
/// `dsx = dsy = 0` already forces `dsz = 0` (`dsz` is proportional to
/// `sy`, which `dsx = 0` pins to zero).
pub fn mean_field_residual(params: &ModelParams, state: &MeanFieldState) -> [f64; 6] {
    let g = params.g();
    let drive = state.alpha1.re + state.alpha2.im;

    let da1 = -Complex64::new(params.kappa_minus(), params.delta()) * state.alpha1
        - Complex64::new(0.0, 2.0 * g * state.sx);
    let da2 =
        -Complex64::new(params.kappa_plus(), -params.delta()) * state.alpha2 + 2.0 * g * state.sx;
    let dsx = -params.omega() * state.sy;
    let dsy = params.omega() * state.sx - 4.0 * g * state.sz * drive;

    [da1.re, da1.im, da2.re, da2.im, dsx, dsy]
}

/// Drift and diffusion matrices of the linearized Langevin equation
/// `dv/dt = A v + xi` with `<xi xi^T> = D delta(t - t')`, together with
/// the effective magnon frequency and coupling that enter `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub a: Matrix6,
    pub d: Matrix6,
    /// Effective magnon frequency `Omega`.
    pub omega_eff: f64,
    /// Effective coupling `g cos(theta)`.
    pub g_eff: f64,
}

impl DriftDiffusion {
    pub fn build(params: &ModelParams, state: &MeanFieldState) -> Result<Self> {
        let (a, omega_eff, g_eff) = drift_parts(params, state)?;
        Ok(Self {
            a,
            d: diffusion_matrix(params),
            omega_eff,
            g_eff,
        })
    }
}

fn drift_parts(params: &ModelParams, state: &MeanFieldState) -> Result<(Matrix6, f64, f64)> {
    let g = params.g();
    let cos_t = state.cos_theta();
    let sin_t = state.sin_theta_signed();
    let g_eff = g * cos_t;
    // Intensive form of the magnon frequency; the alpha product makes it
    // even in the branch sign.
    let omega_eff = params.omega() * cos_t - 4.0 * g * sin_t * (state.alpha1.re + state.alpha2.im);
    if omega_eff <= 0.0 {
        return Err(Error::DegenerateModel { omega_eff });
    }

    let km = params.kappa_minus();
    let kp = params.kappa_plus();
    let dl = params.delta();
    let tg = 2.0 * g_eff;
    #[rustfmt::skip]
    let a = Matrix6::new(
        -km,  dl,   0.0,  0.0,  0.0,       0.0,
        -dl, -km,   0.0,  0.0, -tg,        0.0,
        0.0,  0.0, -kp,  -dl,   tg,        0.0,
        0.0,  0.0,  dl,  -kp,   0.0,       0.0,
        0.0,  0.0,  0.0,  0.0,  0.0,       omega_eff,
        -tg,  0.0,  0.0, -tg,  -omega_eff, 0.0,
    );
    Ok((a, omega_eff, g_eff))
}

/// The 6x6 drift matrix `A` for the given mean-field state.
///
/// Fails with `DegenerateModel` if the effective magnon frequency is
/// not positive.
pub fn drift_matrix(params: &ModelParams, state: &MeanFieldState) -> Result<Matrix6> {
    drift_parts(params, state).map(|(a, _, _)| a)
}

/// The diagonal diffusion matrix `D = diag(k-, k-, k+, k+, 0, 0)`;
/// independent of the coupling and of the phase.
pub fn diffusion_matrix(params: &ModelParams) -> Matrix6 {
    let km = params.kappa_minus();
    let kp = params.kappa_plus();
    Matrix6::from_diagonal(&nalgebra::Vector6::new(km, km, kp, kp, 0.0, 0.0))
}
