//! Acceptance suite: every headline result the crate must reproduce, one
//! test per criterion, each printing a `[acceptance] ... PASS/FAIL` line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Reference systems: EXC = (omega 1, kappa 1, delta_kappa 0.5, EP-tuned
//! detuning), NONEXC = same with detuning 1. Default window
//! eps in [1e-4, 1e-2] at 20 points per decade.

mod common;

use common::*;
use dicke_ep::cli::run_cli;
use dicke_ep::model::{
    diffusion_matrix, drift_matrix, mean_field_residual, mean_field_steady_state, Branch,
    ModelParams, Phase,
};
use dicke_ep::scaling::{
    exponent_report, fit_power_law, sweep, ExponentReport, FitOutcome, Observable, RowStatus, Side,
    SweepSpec,
};
use dicke_ep::spectral::{eigen_spectrum, ep_defect_auto, slow_mode_approx};
use dicke_ep::steady::{
    covariance_integral_oracle, lyapunov_residual, noise_spectrum, number_fluctuations, purity,
    solve_lyapunov,
};

macro_rules! check {
    ($cond:expr, $($arg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)+)),
        }
    };
}

fn criterion(name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("[acceptance] {name}: PASS"),
        Err(msg) => {
            println!("[acceptance] {name}: FAIL - {msg}");
            panic!("{name}: {msg}");
        }
    }
}

fn spec_with(observables: &[Observable], side: Side) -> SweepSpec {
    SweepSpec {
        side,
        observables: observables.iter().copied().collect(),
        ..SweepSpec::default()
    }
}

fn fitted(report: &ExponentReport, obs: &str, phase: Phase) -> Result<f64, String> {
    match report.get(obs, phase) {
        Some(FitOutcome::Fit(f)) => Ok(f.exponent),
        other => Err(format!("{obs} ({phase}): expected a fit, got {other:?}")),
    }
}

fn in_band(
    report: &ExponentReport,
    obs: &str,
    phase: Phase,
    center: f64,
    half_width: f64,
) -> Result<(), String> {
    let exp = fitted(report, obs, phase)?;
    if (exp - center).abs() <= half_width {
        Ok(())
    } else {
        Err(format!(
            "{obs} ({phase}): exponent {exp:.4} outside {center} +- {half_width}"
        ))
    }
}

#[test]
fn criterion_01_adr_exponent() {
    criterion(
        "1. ADR exponent = 1 +- 0.05 (EXC & NONEXC, both sides)",
        || {
            for base in [exc_params(0.0), nonexc_params(0.0)] {
                let report = exponent_report(&base, &spec_with(&[Observable::Adr], Side::Both))
                    .map_err(|e| e.to_string())?;
                for phase in [Phase::Normal, Phase::Superradiant] {
                    in_band(&report, "adr", phase, 1.0, 0.05)?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_02_exceptional_number_fluctuations() {
    criterion(
        "2. EXC number fluctuations in [-2.15, -1.85] (both sides)",
        || {
            let obs = [Observable::Dn1, Observable::Dn2, Observable::Dnb];
            let report = exponent_report(&exc_params(0.0), &spec_with(&obs, Side::Both))
                .map_err(|e| e.to_string())?;
            for name in ["dn1", "dn2", "dnb"] {
                for phase in [Phase::Normal, Phase::Superradiant] {
                    in_band(&report, name, phase, -2.0, 0.15)?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_03_nonexceptional_number_fluctuations() {
    criterion(
        "3. NONEXC number fluctuations in [-1.1, -0.9] (both sides)",
        || {
            let obs = [Observable::Dn1, Observable::Dn2, Observable::Dnb];
            let report = exponent_report(&nonexc_params(0.0), &spec_with(&obs, Side::Both))
                .map_err(|e| e.to_string())?;
            for name in ["dn1", "dn2", "dnb"] {
                for phase in [Phase::Normal, Phase::Superradiant] {
                    in_band(&report, name, phase, -1.0, 0.1)?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_04_purity_exponents() {
    criterion(
        "4. purity exponent: EXC 1.5 +- 0.15, NONEXC 0.5 +- 0.1",
        || {
            let report = exponent_report(
                &exc_params(0.0),
                &spec_with(&[Observable::Purity], Side::Both),
            )
            .map_err(|e| e.to_string())?;
            for phase in [Phase::Normal, Phase::Superradiant] {
                in_band(&report, "purity", phase, 1.5, 0.15)?;
            }
            let report = exponent_report(
                &nonexc_params(0.0),
                &spec_with(&[Observable::Purity], Side::Both),
            )
            .map_err(|e| e.to_string())?;
            for phase in [Phase::Normal, Phase::Superradiant] {
                in_band(&report, "purity", phase, 0.5, 0.1)?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_05_slow_mode_imaginary_part() {
    criterion(
        "5. Im(slow mode): EXC fits 0.5 +- 0.05; NONEXC real to 1e-8",
        || {
            let report = exponent_report(
                &exc_params(0.0),
                &spec_with(&[Observable::ImLambda], Side::Normal),
            )
            .map_err(|e| e.to_string())?;
            in_band(&report, "im_lambda", Phase::Normal, 0.5, 0.05)?;

            let ds = sweep(
                &nonexc_params(0.0),
                &spec_with(&[Observable::ImLambda], Side::Both),
            )
            .map_err(|e| e.to_string())?;
            for row in &ds.rows {
                check!(row.status == RowStatus::Ok, "row at eps {} not ok", row.eps);
                let im = row.im_lambda_plus.unwrap();
                check!(
                    im.abs() <= 1e-8,
                    "slow mode at eps {} has Im = {im:e}",
                    row.eps
                );
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_06_noise_spectrum_scaling_at_criticality() {
    criterion(
        "6. S11(w) at g_c: slope -4 +- 0.2 (EXC), -2 +- 0.2 (NONEXC)",
        || {
            let omegas: Vec<f64> = (0..=40)
                .map(|i| 1e-4 * 10f64.powf(i as f64 / 20.0))
                .collect();
            for (base, center) in [(exc_params(0.0), -4.0), (nonexc_params(0.0), -2.0)] {
                let g_c = base.critical_coupling();
                let params = base.with_g(g_c).unwrap();
                let state = mean_field_steady_state(&params, Branch::Plus);
                let a = drift_matrix(&params, &state).map_err(|e| e.to_string())?;
                let d = diffusion_matrix(&params);
                let s = noise_spectrum(&a, &d, &omegas).map_err(|e| e.to_string())?;
                let pts: Vec<(f64, f64)> = s
                    .omegas
                    .iter()
                    .zip(&s.matrices)
                    .map(|(w, m)| (*w, m[(0, 0)].re))
                    .collect();
                let fit = fit_power_law(&pts).map_err(|e| e.to_string())?;
                check!(
                    (fit.exponent - center).abs() <= 0.2,
                    "S11 slope {:.4} outside {center} +- 0.2",
                    fit.exponent
                );
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_quadrature_exponent_table() {
    criterion(
        "7. quadrature table: EXC -2 (ppb -1), NONEXC -1 (ppb flat), xpb zero",
        || {
            let seven = ["xx1", "pp1", "xp1", "xx2", "pp2", "xp2", "xxb"];
            let spec = spec_with(&[Observable::Quadratures], Side::Both);

            let report = exponent_report(&exc_params(0.0), &spec).map_err(|e| e.to_string())?;
            for phase in [Phase::Normal, Phase::Superradiant] {
                for name in seven {
                    in_band(&report, name, phase, -2.0, 0.2)?;
                }
                in_band(&report, "ppb", phase, -1.0, 0.1)?;
                match report.get("xpb", phase) {
                    Some(FitOutcome::Zero) | Some(FitOutcome::Flat { .. }) => {}
                    other => check!(
                        false,
                        "EXC xpb ({phase}): expected zero/flat, got {other:?}"
                    ),
                }
            }

            let report = exponent_report(&nonexc_params(0.0), &spec).map_err(|e| e.to_string())?;
            for phase in [Phase::Normal, Phase::Superradiant] {
                for name in seven {
                    in_band(&report, name, phase, -1.0, 0.1)?;
                }
                match report.get("ppb", phase) {
                    Some(FitOutcome::Flat { slope, .. }) => {
                        check!(
                            slope.abs() < 0.1,
                            "NONEXC ppb ({phase}): flat slope {slope}"
                        );
                    }
                    other => check!(false, "NONEXC ppb ({phase}): expected flat, got {other:?}"),
                }
                match report.get("xpb", phase) {
                    Some(FitOutcome::Zero) | Some(FitOutcome::Flat { .. }) => {}
                    other => {
                        check!(
                            false,
                            "NONEXC xpb ({phase}): expected zero/flat, got {other:?}"
                        )
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_ep_defect_at_criticality() {
    criterion(
        "8. defect at g_c: EXC n_slow 2, rank 5, defective; NONEXC not",
        || {
            let at_gc = |base: ModelParams| -> Result<_, String> {
                let params = base.with_g(base.critical_coupling()).unwrap();
                let state = mean_field_steady_state(&params, Branch::Plus);
                let a = drift_matrix(&params, &state).map_err(|e| e.to_string())?;
                ep_defect_auto(&a).map_err(|e| e.to_string())
            };
            let exc = at_gc(exc_params(0.0))?;
            check!(
                exc.n_slow == 2 && exc.numerical_rank == 5 && exc.defective,
                "EXC report {exc:?}"
            );
            let non = at_gc(nonexc_params(0.0))?;
            check!(
                !non.defective && non.n_slow == 1 && non.numerical_rank == 5,
                "NONEXC report {non:?}"
            );
            Ok(())
        },
    );
}

#[test]
fn criterion_09_property_suite() {
    criterion("9. property suite (residuals, oracles, symmetry)", || {
        // Lyapunov residual contract at 50 random stable points.
        let mut gen = rng(0x90aa);
        let mut physical = Vec::new();
        let mut guard = 0;
        while physical.len() < 50 {
            guard += 1;
            check!(guard < 500, "could not draw 50 stable points");
            let (params, _) = random_physical(&mut gen, (0.05, 0.5));
            let state = mean_field_steady_state(&params, Branch::Plus);
            let a = match drift_matrix(&params, &state) {
                Ok(a) => a,
                Err(_) => continue,
            };
            let d = diffusion_matrix(&params);
            match solve_lyapunov(&a, &d) {
                Ok(v) => physical.push((params, a, d, v)),
                Err(_) => continue,
            }
        }
        for (params, a, d, v) in &physical {
            let res = lyapunov_residual(a, d, v);
            check!(
                res <= 1e-10 * d.norm().max(1.0),
                "residual {res:e} at g = {}",
                params.g()
            );
            // symmetric PSD
            let m = v.matrix();
            check!(
                (m - m.transpose()).norm() <= 1e-12 * m.norm().max(1.0),
                "asymmetric V at g = {}",
                params.g()
            );
            let min_eig = m.symmetric_eigenvalues().min();
            check!(
                min_eig >= -1e-10 * m.norm().max(1.0),
                "V not PSD (min eig {min_eig:e}) at g = {}",
                params.g()
            );
            // spectrum closure and trace identity
            let sp = eigen_spectrum(a).map_err(|e| e.to_string())?;
            let scale = sp
                .eigenvalues
                .iter()
                .map(|z| z.norm())
                .fold(1.0f64, f64::max);
            let conj: Vec<_> = sp.eigenvalues.iter().map(|z| z.conj()).collect();
            check!(
                spectrum_distance(&sp.eigenvalues, &conj) <= 1e-10 * scale,
                "spectrum not conjugate-closed at g = {}",
                params.g()
            );
            let sum: num_complex::Complex64 = sp.eigenvalues.iter().sum();
            check!(
                (sum.re - a.trace()).abs() <= 1e-10 * a.trace().abs().max(1.0)
                    && (a.trace() + 4.0 * params.kappa()).abs() <= 1e-12 * params.kappa(),
                "trace identity broken at g = {}",
                params.g()
            );
        }

        // Oracle equivalence: 20 random pairs + 10 physical points.
        let mut gen = rng(0x0b0e);
        for trial in 0..20 {
            let (a, d) = random_hurwitz_pair(&mut gen);
            let adr = eigen_spectrum(&a).unwrap().adr;
            let horizon = 12.0 / adr;
            let steps = (horizon / 0.005).ceil() as usize;
            let out =
                covariance_integral_oracle(&a, &d, horizon, steps).map_err(|e| e.to_string())?;
            let direct = solve_lyapunov(&a, &d).map_err(|e| e.to_string())?;
            let rel = (out.cov.matrix() - direct.matrix()).norm() / direct.matrix().norm();
            check!(rel <= 1e-6, "random pair {trial}: oracle deviation {rel:e}");
        }
        let mut used = 0;
        let mut gen = rng(0x0b51ca1);
        while used < 10 {
            let (params, _) = random_physical(&mut gen, (0.1, 0.3));
            let state = mean_field_steady_state(&params, Branch::Plus);
            let Ok(a) = drift_matrix(&params, &state) else {
                continue;
            };
            let d = diffusion_matrix(&params);
            let Ok(direct) = solve_lyapunov(&a, &d) else {
                continue;
            };
            let adr = eigen_spectrum(&a).unwrap().adr;
            let horizon = 12.0 / adr;
            let steps = (horizon / 0.01).ceil() as usize;
            let out =
                covariance_integral_oracle(&a, &d, horizon, steps).map_err(|e| e.to_string())?;
            let rel = (out.cov.matrix() - direct.matrix()).norm() / direct.matrix().norm();
            check!(rel <= 1e-6, "physical point: oracle deviation {rel:e}");
            used += 1;
        }

        // Mean-field residual on 50 superradiant states.
        let mut gen = rng(0x5150);
        let mut states = 0;
        while states < 50 {
            let (params, phase) = random_physical(&mut gen, (0.05, 2.0));
            if phase != Phase::Superradiant {
                continue;
            }
            for branch in [Branch::Plus, Branch::Minus] {
                let state = mean_field_steady_state(&params, branch);
                let r = mean_field_residual(&params, &state);
                let max = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                check!(
                    max <= 1e-12,
                    "mean-field residual {max:e} at g = {}",
                    params.g()
                );
            }
            states += 1;
        }

        // Branch symmetry of spectrum and observables.
        let mut gen = rng(0xb5a0);
        let mut pairs = 0;
        while pairs < 15 {
            let (params, phase) = random_physical(&mut gen, (0.05, 0.4));
            if phase != Phase::Superradiant {
                continue;
            }
            let sp = mean_field_steady_state(&params, Branch::Plus);
            let sm = mean_field_steady_state(&params, Branch::Minus);
            let ap = drift_matrix(&params, &sp).map_err(|e| e.to_string())?;
            let am = drift_matrix(&params, &sm).map_err(|e| e.to_string())?;
            let ep = eigen_spectrum(&ap).unwrap();
            let em = eigen_spectrum(&am).unwrap();
            let scale = ep
                .eigenvalues
                .iter()
                .map(|z| z.norm())
                .fold(1.0f64, f64::max);
            check!(
                spectrum_distance(&ep.eigenvalues, &em.eigenvalues) <= 1e-10 * scale,
                "branch-dependent spectrum at g = {}",
                params.g()
            );
            let d = diffusion_matrix(&params);
            if let (Ok(vp), Ok(vm)) = (solve_lyapunov(&ap, &d), solve_lyapunov(&am, &d)) {
                let np = number_fluctuations(&vp);
                let nm = number_fluctuations(&vm);
                let vnorm = vp.matrix().norm().max(1.0);
                check!(
                    (np.dn1 - nm.dn1).abs() <= 1e-10 * vnorm
                        && (np.dn2 - nm.dn2).abs() <= 1e-10 * vnorm
                        && (np.dnb - nm.dnb).abs() <= 1e-10 * vnorm,
                    "branch-dependent fluctuations at g = {}",
                    params.g()
                );
                let (mup, mum) = (
                    purity(&vp).map_err(|e| e.to_string())?,
                    purity(&vm).map_err(|e| e.to_string())?,
                );
                check!(
                    (mup - mum).abs() <= 1e-9 * mup.max(1.0),
                    "branch-dependent purity at g = {}",
                    params.g()
                );
                pairs += 1;
            }
        }

        // Slow-mode approximation against the exact spectrum at eps = 1e-4.
        let g_c = exc_params(0.0).critical_coupling();
        let params = exc_params(g_c * (1.0 - 1e-4));
        let state = mean_field_steady_state(&params, Branch::Plus);
        let a = drift_matrix(&params, &state).map_err(|e| e.to_string())?;
        let exact = eigen_spectrum(&a).unwrap().eigenvalues;
        let approx = slow_mode_approx(&params).map_err(|e| e.to_string())?;
        for (ex, ap) in exact.iter().take(2).zip(approx.iter()) {
            let rel = (ex - ap).norm() / ex.norm();
            check!(rel <= 0.05, "slow-mode approximation off by {rel:e}");
        }

        // Parseval: (1/2pi) integral of S over [-W, W] reproduces V.
        let params = exc_params(0.9 * g_c);
        let state = mean_field_steady_state(&params, Branch::Plus);
        let a = drift_matrix(&params, &state).map_err(|e| e.to_string())?;
        let d = diffusion_matrix(&params);
        let v = solve_lyapunov(&a, &d).map_err(|e| e.to_string())?;
        let w_cap = 1000.0 * params.kappa().max(params.omega());
        let rel = parseval_deviation(&a, &d, &v, w_cap).map_err(|e| e.to_string())?;
        check!(rel <= 1e-2, "Parseval deviation {rel:e} on diagonals");

        Ok(())
    });
}

/// Max relative deviation between the diagonal of V and the frequency
/// integral `(1/pi) int_0^W Re S(w) dw` (the reflection property folds
/// the negative axis).
fn parseval_deviation(
    a: &dicke_ep::model::Matrix6,
    d: &dicke_ep::model::Matrix6,
    v: &dicke_ep::steady::CovarianceMatrix,
    w_cap: f64,
) -> dicke_ep::Result<f64> {
    // Simpson on [0, 20] where the spectral peaks live, log-spaced
    // trapezoid on the smooth 1/w^2 tail.
    let split = 20.0f64.min(w_cap);
    let n1 = 8000usize; // panels, even
    let grid1: Vec<f64> = (0..=n1).map(|i| split * i as f64 / n1 as f64).collect();
    let s1 = noise_spectrum(a, d, &grid1)?;
    let h = split / n1 as f64;
    let mut diag = [0.0f64; 6];
    for (i, m) in s1.matrices.iter().enumerate() {
        let w = if i == 0 || i == n1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for (k, slot) in diag.iter_mut().enumerate() {
            *slot += w * m[(k, k)].re;
        }
    }
    for slot in diag.iter_mut() {
        *slot *= h / 3.0;
    }

    if w_cap > split {
        let n2 = 4000usize;
        let ratio = (w_cap / split).powf(1.0 / n2 as f64);
        let grid2: Vec<f64> = (0..=n2).map(|i| split * ratio.powi(i as i32)).collect();
        let s2 = noise_spectrum(a, d, &grid2)?;
        for i in 0..n2 {
            let dw = grid2[i + 1] - grid2[i];
            for (k, slot) in diag.iter_mut().enumerate() {
                *slot += 0.5 * dw * (s2.matrices[i][(k, k)].re + s2.matrices[i + 1][(k, k)].re);
            }
        }
    }

    let mut worst = 0.0f64;
    for (k, integral) in diag.iter().enumerate() {
        let estimate = integral / std::f64::consts::PI;
        let exact = v.entry(k, k);
        worst = worst.max((estimate - exact).abs() / exact.abs());
    }
    Ok(worst)
}

#[test]
fn criterion_10_report_determinism() {
    criterion(
        "10. identical configs give byte-identical report output",
        || {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let out1 = dir.path().join("report1.csv");
            let out2 = dir.path().join("report2.csv");
            let argv = |out: &std::path::Path| {
                vec![
                    "dicke-ep".to_string(),
                    "report".to_string(),
                    "--omega".into(),
                    "1".into(),
                    "--kappa".into(),
                    "1".into(),
                    "--delta-kappa".into(),
                    "0.5".into(),
                    "--delta".into(),
                    "ep".into(),
                    "--out".into(),
                    out.display().to_string(),
                ]
            };
            check!(run_cli(argv(&out1)) == 0, "first report run failed");
            check!(run_cli(argv(&out2)) == 0, "second report run failed");
            let b1 = std::fs::read(&out1).map_err(|e| e.to_string())?;
            let b2 = std::fs::read(&out2).map_err(|e| e.to_string())?;
            check!(!b1.is_empty(), "report output is empty");
            check!(
                b1 == b2,
                "outputs differ ({} vs {} bytes)",
                b1.len(),
                b2.len()
            );
            Ok(())
        },
    );
}
