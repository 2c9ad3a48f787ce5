//! Slow Liouvillian modes near the critical point: the asymptotic decay
//! rate closes linearly on both tunings, but only the EP-tuned system
//! keeps a conjugate pair with Im ~ sqrt(g_c - g); the closed-form
//! slow-mode approximation is compared against the exact spectrum.
//!
//! ```bash
//! cargo run --release --example spectrum
//! ```

use dicke_ep::model::{drift_matrix, ep_detuning, mean_field_steady_state, Branch, ModelParams};
use dicke_ep::spectral::{eigen_spectrum, slow_mode_approx, slow_mode_coefficients};

fn main() {
    let delta_ep = ep_detuning(1.0, 0.5).unwrap();
    let systems = [
        (
            "exceptional",
            ModelParams::new(1.0, 1.0, 0.5, delta_ep, 0.0).unwrap(),
        ),
        (
            "non-exceptional",
            ModelParams::new(1.0, 1.0, 0.5, 1.0, 0.0).unwrap(),
        ),
    ];

    for (name, base) in systems {
        let g_c = base.critical_coupling();
        println!("== {name} tuning (g_c = {g_c:.7}) ==");
        println!(
            "{:>10} {:>14} {:>14} {:>14}",
            "eps", "Gamma_ADR", "Im lambda_0", "Im lambda_1"
        );
        for eps in [1e-2, 1e-3, 1e-4] {
            let params = base.with_g(g_c * (1.0 - eps)).unwrap();
            let state = mean_field_steady_state(&params, Branch::Plus);
            let a = drift_matrix(&params, &state).unwrap();
            let s = eigen_spectrum(&a).unwrap();
            println!(
                "{:>10.1e} {:>14.6e} {:>14.6e} {:>14.6e}",
                eps, s.adr, s.eigenvalues[0].im, s.eigenvalues[1].im
            );
        }
        println!();
    }

    let base = ModelParams::new(1.0, 1.0, 0.5, delta_ep, 0.0).unwrap();
    let g_c = base.critical_coupling();
    let coeffs = slow_mode_coefficients(&base.with_g(0.99 * g_c).unwrap());
    println!("reduced characteristic equation a(kappa + l) + b l^2 = 0 at g = 0.99 g_c:");
    println!("  a = {:.8}, b = {:.8}", coeffs.a, coeffs.b);

    println!("\nclosed form vs exact slow pair (exceptional, normal side):");
    println!(
        "{:>10} {:>26} {:>26} {:>10}",
        "eps", "exact", "approx", "rel err"
    );
    for eps in [1e-2, 1e-3, 1e-4] {
        let params = base.with_g(g_c * (1.0 - eps)).unwrap();
        let state = mean_field_steady_state(&params, Branch::Plus);
        let a = drift_matrix(&params, &state).unwrap();
        let exact = eigen_spectrum(&a).unwrap().eigenvalues[0];
        let approx = slow_mode_approx(&params).unwrap()[0];
        println!(
            "{:>10.1e} {:>26} {:>26} {:>10.2e}",
            eps,
            format!("{:+.6e}{:+.6e}i", exact.re, exact.im),
            format!("{:+.6e}{:+.6e}i", approx.re, approx.im),
            (exact - approx).norm() / exact.norm()
        );
    }
}
