//! Symmetrized noise spectrum at the critical point: the EP-tuned
//! system rolls off as 1/omega^4 toward low frequency, the detuned one
//! as 1/omega^2.
//!
//! ```bash
//! cargo run --release --example noise_spectrum
//! ```

use dicke_ep::model::{
    diffusion_matrix, drift_matrix, ep_detuning, mean_field_steady_state, Branch, ModelParams,
};
use dicke_ep::scaling::fit_power_law;
use dicke_ep::steady::noise_spectrum;

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

    let omegas: Vec<f64> = (0..=40)
        .map(|i| 1e-4 * 10f64.powf(i as f64 / 20.0))
        .collect();

    for (name, base) in systems {
        let g_c = base.critical_coupling();
        let params = base.with_g(g_c).unwrap();
        let state = mean_field_steady_state(&params, Branch::Plus);
        let a = drift_matrix(&params, &state).unwrap();
        let d = diffusion_matrix(&params);
        let s = noise_spectrum(&a, &d, &omegas).unwrap();

        println!("== {name} at g = g_c ==");
        println!("{:>10} {:>14}", "omega", "S11");
        for k in (0..=40).step_by(10) {
            println!("{:>10.1e} {:>14.6e}", s.omegas[k], s.matrices[k][(0, 0)].re);
        }
        let pts: Vec<(f64, f64)> = s
            .omegas
            .iter()
            .zip(&s.matrices)
            .map(|(w, m)| (*w, m[(0, 0)].re))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        println!(
            "log-log slope over omega in [1e-4, 1e-2]: {:+.4}  (r^2 = {:.6})\n",
            fit.exponent, fit.r_squared
        );
    }
}
