//! Mean-field phase structure: critical coupling, EP tuning, and the
//! steady states on both sides of the superradiant transition.
//!
//! ```bash
//! cargo run --release --example mean_field
//! ```

use dicke_ep::model::{
    ep_detuning, mean_field_residual, mean_field_steady_state, Branch, ModelParams,
};

fn main() {
    let (omega, kappa, delta_kappa) = (1.0, 1.0, 0.5);
    let delta = ep_detuning(kappa, delta_kappa).unwrap();
    println!("EP-tuned detuning for (kappa, delta_kappa) = ({kappa}, {delta_kappa}):");
    println!("  Delta = {delta:.10}");

    let base = ModelParams::new(omega, kappa, delta_kappa, delta, 0.0).unwrap();
    let g_c = base.critical_coupling();
    println!("  g_c   = {g_c:.10}\n");

    println!(
        "{:>8} {:>14} {:>10} {:>24} {:>24} {:>12}",
        "g/g_c", "phase", "cos(th)", "alpha1", "alpha2", "residual"
    );
    for mult in [0.5, 0.9, 1.0, 1.05, 1.2, 1.5, 2.0] {
        let params = base.with_g(mult * g_c).unwrap();
        let state = mean_field_steady_state(&params, Branch::Plus);
        let residual = mean_field_residual(&params, &state)
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        println!(
            "{:>8.2} {:>14} {:>10.6} {:>24} {:>24} {:>12.2e}",
            mult,
            state.phase.to_string(),
            state.cos_theta(),
            format!("{:.5}{:+.5}i", state.alpha1.re, state.alpha1.im),
            format!("{:.5}{:+.5}i", state.alpha2.re, state.alpha2.im),
            residual
        );
    }

    println!("\nParity branches at g = 1.3 g_c (signs flip, physics does not):");
    let params = base.with_g(1.3 * g_c).unwrap();
    for branch in [Branch::Plus, Branch::Minus] {
        let s = mean_field_steady_state(&params, branch);
        println!(
            "  branch {branch:?}: sx = {:+.6}, sz = {:+.6}, Re alpha1 = {:+.6}",
            s.sx, s.sz, s.alpha1.re
        );
    }
}
