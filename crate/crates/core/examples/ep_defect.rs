//! Jordan-defect detection at the critical point: with the EP tuning the
//! drift matrix keeps a double zero eigenvalue over a one-dimensional
//! kernel (a genuine 2x2 Jordan block); detuned, the zero is simple.
//!
//! ```bash
//! cargo run --release --example ep_defect
//! ```

use dicke_ep::model::{drift_matrix, ep_detuning, mean_field_steady_state, Branch, ModelParams};
use dicke_ep::spectral::{default_slow_tol, eigen_spectrum, ep_defect, ep_defect_auto};

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
        let params = base.with_g(g_c).unwrap();
        let state = mean_field_steady_state(&params, Branch::Plus);
        let a = drift_matrix(&params, &state).unwrap();
        let spectrum = eigen_spectrum(&a).unwrap();
        let report = ep_defect_auto(&a).unwrap();

        println!("== {name} at g = g_c = {g_c:.7} ==");
        println!("  eigenvalues (slowest first):");
        for z in spectrum.eigenvalues {
            println!("    {:+.6e} {:+.6e}i", z.re, z.im);
        }
        println!("  n_slow                 = {}", report.n_slow);
        println!("  numerical rank         = {}", report.numerical_rank);
        println!(
            "  geometric multiplicity = {}",
            report.geometric_multiplicity
        );
        println!("  defective              = {}", report.defective);

        // the verdict is insensitive to the rank threshold
        let slow_tol = default_slow_tol(&spectrum);
        let verdicts: Vec<bool> = [1e-10, 1e-8, 1e-6]
            .iter()
            .map(|&rank_tol| ep_defect(&a, slow_tol, rank_tol).unwrap().defective)
            .collect();
        println!("  defective across rank_tol 1e-10..1e-6: {verdicts:?}\n");
    }
}
