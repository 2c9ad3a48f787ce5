//! Shared fixtures for the unit tests: the two reference parameter sets
//! used throughout (EP-tuned and detuned).

use crate::model::{ep_detuning, ModelParams};

pub(crate) fn exc_params(g: f64) -> ModelParams {
    let delta = ep_detuning(1.0, 0.5).unwrap();
    ModelParams::new(1.0, 1.0, 0.5, delta, g).unwrap()
}

pub(crate) fn exc_params_gc() -> f64 {
    exc_params(0.0).critical_coupling()
}

pub(crate) fn nonexc_params(g: f64) -> ModelParams {
    ModelParams::new(1.0, 1.0, 0.5, 1.0, g).unwrap()
}

pub(crate) fn nonexc_params_gc() -> f64 {
    nonexc_params(0.0).critical_coupling()
}
