//! Every example runs to completion.

#[allow(dead_code)]
#[path = "../examples/potentials.rs"]
mod potentials;

#[allow(dead_code)]
#[path = "../examples/spectral_measure.rs"]
mod spectral_measure;

#[allow(dead_code)]
#[path = "../examples/tensor_convolution.rs"]
mod tensor_convolution;

#[allow(dead_code)]
#[path = "../examples/factorized_evolution.rs"]
mod factorized_evolution;

#[allow(dead_code)]
#[path = "../examples/dispersive_decay.rs"]
mod dispersive_decay;

#[allow(dead_code)]
#[path = "../examples/localization.rs"]
mod localization;

#[allow(dead_code)]
#[path = "../examples/atom_weight_scaling.rs"]
mod atom_weight_scaling;

#[allow(dead_code)]
#[path = "../examples/experiment_config.rs"]
mod experiment_config;

#[test]
fn potentials_example_runs() {
    potentials::run_example().unwrap();
}

#[test]
fn spectral_measure_example_runs() {
    spectral_measure::run_example().unwrap();
}

#[test]
fn tensor_convolution_example_runs() {
    tensor_convolution::run_example().unwrap();
}

#[test]
fn factorized_evolution_example_runs() {
    factorized_evolution::run_example().unwrap();
}

#[test]
fn dispersive_decay_example_runs() {
    dispersive_decay::run_example().unwrap();
}

#[test]
fn localization_example_runs() {
    localization::run_example().unwrap();
}

#[test]
fn atom_weight_scaling_example_runs() {
    atom_weight_scaling::run_example().unwrap();
}

#[test]
fn experiment_config_example_runs() {
    experiment_config::run_example().unwrap();
}
