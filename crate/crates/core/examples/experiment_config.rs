//! Driving the batch harness from code: a preset, a TOML round trip and a
//! verify run writing its JSON report.

use coupled_chains::harness::{run, Command, ExperimentConfig, Preset};

pub fn run_example() -> coupled_chains::Result<()> {
    let mut config = ExperimentConfig::preset(Preset::FreeVerify);
    config.lattice.n = 12;
    config.lattice.m = 10;
    config.output.dir =
        std::env::temp_dir().join(format!("coupled-chains-example-{}", std::process::id()));

    let text = config.to_toml_string()?;
    println!("{text}");
    assert_eq!(ExperimentConfig::from_toml_str(&text)?, config);

    let report = run(&config)?;
    assert_eq!(report.command, Command::Verify);
    for c in &report.checks {
        println!(
            "{:<28} {:>10.2e} ≤ {:.0e}  {}",
            c.name,
            c.residual,
            c.tolerance,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    println!("exit status {}", report.status().code());
    std::fs::remove_dir_all(&config.output.dir)?;
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
