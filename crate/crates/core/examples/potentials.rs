//! Sampling the potential families on a window and building 1D truncations.

use coupled_chains::{sample_potential, Boundary, Operator1D, PotentialSpec, Window};

pub fn run_example() -> coupled_chains::Result<()> {
    let window = Window::new(-4, 9);
    let families = [
        (
            "almost Mathieu a=3",
            PotentialSpec::almost_mathieu(3.0, 0.25),
        ),
        (
            "random |V| ≤ 1",
            PotentialSpec::RandomIid {
                width: 1.0,
                seed: 11,
            },
        ),
        ("constant 0.5", PotentialSpec::Constant { value: 0.5 }),
        (
            "quasi-periodic, cos² profile",
            PotentialSpec::Quasiperiodic {
                amplitude: 2.0,
                frequency: coupled_chains::GOLDEN_MEAN,
                phase: 0.0,
                profile: (0..8)
                    .map(|k| (std::f64::consts::PI * k as f64 / 8.0).cos().powi(2))
                    .collect(),
            },
        ),
    ];
    for (name, spec) in &families {
        let v = sample_potential(spec, window)?;
        let shown: Vec<String> = v.values().iter().map(|x| format!("{x:+.3}")).collect();
        println!(
            "{name:<30} sup={:.3}  V[-4..4] = {}",
            v.sup_norm(),
            shown.join(" ")
        );
    }

    // overlapping windows of the random family agree site by site
    let spec = &families[1].1;
    let wide = sample_potential(spec, Window::new(-10, 30))?;
    let narrow = sample_potential(spec, window)?;
    assert_eq!(&wide.values()[6..15], narrow.values());

    let op = Operator1D::schrodinger(
        &sample_potential(&families[0].1, Window::from_origin(6))?,
        Boundary::Periodic,
    )?;
    println!(
        "\nperiodic 6-site truncation (‖A‖ ≤ {:.3}):",
        op.norm_bound()
    );
    for row in op.to_dense().chunks(6) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:+.2}")).collect();
        println!("  {}", cells.join(" "));
    }
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
