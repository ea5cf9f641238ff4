//! Double-well fluxonium levels and the two-level reduction.

use cqed_vacua::fluxonium::{solve_levels, two_level_reduction, FluxoniumSpec};

pub fn run_example() -> cqed_vacua::Result<()> {
    let e_j = 1.0;
    let spec = FluxoniumSpec::new(e_j, e_j / 3.0, e_j / 20.0);
    let levels = solve_levels(&spec, 4)?;
    let red = two_level_reduction(&levels)?;
    for (i, e) in levels.energies.iter().enumerate() {
        println!("E{i} = {e:+.8}");
    }
    println!("omega_F = {:.6}, phi01 = {:.4}, anharmonicity = {:.2}", red.omega_f, red.phi01, red.anharmonicity);
    println!("grid shift between resolutions: {:.2e}", levels.grid_shift);

    let harmonic = solve_levels(&FluxoniumSpec::new(0.0, e_j / 3.0, e_j / 20.0), 3)?;
    println!("E_J = 0: omega_F = {:.6} (sqrt(8 E_C E_L) = {:.6})", harmonic.omega_f, (8.0f64 / 60.0).sqrt());
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
