//! Circuit constants and mode table for a symmetric cell.

use cqed_vacua::circuit::{
    branching_ratio, coupling_estimate, derive_constants, mode_frequency, profile_factor, vacuum_rabi,
    RawCircuit,
};

pub fn run_example() -> cqed_vacua::Result<()> {
    let raw = RawCircuit {
        l1: 2e-9,
        l2: 2e-9,
        l_r: 2e-6,
        c_r: 1.6e-10,
        a: 1e-3,
        n_atoms: 5,
        e_j: 10.0,
        e_cj: 10.0 / 3.0,
    };
    let c = derive_constants(&raw)?;
    println!("{}", serde_json::to_string_pretty(&c).expect("serializable"));
    println!("chi from the inductances: {:.4}", branching_ratio(raw.l1, raw.l2, raw.l_r * raw.a));
    let phi01 = std::f64::consts::PI;
    println!("{:>3} {:>12} {:>12}", "k", "omega_k", "Omega_k");
    for k in 1..=raw.n_atoms {
        println!(
            "{k:>3} {:>12.4} {:>12.4}",
            mode_frequency(k, &c, &raw)?,
            vacuum_rabi(k, &c, &raw, phi01)?
        );
    }
    let g_sqrt_n = coupling_estimate(c.chi, raw.n_atoms, profile_factor(&raw), phi01 / (4.0 * std::f64::consts::PI))?;
    println!("g sqrt(N) = {g_sqrt_n:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
