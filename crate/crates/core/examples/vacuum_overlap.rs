//! Overlap of the numerical ground doublet with the coherent-state vacua.

use cqed_vacua::asymptotics::{coherent_amplitudes, subspace_overlap, vacuum_pair};
use cqed_vacua::basis::Sector;
use cqed_vacua::eigen::EigenOptions;
use cqed_vacua::manybody::{choose_cutoffs, sector_ground_states, ManyBodySpec};

pub fn run_example() -> cqed_vacua::Result<()> {
    let (n, nm) = (3, 3);
    for g in [0.3, 0.6, 0.9] {
        let cutoffs = choose_cutoffs(n, nm, g, 3.0, 3)?;
        let spec = ManyBodySpec::chain(n, nm, g, 1.0, 1.0, &cutoffs)?;
        let ground = sector_ground_states(&spec, &EigenOptions::default())?;
        let even = ground.even.embed(&spec.basis(Some(Sector::Even))?)?;
        let odd = ground.odd.embed(&spec.basis(Some(Sector::Odd))?)?;
        let (plus, minus) = vacuum_pair(&spec)?;
        let ov = subspace_overlap([&even, &odd], [&plus, &minus])?;
        let alpha: Vec<f64> = coherent_amplitudes(n, nm, g)?.iter().map(|a| a.norm()).collect();
        println!(
            "g = {g:.1}: |alpha| = {alpha:.3?}, fidelity {:.5}, cosines {:.5?}",
            ov.fidelity, ov.cosines
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
