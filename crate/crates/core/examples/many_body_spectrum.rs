//! Lowest levels of a three-atom chain in both parity sectors.

use cqed_vacua::eigen::EigenOptions;
use cqed_vacua::manybody::{choose_cutoffs, lowest_spectrum, ManyBodySpec, SpectrumSector};

pub fn run_example() -> cqed_vacua::Result<()> {
    let (n, nm, g) = (3, 2, 0.5);
    let cutoffs = choose_cutoffs(n, nm, g, 3.0, 3)?;
    let spec = ManyBodySpec::chain(n, nm, g, 1.0, 1.0, &cutoffs)?;
    println!("cutoffs {cutoffs:?}, full dimension {}", spec.basis(None)?.dim());
    let res = lowest_spectrum(&spec, SpectrumSector::Full, 6, &EigenOptions::default())?;
    for ((e, s), r) in res.eigenvalues.iter().zip(&res.sectors).zip(&res.residuals) {
        println!("{e:+.10}  {:<4}  residual {r:.1e}", s.label());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
