//! Order at which site-local frequency noise couples the two vacua.

use cqed_vacua::disorder::{fluctuations, protection_check, sample_realization, vacuum_cutoffs};
use cqed_vacua::manybody::ManyBodySpec;

pub fn run_example() -> cqed_vacua::Result<()> {
    let n = 3;
    let probe = ManyBodySpec::chain(n, n, 1.5, 1.0, 1.0, &[1; 3])?;
    let spec = probe.with_cutoffs(&vacuum_cutoffs(&probe));
    let deltas = fluctuations(&sample_realization(1.0, 0.5, n, 3), 1.0);
    println!("cutoffs {:?}, deltas {deltas:.4?}", spec.cutoffs);
    for m in 1..=n {
        let r = protection_check(&spec, &deltas, m)?;
        println!(
            "m = {m}: <+|h^m|+> = {:+.3e}, <+|h^m|-> = {:.3e}, spin factor of the cross element {:+.4e}",
            r.elements[0][0].re,
            r.elements[0][1].norm(),
            r.spin_factors[0][1]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
