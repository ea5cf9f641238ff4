//! Ground-doublet splitting of two atoms against g and the fitted exponent.

use cqed_vacua::asymptotics::{analytic_splitting_n2, beta_exponent};
use cqed_vacua::cli::fit_beta;
use cqed_vacua::eigen::EigenOptions;
use cqed_vacua::manybody::{choose_cutoffs, ground_splitting, ManyBodySpec, DEFAULT_REFINE_TOL};

pub fn run_example() -> cqed_vacua::Result<()> {
    let mut records = Vec::new();
    println!("{:>5} {:>8} {:>14} {:>14} {:>9}", "g", "cutoff", "delta", "closed form", "converged");
    for g in [1.0, 1.2, 1.4, 1.6, 1.8] {
        let cutoffs = choose_cutoffs(2, 1, g, 4.0, 4)?;
        let spec = ManyBodySpec::chain(2, 1, g, 1.0, 1.0, &cutoffs)?;
        let rec = ground_splitting(&spec, &EigenOptions::default(), DEFAULT_REFINE_TOL)?;
        println!(
            "{g:>5.2} {:>8} {:>14.6e} {:>14.6e} {:>9}",
            rec.cutoffs[0],
            rec.delta,
            analytic_splitting_n2(1.0, 1.0, g)?,
            rec.converged
        );
        records.push(rec);
    }
    let fit = fit_beta(&records)?;
    println!("fitted beta {:.3}, asymptotic beta {}", fit.beta, beta_exponent(2, 1)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
