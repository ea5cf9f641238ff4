//! Pseudospin energy landscape: the ferromagnetic pair is the unique minimum.

use cqed_vacua::asymptotics::{
    beta_bounds, beta_exponent, chain_quadratic_form, minimize_pseudospin_config,
};

pub fn run_example() -> cqed_vacua::Result<()> {
    for n in 2..=8 {
        let nm = if n == 2 { 1 } else { n };
        let min = minimize_pseudospin_config(&chain_quadratic_form(n, nm)?)?;
        let signs: Vec<String> = min
            .minimizers
            .iter()
            .map(|c| c.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect())
            .collect();
        let (lo, hi) = beta_bounds(n);
        println!(
            "N = {n}: minimizers {signs:?}, {} distinct levels, beta = {:.3} in ({lo:.1}, {hi:.1})",
            min.levels.len(),
            beta_exponent(n, nm)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
