//! Splitting statistics under Gaussian qubit-frequency disorder.

use cqed_vacua::disorder::{ensemble_splitting, DisorderEnsembleSpec, Engine, DEFAULT_DIMENSION_BUDGET};
use cqed_vacua::eigen::EigenOptions;
use cqed_vacua::manybody::{choose_cutoffs, ManyBodySpec};

pub fn run_example() -> cqed_vacua::Result<()> {
    let g = 1.2;
    let base = ManyBodySpec::chain(2, 1, g, 1.0, 1.0, &choose_cutoffs(2, 1, g, 4.0, 4)?)?;
    let opts = EigenOptions::default();
    for (engine, realizations) in [(Engine::Exact, 50), (Engine::Analytic, 5000)] {
        let spec = DisorderEnsembleSpec { base: base.clone(), omega_f: 1.0, amplitude: 0.5, realizations, seed: 7 };
        let stats = ensemble_splitting(&spec, engine, &opts, DEFAULT_DIMENSION_BUDGET)?;
        println!(
            "{:<8} {realizations:>5} realizations: mean {:.4e}, std {:.4e}, std/mean {:.3}",
            engine.label(),
            stats.mean_delta,
            stats.std_delta,
            stats.relative_spread()
        );
    }
    println!("expected std/mean for the analytic estimate: {:.3}", (2.25f64).sqrt() * 0.5);
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
