//! Single-mode polariton branches up to and past the critical coupling.

use cqed_vacua::hopfield::{branch_sweep, critical_coupling, dense_eigenvalues, HopfieldBlock};

pub fn run_example() -> cqed_vacua::Result<()> {
    let (w, f) = (1.0, 0.8);
    let omega_c = critical_coupling(w, f)?;
    println!("critical coupling {omega_c:.6}");
    let grid: Vec<f64> = (0..=12).map(|i| i as f64 * omega_c / 10.0).collect();
    println!("{:>8} {:>10} {:>10} {:>7} {:>11}", "Omega", "lower", "upper", "stable", "det");
    for r in branch_sweep(&HopfieldBlock::new(w, f, 0.0)?, &grid)? {
        println!("{:>8.4} {:>10.6} {:>10.6} {:>7} {:>+11.4e}", r.rabi, r.lower, r.upper, r.stable, r.determinant);
    }
    let past = dense_eigenvalues(&HopfieldBlock::new(w, f, 1.1 * omega_c)?)?;
    println!("dense spectrum at 1.1 Omega_c: {past:.4?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
