//! Driving the command-line runner from code with a TOML configuration.

use cqed_vacua::cli::{run, RunConfig};

pub fn run_example() -> cqed_vacua::Result<()> {
    let dir = std::env::temp_dir().join("cqed-vacua-example");
    let config = RunConfig::from_toml(&format!(
        "command = \"splitting-sweep\"\noutput_dir = {:?}\nn_atoms = 2\nn_modes = 1\ng_values = [1.2, 1.4, 1.6, 1.8]\n",
        dir.display().to_string()
    ))?;
    let outcome = run("splitting-sweep", &config)?;
    println!("config hash {}", outcome.config_hash);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> cqed_vacua::Result<()> {
    run_example()
}
