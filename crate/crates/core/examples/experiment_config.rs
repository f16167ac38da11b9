//! Parsing a config file with overrides and echoing the resolved values.
//! Frequencies are entered in MHz and held in rad/μs.
//!
//! cargo run --example experiment_config

use rydberg_mis::config::ExperimentConfig;

const TEXT: &str = "\
# seven atoms on a 4x4 grid
seed = 17
graphs = 50
v_nn_mhz = 107
v_nnn_mhz = 13
schedules = pk-simplified, hv-unoptimized
";

fn main() -> rydberg_mis::Result<()> {
    let mut cfg = ExperimentConfig::parse(TEXT)?;
    cfg.apply_override("steps=1000")?;
    cfg.validate()?;
    println!("V_NN = {:.3} rad/μs, ω_φ = {:.3} rad/μs", cfg.v_nn, cfg.rates().omega_phi);
    print!("{}", cfg.to_text());

    match ExperimentConfig::parse("graphs = many\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
