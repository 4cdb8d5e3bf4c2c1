//! Runs a configuration through the report layer without the binary.
//!
//! cargo run --example cli_report

use alphamod::cli_reports::{render, run, Command, Format, RunConfig};

fn main() -> alphamod::Result<()> {
    let mut cfg = RunConfig::new(Command::Decide).with_spaces("p=2,q=2,s=1/2,alpha=1/2", "p=4,q=1,s=0,alpha=1/4")?;
    cfg.seed = 42;
    let out = run(&cfg)?;
    cfg.format = Format::Text;
    print!("{}", render(&cfg, &out)?);
    Ok(())
}
