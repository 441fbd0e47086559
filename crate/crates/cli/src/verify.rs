use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tfp_core::harness::verify::{run_suite, VerifyOptions};
use tfp_core::process::Fault;

use crate::{to_json, write_file, CliError};

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum FaultArg {
    SkipYDecrement,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Only small instances (n ≤ 30).
    #[arg(long)]
    pub quick: bool,
    /// Per-check results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Break the Y bookkeeping on purpose, to see the suite fail.
    #[arg(long = "inject-fault", value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

pub fn cmd(a: VerifyArgs) -> Result<(), CliError> {
    let results = run_suite(VerifyOptions {
        quick: a.quick,
        fault: a.inject_fault.map(|f| match f {
            FaultArg::SkipYDecrement => Fault::SkipYDecrement,
        }),
    });
    for r in &results {
        println!(
            "{} {:<34} {:>8.2} s  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed.as_secs_f64(),
            r.detail
        );
    }
    if let Some(p) = &a.json {
        write_file(p, to_json(&results))?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::failed(format!("{failed} of {} checks failed", results.len())));
    }
    println!("all {} checks passed", results.len());
    Ok(())
}
