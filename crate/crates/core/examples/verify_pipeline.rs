//! Every check for one configuration, reported as JSON.
use std::sync::Arc;

use mos::baseflow::BaseFlow;
use mos::bounds::{evaluate_all, EvaluateOptions};
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::params::MicropolarParams;
use mos::pencil::assemble;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let params = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?;
    let flow = BaseFlow::couette();
    let op = Arc::new(SpectralOperator::build(100)?);
    let sol = solve_filtered(&assemble(1.5, &params, &flow, op.clone())?, &Cutoffs::default())?;
    let report = evaluate_all(&sol, &flow, &params, &op, &EvaluateOptions::default())?;
    println!(
        "max C_i {:?}, bound {:?}, certified {}, interval [{}, {}], {} violations",
        report.max_ci,
        report.theorem1_bound,
        report.stability_certified,
        report.interval.lower,
        report.interval.upper,
        report.violations.len()
    );
    let json = serde_json::to_string_pretty(&report.derived).expect("serializes");
    println!("{json}");
    Ok(())
}
