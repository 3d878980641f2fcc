//! Wave speeds recovered from the energy identities vs the eigenvalue.
use std::sync::Arc;

use mos::baseflow::BaseFlow;
use mos::bounds::{evaluate_all, EvaluateOptions};
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::params::MicropolarParams;
use mos::pencil::assemble;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let params = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?;
    let flow = BaseFlow::poiseuille();
    let op = Arc::new(SpectralOperator::build(100)?);
    let problem = assemble(1.0, &params, &flow, op.clone())?;
    let sol = solve_filtered(&problem, &Cutoffs::default())?;
    let report = evaluate_all(&sol, &flow, &params, &op, &EvaluateOptions::default())?;
    println!("{:>14} {:>14} {:>14} {:>14}", "C_r", "C_r identity", "C_i", "C_i identity");
    for r in report.identities.iter().take(10) {
        println!("{:>14.8} {:>14.8} {:>14.8} {:>14.8}", r.cr_direct, r.cr_identity, r.ci_direct, r.ci_identity);
    }
    let worst = report.identities.iter().map(|r| r.rel_err_ci.max(r.rel_err_cr)).fold(0.0, f64::max);
    println!("worst relative mismatch over {} modes: {worst:.2e}", report.identities.len());
    Ok(())
}
