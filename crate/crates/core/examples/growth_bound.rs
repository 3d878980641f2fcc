//! Upper bound on the growth rate compared with the computed spectrum.
use std::sync::Arc;

use mos::baseflow::{extrema, BaseFlow};
use mos::bounds::theorem1_bound;
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::params::{derive, MicropolarParams};
use mos::pencil::assemble;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let flow = BaseFlow::couette();
    let ext = extrema(&flow);
    let op = Arc::new(SpectralOperator::build(64)?);
    for (r0, rk, rnu) in [(0.8, 10.0, 15.0), (1.5, 4.0, 3.0), (2.0, 2.0, 0.8)] {
        let params = MicropolarParams::new(r0, rk, 1.0, rnu, 1.0)?;
        let derived = derive(&params)?;
        if !derived.theorem1_applicable {
            println!("{params:?}: bound does not apply");
            continue;
        }
        for alpha in [0.5, 2.0] {
            let bound = theorem1_bound(alpha, &derived, &ext)?;
            let sol = solve_filtered(&assemble(alpha, &params, &flow, op.clone())?, &Cutoffs::default())?;
            let max_ci = sol.max_ci().unwrap_or(f64::NEG_INFINITY);
            println!("r0={r0} rk={rk} rnu={rnu} alpha={alpha}: max C_i = {max_ci:.4} <= {bound:.4}");
        }
    }
    Ok(())
}
