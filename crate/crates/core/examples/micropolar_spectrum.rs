//! Micropolar Couette spectrum, with convergence flags from a finer companion grid.
use std::sync::Arc;

use mos::baseflow::BaseFlow;
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::params::MicropolarParams;
use mos::pencil::assemble;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let params = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?;
    let op = Arc::new(SpectralOperator::build(80)?);
    let cutoffs = Cutoffs { refine_order: Some(110), ..Cutoffs::default() };
    for alpha in [0.5, 1.0, 2.0] {
        let problem = assemble(alpha, &params, &BaseFlow::couette(), op.clone())?;
        let sol = solve_filtered(&problem, &cutoffs)?;
        let converged = sol.modes.iter().filter(|m| m.converged).count();
        println!("alpha = {alpha}: {} modes, {converged} converged", sol.modes.len());
        for m in sol.modes.iter().take(4) {
            println!("  c = {:+.8} {:+.8}i  converged: {}", m.c.re, m.c.im, m.converged);
        }
    }
    Ok(())
}
