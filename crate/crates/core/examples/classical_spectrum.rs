//! Orr-Sommerfeld spectrum of plane Poiseuille flow, Re = 10000, alpha = 1.
use std::sync::Arc;

use mos::baseflow::BaseFlow;
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::pencil::classical_pencil;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let op = Arc::new(SpectralOperator::build(120)?);
    let problem = classical_pencil(1.0, 10_000.0, &BaseFlow::poiseuille(), op)?;
    let sol = solve_filtered(&problem, &Cutoffs::default())?;
    println!("{} modes retained", sol.modes.len());
    for m in sol.modes.iter().take(8) {
        println!("  c = {:+.8} {:+.8}i   residual {:.1e}", m.c.re, m.c.im, m.residual);
    }
    // the unstable Tollmien-Schlichting mode, c ~ 0.23752649 + 0.00373967i
    Ok(())
}
