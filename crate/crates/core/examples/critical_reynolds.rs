//! Critical Reynolds number of plane Poiseuille flow (about 5772).
use mos::baseflow::BaseFlow;
use mos::regionscan::classical_critical_reynolds;

fn main() -> mos::Result<()> {
    let crit = classical_critical_reynolds(&BaseFlow::poiseuille(), 64, (0.98, 1.06), (5700.0, 5850.0), 2.0)?;
    println!("Re_c in [{:.2}, {:.2}], alpha = {:.4}", crit.stable, crit.unstable, crit.alpha);
    Ok(())
}
