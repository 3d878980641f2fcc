//! Admissible wave-speed intervals and the phase speeds of converged modes.
//!
//! Under-resolved modes at the top of the spectrum can sit far outside the
//! interval, so a companion solve on a finer grid marks which modes to trust.
use std::sync::Arc;

use mos::baseflow::{extrema, BaseFlow};
use mos::bounds::wave_speed_interval;
use mos::eigensolve::{solve_filtered, Cutoffs};
use mos::params::MicropolarParams;
use mos::pencil::assemble;
use mos::spectral::SpectralOperator;

fn main() -> mos::Result<()> {
    let params = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?;
    let op = Arc::new(SpectralOperator::build(64)?);
    let cutoffs = Cutoffs { refine_order: Some(96), ..Cutoffs::default() };
    let flows = [
        ("couette", BaseFlow::couette()),
        ("poiseuille", BaseFlow::poiseuille()),
        ("u=y^2, w=y", BaseFlow::custom(vec![0.0, 0.0, 1.0], vec![0.0, 1.0])?),
    ];
    for (name, flow) in &flows {
        let ext = extrema(flow);
        for alpha in [0.5, 2.0] {
            let iv = wave_speed_interval(alpha, &ext)?;
            let sol = solve_filtered(&assemble(alpha, &params, flow, op.clone())?, &cutoffs)?;
            let kept: Vec<f64> = sol.modes.iter().filter(|m| m.converged).map(|m| m.c.re).collect();
            let lo = kept.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = kept.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            println!(
                "{name:<11} alpha={alpha}: case {} [{:.4}, {:.4}], {} converged modes with C_r in [{lo:.4}, {hi:.4}]",
                iv.case_label, iv.lower, iv.upper, kept.len()
            );
        }
    }
    Ok(())
}
