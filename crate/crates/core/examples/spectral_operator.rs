//! Differentiate and integrate on the Gauss-Lobatto grid.
use mos::spectral::{GridFunction, SpectralOperator};
use std::f64::consts::PI;

fn main() -> mos::Result<()> {
    for n in [16, 24, 32] {
        let op = SpectralOperator::build(n)?;
        let f = GridFunction::from_real_fn(&op, |y| (PI * y).sin());
        let df = op.diff(&f)?;
        let err = op
            .nodes()
            .iter()
            .zip(&df.values)
            .map(|(y, v)| (v.re - PI * (PI * y).cos()).abs())
            .fold(0.0, f64::max);
        let area = op.integrate(&f)?.re;
        println!("n = {n:>2}  max |f' - pi cos| = {err:.2e}  integral error = {:.2e}", (area - 2.0 / PI).abs());
    }
    Ok(())
}
