//! Derived constants R1, R2 and the effective Reynolds number.
use mos::params::{classical_limit, derive, MicropolarParams};

fn main() -> mos::Result<()> {
    let sets = [
        MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?,
        MicropolarParams::new(1.0, 1.0, 1.0, 1.0, 1.0)?,
        classical_limit(500.0)?,
    ];
    for p in &sets {
        let d = derive(p)?;
        match d.r_effective() {
            Some(r) => println!("{p:?}\n  R1 = {:.4}, R2 = {:.4}, R = {r:.4}", d.r1, d.r2),
            None => println!("{p:?}\n  R1 = {:.4} <= R2 = {:.4}, growth bound does not apply", d.r1, d.r2),
        }
    }
    Ok(())
}
