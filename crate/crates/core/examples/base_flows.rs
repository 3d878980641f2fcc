//! Profile extrema that feed the bounds.
use mos::baseflow::{extrema, BaseFlow};

fn main() -> mos::Result<()> {
    let flows = [
        ("couette", BaseFlow::couette()),
        ("poiseuille", BaseFlow::poiseuille()),
        ("custom", BaseFlow::custom(vec![0.0, 0.0, 1.0], vec![0.25, -1.0, 1.0])?),
    ];
    println!("{:<11} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}", "profile", "U_min", "U_max", "U''min", "U''max", "q1", "q2");
    for (name, flow) in &flows {
        let e = extrema(flow);
        println!(
            "{name:<11} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
            e.u_min, e.u_max, e.upp_min, e.upp_max, e.q1, e.q2
        );
    }
    Ok(())
}
