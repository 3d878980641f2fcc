//! Stability threshold curves as CSV, plus the minimum of M1/(2 alpha).
use mos::regionscan::{curves, m1_minimum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = curves(0.1, 5.0, 25)?;
    table.write_csv(std::io::stdout().lock())?;
    let (alpha, value) = m1_minimum(0.1, 5.0, 200)?;
    eprintln!("min M1/(2 alpha) = {value:.6} at alpha = {alpha:.6}");
    Ok(())
}
