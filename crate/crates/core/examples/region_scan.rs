//! Classify a grid of (alpha, R) points against the certificate and the spectrum.
use mos::baseflow::BaseFlow;
use mos::params::MicropolarParams;
use mos::regionscan::{classify, write_region_csv, ClassifyOptions, RegionGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0)?;
    let grid = RegionGrid::uniform((0.25, 3.0, 6), (1.0, 60.0, 5))?;
    let opts = ClassifyOptions { with_spectrum: true, n: 48, ..ClassifyOptions::default() };
    let points = classify(&grid, &template, &BaseFlow::couette(), &opts)?;
    write_region_csv(&points, std::io::stdout().lock())?;
    let certified = points.iter().filter(|p| p.certified).count();
    eprintln!("{certified} of {} points certified", points.len());
    Ok(())
}
