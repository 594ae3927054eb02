//! Fits the bundled 100 MW hydrogen curve with uniform breakpoints.
//!
//! cargo run --example fit_hydrogen_curve [pieces]

use std::path::Path;

use rep_market::h2curve::{fit_piecewise_concave, uniform_breakpoints, SampledHydrogenCurve};

fn main() -> rep_market::error::Result<()> {
    let pieces: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/hydrogen_curve.csv");
    let sampled = SampledHydrogenCurve::from_csv_path(&path)?;

    match fit_piecewise_concave(&sampled, &uniform_breakpoints(sampled.capacity(), pieces)) {
        Ok(curve) => {
            println!("{pieces} pieces on [0, {}] MW", curve.capacity());
            curve.write_csv(std::io::stdout())?;
            for p in [10.0, 30.0, 60.0, 100.0] {
                let fit = curve.evaluate(p)?;
                let raw = sampled.interpolate(p)?;
                println!("h({p:>5}) = {fit:8.1} kg/h  (samples {raw:8.1}, efficiency {:.2} kg/MWh)", fit / p);
            }
        }
        // The low-load region is not concave; too many pieces expose it.
        Err(e) => println!("{pieces} pieces: {e}"),
    }
    Ok(())
}
