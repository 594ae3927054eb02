//! Bid curves of a two-piece electrolyzer at three levels of renewable output.

use rep_market::bidcurve::{derive_bid_curve, opportunity_cost_exact, RepConfig};
use rep_market::h2curve::PiecewiseConcaveCurve;

fn main() -> rep_market::error::Result<()> {
    // 20 kg/MWh up to 250 MW, 16 kg/MWh above, rated 500 MW
    let curve = PiecewiseConcaveCurve::new(vec![20.0, 16.0], vec![0.0, 1000.0], vec![0.0, 250.0, 500.0])?;
    let price = 1.5;

    for res in [500.0, 600.0, 200.0] {
        let cfg = RepConfig::new(curve.clone(), res, price, "rep")?;
        let bid = derive_bid_curve(&cfg)?;
        let (lo, hi) = bid.domain();
        println!("P = {res} MW, domain [{lo}, {hi}] MW");
        for p in bid.pieces() {
            println!(
                "  {:>6} $/MWh  {:>8} $  on [{}, {}]",
                p.alpha, p.beta, p.q_lo, p.q_hi
            );
        }
        let mut qs = vec![lo, 0.0, hi];
        qs.dedup();
        for q in qs {
            println!("  c({q}) = {} (direct {})", bid.value(q)?, opportunity_cost_exact(&cfg, q)?);
        }
    }
    Ok(())
}
