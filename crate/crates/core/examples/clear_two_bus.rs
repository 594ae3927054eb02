//! Two buses, a cheap generator at one end and the load plus an expensive
//! generator at the other. Tightening the line separates the prices.

use rep_market::opf::{clear_market, Branch, Bus, CostPiece, Generator, NetworkModel};

fn gen(id: &str, bus: &str, price: f64) -> Generator {
    Generator {
        id: id.into(),
        bus: bus.into(),
        fuel: "gas".into(),
        p_min: 0.0,
        p_max: 100.0,
        cost: vec![CostPiece::new(price, 0.0)],
    }
}

fn main() -> rep_market::error::Result<()> {
    for limit in [200.0, 50.0] {
        let net = NetworkModel::new(
            vec![Bus { id: "1".into(), region: None }, Bus { id: "2".into(), region: None }],
            "1",
            vec![Branch::new("1", "2", 0.1, limit)],
            vec![gen("cheap", "1", 10.0), gen("peaker", "2", 30.0)],
        )?;
        let out = clear_market(&net, &[0.0, 100.0])?;
        println!(
            "limit {limit:>5} MW: dispatch {:.1}/{:.1} MW, flow {:.1} MW, LMPs {:.2}/{:.2} $/MWh, cost {:.0} $",
            out.dispatch[0], out.dispatch[1], out.flows[0], out.lmp[0], out.lmp[1], out.objective
        );
    }
    Ok(())
}
