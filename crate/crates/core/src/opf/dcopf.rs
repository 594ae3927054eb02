//! Hourly DC-OPF:
//!
//! ```text
//! min  sum_g c_g
//! s.t. c_g >= alpha_i p_g + beta_i                  every cost piece i of g
//!      sum_{g at n} p_g - D_n = sum_m (theta_n - theta_m) / X_nm   : lmp_n
//!      -limit <= (theta_n - theta_m) / X_nm <= limit  every branch
//!      p_min <= p_g <= p_max
//!      theta_ref = 0
//! ```
//!
//! Flows are in MW with reactances per unit on [`BASE_MVA`](super::BASE_MVA).
//! A controllable branch instead has its own flow variable bounded by its
//! limit.
//! A plant that can import is simply a generator with a negative `p_min`.

use serde::{Deserialize, Serialize};

use super::network::NetworkModel;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

/// The DC-OPF linear program with the positions of its variables and rows.
#[derive(Debug, Clone)]
pub struct DcOpf {
    pub lp: LinearProgram,
    /// Cost epigraph variable per generator.
    pub cost_vars: Vec<usize>,
    pub dispatch_vars: Vec<usize>,
    pub angle_vars: Vec<usize>,
    /// Equality row per bus; its dual is the bus LMP.
    pub balance_rows: Vec<usize>,
    pub reference_row: usize,
    /// Inequality rows `(upper, lower)` per branch; `None` for controllable branches.
    pub flow_rows: Vec<Option<(usize, usize)>>,
    /// Flow variable of each controllable branch.
    pub flow_vars: Vec<Option<usize>>,
    /// Inequality rows per generator, one per cost piece.
    pub epigraph_rows: Vec<Vec<usize>>,
}

/// Builds the hour's DC-OPF. `hour_loads` is in MW, in the order of `net.buses`.
pub fn build_dcopf(net: &NetworkModel, hour_loads: &[f64]) -> Result<DcOpf> {
    net.validate()?;
    if hour_loads.len() != net.buses.len() {
        return Err(Error::Model(format!(
            "{} loads given for {} buses",
            hour_loads.len(),
            net.buses.len()
        )));
    }
    if let Some(d) = hour_loads.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
        return Err(Error::Model(format!("load {d} MW is not a non-negative number")));
    }
    let lookup = net.bus_lookup();
    let mut lp = LinearProgram::new();

    let cost_vars: Vec<usize> = net
        .generators
        .iter()
        .map(|_| lp.add_variable(1.0, f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    let dispatch_vars: Vec<usize> = net
        .generators
        .iter()
        .map(|g| lp.add_variable(0.0, g.p_min, g.p_max))
        .collect();
    let mut coupled = vec![false; net.buses.len()];
    for br in net.branches.iter().filter(|b| !b.controllable) {
        coupled[lookup[br.from.as_str()]] = true;
        coupled[lookup[br.to.as_str()]] = true;
    }
    // angles of buses without angle-coupled branches are pinned at zero
    let angle_vars: Vec<usize> = coupled
        .iter()
        .map(|&c| {
            let bound = if c { f64::INFINITY } else { 0.0 };
            lp.add_variable(0.0, -bound, bound)
        })
        .collect();
    let flow_vars: Vec<Option<usize>> = net
        .branches
        .iter()
        .map(|br| br.controllable.then(|| lp.add_variable(0.0, -br.limit_mw, br.limit_mw)))
        .collect();

    let epigraph_rows = net
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| {
            g.cost
                .iter()
                .map(|c| lp.add_le(vec![(dispatch_vars[k], c.alpha), (cost_vars[k], -1.0)], -c.beta))
                .collect()
        })
        .collect();

    let mut balance: Vec<Vec<(usize, f64)>> = vec![Vec::new(); net.buses.len()];
    for (k, g) in net.generators.iter().enumerate() {
        balance[lookup[g.bus.as_str()]].push((dispatch_vars[k], 1.0));
    }
    for (br, fv) in net.branches.iter().zip(&flow_vars) {
        let (f, t) = (lookup[br.from.as_str()], lookup[br.to.as_str()]);
        if let Some(fv) = *fv {
            balance[f].push((fv, -1.0));
            balance[t].push((fv, 1.0));
            continue;
        }
        let b = br.susceptance_mw();
        balance[f].push((angle_vars[f], -b));
        balance[f].push((angle_vars[t], b));
        balance[t].push((angle_vars[f], b));
        balance[t].push((angle_vars[t], -b));
    }
    let balance_rows = balance
        .into_iter()
        .zip(hour_loads)
        .map(|(row, &d)| lp.add_eq(row, d))
        .collect();

    let flow_rows = net
        .branches
        .iter()
        .map(|br| {
            if br.controllable {
                return None;
            }
            let (f, t) = (lookup[br.from.as_str()], lookup[br.to.as_str()]);
            let b = br.susceptance_mw();
            let up = lp.add_le(vec![(angle_vars[f], b), (angle_vars[t], -b)], br.limit_mw);
            let down = lp.add_le(vec![(angle_vars[f], -b), (angle_vars[t], b)], br.limit_mw);
            Some((up, down))
        })
        .collect();

    let reference_row = lp.add_eq(vec![(angle_vars[lookup[net.reference.as_str()]], 1.0)], 0.0);

    Ok(DcOpf {
        lp,
        cost_vars,
        dispatch_vars,
        angle_vars,
        balance_rows,
        reference_row,
        flow_rows,
        flow_vars,
        epigraph_rows,
    })
}

/// Result of clearing one hour. Vectors follow the order of the network's
/// generators, buses and branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOutcome {
    pub dispatch: Vec<f64>,
    /// rad
    pub angles: Vec<f64>,
    pub flows: Vec<f64>,
    /// $/MWh
    pub lmp: Vec<f64>,
    /// Raw LP objective, including any bid utility terms ($).
    pub objective: f64,
    /// Cost of each generator at its dispatch ($).
    pub generator_costs: Vec<f64>,
}

impl MarketOutcome {
    pub fn lmp_at(&self, net: &NetworkModel, bus: &str) -> Option<f64> {
        net.bus_index(bus).map(|k| self.lmp[k])
    }

    pub fn dispatch_of(&self, net: &NetworkModel, generator: &str) -> Option<f64> {
        net.generator_index(generator).map(|k| self.dispatch[k])
    }
}

/// Clears the market for one hour.
pub fn clear_market(net: &NetworkModel, hour_loads: &[f64]) -> Result<MarketOutcome> {
    let opf = build_dcopf(net, hour_loads)?;
    let sol = solve_lp(&opf.lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::InfeasibleMarket { hour: None }),
        LpStatus::Unbounded => return Err(Error::UnboundedMarket { hour: None }),
    }
    let dispatch: Vec<f64> = opf.dispatch_vars.iter().map(|&v| sol.primal[v]).collect();
    let angles: Vec<f64> = opf.angle_vars.iter().map(|&v| sol.primal[v]).collect();
    let lookup = net.bus_lookup();
    let flows = net
        .branches
        .iter()
        .zip(&opf.flow_vars)
        .map(|(br, fv)| match fv {
            Some(v) => sol.primal[*v],
            None => br.susceptance_mw() * (angles[lookup[br.from.as_str()]] - angles[lookup[br.to.as_str()]]),
        })
        .collect();
    let lmp = opf.balance_rows.iter().map(|&r| sol.equality_duals[r]).collect();
    let generator_costs = net
        .generators
        .iter()
        .zip(&dispatch)
        .map(|(g, &p)| g.cost_at(p))
        .collect();
    Ok(MarketOutcome {
        dispatch,
        angles,
        flows,
        lmp,
        objective: sol.objective_value,
        generator_costs,
    })
}
