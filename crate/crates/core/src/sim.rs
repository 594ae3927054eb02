//! Hourly market simulation of the plant under its two representations.
//!
//! * Bidder: each hour the plant's renewable generator bids the opportunity
//!   cost curve derived from that hour's renewable output and hydrogen price,
//!   with its lower bound extended below zero so it can import. After
//!   clearing, the electrolyzer consumes `min(P - p_DA, capacity)`.
//! * Fixed: the electrolyzer is an inflexible load equal to the bidder's
//!   average consumption, and the renewable generator bids at zero cost. In
//!   hours where that load cannot be served, a first pass replaces it with a
//!   single-piece bid at [`FIXED_BID_PRICE`] to find the largest feasible
//!   consumption, and a second pass clears with that consumption as load.
//! * Base: the grid without any electrolyzer.
//!
//! Hours are independent and are cleared in parallel; results are always
//! returned in hour order.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bidcurve::{derive_bid_curve, RepConfig};
use crate::dataset::{read_rows, write_rows};
use crate::error::{Error, Result};
use crate::opf::{clear_market, reduce_network_with, CostPiece, Generator, MarketOutcome, NetworkModel, Reduction};
use crate::scenario::{Scenario, FIXED_BID_PRICE};

/// Id of the temporary price-responsive electrolyzer bid of the fixed
/// representation's first pass.
pub const FIXED_BID_ID: &str = "__electrolyzer_bid";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Base,
    Bidder,
    Fixed,
}

impl std::fmt::Display for RunKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            RunKind::Base => "base",
            RunKind::Bidder => "bidder",
            RunKind::Fixed => "fixed",
        })
    }
}

/// One cleared hour and the plant's position in it.
///
/// For the bidder, `rep_electrolyzer_load = min(P - p_DA, capacity)`. For the
/// fixed representation it is the (possibly reduced) fixed load and
/// `rep_internal_spill` is the market curtailment of the plant's renewable
/// generator. In every case `spill = P - p_DA - load >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourRecord {
    pub hour: usize,
    pub kind: RunKind,
    pub outcome: MarketOutcome,
    /// Available renewable power at the plant (MW).
    pub rep_available: f64,
    /// Net sale to the grid, negative when importing (MW).
    pub rep_export: f64,
    pub rep_electrolyzer_load: f64,
    pub rep_internal_spill: f64,
    /// kg over the hour
    pub hydrogen_output: f64,
    /// $/kg
    pub hydrogen_price: f64,
    pub lmp_rep_node: f64,
    /// Exogenous load of the hour, summed over buses (MW).
    pub system_load: f64,
    /// The fixed load was infeasible and the two-pass procedure ran.
    pub pass2: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Worker threads; `None` uses rayon's global pool.
    pub jobs: Option<usize>,
}

/// Per-scenario clearing context: the reduced network and the plant's place in it.
pub struct Simulator<'a> {
    scn: &'a Scenario,
    reduction: Reduction,
    rep_gen: usize,
    rep_bus: usize,
    options: SimOptions,
}

impl<'a> Simulator<'a> {
    pub fn new(scn: &'a Scenario) -> Result<Self> {
        Self::with_options(scn, SimOptions::default())
    }

    pub fn with_options(scn: &'a Scenario, options: SimOptions) -> Result<Self> {
        let reduction = reduce_network_with(&scn.network, scn.network_mode, &scn.interregional)?;
        let rep_gen = scn
            .network
            .generator_index(&scn.rep.wind_generator)
            .ok_or_else(|| Error::Validation(vec![format!("unknown REP generator '{}'", scn.rep.wind_generator)]))?;
        let original_bus = scn
            .network
            .bus_index(scn.rep_bus())
            .expect("validated network");
        let rep_bus = reduction.bus_map[original_bus];
        Ok(Self {
            scn,
            reduction,
            rep_gen,
            rep_bus,
            options,
        })
    }

    /// The network the market is cleared on (after zonal or copper-plate reduction).
    pub fn network(&self) -> &NetworkModel {
        &self.reduction.network
    }

    pub fn scenario(&self) -> &Scenario {
        self.scn
    }

    pub fn rep_generator_index(&self) -> usize {
        self.rep_gen
    }

    pub fn rep_bus_index(&self) -> usize {
        self.rep_bus
    }

    pub fn horizon(&self) -> usize {
        self.scn.horizon()
    }

    /// The hour's network with renewable availability applied.
    pub fn hour_network(&self, hour: usize) -> NetworkModel {
        let mut net = self.reduction.network.clone();
        for g in &mut net.generators {
            if let Some(avail) = self.scn.timeseries.available(&g.id, hour) {
                g.p_min = 0.0;
                g.p_max = avail;
            }
        }
        net
    }

    pub fn hour_loads(&self, hour: usize) -> Vec<f64> {
        self.reduction.aggregate_loads(&self.scn.timeseries.loads[hour])
    }

    fn clear(&self, net: &NetworkModel, loads: &[f64], hour: usize) -> Result<MarketOutcome> {
        clear_market(net, loads).map_err(|e| e.with_hour(hour))
    }

    fn record(&self, hour: usize, kind: RunKind, outcome: MarketOutcome) -> HourRecord {
        HourRecord {
            hour,
            kind,
            lmp_rep_node: outcome.lmp[self.rep_bus],
            outcome,
            rep_available: self.scn.rep_available(hour),
            rep_export: 0.0,
            rep_electrolyzer_load: 0.0,
            rep_internal_spill: 0.0,
            hydrogen_output: 0.0,
            hydrogen_price: self.scn.rep.hydrogen_price.at(hour),
            system_load: self.scn.timeseries.loads[hour].iter().sum(),
            pass2: false,
        }
    }

    pub fn base_hour(&self, hour: usize) -> Result<HourRecord> {
        let outcome = self.clear(&self.hour_network(hour), &self.hour_loads(hour), hour)?;
        Ok(self.record(hour, RunKind::Base, outcome))
    }

    /// The plant's configuration for `hour`.
    pub fn rep_config(&self, hour: usize) -> Result<RepConfig> {
        RepConfig::new(
            self.scn.rep.electrolyzer.clone(),
            self.scn.rep_available(hour),
            self.scn.rep.hydrogen_price.at(hour),
            self.network().buses[self.rep_bus].id.clone(),
        )
    }

    /// The hour's network with the plant's generator replaced by its bid.
    pub fn bidder_network(&self, hour: usize) -> Result<NetworkModel> {
        let cfg = self.rep_config(hour)?;
        let bid = derive_bid_curve(&cfg)?;
        let mut net = self.hour_network(hour);
        let (q_min, q_max) = bid.domain();
        let g = &mut net.generators[self.rep_gen];
        g.cost = bid.cost_pieces().into_iter().map(|(a, b)| CostPiece::new(a, b)).collect();
        g.p_min = q_min;
        g.p_max = q_max;
        Ok(net)
    }

    pub fn bidder_hour(&self, hour: usize) -> Result<HourRecord> {
        let net = self.bidder_network(hour)?;
        let outcome = self.clear(&net, &self.hour_loads(hour), hour)?;
        let g = &net.generators[self.rep_gen];
        let p_da = outcome.dispatch[self.rep_gen].clamp(g.p_min, g.p_max);
        let mut rec = self.record(hour, RunKind::Bidder, outcome);
        let avail = rec.rep_available;
        let cap = self.scn.rep.electrolyzer.capacity();
        let load = (avail - p_da).min(cap).clamp(0.0, cap);
        rec.rep_export = p_da;
        rec.rep_electrolyzer_load = load;
        rec.rep_internal_spill = (avail - p_da - load).max(0.0);
        rec.hydrogen_output = self.scn.rep.electrolyzer.evaluate(load)?;
        Ok(rec)
    }

    /// Clears `hour` with the electrolyzer as an inflexible `level` MW load,
    /// falling back to the two-pass procedure if that is infeasible.
    pub fn fixed_hour(&self, hour: usize, level: f64) -> Result<HourRecord> {
        let net = self.hour_network(hour);
        let base_loads = self.hour_loads(hour);
        let with_load = |mw: f64| {
            let mut l = base_loads.clone();
            l[self.rep_bus] += mw;
            l
        };

        let (outcome, consumption, pass2) = match self.clear(&net, &with_load(level), hour) {
            Ok(out) => (out, level, false),
            Err(Error::InfeasibleMarket { .. }) => {
                let feasible = self.max_feasible_consumption(&net, &base_loads, level, hour)?;
                let (out, mw) = self.clear_backing_off(&net, feasible, hour, &with_load)?;
                (out, mw, true)
            }
            Err(e) => return Err(e),
        };

        let mut rec = self.record(hour, RunKind::Fixed, outcome);
        let wind = rec.outcome.dispatch[self.rep_gen];
        rec.rep_export = wind - consumption;
        rec.rep_electrolyzer_load = consumption;
        rec.rep_internal_spill = (rec.rep_available - wind).max(0.0);
        rec.hydrogen_output = self
            .scn
            .rep
            .electrolyzer
            .evaluate(consumption.clamp(0.0, self.scn.rep.electrolyzer.capacity()))?;
        rec.pass2 = pass2;
        Ok(rec)
    }

    /// First pass: the electrolyzer bids up to `level` MW at a very high price.
    pub fn max_feasible_consumption(&self, net: &NetworkModel, loads: &[f64], level: f64, hour: usize) -> Result<f64> {
        let mut net = net.clone();
        net.generators.push(Generator {
            id: FIXED_BID_ID.into(),
            bus: net.buses[self.rep_bus].id.clone(),
            fuel: String::new(),
            p_min: -level,
            p_max: 0.0,
            cost: vec![CostPiece::new(FIXED_BID_PRICE, 0.0)],
        });
        let out = self.clear(&net, loads, hour)?;
        Ok((-out.dispatch[net.generators.len() - 1]).clamp(0.0, level))
    }

    /// Second pass. The first-pass consumption sits on the feasibility
    /// boundary, so it is nudged down if round-off makes it infeasible.
    fn clear_backing_off(
        &self,
        net: &NetworkModel,
        mut mw: f64,
        hour: usize,
        with_load: &dyn Fn(f64) -> Vec<f64>,
    ) -> Result<(MarketOutcome, f64)> {
        for _ in 0..6 {
            match self.clear(net, &with_load(mw), hour) {
                Ok(out) => return Ok((out, mw)),
                Err(Error::InfeasibleMarket { .. }) => mw = (mw - 1e-6 * mw.max(1.0)).max(0.0),
                Err(e) => return Err(e),
            }
        }
        Err(Error::InfeasibleMarket { hour: Some(hour) })
    }

    fn par_hours<T: Send>(&self, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        let run = || (0..self.horizon()).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
        match self.options.jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Model(format!("thread pool: {e}")))?
                .install(run),
            None => run(),
        }
    }

    pub fn run_base(&self) -> Result<Vec<HourRecord>> {
        self.par_hours(|h| self.base_hour(h))
    }

    pub fn run_bidder(&self) -> Result<Vec<HourRecord>> {
        self.par_hours(|h| self.bidder_hour(h))
    }

    pub fn run_fixed(&self, bidder_records: &[HourRecord]) -> Result<Vec<HourRecord>> {
        self.run_fixed_at(fixed_level(bidder_records, self.horizon())?)
    }

    /// Fixed representation with an explicit consumption level (MW).
    pub fn run_fixed_at(&self, level: f64) -> Result<Vec<HourRecord>> {
        if !(level >= 0.0) || level > self.scn.rep.electrolyzer.capacity() {
            return Err(Error::Domain(format!(
                "fixed consumption {level} MW outside [0, {}]",
                self.scn.rep.electrolyzer.capacity()
            )));
        }
        self.par_hours(|h| self.fixed_hour(h, level))
    }
}

/// The bidder's average electrolyzer consumption over the horizon.
pub fn fixed_level(bidder_records: &[HourRecord], horizon: usize) -> Result<f64> {
    if bidder_records.len() != horizon || bidder_records.iter().any(|r| r.kind != RunKind::Bidder) {
        return Err(Error::Domain(format!(
            "fixed consumption needs {horizon} bidder records, got {}",
            bidder_records.len()
        )));
    }
    if horizon == 0 {
        return Ok(0.0);
    }
    Ok(bidder_records.iter().map(|r| r.rep_electrolyzer_load).sum::<f64>() / horizon as f64)
}

pub fn simulate_bidder(scn: &Scenario) -> Result<Vec<HourRecord>> {
    Simulator::new(scn)?.run_bidder()
}

pub fn simulate_fixed(scn: &Scenario, bidder_records: &[HourRecord]) -> Result<Vec<HourRecord>> {
    Simulator::new(scn)?.run_fixed(bidder_records)
}

pub fn simulate_base(scn: &Scenario) -> Result<Vec<HourRecord>> {
    Simulator::new(scn)?.run_base()
}

#[derive(Serialize, Deserialize)]
struct HourRow {
    hour: usize,
    objective_usd: f64,
    rep_p_da_mw: f64,
    rep_p_h_mw: f64,
    rep_spill_mw: f64,
    h2_kg: f64,
    lmp_rep_node: f64,
    pass2_flag: u8,
}

#[derive(Serialize)]
struct DispatchRow<'a> {
    hour: usize,
    generator: &'a str,
    dispatch_mw: f64,
    cost_usd: f64,
}

#[derive(Serialize)]
struct FlowRow<'a> {
    hour: usize,
    branch: usize,
    from: &'a str,
    to: &'a str,
    flow_mw: f64,
}

#[derive(Serialize)]
struct LmpRow<'a> {
    hour: usize,
    bus: &'a str,
    lmp_usd_per_mwh: f64,
}

/// Writes `hours.csv`, `dispatch.csv`, `flows.csv` and `lmps.csv` under `dir`.
/// `net` is the network the records were cleared on.
pub fn write_records(dir: &Path, net: &NetworkModel, records: &[HourRecord]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rows(
        &dir.join("hours.csv"),
        records.iter().map(|r| HourRow {
            hour: r.hour,
            objective_usd: r.outcome.objective,
            rep_p_da_mw: r.rep_export,
            rep_p_h_mw: r.rep_electrolyzer_load,
            rep_spill_mw: r.rep_internal_spill,
            h2_kg: r.hydrogen_output,
            lmp_rep_node: r.lmp_rep_node,
            pass2_flag: u8::from(r.pass2),
        }),
    )?;
    write_rows(
        &dir.join("dispatch.csv"),
        records.iter().flat_map(|r| {
            net.generators.iter().enumerate().map(move |(k, g)| DispatchRow {
                hour: r.hour,
                generator: &g.id,
                dispatch_mw: r.outcome.dispatch[k],
                cost_usd: r.outcome.generator_costs[k],
            })
        }),
    )?;
    write_rows(
        &dir.join("flows.csv"),
        records.iter().flat_map(|r| {
            net.branches.iter().enumerate().map(move |(k, b)| FlowRow {
                hour: r.hour,
                branch: k,
                from: &b.from,
                to: &b.to,
                flow_mw: r.outcome.flows[k],
            })
        }),
    )?;
    write_rows(
        &dir.join("lmps.csv"),
        records.iter().flat_map(|r| {
            net.buses.iter().enumerate().map(move |(k, b)| LmpRow {
                hour: r.hour,
                bus: &b.id,
                lmp_usd_per_mwh: r.outcome.lmp[k],
            })
        }),
    )
}

/// Electrolyzer consumption per hour from a `hours.csv` written by [`write_records`].
pub fn read_consumption(dir: &Path) -> Result<Vec<f64>> {
    let rows: Vec<(usize, HourRow)> = read_rows(&dir.join("hours.csv"))?;
    Ok(rows.into_iter().map(|(_, r)| r.rep_p_h_mw).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opf::MarketOutcome;

    fn bidder_record(load: f64) -> HourRecord {
        HourRecord {
            hour: 0,
            kind: RunKind::Bidder,
            outcome: MarketOutcome {
                dispatch: vec![],
                angles: vec![],
                flows: vec![],
                lmp: vec![],
                objective: 0.0,
                generator_costs: vec![],
            },
            rep_available: 0.0,
            rep_export: 0.0,
            rep_electrolyzer_load: load,
            rep_internal_spill: 0.0,
            hydrogen_output: 0.0,
            hydrogen_price: 0.0,
            lmp_rep_node: 0.0,
            system_load: 0.0,
            pass2: false,
        }
    }

    #[test]
    fn fixed_level_is_bidder_average() {
        let recs = [bidder_record(100.0), bidder_record(300.0)];
        assert_eq!(fixed_level(&recs, 2).unwrap(), 200.0);
        assert!(fixed_level(&recs, 3).is_err());
        let mut wrong = recs.clone();
        wrong[1].kind = RunKind::Fixed;
        assert!(fixed_level(&wrong, 2).is_err());
        assert_eq!(fixed_level(&[], 0).unwrap(), 0.0);
    }

    #[test]
    fn kind_names() {
        assert_eq!(format!("{:>7}", RunKind::Bidder), " bidder");
        assert_eq!(serde_json::to_string(&RunKind::Fixed).unwrap(), "\"fixed\"");
    }
}
