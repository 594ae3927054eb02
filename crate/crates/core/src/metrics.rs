//! System and plant metrics over a simulated horizon.
//!
//! Conventions used throughout, also recorded in every report:
//! * the cost of generation excludes the plant's own cost or utility terms;
//! * served load is the exogenous load plus the plant's imports (its exports
//!   are generation, not load);
//! * curtailment includes renewable power the plant could neither sell nor
//!   consume.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opf::{Generator, NetworkModel};
use crate::scenario::{HydrogenPrice, Scenario};
use crate::sim::{HourRecord, RunKind};

pub const CONVENTIONS: [&str; 3] = [
    "cost of generation excludes the REP",
    "load per MWh metrics divide by exogenous load plus REP imports",
    "curtailment includes REP-internal spill",
];

/// Sum over hours of every generator's cost except the plant's.
pub fn cost_of_generation(records: &[HourRecord], rep_generator: usize) -> f64 {
    records
        .iter()
        .map(|r| {
            r.outcome
                .generator_costs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != rep_generator)
                .map(|(_, c)| c)
                .sum::<f64>()
        })
        .sum()
}

/// MW imported by the plant in the hour.
fn rep_import(r: &HourRecord) -> f64 {
    match r.kind {
        RunKind::Base => 0.0,
        _ => (-r.rep_export).max(0.0),
    }
}

/// Total served load in MWh.
pub fn served_load(records: &[HourRecord]) -> f64 {
    records.iter().map(|r| r.system_load + rep_import(r)).sum()
}

/// Renewable energy available but not used, in MWh.
pub fn curtailment(records: &[HourRecord], scn: &Scenario) -> f64 {
    let rep = scn.rep.wind_generator.as_str();
    let renewables: Vec<(usize, &str)> = scn
        .network
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| scn.timeseries.res_available.contains_key(&g.id))
        .map(|(k, g)| (k, g.id.as_str()))
        .collect();
    records
        .iter()
        .map(|r| {
            renewables
                .iter()
                .map(|&(k, id)| {
                    if id == rep && r.kind != RunKind::Base {
                        r.rep_internal_spill
                    } else {
                        let avail = scn.timeseries.available(id, r.hour).unwrap_or(0.0);
                        (avail - r.outcome.dispatch[k]).max(0.0)
                    }
                })
                .sum::<f64>()
        })
        .sum()
}

fn emission_factor(g: &Generator, factors: &BTreeMap<String, f64>) -> Result<f64> {
    if g.fuel.is_empty() {
        return Ok(0.0);
    }
    factors
        .get(&g.fuel.to_ascii_lowercase())
        .copied()
        .ok_or_else(|| Error::MissingFactor(g.fuel.clone()))
}

/// Total emissions (t CO2) and emissions per served load (kg/MWh).
pub fn emissions(
    records: &[HourRecord],
    generators: &[Generator],
    factors: &BTreeMap<String, f64>,
) -> Result<(f64, f64)> {
    let f = generators
        .iter()
        .map(|g| emission_factor(g, factors))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = records
        .iter()
        .map(|r| {
            r.outcome
                .dispatch
                .iter()
                .zip(&f)
                .map(|(p, f)| p.max(0.0) * f)
                .sum::<f64>()
        })
        .sum();
    let load = served_load(records);
    let per_load = if load > 0.0 { total * 1000.0 / load } else { 0.0 };
    Ok((total, per_load))
}

/// Market revenue (negative when importing) plus hydrogen revenue, in $.
pub fn rep_profit(records: &[HourRecord], hydrogen_price: &HydrogenPrice) -> f64 {
    records
        .iter()
        .map(|r| r.lmp_rep_node * r.rep_export + hydrogen_price.at(r.hour) * r.hydrogen_output)
        .sum()
}

/// Demand minus renewable production plus renewable capacity (MW).
pub fn adjusted_net_demand(hour_loads: &[f64], res_production: &[f64], res_capacity: &[f64]) -> f64 {
    hour_loads.iter().sum::<f64>() - res_production.iter().sum::<f64>() + res_capacity.iter().sum::<f64>()
}

/// One piece of the supply stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeritEntry {
    pub generator: String,
    pub piece: usize,
    pub alpha: f64,
    pub width: f64,
}

/// Range of `[lo, hi]` on which `pieces[i]` is the active (maximal) cost line.
fn active_range(g: &Generator, i: usize, lo: f64, hi: f64) -> (f64, f64) {
    let me = g.cost[i];
    let (mut a, mut b) = (lo, hi);
    for (j, other) in g.cost.iter().enumerate() {
        if j == i {
            continue;
        }
        if other.alpha < me.alpha {
            a = a.max((other.beta - me.beta) / (me.alpha - other.alpha));
        } else if other.alpha > me.alpha {
            b = b.min((me.beta - other.beta) / (other.alpha - me.alpha));
        } else if other.beta > me.beta || (other.beta == me.beta && j < i) {
            return (lo, lo);
        }
    }
    (a, b.max(a))
}

/// All generation pieces sorted by marginal cost, ties by generator id and
/// piece index. Only non-negative output is stacked, so import ranges of
/// bidding plants are left out.
pub fn merit_order(net: &NetworkModel) -> Vec<MeritEntry> {
    let mut stack: Vec<MeritEntry> = net
        .generators
        .iter()
        .flat_map(|g| {
            let lo = g.p_min.max(0.0);
            let hi = g.p_max.max(lo);
            (0..g.cost.len()).filter_map(move |i| {
                let (a, b) = active_range(g, i, lo, hi);
                (b > a).then(|| MeritEntry {
                    generator: g.id.clone(),
                    piece: i,
                    alpha: g.cost[i].alpha,
                    width: b - a,
                })
            })
        })
        .collect();
    stack.sort_by(|x, y| {
        x.alpha
            .total_cmp(&y.alpha)
            .then_with(|| x.generator.cmp(&y.generator))
            .then_with(|| x.piece.cmp(&y.piece))
    });
    stack
}

/// Writes `rank,generator,alpha_usd_per_mwh,width_mw`.
pub fn write_merit_order<W: Write>(stack: &[MeritEntry], writer: W) -> Result<()> {
    let io = |e: csv::Error| Error::io("<merit order>", e.into());
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["rank", "generator", "alpha_usd_per_mwh", "width_mw"])
        .map_err(io)?;
    for (k, e) in stack.iter().enumerate() {
        wtr.write_record([(k + 1).to_string(), e.generator.clone(), e.alpha.to_string(), e.width.to_string()])
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<merit order>", e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub label: String,
    pub kind: RunKind,
    pub network_mode: String,
    pub hours: usize,
    /// $
    pub total_cost_of_generation: f64,
    /// $/MWh
    pub cost_per_load: f64,
    /// MWh
    pub total_system_load: f64,
    /// MWh
    pub total_curtailment: f64,
    /// t CO2
    pub total_emissions: f64,
    /// kg CO2/MWh
    pub emissions_per_load: f64,
    /// $
    pub rep_profit: f64,
    /// MW
    pub rep_avg_load: f64,
    /// $/MWh
    pub rep_avg_lmp: f64,
    /// kg
    pub hydrogen_kg: f64,
    pub pass2_hours: usize,
    pub conventions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<ReportDeltas>,
}

/// Relative changes against a baseline report; `None` where the baseline is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDeltas {
    pub baseline: String,
    pub total_cost_of_generation: Option<f64>,
    pub cost_per_load: Option<f64>,
    pub total_system_load: Option<f64>,
    pub total_curtailment: Option<f64>,
    pub total_emissions: Option<f64>,
    pub emissions_per_load: Option<f64>,
    pub rep_profit: Option<f64>,
    pub rep_avg_load: Option<f64>,
    pub rep_avg_lmp: Option<f64>,
}

fn relative(value: f64, base: f64) -> Option<f64> {
    (base != 0.0).then(|| (value - base) / base.abs())
}

impl SimulationReport {
    pub fn build(label: impl Into<String>, records: &[HourRecord], scn: &Scenario) -> Result<Self> {
        let rep = scn
            .network
            .generator_index(&scn.rep.wind_generator)
            .ok_or_else(|| Error::Validation(vec![format!("unknown REP generator '{}'", scn.rep.wind_generator)]))?;
        let kind = records.first().map_or(RunKind::Base, |r| r.kind);
        let n = records.len().max(1) as f64;
        let total_cost_of_generation = cost_of_generation(records, rep);
        let total_system_load = served_load(records);
        let (total_emissions, emissions_per_load) = emissions(records, &scn.network.generators, &scn.emission_factors)?;
        Ok(Self {
            label: label.into(),
            kind,
            network_mode: scn.network_mode.to_string(),
            hours: records.len(),
            total_cost_of_generation,
            cost_per_load: if total_system_load > 0.0 {
                total_cost_of_generation / total_system_load
            } else {
                0.0
            },
            total_system_load,
            total_curtailment: curtailment(records, scn),
            total_emissions,
            emissions_per_load,
            rep_profit: rep_profit(records, &scn.rep.hydrogen_price),
            rep_avg_load: records.iter().map(|r| r.rep_electrolyzer_load).sum::<f64>() / n,
            rep_avg_lmp: records.iter().map(|r| r.lmp_rep_node).sum::<f64>() / n,
            hydrogen_kg: records.iter().map(|r| r.hydrogen_output).sum(),
            pass2_hours: records.iter().filter(|r| r.pass2).count(),
            conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
            deltas: None,
        })
    }

    pub fn deltas_against(&self, baseline: &SimulationReport) -> ReportDeltas {
        ReportDeltas {
            baseline: baseline.label.clone(),
            total_cost_of_generation: relative(self.total_cost_of_generation, baseline.total_cost_of_generation),
            cost_per_load: relative(self.cost_per_load, baseline.cost_per_load),
            total_system_load: relative(self.total_system_load, baseline.total_system_load),
            total_curtailment: relative(self.total_curtailment, baseline.total_curtailment),
            total_emissions: relative(self.total_emissions, baseline.total_emissions),
            emissions_per_load: relative(self.emissions_per_load, baseline.emissions_per_load),
            rep_profit: relative(self.rep_profit, baseline.rep_profit),
            rep_avg_load: relative(self.rep_avg_load, baseline.rep_avg_load),
            rep_avg_lmp: relative(self.rep_avg_lmp, baseline.rep_avg_lmp),
        }
    }

    pub fn with_baseline(mut self, baseline: &SimulationReport) -> Self {
        self.deltas = Some(self.deltas_against(baseline));
        self
    }
}
