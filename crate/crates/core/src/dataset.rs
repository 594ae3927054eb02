//! Grid dataset CSV files.
//!
//! | file                   | columns                                              |
//! |------------------------|------------------------------------------------------|
//! | `buses.csv`            | `id,region,is_reference`                             |
//! | `branches.csv`         | `from,to,x_pu,limit_mw[,controllable]`               |
//! | `generators.csv`       | `id,bus,fuel,p_min_mw,p_max_mw,cost`                 |
//! | `loads.csv`            | `hour,bus,mw`                                        |
//! | `res_availability.csv` | `hour,generator_id,available_mw`                     |
//!
//! Generator costs are written `alpha1;beta1|alpha2;beta2|...` in $/MWh and $.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opf::{Branch, Bus, CostPiece, Generator, NetworkModel};

pub const BUSES_CSV: &str = "buses.csv";
pub const BRANCHES_CSV: &str = "branches.csv";
pub const GENERATORS_CSV: &str = "generators.csv";
pub const LOADS_CSV: &str = "loads.csv";
pub const RES_CSV: &str = "res_availability.csv";

/// Reads every row of a headed CSV file, keeping the 1-based line number.
pub(crate) fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row = rec
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        out.push((line, row));
    }
    Ok(out)
}

pub(crate) fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let io = |e: csv::Error| Error::io(path, e.into());
    let mut wtr = csv::Writer::from_path(path).map_err(io)?;
    for row in rows {
        wtr.serialize(row).map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct BusRow {
    id: String,
    #[serde(default)]
    region: String,
    #[serde(default, deserialize_with = "flag")]
    is_reference: bool,
}

fn flag<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
    let s = String::deserialize(d)?;
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" | "" => Ok(false),
        other => Err(serde::de::Error::custom(format!("not a boolean: '{other}'"))),
    }
}

#[derive(Serialize, Deserialize)]
struct BranchRow {
    from: String,
    to: String,
    x_pu: f64,
    limit_mw: f64,
    #[serde(default, deserialize_with = "flag")]
    controllable: bool,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRow {
    id: String,
    bus: String,
    fuel: String,
    p_min_mw: f64,
    p_max_mw: f64,
    cost: String,
}

#[derive(Serialize, Deserialize)]
struct LoadRow {
    hour: usize,
    bus: String,
    mw: f64,
}

#[derive(Serialize, Deserialize)]
struct ResRow {
    hour: usize,
    generator_id: String,
    available_mw: f64,
}

/// Parses `alpha1;beta1|alpha2;beta2|...`.
pub fn parse_cost_pieces(s: &str) -> std::result::Result<Vec<CostPiece>, String> {
    s.split('|')
        .map(|piece| {
            let (a, b) = piece
                .split_once(';')
                .ok_or_else(|| format!("cost piece '{piece}' is not 'alpha;beta'"))?;
            let alpha = a.trim().parse::<f64>().map_err(|e| format!("alpha '{a}': {e}"))?;
            let beta = b.trim().parse::<f64>().map_err(|e| format!("beta '{b}': {e}"))?;
            Ok(CostPiece { alpha, beta })
        })
        .collect()
}

pub fn format_cost_pieces(pieces: &[CostPiece]) -> String {
    pieces
        .iter()
        .map(|c| format!("{};{}", c.alpha, c.beta))
        .collect::<Vec<_>>()
        .join("|")
}

/// Reads `buses.csv`, `branches.csv` and `generators.csv` from `dir`.
pub fn read_network(dir: &Path) -> Result<NetworkModel> {
    let bus_path = dir.join(BUSES_CSV);
    let bus_rows: Vec<(usize, BusRow)> = read_rows(&bus_path)?;
    let refs: Vec<&str> = bus_rows
        .iter()
        .filter(|(_, r)| r.is_reference)
        .map(|(_, r)| r.id.as_str())
        .collect();
    let reference = match refs.as_slice() {
        [one] => one.to_string(),
        [] => return Err(Error::Model(format!("{}: no reference bus marked", bus_path.display()))),
        many => {
            return Err(Error::Model(format!(
                "{}: several reference buses marked: {}",
                bus_path.display(),
                many.join(", ")
            )))
        }
    };
    let buses = bus_rows
        .into_iter()
        .map(|(_, r)| Bus {
            id: r.id,
            region: (!r.region.is_empty()).then_some(r.region),
        })
        .collect();

    let branches = read_rows::<BranchRow>(&dir.join(BRANCHES_CSV))?
        .into_iter()
        .map(|(_, r)| Branch {
            from: r.from,
            to: r.to,
            x_pu: r.x_pu,
            limit_mw: r.limit_mw,
            controllable: r.controllable,
        })
        .collect();

    let gen_path = dir.join(GENERATORS_CSV);
    let generators = read_rows::<GeneratorRow>(&gen_path)?
        .into_iter()
        .map(|(line, r)| {
            let cost = parse_cost_pieces(&r.cost).map_err(|m| Error::parse(&gen_path, line, m))?;
            Ok(Generator {
                id: r.id,
                bus: r.bus,
                fuel: r.fuel.to_ascii_lowercase(),
                p_min: r.p_min_mw,
                p_max: r.p_max_mw,
                cost,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    NetworkModel::new(buses, reference, branches, generators)
}

pub fn write_network(dir: &Path, net: &NetworkModel) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rows(
        &dir.join(BUSES_CSV),
        net.buses.iter().map(|b| BusRow {
            id: b.id.clone(),
            region: b.region.clone().unwrap_or_default(),
            is_reference: b.id == net.reference,
        }),
    )?;
    write_rows(
        &dir.join(BRANCHES_CSV),
        net.branches.iter().map(|b| BranchRow {
            from: b.from.clone(),
            to: b.to.clone(),
            x_pu: b.x_pu,
            limit_mw: b.limit_mw,
            controllable: b.controllable,
        }),
    )?;
    write_rows(
        &dir.join(GENERATORS_CSV),
        net.generators.iter().map(|g| GeneratorRow {
            id: g.id.clone(),
            bus: g.bus.clone(),
            fuel: g.fuel.clone(),
            p_min_mw: g.p_min,
            p_max_mw: g.p_max,
            cost: format_cost_pieces(&g.cost),
        }),
    )
}

/// Hourly loads and renewable availability.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeseries {
    /// `loads[hour][bus]` in MW, buses in network order.
    pub loads: Vec<Vec<f64>>,
    /// Available MW per renewable generator per hour.
    pub res_available: BTreeMap<String, Vec<f64>>,
}

impl Timeseries {
    pub fn hours(&self) -> usize {
        self.loads.len()
    }

    pub fn truncate(&mut self, hours: usize) {
        self.loads.truncate(hours);
        for v in self.res_available.values_mut() {
            v.truncate(hours);
        }
    }

    /// Availability of `generator` in `hour`, if it has a profile.
    pub fn available(&self, generator: &str, hour: usize) -> Option<f64> {
        self.res_available.get(generator).and_then(|v| v.get(hour)).copied()
    }
}

/// Reads `loads.csv` and `res_availability.csv`. Dangling ids and gaps in
/// the hour index are collected and reported together.
pub fn read_timeseries(dir: &Path, net: &NetworkModel) -> Result<Timeseries> {
    let load_rows: Vec<(usize, LoadRow)> = read_rows(&dir.join(LOADS_CSV))?;
    let res_rows: Vec<(usize, ResRow)> = read_rows(&dir.join(RES_CSV))?;
    let mut problems = Vec::new();

    let hours = load_rows
        .iter()
        .map(|(_, r)| r.hour + 1)
        .chain(res_rows.iter().map(|(_, r)| r.hour + 1))
        .max()
        .unwrap_or(0);
    let mut loads = vec![vec![0.0; net.buses.len()]; hours];
    let mut seen_hour = vec![false; hours];
    for (line, r) in &load_rows {
        seen_hour[r.hour] = true;
        match net.bus_index(&r.bus) {
            Some(b) => loads[r.hour][b] += r.mw,
            None => problems.push(format!("{LOADS_CSV}:{line}: unknown bus '{}'", r.bus)),
        }
        if !(r.mw >= 0.0) {
            problems.push(format!("{LOADS_CSV}:{line}: negative load {}", r.mw));
        }
    }
    if let Some(h) = seen_hour.iter().position(|s| !s) {
        problems.push(format!("{LOADS_CSV}: no load rows for hour {h}; hours must be contiguous from 0"));
    }

    let mut res: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
    for (line, r) in &res_rows {
        if net.generator_index(&r.generator_id).is_none() {
            problems.push(format!("{RES_CSV}:{line}: unknown generator '{}'", r.generator_id));
            continue;
        }
        if !(r.available_mw >= 0.0) {
            problems.push(format!("{RES_CSV}:{line}: negative availability {}", r.available_mw));
        }
        res.entry(r.generator_id.clone()).or_insert_with(|| vec![None; hours])[r.hour] = Some(r.available_mw);
    }
    let mut res_available = BTreeMap::new();
    for (id, series) in res {
        match series.iter().position(Option::is_none) {
            Some(h) => problems.push(format!("{RES_CSV}: generator '{id}' has no availability for hour {h}")),
            None => {
                res_available.insert(id, series.into_iter().flatten().collect());
            }
        }
    }

    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok(Timeseries { loads, res_available })
}

pub fn write_timeseries(dir: &Path, net: &NetworkModel, ts: &Timeseries) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_rows(
        &dir.join(LOADS_CSV),
        ts.loads.iter().enumerate().flat_map(|(h, row)| {
            row.iter().zip(&net.buses).map(move |(&mw, b)| LoadRow {
                hour: h,
                bus: b.id.clone(),
                mw,
            })
        }),
    )?;
    write_rows(
        &dir.join(RES_CSV),
        (0..ts.hours()).flat_map(|h| {
            ts.res_available.iter().map(move |(id, v)| ResRow {
                hour: h,
                generator_id: id.clone(),
                available_mw: v[h],
            })
        }),
    )
}
