//! Best-effort converter from the RTS-GMLC `SourceData` layout.
//!
//! Reads `bus.csv`, `branch.csv` and `gen.csv` from the source directory and,
//! from the time-series directory, `Load/DAY_AHEAD_regional_Load.csv` plus any
//! `*/DAY_AHEAD_*.csv` whose columns name generators (wind, PV, RTPV, hydro).
//!
//! Simplifications:
//! * regional load is split over the region's buses by their `MW Load` share;
//! * thermal cost lines come from `HR_avg_0`, `HR_incr_*`, the fuel price and
//!   `VOM`; incremental slopes are forced non-decreasing so the cost is convex;
//! * `PMin` is dropped (no unit commitment), storage and synchronous
//!   condensers are skipped;
//! * renewables with a profile get availability from it and zero cost.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use csv::StringRecord;

use crate::dataset::Timeseries;
use crate::error::{Error, Result};
use crate::opf::{Branch, Bus, CostPiece, Generator, NetworkModel};

/// Fuel tag used by this crate for an RTS-GMLC `Fuel` value; `None` to skip.
pub fn map_fuel(rts: &str) -> Option<&'static str> {
    match rts.trim().to_ascii_lowercase().as_str() {
        "ng" | "gas" => Some("gas"),
        "coal" => Some("coal"),
        "oil" => Some("oil"),
        "nuclear" => Some("nuclear"),
        "wind" => Some("wind"),
        "solar" => Some("solar"),
        "hydro" => Some("hydro"),
        _ => None,
    }
}

struct Table {
    path: PathBuf,
    headers: StringRecord,
    rows: Vec<(usize, StringRecord)>,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
        let rows = rdr
            .records()
            .enumerate()
            .map(|(k, r)| r.map(|r| (k + 2, r)).map_err(|e| Error::parse(path, k + 2, e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse(&self.path, 1, format!("missing column '{name}'")))
    }

    fn text<'r>(&self, row: &'r StringRecord, col: usize) -> &'r str {
        row.get(col).unwrap_or("").trim()
    }

    fn number(&self, line: usize, row: &StringRecord, col: usize) -> Result<f64> {
        let s = self.text(row, col);
        s.parse()
            .map_err(|_| Error::parse(&self.path, line, format!("'{s}' in column '{}' is not a number", &self.headers[col])))
    }

    fn number_or(&self, line: usize, row: &StringRecord, col: Option<usize>, default: f64) -> Result<f64> {
        match col {
            Some(c) if !self.text(row, c).is_empty() => self.number(line, row, c),
            _ => Ok(default),
        }
    }
}

/// Cost lines of a thermal unit. Costs in $/h are `HR [Btu/kWh] * p [MW] *
/// fuel price [$/MMBtu] / 1000`.
pub fn thermal_cost(
    p_max: f64,
    output_pct: &[f64],
    hr_avg_0: f64,
    hr_incr: &[f64],
    fuel_price: f64,
    vom: f64,
) -> Vec<CostPiece> {
    let p0 = output_pct.first().copied().unwrap_or(0.0) * p_max;
    let c0 = hr_avg_0 * p0 * fuel_price / 1000.0 + vom * p0;
    if hr_incr.is_empty() || p_max <= 0.0 {
        let alpha = if p0 > 0.0 { c0 / p0 } else { vom };
        return vec![CostPiece::new(alpha, 0.0)];
    }
    let mut pieces = Vec::with_capacity(hr_incr.len());
    let (mut p, mut c) = (p0, c0);
    let mut prev = f64::NEG_INFINITY;
    for (k, hr) in hr_incr.iter().enumerate() {
        let alpha = (hr * fuel_price / 1000.0 + vom).max(prev);
        pieces.push(CostPiece::new(alpha, c - alpha * p));
        let next = output_pct.get(k + 1).map_or(p_max, |f| f * p_max);
        c += alpha * (next - p);
        p = next;
        prev = alpha;
    }
    pieces
}

/// Network part of the conversion. Renewable availability and loads come from
/// [`convert_timeseries`].
pub fn convert_network(source: &Path) -> Result<(NetworkModel, BTreeMap<String, f64>)> {
    let bus = Table::read(&source.join("bus.csv"))?;
    let (id, area, kind, load) = (
        bus.column("Bus ID")?,
        bus.column("Area")?,
        bus.column("Bus Type")?,
        bus.column("MW Load")?,
    );
    let mut buses = Vec::new();
    let mut reference = None;
    let mut bus_load = BTreeMap::new();
    for (line, r) in &bus.rows {
        let b = bus.text(r, id).to_string();
        if bus.text(r, kind).eq_ignore_ascii_case("ref") {
            reference.get_or_insert_with(|| b.clone());
        }
        bus_load.insert(b.clone(), bus.number(*line, r, load)?);
        buses.push(Bus {
            id: b,
            region: Some(bus.text(r, area).to_string()),
        });
    }
    let reference = reference
        .or_else(|| buses.first().map(|b| b.id.clone()))
        .ok_or_else(|| Error::parse(&bus.path, 1, "no buses"))?;

    let br = Table::read(&source.join("branch.csv"))?;
    let (from, to, x, rating) = (
        br.column("From Bus")?,
        br.column("To Bus")?,
        br.column("X")?,
        br.column("Cont Rating")?,
    );
    let branches = br
        .rows
        .iter()
        .map(|(line, r)| {
            Ok(Branch::new(
                br.text(r, from),
                br.text(r, to),
                br.number(*line, r, x)?,
                br.number(*line, r, rating)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let gen = Table::read(&source.join("gen.csv"))?;
    let (uid, gbus, fuel, pmax) = (
        gen.column("GEN UID")?,
        gen.column("Bus ID")?,
        gen.column("Fuel")?,
        gen.column("PMax MW")?,
    );
    let optional = |name: &str| gen.column(name).ok();
    let price = optional("Fuel Price $/MMBTU");
    let vom = optional("VOM");
    let hr0 = optional("HR_avg_0");
    let pct: Vec<usize> = (0..4).filter_map(|k| optional(&format!("Output_pct_{k}"))).collect();
    let incr: Vec<usize> = (1..4).filter_map(|k| optional(&format!("HR_incr_{k}"))).collect();
    let mut generators = Vec::new();
    for (line, r) in &gen.rows {
        let Some(tag) = map_fuel(gen.text(r, fuel)) else { continue };
        let p_max = gen.number(*line, r, pmax)?;
        if p_max <= 0.0 {
            continue;
        }
        let cost = if matches!(tag, "wind" | "solar" | "hydro") {
            vec![CostPiece::new(0.0, 0.0)]
        } else {
            let pct_v = pct
                .iter()
                .map(|&c| gen.number_or(*line, r, Some(c), f64::NAN))
                .collect::<Result<Vec<_>>>()?;
            let n = pct_v.iter().take_while(|v| v.is_finite()).count();
            let incr_v = incr
                .iter()
                .map(|&c| gen.number_or(*line, r, Some(c), f64::NAN))
                .collect::<Result<Vec<_>>>()?;
            let incr_v: Vec<f64> = incr_v.into_iter().take(n.saturating_sub(1)).take_while(|v| v.is_finite()).collect();
            thermal_cost(
                p_max,
                &pct_v[..n],
                gen.number_or(*line, r, hr0, 0.0)?,
                &incr_v,
                gen.number_or(*line, r, price, 0.0)?,
                gen.number_or(*line, r, vom, 0.0)?,
            )
        };
        generators.push(Generator {
            id: gen.text(r, uid).to_string(),
            bus: gen.text(r, gbus).to_string(),
            fuel: tag.to_string(),
            p_min: 0.0,
            p_max,
            cost,
        });
    }
    Ok((NetworkModel::new(buses, reference, branches, generators)?, bus_load))
}

fn series_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for sub in entries {
        let sub = sub.map_err(|e| Error::io(dir, e))?.path();
        if !sub.is_dir() {
            continue;
        }
        for f in fs::read_dir(&sub).map_err(|e| Error::io(&sub, e))? {
            let f = f.map_err(|e| Error::io(&sub, e))?.path();
            let name = f.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.starts_with("DAY_AHEAD_") && name.ends_with(".csv") {
                out.push(f);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Hourly loads and renewable availability, truncated to `hours` if given.
pub fn convert_timeseries(
    series_dir: &Path,
    net: &NetworkModel,
    bus_load: &BTreeMap<String, f64>,
    hours: Option<usize>,
) -> Result<Timeseries> {
    let load_path = series_dir.join("Load").join("DAY_AHEAD_regional_Load.csv");
    let load = Table::read(&load_path)?;
    let mut region_total: BTreeMap<&str, f64> = BTreeMap::new();
    for b in &net.buses {
        *region_total.entry(b.region.as_deref().unwrap_or("")).or_default() += bus_load.get(&b.id).copied().unwrap_or(0.0);
    }
    let region_cols = net
        .buses
        .iter()
        .map(|b| load.column(b.region.as_deref().unwrap_or("")))
        .collect::<Result<Vec<_>>>()?;
    let n = hours.unwrap_or(usize::MAX).min(load.rows.len());
    let mut loads = Vec::with_capacity(n);
    for (line, r) in load.rows.iter().take(n) {
        let row = net
            .buses
            .iter()
            .zip(&region_cols)
            .map(|(b, &c)| {
                let total = region_total[b.region.as_deref().unwrap_or("")];
                let share = if total > 0.0 { bus_load.get(&b.id).copied().unwrap_or(0.0) / total } else { 0.0 };
                Ok(load.number(*line, r, c)? * share)
            })
            .collect::<Result<Vec<_>>>()?;
        loads.push(row);
    }

    let mut res_available = BTreeMap::new();
    for path in series_files(series_dir)? {
        if path == load_path {
            continue;
        }
        let t = Table::read(&path)?;
        for g in &net.generators {
            let Ok(c) = t.column(&g.id) else { continue };
            let v = t
                .rows
                .iter()
                .take(n)
                .map(|(line, r)| Ok(t.number(*line, r, c)?.clamp(0.0, g.p_max)))
                .collect::<Result<Vec<_>>>()?;
            res_available.insert(g.id.clone(), v);
        }
    }
    Ok(Timeseries { loads, res_available })
}

/// Converts `source` (the `SourceData` directory) and `series_dir` (the
/// `timeseries_data_files` directory).
pub fn convert(source: &Path, series_dir: &Path, hours: Option<usize>) -> Result<(NetworkModel, Timeseries)> {
    let (net, bus_load) = convert_network(source)?;
    let ts = convert_timeseries(series_dir, &net, &bus_load, hours)?;
    Ok((net, ts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fuels() {
        assert_eq!(map_fuel("NG"), Some("gas"));
        assert_eq!(map_fuel("Storage"), None);
        assert_eq!(map_fuel("Sync_Cond"), None);
    }

    #[test]
    fn thermal_cost_lines() {
        // 100 MW unit, min 40%, HR 10000 at min, incr 8000 then 9000, $2/MMBtu
        let c = thermal_cost(100.0, &[0.4, 0.7, 1.0], 10_000.0, &[8000.0, 9000.0], 2.0, 1.0);
        assert_eq!(c.len(), 2);
        assert!((c[0].alpha - 17.0).abs() < 1e-12 && (c[1].alpha - 19.0).abs() < 1e-12);
        // passes through the cost at 40 MW: 10000*40*2/1000 + 40 = 840
        assert!((c[0].alpha * 40.0 + c[0].beta - 840.0).abs() < 1e-9);
        // continuous at 70 MW
        assert!((c[0].alpha * 70.0 + c[0].beta - (c[1].alpha * 70.0 + c[1].beta)).abs() < 1e-9);
    }

    #[test]
    fn non_convex_increments_are_flattened() {
        let c = thermal_cost(100.0, &[0.5, 1.0], 10_000.0, &[9000.0], 2.0, 0.0);
        assert_eq!(c.len(), 1);
        let c = thermal_cost(90.0, &[0.0, 0.5, 1.0], 0.0, &[9000.0, 8000.0], 1.0, 0.0);
        assert_eq!(c[0].alpha, c[1].alpha);
    }

    #[test]
    fn small_layout() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("SourceData");
        let ts = dir.path().join("timeseries_data_files");
        fs::create_dir_all(&src).unwrap();
        fs::create_dir_all(ts.join("Load")).unwrap();
        fs::create_dir_all(ts.join("WIND")).unwrap();
        fs::write(
            src.join("bus.csv"),
            "Bus ID,Bus Name,Bus Type,MW Load,Area\n101,A,Ref,30,1\n102,B,PQ,10,1\n201,C,PQ,50,2\n",
        )
        .unwrap();
        fs::write(
            src.join("branch.csv"),
            "UID,From Bus,To Bus,R,X,B,Cont Rating\nA1,101,102,0,0.1,0,175\nAB,102,201,0,0.2,0,500\n",
        )
        .unwrap();
        fs::write(
            src.join("gen.csv"),
            "GEN UID,Bus ID,Fuel,PMax MW,PMin MW,Fuel Price $/MMBTU,Output_pct_0,Output_pct_1,HR_avg_0,HR_incr_1,VOM\n\
             101_CT_1,101,NG,50,10,3,0.5,1,12000,10000,0\n\
             201_WIND_1,201,Wind,80,0,0,,,,,\n\
             102_STORAGE_1,102,Storage,50,0,0,,,,,\n",
        )
        .unwrap();
        fs::write(ts.join("Load/DAY_AHEAD_regional_Load.csv"), "Year,Month,Day,Period,1,2\n2020,1,1,1,80,40\n2020,1,1,2,60,50\n").unwrap();
        fs::write(ts.join("WIND/DAY_AHEAD_wind.csv"), "Year,Month,Day,Period,201_WIND_1\n2020,1,1,1,90\n2020,1,1,2,20\n").unwrap();

        let (net, t) = convert(&src, &ts, None).unwrap();
        assert_eq!(net.reference, "101");
        assert_eq!(net.generators.len(), 2);
        assert_eq!(net.generators[0].fuel, "gas");
        assert_eq!(net.generators[0].p_min, 0.0);
        assert_eq!(net.generators[0].cost[0].alpha, 30.0);
        assert_eq!(t.loads, vec![vec![60.0, 20.0, 40.0], vec![45.0, 15.0, 50.0]]);
        assert_eq!(t.res_available["201_WIND_1"], vec![80.0, 20.0]);
        let (_, t1) = convert(&src, &ts, Some(1)).unwrap();
        assert_eq!(t1.hours(), 1);
    }
}
