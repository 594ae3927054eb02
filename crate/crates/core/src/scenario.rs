//! Scenario configuration and loading.
//!
//! A scenario is a TOML file with four sections. Relative paths are resolved
//! against the directory holding the configuration file.
//!
//! ```toml
//! [scenario]
//! name = "six_bus"
//! hours = 168                    # optional truncation of the horizon
//!
//! [rep]
//! wind_generator = "W1"          # renewable generator owned by the plant
//! representation = "bidder"      # or "fixed"
//! hydrogen_price = 1.5           # $/kg
//! hydrogen_price_series = "h2_price.csv"   # optional, columns hour,usd_per_kg
//! electrolyzer_curve = "hydrogen_curve.csv"
//! electrolyzer_capacity_mw = 500 # sampled curve is rescaled to this rating
//! pieces = 4                     # uniform breakpoints, or:
//! # breakpoints_mw = [0, 100, 250, 500]
//! # electrolyzer_fitted = "fitted.csv"    # a fitted curve, used as-is
//!
//! [network]
//! mode = "nodal"                 # nodal | zonal | copper
//! # interregional = [{ from = "1", to = "2", limit_mw = 1175 }]
//!
//! [emissions]                    # t CO2 per MWh by fuel tag
//! coal = 0.9606
//! ```
//!
//! Emission factors missing from `[emissions]` fall back to
//! [`default_emission_factors`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{self, read_rows, write_rows, Timeseries};
use crate::error::{Error, Result};
use crate::h2curve::{fit_piecewise_concave, uniform_breakpoints, PiecewiseConcaveCurve, SampledHydrogenCurve};
use crate::opf::{NetworkMode, NetworkModel};

pub const DEFAULT_PIECES: usize = 4;
pub const FIXED_BID_PRICE: f64 = 10_000.0;

/// Default emission factors in t CO2/MWh.
pub fn default_emission_factors() -> BTreeMap<String, f64> {
    [
        ("coal", 0.9606),
        ("gas", 0.6042),
        ("oil", 0.7434),
        ("nuclear", 0.0),
        ("wind", 0.0),
        ("solar", 0.0),
        ("hydro", 0.0),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    #[serde(alias = "market_bidder", alias = "marketbidder")]
    Bidder,
    #[serde(alias = "fixed_consumption", alias = "fixedconsumption")]
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HydrogenPrice {
    Constant(f64),
    Hourly(Vec<f64>),
}

impl HydrogenPrice {
    /// $/kg in `hour`; an hourly series repeats its last value past its end.
    pub fn at(&self, hour: usize) -> f64 {
        match self {
            HydrogenPrice::Constant(p) => *p,
            HydrogenPrice::Hourly(v) => v.get(hour).or(v.last()).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepSpec {
    pub wind_generator: String,
    pub electrolyzer: PiecewiseConcaveCurve,
    pub hydrogen_price: HydrogenPrice,
    pub representation: Representation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: NetworkModel,
    pub timeseries: Timeseries,
    pub rep: RepSpec,
    pub network_mode: NetworkMode,
    /// Inter-regional capacity overrides for the zonal model.
    pub interregional: BTreeMap<(String, String), f64>,
    /// t CO2/MWh by fuel tag.
    pub emission_factors: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn horizon(&self) -> usize {
        self.timeseries.hours()
    }

    /// Bus of the plant's renewable generator.
    pub fn rep_bus(&self) -> &str {
        &self
            .network
            .generator(&self.rep.wind_generator)
            .expect("validated scenario")
            .bus
    }

    pub fn rep_available(&self, hour: usize) -> f64 {
        self.timeseries
            .available(&self.rep.wind_generator, hour)
            .expect("validated scenario")
    }

    /// Truncates the horizon to at most `hours`.
    pub fn truncate(&mut self, hours: usize) {
        self.timeseries.truncate(hours);
        if let HydrogenPrice::Hourly(v) = &mut self.rep.hydrogen_price {
            v.truncate(hours);
        }
    }

    /// Writes the scenario as a configuration plus data directory that
    /// [`load_scenario`] reads back to an identical value.
    pub fn export(&self, dir: &Path) -> Result<PathBuf> {
        dataset::write_network(dir, &self.network)?;
        dataset::write_timeseries(dir, &self.network, &self.timeseries)?;
        let fitted = dir.join("electrolyzer_fitted.csv");
        let file = fs::File::create(&fitted).map_err(|e| Error::io(&fitted, e))?;
        self.rep.electrolyzer.write_csv(file)?;

        let (price, series) = match &self.rep.hydrogen_price {
            HydrogenPrice::Constant(p) => (*p, None),
            HydrogenPrice::Hourly(v) => {
                let path = dir.join("hydrogen_price.csv");
                write_rows(
                    &path,
                    v.iter().enumerate().map(|(hour, &usd_per_kg)| PriceRow { hour, usd_per_kg }),
                )?;
                (v.first().copied().unwrap_or(0.0), Some("hydrogen_price.csv".to_string()))
            }
        };
        let config = ConfigFile {
            scenario: ScenarioSection {
                name: self.name.clone(),
                hours: None,
            },
            rep: RepSection {
                wind_generator: self.rep.wind_generator.clone(),
                representation: self.rep.representation,
                hydrogen_price: price,
                hydrogen_price_series: series,
                electrolyzer_curve: None,
                electrolyzer_capacity_mw: None,
                pieces: None,
                breakpoints_mw: None,
                electrolyzer_fitted: Some("electrolyzer_fitted.csv".into()),
            },
            network: NetworkSection {
                mode: self.network_mode,
                interregional: self
                    .interregional
                    .iter()
                    .map(|((from, to), &limit_mw)| Interregional {
                        from: from.clone(),
                        to: to.clone(),
                        limit_mw,
                    })
                    .collect(),
            },
            emissions: self.emission_factors.clone(),
        };
        let path = dir.join("scenario.toml");
        let text = toml::to_string(&config).map_err(|e| Error::Model(e.to_string()))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: ScenarioSection,
    rep: RepSection,
    #[serde(default)]
    network: NetworkSection,
    #[serde(default)]
    emissions: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hours: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepSection {
    wind_generator: String,
    representation: Representation,
    hydrogen_price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hydrogen_price_series: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    electrolyzer_curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    electrolyzer_capacity_mw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoints_mw: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    electrolyzer_fitted: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSection {
    mode: NetworkMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    interregional: Vec<Interregional>,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            mode: NetworkMode::Nodal,
            interregional: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Interregional {
    from: String,
    to: String,
    limit_mw: f64,
}

#[derive(Serialize, Deserialize)]
struct PriceRow {
    hour: usize,
    usd_per_kg: f64,
}

#[derive(Deserialize)]
struct FittedRow {
    slope_kg_per_mwh: f64,
    intercept_kg_per_h: f64,
    p_lo_mw: f64,
    p_hi_mw: f64,
}

/// Reads a fitted curve written by [`PiecewiseConcaveCurve::write_csv`].
pub fn read_fitted_curve(path: &Path) -> Result<PiecewiseConcaveCurve> {
    let rows: Vec<(usize, FittedRow)> = read_rows(path)?;
    if rows.is_empty() {
        return Ok(PiecewiseConcaveCurve::zero());
    }
    let mut breakpoints = vec![rows[0].1.p_lo_mw];
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    for (line, r) in &rows {
        if r.p_lo_mw != *breakpoints.last().expect("non-empty") {
            return Err(Error::parse(path, *line, "pieces are not contiguous"));
        }
        breakpoints.push(r.p_hi_mw);
        slopes.push(r.slope_kg_per_mwh);
        intercepts.push(r.intercept_kg_per_h);
    }
    PiecewiseConcaveCurve::new(slopes, intercepts, breakpoints).map_err(|e| Error::parse(path, 0, e.to_string()))
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn electrolyzer_from(section: &RepSection, base: &Path) -> Result<PiecewiseConcaveCurve> {
    if let Some(fitted) = &section.electrolyzer_fitted {
        return read_fitted_curve(&resolve(base, fitted));
    }
    if section.electrolyzer_capacity_mw == Some(0.0) {
        return Ok(PiecewiseConcaveCurve::zero());
    }
    let curve_file = section.electrolyzer_curve.as_deref().ok_or_else(|| {
        Error::Validation(vec!["[rep] needs electrolyzer_curve or electrolyzer_fitted".into()])
    })?;
    let mut sampled = SampledHydrogenCurve::from_csv_path(&resolve(base, curve_file))?;
    if let Some(cap) = section.electrolyzer_capacity_mw {
        sampled = sampled.scaled_to(cap)?;
    }
    let breakpoints = match &section.breakpoints_mw {
        Some(b) => b.clone(),
        None => uniform_breakpoints(sampled.capacity(), section.pieces.unwrap_or(DEFAULT_PIECES)),
    };
    fit_piecewise_concave(&sampled, &breakpoints)
}

/// Loads and validates a scenario from a configuration file and a data
/// directory holding the grid CSVs.
pub fn load_scenario(config_path: &Path, data_dir: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(config_path).map_err(|e| Error::io(config_path, e))?;
    let config: ConfigFile = toml::from_str(&text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start].bytes().filter(|&b| b == b'\n').count() + 1)
            .unwrap_or(0);
        Error::parse(config_path, line, e.message().to_string())
    })?;
    let base = config_path.parent().unwrap_or(Path::new("."));

    let network = dataset::read_network(data_dir)?;
    let timeseries = dataset::read_timeseries(data_dir, &network)?;

    let mut problems = Vec::new();
    let rep = &config.rep;
    match network.generator(&rep.wind_generator) {
        None => problems.push(format!("REP wind generator '{}' does not exist", rep.wind_generator)),
        Some(_) if !timeseries.res_available.contains_key(&rep.wind_generator) => problems.push(format!(
            "REP wind generator '{}' has no renewable availability data",
            rep.wind_generator
        )),
        Some(_) => {}
    }
    if !(rep.hydrogen_price >= 0.0) {
        problems.push(format!("hydrogen_price must be non-negative, got {}", rep.hydrogen_price));
    }
    for link in &config.network.interregional {
        for region in [&link.from, &link.to] {
            if !network.buses.iter().any(|b| b.region.as_ref() == Some(region)) {
                problems.push(format!("interregional capacity names unknown region '{region}'"));
            }
        }
    }
    let hydrogen_price = match &rep.hydrogen_price_series {
        None => HydrogenPrice::Constant(rep.hydrogen_price),
        Some(file) => {
            let path = resolve(base, file);
            let rows: Vec<(usize, PriceRow)> = read_rows(&path)?;
            let mut series = vec![None; rows.iter().map(|(_, r)| r.hour + 1).max().unwrap_or(0)];
            for (line, r) in &rows {
                if !(r.usd_per_kg >= 0.0) {
                    problems.push(format!("{}:{line}: negative hydrogen price", path.display()));
                }
                series[r.hour] = Some(r.usd_per_kg);
            }
            if series.iter().any(Option::is_none) {
                problems.push(format!("{}: hours must be contiguous from 0", path.display()));
            }
            HydrogenPrice::Hourly(series.into_iter().flatten().collect())
        }
    };
    let electrolyzer = match electrolyzer_from(rep, base) {
        Ok(c) => Some(c),
        Err(Error::Validation(mut v)) => {
            problems.append(&mut v);
            None
        }
        Err(e) => return Err(e),
    };
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }

    let mut emission_factors = default_emission_factors();
    for (fuel, f) in config.emissions {
        emission_factors.insert(fuel.to_ascii_lowercase(), f);
    }
    let mut scn = Scenario {
        name: config.scenario.name,
        network,
        timeseries,
        rep: RepSpec {
            wind_generator: rep.wind_generator.clone(),
            electrolyzer: electrolyzer.expect("checked above"),
            hydrogen_price,
            representation: rep.representation,
        },
        network_mode: config.network.mode,
        interregional: config
            .network
            .interregional
            .into_iter()
            .map(|l| ((l.from, l.to), l.limit_mw))
            .collect(),
        emission_factors,
    };
    if let Some(h) = config.scenario.hours {
        scn.truncate(h);
    }
    Ok(scn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn price_lookup() {
        assert_eq!(HydrogenPrice::Constant(1.5).at(99), 1.5);
        let h = HydrogenPrice::Hourly(vec![1.0, 2.0]);
        assert_eq!(h.at(1), 2.0);
        assert_eq!(h.at(5), 2.0);
    }

    #[test]
    fn defaults() {
        let f = default_emission_factors();
        assert_eq!(f["coal"], 0.9606);
        assert_eq!(f["gas"], 0.6042);
        assert_eq!(f["oil"], 0.7434);
        assert_eq!(f["nuclear"], 0.0);
    }
}
