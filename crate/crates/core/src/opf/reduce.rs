//! Zonal and copper-plate network approximations.
//!
//! The zonal model keeps one bus per region and one equivalent branch per
//! connected region pair, so only inter-regional limits remain. Equivalent
//! branches are controllable: their flows are bounded by the aggregate limit
//! but not tied to angles. Angle coupling on a loop of regions would add a
//! loop-flow constraint the nodal network does not have, and the zonal model
//! would no longer be a relaxation of it. Their nominal reactance is 1.0 pu.
//! The copper-plate model drops the network entirely.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::network::{Branch, Bus, NetworkModel};
use crate::error::{Error, Result};

pub const ZONAL_REACTANCE_PU: f64 = 1.0;
pub const COPPER_PLATE_BUS: &str = "system";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkMode {
    Nodal,
    Zonal,
    #[serde(alias = "copper", alias = "copper_plate", alias = "copper-plate")]
    CopperPlate,
}

impl fmt::Display for NetworkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            NetworkMode::Nodal => "nodal",
            NetworkMode::Zonal => "zonal",
            NetworkMode::CopperPlate => "copper",
        })
    }
}

impl FromStr for NetworkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nodal" => Ok(NetworkMode::Nodal),
            "zonal" => Ok(NetworkMode::Zonal),
            "copper" | "copperplate" | "copper_plate" | "copper-plate" => Ok(NetworkMode::CopperPlate),
            other => Err(Error::Domain(format!("unknown network mode '{other}'"))),
        }
    }
}

/// A reduced network and where each original bus went.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub network: NetworkModel,
    /// Reduced bus index for every original bus, in original order.
    pub bus_map: Vec<usize>,
}

impl Reduction {
    fn identity(net: &NetworkModel) -> Self {
        Self {
            network: net.clone(),
            bus_map: (0..net.buses.len()).collect(),
        }
    }

    /// Sums original per-bus loads onto the reduced buses.
    pub fn aggregate_loads(&self, loads: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.network.buses.len()];
        for (k, &d) in loads.iter().enumerate() {
            out[self.bus_map[k]] += d;
        }
        out
    }

    /// Reduced bus hosting original bus `bus`.
    pub fn reduced_bus(&self, original: &NetworkModel, bus: &str) -> Option<&str> {
        original
            .bus_index(bus)
            .map(|k| self.network.buses[self.bus_map[k]].id.as_str())
    }
}

/// Reduces `net`, computing inter-regional capacities as the summed limits of
/// the branches crossing each region pair.
pub fn reduce_network(net: &NetworkModel, mode: NetworkMode) -> Result<Reduction> {
    reduce_network_with(net, mode, &BTreeMap::new())
}

/// As [`reduce_network`], with explicit capacities for some region pairs.
/// Keys are unordered pairs; either orientation is accepted.
pub fn reduce_network_with(
    net: &NetworkModel,
    mode: NetworkMode,
    capacities: &BTreeMap<(String, String), f64>,
) -> Result<Reduction> {
    match mode {
        NetworkMode::Nodal => Ok(Reduction::identity(net)),
        NetworkMode::CopperPlate => Ok(copper_plate(net)),
        NetworkMode::Zonal => zonal(net, capacities),
    }
}

fn copper_plate(net: &NetworkModel) -> Reduction {
    let mut generators = net.generators.clone();
    for g in &mut generators {
        g.bus = COPPER_PLATE_BUS.to_string();
    }
    Reduction {
        network: NetworkModel {
            buses: vec![Bus {
                id: COPPER_PLATE_BUS.to_string(),
                region: None,
            }],
            reference: COPPER_PLATE_BUS.to_string(),
            branches: Vec::new(),
            generators,
        },
        bus_map: vec![0; net.buses.len()],
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn zonal(net: &NetworkModel, capacities: &BTreeMap<(String, String), f64>) -> Result<Reduction> {
    let unlabeled: Vec<&str> = net
        .buses
        .iter()
        .filter(|b| b.region.is_none())
        .map(|b| b.id.as_str())
        .collect();
    if !unlabeled.is_empty() {
        return Err(Error::Model(format!(
            "zonal reduction needs region labels; missing for buses {}",
            unlabeled.join(", ")
        )));
    }
    let region_of = |bus: &str| -> &str {
        net.buses
            .iter()
            .find(|b| b.id == bus)
            .and_then(|b| b.region.as_deref())
            .expect("validated bus")
    };

    let regions: Vec<String> = {
        let mut r: Vec<String> = net.buses.iter().filter_map(|b| b.region.clone()).collect();
        r.sort();
        r.dedup();
        r
    };
    let index = |region: &str| regions.iter().position(|r| r == region).expect("known region");
    let bus_map = net
        .buses
        .iter()
        .map(|b| index(b.region.as_deref().expect("labeled")))
        .collect();

    let mut pairs: BTreeMap<(String, String), f64> = BTreeMap::new();
    for br in &net.branches {
        let (ra, rb) = (region_of(&br.from), region_of(&br.to));
        if ra != rb {
            *pairs.entry(ordered(ra, rb)).or_insert(0.0) += br.limit_mw;
        }
    }
    for ((a, b), &cap) in capacities {
        pairs.insert(ordered(a, b), cap);
    }

    let branches = pairs
        .into_iter()
        .map(|((from, to), limit_mw)| Branch {
            from,
            to,
            x_pu: ZONAL_REACTANCE_PU,
            limit_mw,
            controllable: true,
        })
        .collect();
    let mut generators = net.generators.clone();
    for g in &mut generators {
        g.bus = region_of(&g.bus).to_string();
    }
    let network = NetworkModel::new(
        regions
            .iter()
            .map(|r| Bus {
                id: r.clone(),
                region: Some(r.clone()),
            })
            .collect(),
        region_of(&net.reference),
        branches,
        generators,
    )?;
    Ok(Reduction { network, bus_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opf::network::{CostPiece, Generator};

    /// Inter-regional branches of an RTS-GMLC-like three-area system plus a
    /// few intra-regional ones.
    fn three_area() -> NetworkModel {
        let buses = ["101", "107", "113", "121", "123", "203", "215", "217", "223", "318", "325"]
            .iter()
            .map(|id| Bus {
                id: id.to_string(),
                region: Some(id[..1].to_string()),
            })
            .collect();
        let br = |f: &str, t: &str, l: f64| Branch::new(f, t, 0.05, l);
        let branches = vec![
            br("101", "107", 175.0),
            br("107", "113", 500.0),
            br("113", "121", 500.0),
            br("121", "123", 500.0),
            br("203", "215", 500.0),
            br("215", "217", 500.0),
            br("217", "223", 500.0),
            br("318", "325", 500.0),
            br("107", "203", 175.0),
            br("113", "215", 500.0),
            br("123", "217", 500.0),
            br("121", "325", 500.0),
            br("223", "318", 500.0),
        ];
        let generators = vec![Generator {
            id: "g".into(),
            bus: "215".into(),
            fuel: "coal".into(),
            p_min: 0.0,
            p_max: 100.0,
            cost: vec![CostPiece::new(20.0, 0.0)],
        }];
        NetworkModel::new(buses, "101", branches, generators).unwrap()
    }

    #[test]
    fn zonal_capacities() {
        let net = three_area();
        let red = reduce_network(&net, NetworkMode::Zonal).unwrap();
        let limits: Vec<_> = red
            .network
            .branches
            .iter()
            .map(|b| (b.from.as_str(), b.to.as_str(), b.limit_mw))
            .collect();
        assert_eq!(limits, vec![("1", "2", 1175.0), ("1", "3", 500.0), ("2", "3", 500.0)]);
        assert!(red.network.branches.iter().all(|b| b.x_pu == ZONAL_REACTANCE_PU && b.controllable));
        assert_eq!(red.network.reference, "1");
        assert_eq!(red.network.generators[0].bus, "2");
        assert_eq!(red.reduced_bus(&net, "318"), Some("3"));
    }

    #[test]
    fn zonal_overrides() {
        let mut caps = BTreeMap::new();
        caps.insert(("3".to_string(), "1".to_string()), 42.0);
        let red = reduce_network_with(&three_area(), NetworkMode::Zonal, &caps).unwrap();
        assert_eq!(red.network.branches[1].limit_mw, 42.0);
    }

    #[test]
    fn zonal_needs_labels() {
        let mut net = three_area();
        net.buses[3].region = None;
        assert!(matches!(reduce_network(&net, NetworkMode::Zonal), Err(Error::Model(_))));
    }

    #[test]
    fn copper_plate_preserves_load() {
        let net = three_area();
        let red = reduce_network(&net, NetworkMode::CopperPlate).unwrap();
        assert_eq!(red.network.buses.len(), 1);
        assert!(red.network.branches.is_empty());
        let loads: Vec<f64> = (0..net.buses.len()).map(|k| k as f64 * 1.5).collect();
        let agg = red.aggregate_loads(&loads);
        assert_eq!(agg, vec![loads.iter().sum::<f64>()]);
        red.network.validate().unwrap();
    }

    #[test]
    fn nodal_is_identity() {
        let net = three_area();
        let red = reduce_network(&net, NetworkMode::Nodal).unwrap();
        assert_eq!(red.network, net);
        assert_eq!(red.aggregate_loads(&[1.0; 11]), vec![1.0; 11]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("copper".parse::<NetworkMode>().unwrap(), NetworkMode::CopperPlate);
        assert_eq!("Zonal".parse::<NetworkMode>().unwrap(), NetworkMode::Zonal);
        assert!("ac".parse::<NetworkMode>().is_err());
    }
}
