use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power base for converting per-unit reactances to MW flows.
pub const BASE_MVA: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub region: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: String,
    pub to: String,
    /// Series reactance, per unit on [`BASE_MVA`].
    pub x_pu: f64,
    pub limit_mw: f64,
    /// Flow is a free variable within the limit, not set by angle
    /// differences. Used for zonal interfaces.
    #[serde(default)]
    pub controllable: bool,
}

impl Branch {
    pub fn new(from: impl Into<String>, to: impl Into<String>, x_pu: f64, limit_mw: f64) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            x_pu,
            limit_mw,
            controllable: false,
        }
    }

    /// MW per radian of angle difference.
    pub fn susceptance_mw(&self) -> f64 {
        BASE_MVA / self.x_pu
    }
}

/// Cost line `alpha * p + beta`; a generator's cost is the maximum of its lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPiece {
    pub alpha: f64,
    pub beta: f64,
}

impl CostPiece {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub fuel: String,
    pub p_min: f64,
    pub p_max: f64,
    pub cost: Vec<CostPiece>,
}

impl Generator {
    /// Cost at dispatch `p`, the upper envelope of the cost lines.
    pub fn cost_at(&self, p: f64) -> f64 {
        self.cost
            .iter()
            .map(|c| c.alpha * p + c.beta)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub buses: Vec<Bus>,
    pub reference: String,
    pub branches: Vec<Branch>,
    pub generators: Vec<Generator>,
}

impl NetworkModel {
    pub fn new(
        buses: Vec<Bus>,
        reference: impl Into<String>,
        branches: Vec<Branch>,
        generators: Vec<Generator>,
    ) -> Result<Self> {
        let net = Self {
            buses,
            reference: reference.into(),
            branches,
            generators,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.id == id)
    }

    pub fn generator_mut(&mut self, id: &str) -> Option<&mut Generator> {
        self.generators.iter_mut().find(|g| g.id == id)
    }

    pub(crate) fn bus_lookup(&self) -> HashMap<&str, usize> {
        self.buses.iter().enumerate().map(|(k, b)| (b.id.as_str(), k)).collect()
    }

    /// Checks ids, electrical parameters, cost convexity and connectivity.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.buses.is_empty() {
            return Err(Error::Model("network has no buses".into()));
        }
        let lookup = self.bus_lookup();
        if lookup.len() != self.buses.len() {
            problems.push("duplicate bus ids".to_string());
        }
        if !lookup.contains_key(self.reference.as_str()) {
            problems.push(format!("reference bus '{}' does not exist", self.reference));
        }
        for (k, br) in self.branches.iter().enumerate() {
            for end in [&br.from, &br.to] {
                if !lookup.contains_key(end.as_str()) {
                    problems.push(format!("branch {k} ends at unknown bus '{end}'"));
                }
            }
            if br.from == br.to {
                problems.push(format!("branch {k} is a self-loop at bus '{}'", br.from));
            }
            if !(br.x_pu > 0.0) || !br.x_pu.is_finite() {
                problems.push(format!("branch {k} has non-positive reactance {}", br.x_pu));
            }
            if !(br.limit_mw > 0.0) {
                problems.push(format!("branch {k} has non-positive limit {}", br.limit_mw));
            }
        }
        let mut gen_ids = BTreeSet::new();
        for g in &self.generators {
            if !gen_ids.insert(g.id.as_str()) {
                problems.push(format!("duplicate generator id '{}'", g.id));
            }
            if !lookup.contains_key(g.bus.as_str()) {
                problems.push(format!("generator '{}' sits at unknown bus '{}'", g.id, g.bus));
            }
            if !(g.p_min <= g.p_max) || !g.p_min.is_finite() || !g.p_max.is_finite() {
                problems.push(format!("generator '{}' has bounds [{}, {}]", g.id, g.p_min, g.p_max));
            }
            if g.cost.is_empty() {
                problems.push(format!("generator '{}' has no cost pieces", g.id));
            }
            if g.cost.iter().any(|c| !c.alpha.is_finite() || !c.beta.is_finite()) {
                problems.push(format!("generator '{}' has a non-finite cost piece", g.id));
            }
            if g.cost.windows(2).any(|w| w[1].alpha < w[0].alpha) {
                problems.push(format!("generator '{}' cost pieces are not convex", g.id));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Model(problems.join("; ")));
        }
        if !self.is_connected() {
            return Err(Error::Model("network graph is not connected".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let lookup = self.bus_lookup();
        let mut adj = vec![Vec::new(); self.buses.len()];
        for br in &self.branches {
            let (a, b) = (lookup[br.from.as_str()], lookup[br.to.as_str()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.buses.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bus() -> NetworkModel {
        NetworkModel {
            buses: vec![
                Bus { id: "1".into(), region: None },
                Bus { id: "2".into(), region: None },
            ],
            reference: "1".into(),
            branches: vec![Branch::new("1", "2", 0.1, 100.0)],
            generators: vec![Generator {
                id: "g".into(),
                bus: "1".into(),
                fuel: "gas".into(),
                p_min: 0.0,
                p_max: 100.0,
                cost: vec![CostPiece::new(10.0, 0.0), CostPiece::new(20.0, -500.0)],
            }],
        }
    }

    #[test]
    fn valid_network() {
        two_bus().validate().unwrap();
        assert_eq!(two_bus().generators[0].cost_at(80.0), 1100.0);
        assert_eq!(two_bus().generators[0].cost_at(20.0), 200.0);
    }

    #[test]
    fn disconnected() {
        let mut n = two_bus();
        n.branches.clear();
        assert!(matches!(n.validate(), Err(Error::Model(m)) if m.contains("connected")));
    }

    #[test]
    fn missing_reference_and_bad_branch() {
        let mut n = two_bus();
        n.reference = "9".into();
        n.branches[0].x_pu = 0.0;
        let Err(Error::Model(m)) = n.validate() else { panic!() };
        assert!(m.contains("reference") && m.contains("reactance"), "{m}");
    }

    #[test]
    fn nonconvex_cost() {
        let mut n = two_bus();
        n.generators[0].cost.reverse();
        assert!(n.validate().is_err());
    }
}
