//! Opportunity-cost bid curves for a renewable-electrolyzer plant (REP).
//!
//! Selling `q` MW to the grid costs the plant the hydrogen it could have made
//! with that power: `c(q) = r(P) - r(P - q)` where `P` is the available
//! renewable power and `r` is the hydrogen revenue. Negative `q` is an import
//! and `c(q)` is then a (negative) willingness to pay. Reflecting a concave
//! hydrogen curve through `r` yields a convex piecewise linear cost curve that
//! can be bid into a market without binaries.
//!
//! Quantities are MW over a one-hour interval, so $/MWh and $/MW coincide.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::h2curve::PiecewiseConcaveCurve;

/// The plant's state for one market interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepConfig {
    pub electrolyzer: PiecewiseConcaveCurve,
    /// Available renewable power this hour (MW).
    pub res_available: f64,
    /// $/kg
    pub hydrogen_price: f64,
    /// Bus the plant is connected to.
    pub node: String,
}

impl RepConfig {
    pub fn new(
        electrolyzer: PiecewiseConcaveCurve,
        res_available: f64,
        hydrogen_price: f64,
        node: impl Into<String>,
    ) -> Result<Self> {
        if !(res_available >= 0.0) || !res_available.is_finite() {
            return Err(Error::Domain(format!(
                "available renewable power must be non-negative, got {res_available}"
            )));
        }
        if !(hydrogen_price >= 0.0) || !hydrogen_price.is_finite() {
            return Err(Error::Domain(format!(
                "hydrogen price must be non-negative, got {hydrogen_price}"
            )));
        }
        Ok(Self {
            electrolyzer,
            res_available,
            hydrogen_price,
            node: node.into(),
        })
    }

    pub fn electrolyzer_capacity(&self) -> f64 {
        self.electrolyzer.capacity()
    }

    /// Feasible market positions `[q_min, q_max]`. Imports are only possible
    /// while the renewable output does not saturate the electrolyzer.
    pub fn quantity_domain(&self) -> (f64, f64) {
        let p = self.res_available;
        let cap = self.electrolyzer_capacity();
        if p <= cap {
            (p - cap, p)
        } else {
            (0.0, p)
        }
    }
}

/// One linear piece `c(q) = alpha * q + beta` on `[q_lo, q_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BidPiece {
    /// $/MWh
    pub alpha: f64,
    /// $
    pub beta: f64,
    pub q_lo: f64,
    pub q_hi: f64,
}

impl BidPiece {
    pub fn value(&self, q: f64) -> f64 {
        self.alpha * q + self.beta
    }

    pub fn width(&self) -> f64 {
        self.q_hi - self.q_lo
    }
}

/// Convex piecewise linear cost curve, pieces ordered by quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidCurve {
    pieces: Vec<BidPiece>,
    q_min: f64,
    q_max: f64,
}

impl BidCurve {
    pub fn pieces(&self) -> &[BidPiece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.q_min, self.q_max)
    }

    fn check_domain(&self, q: f64) -> Result<()> {
        if !(self.q_min..=self.q_max).contains(&q) {
            return Err(Error::Domain(format!(
                "quantity {q} MW outside bid domain [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        Ok(())
    }

    /// Index of the piece with `q_lo <= q < q_hi`, or the last piece at `q_max`.
    fn piece_index(&self, q: f64) -> usize {
        let k = self.pieces.partition_point(|pc| pc.q_hi <= q);
        k.min(self.pieces.len() - 1)
    }

    /// Cost of selling `q` MW ($).
    pub fn value(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.pieces[self.piece_index(q)].value(q))
    }

    /// Marginal cost at `q`; at an interior boundary the right piece applies.
    pub fn marginal_cost_at(&self, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.pieces[self.piece_index(q)].alpha)
    }

    /// `(alpha, beta)` pairs in the form consumed by the market clearing.
    pub fn cost_pieces(&self) -> Vec<(f64, f64)> {
        self.pieces.iter().map(|p| (p.alpha, p.beta)).collect()
    }

    /// Writes `piece,alpha_usd_per_mwh,beta_usd,q_lo_mw,q_hi_mw`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::io("<bid curve>", e.into());
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["piece", "alpha_usd_per_mwh", "beta_usd", "q_lo_mw", "q_hi_mw"])
            .map_err(io)?;
        for (k, p) in self.pieces.iter().enumerate() {
            wtr.write_record([
                (k + 1).to_string(),
                p.alpha.to_string(),
                p.beta.to_string(),
                p.q_lo.to_string(),
                p.q_hi.to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::io("<bid curve>", e))
    }
}

/// Hydrogen revenue ($/h) from consuming `p` MW; output saturates at capacity.
pub fn hydrogen_revenue(electrolyzer: &PiecewiseConcaveCurve, price: f64, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("electrolyzer power {p} MW is negative")));
    }
    let h = electrolyzer.evaluate(p.min(electrolyzer.capacity()))?;
    Ok(price * h)
}

/// Opportunity cost of selling `q` MW, evaluated directly from the revenue
/// function rather than from the derived pieces.
pub fn opportunity_cost_exact(cfg: &RepConfig, q: f64) -> Result<f64> {
    let (q_min, q_max) = cfg.quantity_domain();
    if !(q_min..=q_max).contains(&q) {
        return Err(Error::Domain(format!(
            "quantity {q} MW outside feasible range [{q_min}, {q_max}]"
        )));
    }
    let p = cfg.res_available;
    // clamp rounding below zero at the import limit
    let remaining = (p - q).max(0.0);
    Ok(hydrogen_revenue(&cfg.electrolyzer, cfg.hydrogen_price, p)?
        - hydrogen_revenue(&cfg.electrolyzer, cfg.hydrogen_price, remaining)?)
}

/// Hydrogen curve pieces plus the flat saturation piece when the renewable
/// output exceeds the electrolyzer capacity: `(A, B, P_lo, P_hi)`.
fn revenue_pieces(cfg: &RepConfig) -> Vec<(f64, f64, f64, f64)> {
    let h = &cfg.electrolyzer;
    let bp = h.breakpoints();
    let mut pieces: Vec<_> = (0..h.piece_count())
        .map(|i| (h.slopes()[i], h.intercepts()[i], bp[i], bp[i + 1]))
        .collect();
    let cap = h.capacity();
    if cfg.res_available > cap {
        let top = pieces.last().map_or(0.0, |&(a, b, _, hi)| a * hi + b);
        pieces.push((0.0, top, cap, cfg.res_available));
    }
    pieces
}

/// Derives the plant's bid curve from its hydrogen curve, hydrogen price and
/// available renewable power.
pub fn derive_bid_curve(cfg: &RepConfig) -> Result<BidCurve> {
    let pieces = revenue_pieces(cfg);
    let p = cfg.res_available;
    // piece holding the available power, lower index at shared breakpoints
    let anchor = pieces
        .iter()
        .position(|&(_, _, _, hi)| p <= hi)
        .unwrap_or(pieces.len().saturating_sub(1));
    Ok(derive_with_anchor(cfg, &pieces, anchor))
}

fn derive_with_anchor(cfg: &RepConfig, pieces: &[(f64, f64, f64, f64)], anchor: usize) -> BidCurve {
    let p = cfg.res_available;
    let price = cfg.hydrogen_price;
    let (q_min, q_max) = cfg.quantity_domain();

    let (a_j, b_j) = pieces.get(anchor).map_or((0.0, 0.0), |&(a, b, _, _)| (a, b));
    let mut out: Vec<BidPiece> = pieces
        .iter()
        .rev()
        .map(|&(a, b, lo, hi)| BidPiece {
            alpha: price * a,
            beta: price * ((a_j - a) * p + (b_j - b)),
            q_lo: (p - hi).max(q_min),
            q_hi: (p - lo).min(q_max),
        })
        .filter(|pc| pc.q_hi > pc.q_lo)
        .collect();

    if out.is_empty() {
        // no electrolyzer and no renewable output
        out.push(BidPiece {
            alpha: 0.0,
            beta: 0.0,
            q_lo: q_min,
            q_hi: q_max,
        });
    }
    BidCurve {
        pieces: out,
        q_min,
        q_max,
    }
}

/// Marginal cost of the plant's bid at `q` (see [`BidCurve::marginal_cost_at`]).
pub fn marginal_cost_at(bid: &BidCurve, q: f64) -> Result<f64> {
    bid.marginal_cost_at(q)
}
