//! Electrolyzer hydrogen production curves.
//!
//! An electrolyzer's measured production curve maps electric power (MW) to a
//! hydrogen rate (kg/h). It has no closed form, so it is carried as a sampled
//! table ([`SampledHydrogenCurve`]) and approximated by a concave piecewise
//! linear function ([`PiecewiseConcaveCurve`]) that is exact at the chosen
//! breakpoints. Slopes are in kg/MWh and intercepts in kg/h.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for continuity at shared breakpoints.
pub const CONTINUITY_RTOL: f64 = 1e-9;

/// A measured production curve, sorted by power, starting at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledHydrogenCurve {
    points: Vec<(f64, f64)>,
}

impl SampledHydrogenCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(
                "a hydrogen curve needs at least two samples".into(),
            ));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::Domain(format!(
                "first sample must be (0, 0), got ({}, {})",
                points[0].0, points[0].1
            )));
        }
        for (k, w) in points.windows(2).enumerate() {
            let ((p0, h0), (p1, h1)) = (w[0], w[1]);
            if !(p1 > p0) {
                return Err(Error::Domain(format!(
                    "sample {} power {p1} is not above the previous power {p0}",
                    k + 1
                )));
            }
            if !(h1 >= h0) || !h1.is_finite() {
                return Err(Error::Domain(format!(
                    "sample {} hydrogen rate {h1} decreases from {h0}",
                    k + 1
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Rated power, the largest sampled power.
    pub fn capacity(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation between samples.
    pub fn interpolate(&self, p: f64) -> Result<f64> {
        let cap = self.capacity();
        if !(0.0..=cap).contains(&p) {
            return Err(Error::Domain(format!(
                "power {p} MW outside sampled range [0, {cap}]"
            )));
        }
        let k = self.points.partition_point(|&(q, _)| q < p);
        if k == 0 {
            return Ok(self.points[0].1);
        }
        let (p1, h1) = self.points[k];
        if p1 == p {
            return Ok(h1);
        }
        let (p0, h0) = self.points[k - 1];
        Ok(h0 + (h1 - h0) * (p - p0) / (p1 - p0))
    }

    /// The same curve shape rescaled to another rated power. Power and
    /// hydrogen axes scale together, so specific consumption is unchanged.
    pub fn scaled_to(&self, capacity: f64) -> Result<Self> {
        if !(capacity > 0.0) {
            return Err(Error::Domain(format!(
                "cannot scale a hydrogen curve to capacity {capacity}"
            )));
        }
        let k = capacity / self.capacity();
        let mut points: Vec<_> = self.points.iter().map(|&(p, h)| (p * k, h * k)).collect();
        // keep the top sample exactly at the requested capacity
        if let Some(last) = points.last_mut() {
            last.0 = capacity;
        }
        Self::new(points)
    }

    /// Reads `power_mw,h2_kg_per_h` rows.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, path)
    }

    pub fn from_csv_reader<R: Read>(reader: R, origin: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            power_mw: f64,
            h2_kg_per_h: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut points = Vec::new();
        for (k, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::parse(origin, k + 2, e.to_string()))?;
            points.push((row.power_mw, row.h2_kg_per_h));
        }
        Self::new(points).map_err(|e| Error::parse(origin, 0, e.to_string()))
    }
}

/// Concave piecewise linear hydrogen curve `h(p) = A_i p + B_i` on
/// `[breakpoints[i], breakpoints[i + 1]]`.
///
/// A curve with no pieces and a single breakpoint at zero stands for an
/// absent electrolyzer (zero capacity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConcaveCurve {
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl PiecewiseConcaveCurve {
    pub fn new(slopes: Vec<f64>, intercepts: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self> {
        if slopes.len() != intercepts.len() || breakpoints.len() != slopes.len() + 1 {
            return Err(Error::Domain(format!(
                "inconsistent curve sizes: {} slopes, {} intercepts, {} breakpoints",
                slopes.len(),
                intercepts.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::Domain("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        if slopes.iter().chain(&intercepts).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite slope or intercept".into()));
        }
        for i in 1..slopes.len() {
            if !(slopes[i] < slopes[i - 1]) {
                return Err(Error::ConcavityViolation {
                    piece: i,
                    slope: slopes[i],
                    previous: slopes[i - 1],
                });
            }
            let b = breakpoints[i];
            let left = slopes[i - 1] * b + intercepts[i - 1];
            let right = slopes[i] * b + intercepts[i];
            if (left - right).abs() > CONTINUITY_RTOL * left.abs().max(1.0) {
                return Err(Error::Domain(format!(
                    "discontinuity at breakpoint {b}: {left} vs {right}"
                )));
            }
        }
        if let Some(&last) = slopes.last() {
            if last < 0.0 {
                return Err(Error::Domain(format!(
                    "hydrogen output must not decrease with power, last slope is {last}"
                )));
            }
        }
        if let Some(&b0) = intercepts.first() {
            if b0 != 0.0 {
                return Err(Error::Domain(format!(
                    "curve must produce nothing at zero power, first intercept is {b0}"
                )));
            }
        }
        Ok(Self {
            slopes,
            intercepts,
            breakpoints,
        })
    }

    /// The curve of an absent electrolyzer.
    pub fn zero() -> Self {
        Self {
            slopes: Vec::new(),
            intercepts: Vec::new(),
            breakpoints: vec![0.0],
        }
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn piece_count(&self) -> usize {
        self.slopes.len()
    }

    pub fn capacity(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    /// Index of the piece whose interval contains `p`. At a shared breakpoint
    /// the lower-index (steeper) piece wins. `None` for the zero curve.
    pub fn piece_containing(&self, p: f64) -> Option<usize> {
        if self.slopes.is_empty() {
            return None;
        }
        let k = self.breakpoints[1..].partition_point(|&b| b < p);
        Some(k.min(self.slopes.len() - 1))
    }

    /// Hydrogen rate in kg/h at power `p` MW.
    pub fn evaluate(&self, p: f64) -> Result<f64> {
        let cap = self.capacity();
        if !(0.0..=cap).contains(&p) {
            return Err(Error::Domain(format!(
                "power {p} MW outside electrolyzer range [0, {cap}]"
            )));
        }
        Ok(match self.piece_containing(p) {
            Some(i) => self.slopes[i] * p + self.intercepts[i],
            None => 0.0,
        })
    }

    /// Writes `piece,slope_kg_per_mwh,intercept_kg_per_h,p_lo_mw,p_hi_mw`
    /// with 1-based piece numbers.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::io("<fitted curve>", e.into());
        wtr.write_record(["piece", "slope_kg_per_mwh", "intercept_kg_per_h", "p_lo_mw", "p_hi_mw"])
            .map_err(io)?;
        for i in 0..self.piece_count() {
            wtr.write_record([
                (i + 1).to_string(),
                self.slopes[i].to_string(),
                self.intercepts[i].to_string(),
                self.breakpoints[i].to_string(),
                self.breakpoints[i + 1].to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::io("<fitted curve>", e))
    }
}

/// `pieces + 1` evenly spaced breakpoints on `[0, capacity]`.
pub fn uniform_breakpoints(capacity: f64, pieces: usize) -> Vec<f64> {
    let n = pieces.max(1);
    (0..=n)
        .map(|k| if k == n { capacity } else { capacity * k as f64 / n as f64 })
        .collect()
}

/// Fits the concave approximation that interpolates `curve` at `breakpoints`.
pub fn fit_piecewise_concave(
    curve: &SampledHydrogenCurve,
    breakpoints: &[f64],
) -> Result<PiecewiseConcaveCurve> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain("at least two breakpoints are required".into()));
    }
    let cap = curve.capacity();
    if breakpoints[0] != 0.0 {
        return Err(Error::Domain("breakpoints must start at 0".into()));
    }
    let last = breakpoints[breakpoints.len() - 1];
    if last > cap {
        return Err(Error::Domain(format!(
            "breakpoint {last} MW exceeds the sampled capacity {cap} MW"
        )));
    }
    if last != cap {
        return Err(Error::Domain(format!(
            "last breakpoint {last} MW must equal the capacity {cap} MW"
        )));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }

    let values = breakpoints
        .iter()
        .map(|&b| curve.interpolate(b))
        .collect::<Result<Vec<_>>>()?;

    let mut slopes = Vec::with_capacity(breakpoints.len() - 1);
    let mut intercepts = Vec::with_capacity(breakpoints.len() - 1);
    for i in 0..breakpoints.len() - 1 {
        let slope = (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
        let intercept = if i == 0 { values[0] } else { values[i] - slope * breakpoints[i] };
        slopes.push(slope);
        intercepts.push(intercept);
    }
    PiecewiseConcaveCurve::new(slopes, intercepts, breakpoints.to_vec())
}
