#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::Rng;
use rep_market::h2curve::PiecewiseConcaveCurve;
use rep_market::scenario::{load_scenario, Scenario};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/six_bus")
}

pub fn fixture() -> Scenario {
    let dir = fixture_dir();
    load_scenario(&dir.join("scenario.toml"), &dir).expect("fixture loads")
}

/// Random concave curve with 2 to 6 pieces, rated 20 to 1000 MW.
pub fn random_concave<R: Rng>(rng: &mut R) -> PiecewiseConcaveCurve {
    let n = rng.gen_range(2..=6);
    let cap: f64 = rng.gen_range(20.0..1000.0);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.05..0.95) * cap).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1.0);
    let mut bps = vec![0.0];
    bps.extend(cuts);
    bps.push(cap);
    let mut slopes = Vec::new();
    let mut s: f64 = rng.gen_range(10.0..25.0);
    for _ in 0..bps.len() - 1 {
        slopes.push(s);
        s *= rng.gen_range(0.5..0.98);
    }
    let mut intercepts = vec![0.0];
    for i in 1..slopes.len() {
        let b = intercepts[i - 1] + (slopes[i - 1] - slopes[i]) * bps[i];
        intercepts.push(b);
    }
    PiecewiseConcaveCurve::new(slopes, intercepts, bps).expect("constructed concave")
}

/// Hydrogen output straight from the lines: a concave piecewise-linear curve
/// is the minimum of its lines, held flat beyond rated power.
pub fn h_direct(curve: &PiecewiseConcaveCurve, p: f64) -> f64 {
    let p = p.min(curve.capacity());
    curve
        .slopes()
        .iter()
        .zip(curve.intercepts())
        .map(|(a, b)| a * p + b)
        .fold(f64::INFINITY, f64::min)
}

/// Forgone hydrogen revenue of selling `q` MW out of `res` MW available.
pub fn opportunity_cost_direct(curve: &PiecewiseConcaveCurve, price: f64, res: f64, q: f64) -> f64 {
    price * (h_direct(curve, res) - h_direct(curve, res - q))
}

/// Quantity grid with 1 MW spacing plus both endpoints.
pub fn grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut q: Vec<f64> = (0..)
        .map(|k| lo + k as f64)
        .take_while(|&q| q < hi)
        .collect();
    q.push(hi);
    q
}

pub fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}
