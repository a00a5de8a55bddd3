//! SNR gains read off SOP curves at a target outage level.

use crate::csvio::{CurveKey, Record};
use std::collections::BTreeMap;

/// A curve's crossing of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub key: CurveKey,
    /// `None` when the curve does not bracket the target.
    pub psi_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGain {
    pub a: usize,
    pub b: usize,
    /// `Psi_a - Psi_b` at the target: positive when `b` needs less SNR.
    pub gain_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub target: f64,
    pub curves: Vec<Crossing>,
    pub pairs: Vec<PairGain>,
}

/// Groups records into curves (sorted by `Psi_dB`) in first-appearance order.
pub fn curves(rows: &[Record]) -> Vec<(CurveKey, Vec<(f64, f64)>)> {
    let mut order = Vec::new();
    let mut map: BTreeMap<CurveKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let k = r.curve_key();
        map.entry(k.clone())
            .or_insert_with(|| {
                order.push(k);
                Vec::new()
            })
            .push((r.psi_db, r.sop));
    }
    order
        .into_iter()
        .map(|k| {
            let mut pts = map.remove(&k).unwrap_or_default();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (k, pts)
        })
        .collect()
}

/// Psi at which a decreasing SOP curve first falls to `target`, by linear
/// interpolation of `log10(SOP)` in dB. Segments touching zero SOP fall back
/// to linear interpolation of the SOP itself.
pub fn crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == target {
            return Some(x0);
        }
        if y0 > target && y1 <= target {
            if y1 == target {
                return Some(x1);
            }
            let t = if y1 > 0.0 {
                (y0.log10() - target.log10()) / (y0.log10() - y1.log10())
            } else {
                (y0 - target) / (y0 - y1)
            };
            return Some(x0 + t * (x1 - x0));
        }
    }
    match points.last() {
        Some(&(x, y)) if y == target => Some(x),
        _ => None,
    }
}

pub fn report_gain(rows: &[Record], target: f64) -> GainReport {
    let curves: Vec<Crossing> =
        curves(rows).into_iter().map(|(key, pts)| Crossing { psi_db: crossing(&pts, target), key }).collect();
    let mut pairs = Vec::new();
    for a in 0..curves.len() {
        for b in a + 1..curves.len() {
            let gain_db = match (curves[a].psi_db, curves[b].psi_db) {
                (Some(x), Some(y)) => Some(x - y),
                _ => None,
            };
            pairs.push(PairGain { a, b, gain_db });
        }
    }
    GainReport { target, curves, pairs }
}

impl std::fmt::Display for GainReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: Option<f64>| v.map_or_else(|| "not-reached".to_owned(), |x| format!("{x:.3}"));
        writeln!(f, "# Psi (dB) at SOP = {}", self.target)?;
        for (i, c) in self.curves.iter().enumerate() {
            writeln!(f, "[{i}] {}\t{}", c.key.label(), show(c.psi_db))?;
        }
        writeln!(f, "# gain (dB) = Psi[a] - Psi[b]")?;
        for p in &self.pairs {
            writeln!(f, "[{}] vs [{}]\t{}", p.a, p.b, show(p.gain_db))?;
        }
        Ok(())
    }
}
