//! Empirical measures on boundary circles.

use std::f64::consts::TAU;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::stats::reduce_angle;

/// Bin counts over equal arcs `[2πk/n, 2π(k+1)/n)` of one boundary circle.
///
/// `total` is the sample count of the whole run, shared by all components of
/// that run, so `mass(k) = counts[k] / total` and the component masses of a
/// run add up to the fraction of samples that reached the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcHistogram {
    pub component_id: u32,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ArcHistogram {
    pub fn new(component_id: u32, n_bins: usize) -> Self {
        ArcHistogram {
            component_id,
            counts: vec![0; n_bins],
            total: 0,
        }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, angle: f64) -> usize {
        let n = self.counts.len();
        let k = (reduce_angle(angle) / TAU * n as f64) as usize;
        k.min(n - 1)
    }

    pub fn bin_start(&self, k: usize) -> f64 {
        TAU * k as f64 / self.counts.len() as f64
    }

    pub fn record(&mut self, angle: f64) {
        let k = self.bin_of(angle);
        self.counts[k] += 1;
    }

    pub fn hits(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mass(&self, k: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[k] as f64 / self.total as f64
        }
    }

    pub fn component_mass(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.hits() as f64 / self.total as f64
        }
    }

    /// Adds the counts of `other` (same component and binning).
    pub fn merge(&mut self, other: &ArcHistogram) {
        assert_eq!(self.counts.len(), other.counts.len(), "bin count mismatch");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// Writes histograms as `component_id,bin_index,bin_start_angle_rad,count`.
pub fn write_csv<W: Write>(mut out: W, histograms: &[ArcHistogram]) -> io::Result<()> {
    writeln!(out, "component_id,bin_index,bin_start_angle_rad,count")?;
    for h in histograms {
        for (k, c) in h.counts.iter().enumerate() {
            writeln!(
                out,
                "{},{},{:.16e},{}",
                h.component_id,
                k,
                h.bin_start(k),
                c
            )?;
        }
    }
    Ok(())
}

/// Total-variation distance between two families of histograms over the same
/// components and binning, each normalised by its own `total`.
pub fn total_variation(a: &[ArcHistogram], b: &[ArcHistogram]) -> f64 {
    assert_eq!(a.len(), b.len(), "component count mismatch");
    let mut tv = 0.0;
    for (ha, hb) in a.iter().zip(b) {
        assert_eq!(ha.n_bins(), hb.n_bins(), "bin count mismatch");
        for k in 0..ha.n_bins() {
            tv += (ha.mass(k) - hb.mass(k)).abs();
        }
    }
    0.5 * tv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_edges() {
        let mut h = ArcHistogram::new(0, 4);
        h.record(0.0);
        h.record(-1e-12);
        h.record(TAU / 4.0 + 1e-12);
        h.record(TAU * 3.0 + 0.1);
        assert_eq!(h.counts, vec![2, 1, 0, 1]);
    }

    #[test]
    fn csv_layout() {
        let mut h = ArcHistogram::new(1, 2);
        h.record(0.1);
        h.total = 1;
        let mut buf = Vec::new();
        write_csv(&mut buf, &[h]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "component_id,bin_index,bin_start_angle_rad,count");
        assert_eq!(lines[1], "1,0,0.0000000000000000e0,1");
        assert!(lines[2].starts_with("1,1,3.1415926535897931e0,0"));
    }

    #[test]
    fn tv_of_identical_is_zero() {
        let mut h = ArcHistogram::new(0, 8);
        for k in 0..100 {
            h.record(k as f64);
        }
        h.total = 100;
        assert_eq!(total_variation(&[h.clone()], &[h]), 0.0);
    }
}
