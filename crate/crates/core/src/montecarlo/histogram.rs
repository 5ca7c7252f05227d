use crate::{Error, Result};

/// Counts over ascending bin edges; out-of-range values are tallied apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    below: u64,
    above: u64,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("bin edges must be strictly ascending, at least two".into()));
        }
        let bins = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0; bins],
            below: 0,
            above: 0,
        })
    }

    /// `bins` equal-width bins on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Precondition(format!("cannot bin [{lo}, {hi}] into {bins}")));
        }
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * w).collect();
        edges.push(hi);
        Self::new(edges)
    }

    pub fn empty_like(&self) -> Self {
        Self {
            edges: self.edges.clone(),
            counts: vec![0; self.counts.len()],
            below: 0,
            above: 0,
        }
    }

    /// Adds one value; the last bin is closed on the right.
    pub fn add(&mut self, x: f64) {
        let lo = self.edges[0];
        let hi = *self.edges.last().unwrap();
        if x < lo || x.is_nan() {
            self.below += 1;
        } else if x > hi {
            self.above += 1;
        } else {
            let last = self.counts.len() - 1;
            let i = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
            self.counts[i.min(last)] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::Precondition("histograms have different edges".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        Ok(())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_range(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Values below the first edge (NaN included).
    pub fn below(&self) -> u64 {
        self.below
    }

    pub fn above(&self) -> u64 {
        self.above
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// All values added, in range or not.
    pub fn total(&self) -> u64 {
        self.in_range() + self.below + self.above
    }

    /// `count / (M · width)` per bin, with `M` the total.
    pub fn density(&self) -> Vec<f64> {
        let m = self.total().max(1) as f64;
        (0..self.bins())
            .map(|i| {
                let (a, b) = self.bin_range(i);
                self.counts[i] as f64 / (m * (b - a))
            })
            .collect()
    }

    /// Centre of the fullest bin (the first, on ties).
    pub fn mode_center(&self) -> f64 {
        let best = (0..self.bins()).fold(0, |b, i| if self.counts[i] > self.counts[b] { i } else { b });
        self.bin_center(best)
    }

    /// Mean of the in-range values, taking each at its bin centre.
    pub fn mean_estimate(&self) -> f64 {
        let n = self.in_range().max(1) as f64;
        (0..self.bins()).map(|i| self.counts[i] as f64 * self.bin_center(i)).sum::<f64>() / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binning_edges_and_overflow() {
        let mut h = Histogram::uniform(0.0, 1.0, 4).unwrap();
        for x in [0.0, 0.25, 0.3, 0.99, 1.0, -0.1, 1.1, f64::NAN] {
            h.add(x);
        }
        assert_eq!(h.counts(), &[1, 2, 0, 2]);
        assert_eq!((h.below(), h.above()), (2, 1));
        assert_eq!(h.total(), 8);
        assert!(Histogram::uniform(1.0, 1.0, 3).is_err());
        assert!(Histogram::uniform(0.0, 1.0, 0).is_err());
        assert!(Histogram::new(vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn merge_requires_same_edges() {
        let mut a = Histogram::uniform(0.0, 1.0, 4).unwrap();
        let b = Histogram::uniform(0.0, 2.0, 4).unwrap();
        assert!(a.merge(&b).is_err());
    }

    proptest! {
        #[test]
        fn counts_account_for_every_value(xs in proptest::collection::vec(-1.0f64..2.0, 0..200)) {
            let mut h = Histogram::uniform(0.0, 1.0, 7).unwrap();
            xs.iter().for_each(|&x| h.add(x));
            prop_assert_eq!(h.total(), xs.len() as u64);
            prop_assert!(h.in_range() <= h.total());
        }
    }
}
