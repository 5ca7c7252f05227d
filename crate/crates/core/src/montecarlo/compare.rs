use super::Histogram;
use crate::analytic::PiecewiseDensity;
use crate::stats::chi_square_sf;
use crate::{Error, Result};

/// Smallest expected count a compared bin may have; sparser bins are merged.
pub const MIN_EXPECTED: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BinComparison {
    pub lo: f64,
    pub hi: f64,
    pub observed: u64,
    pub expected: f64,
    pub z: f64,
}

/// Histogram-versus-density goodness of fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityComparison {
    /// Bins after merging.
    pub bins: Vec<BinComparison>,
    /// Number of original bins absorbed into neighbours.
    pub merged: usize,
    pub max_abs_z: f64,
    pub chi_square: f64,
    pub dof: f64,
    pub p_value: f64,
    /// Sample size the expected counts are scaled to.
    pub samples: u64,
}

impl DensityComparison {
    pub fn passes(&self, z_limit: f64) -> bool {
        self.max_abs_z < z_limit
    }
}

/// Compares against the full sample size: expected count `M·∫_bin F`.
pub fn compare_to_density(hist: &Histogram, density: &PiecewiseDensity) -> Result<DensityComparison> {
    let (lo, hi) = density.support();
    let (a, b) = (hist.edges()[0], *hist.edges().last().unwrap());
    let slack = 1e-12 * (hi - lo);
    if a < lo - slack || b > hi + slack {
        return Err(Error::Precondition(format!(
            "histogram range [{a}, {b}] exceeds density support [{lo}, {hi}]"
        )));
    }
    compare(hist, density, hist.total(), 1.0)
}

/// Compares the in-range counts against `density` renormalized to the
/// histogram range.
pub fn compare_to_density_conditional(hist: &Histogram, density: &PiecewiseDensity) -> Result<DensityComparison> {
    let mass = density.integrate(hist.edges()[0], *hist.edges().last().unwrap());
    if !(mass > 0.0) {
        return Err(Error::Precondition("density has no mass on the histogram range".into()));
    }
    compare(hist, density, hist.in_range(), 1.0 / mass)
}

/// Expected count of a bin is `m · weight · ∫_bin F`.
fn compare(hist: &Histogram, density: &PiecewiseDensity, m: u64, weight: f64) -> Result<DensityComparison> {
    let scale = m as f64 * weight;
    let mut groups: Vec<(f64, f64, u64, f64)> = Vec::new();
    let mut cur: Option<(f64, f64, u64, f64)> = None;
    let mut merged = 0;
    for i in 0..hist.bins() {
        let (a, b) = hist.bin_range(i);
        let e = scale * density.integrate(a, b);
        let o = hist.counts()[i];
        cur = Some(match cur {
            None => (a, b, o, e),
            Some((ga, _, go, ge)) => {
                merged += 1;
                (ga, b, go + o, ge + e)
            }
        });
        if cur.unwrap().3 >= MIN_EXPECTED {
            groups.push(cur.take().unwrap());
        }
    }
    if let Some(rest) = cur {
        match groups.last_mut() {
            Some(last) => {
                merged += 1;
                last.1 = rest.1;
                last.2 += rest.2;
                last.3 += rest.3;
            }
            None => groups.push(rest),
        }
    }
    if groups.len() < 2 {
        return Err(Error::Precondition("fewer than two bins with enough expected counts".into()));
    }
    let mut chi_square = 0.0;
    let mut max_abs_z = 0.0_f64;
    let bins: Vec<BinComparison> = groups
        .into_iter()
        .map(|(lo, hi, observed, expected)| {
            let p = (expected / m.max(1) as f64).min(1.0);
            let d = observed as f64 - expected;
            let z = d / (expected * (1.0 - p)).max(f64::MIN_POSITIVE).sqrt();
            chi_square += d * d / expected;
            max_abs_z = max_abs_z.max(z.abs());
            BinComparison { lo, hi, observed, expected, z }
        })
        .collect();
    let dof = (bins.len() - 1) as f64;
    Ok(DensityComparison {
        p_value: chi_square_sf(chi_square, dof),
        bins,
        merged,
        max_abs_z,
        chi_square,
        dof,
        samples: m,
    })
}
