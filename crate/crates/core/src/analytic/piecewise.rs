use std::fmt;
use std::sync::Arc;

use super::quad::adaptive_simpson;
use crate::{Error, Result};

/// Per-segment quadrature tolerance.
const SEGMENT_TOL: f64 = 1e-9;

pub type Segment = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A 1-D density assembled from smooth pieces between ascending breakpoints.
///
/// Segments are unnormalized; the normalization constant is the quadrature
/// of all segments, so [`PiecewiseDensity::eval`] integrates to one.
#[derive(Clone)]
pub struct PiecewiseDensity {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    norm: f64,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Segment>) -> Result<Self> {
        if breakpoints.len() < 2 || segments.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidDimension(format!(
                "{} breakpoints for {} segments",
                breakpoints.len(),
                segments.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("breakpoints must be strictly ascending".into()));
        }
        let mut d = Self {
            breakpoints,
            segments,
            norm: 1.0,
        };
        let total = d.raw_integral(d.support().0, d.support().1);
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numeric(format!("density integrates to {total}")));
        }
        d.norm = total;
        Ok(d)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Integral of the unnormalized segments.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    fn segment_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        Some(idx.saturating_sub(1).min(self.segments.len() - 1))
    }

    /// Normalized density; zero outside the support. At an interior
    /// breakpoint the segment to the right is used.
    pub fn eval(&self, x: f64) -> f64 {
        match self.segment_index(x) {
            Some(i) => (self.segments[i])(x) / self.norm,
            None => 0.0,
        }
    }

    /// Normalized value of segment `i` at `x`, which may lie on its boundary.
    pub fn eval_segment(&self, i: usize, x: f64) -> f64 {
        (self.segments[i])(x) / self.norm
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    fn raw_integral(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let lo = self.breakpoints[i].max(a);
            let hi = self.breakpoints[i + 1].min(b);
            if lo < hi {
                total += adaptive_simpson(&|x| seg(x), lo, hi, SEGMENT_TOL);
            }
        }
        total
    }

    /// `∫_a^b` of the normalized density.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        self.raw_integral(a, b) / self.norm
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            self.integrate(lo, x).clamp(0.0, 1.0)
        }
    }

    /// Tabulated inverse CDF on `points` sub-intervals per segment.
    pub fn inverse_cdf(&self, points: usize) -> InverseCdf {
        let mut xs = vec![self.breakpoints[0]];
        let mut cs = vec![0.0];
        for i in 0..self.segments.len() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let h = (b - a) / points as f64;
            for k in 0..points {
                let x0 = a + k as f64 * h;
                let x1 = if k + 1 == points { b } else { x0 + h };
                let seg = &self.segments[i];
                let inc = adaptive_simpson(&|x| seg(x), x0, x1, SEGMENT_TOL / points as f64) / self.norm;
                xs.push(x1);
                cs.push(cs.last().unwrap() + inc.max(0.0));
            }
        }
        let top = *cs.last().unwrap();
        for c in cs.iter_mut() {
            *c /= top;
        }
        InverseCdf { xs, cs }
    }
}

impl fmt::Debug for PiecewiseDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseDensity")
            .field("breakpoints", &self.breakpoints)
            .field("norm", &self.norm)
            .finish()
    }
}

/// Piecewise-linear inverse of a tabulated CDF.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    xs: Vec<f64>,
    cs: Vec<f64>,
}

impl InverseCdf {
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let j = self.cs.partition_point(|&c| c < u).clamp(1, self.cs.len() - 1);
        let (c0, c1) = (self.cs[j - 1], self.cs[j]);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        if c1 > c0 {
            x0 + (x1 - x0) * (u - c0) / (c1 - c0)
        } else {
            x0
        }
    }
}
