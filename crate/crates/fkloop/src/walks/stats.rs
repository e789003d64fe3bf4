//! Histograms with censoring brackets, and log-log tail slopes.

/// Binomial estimate of a probability with the bracket left open by
/// censored runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub point: f64,
    pub stderr: f64,
    pub n_total: u64,
    pub n_censored: u64,
    pub seed: u64,
    pub bracket: (f64, f64),
}

impl MCEstimate {
    pub fn from_counts(hits: u64, n_total: u64, n_censored: u64, seed: u64) -> Self {
        let n = n_total.max(1) as f64;
        let point = hits as f64 / n;
        MCEstimate {
            point,
            stderr: (point * (1.0 - point) / n).sqrt(),
            n_total,
            n_censored,
            seed,
            bracket: (point, (hits + n_censored) as f64 / n),
        }
    }
}

/// Counts per integer value plus runs whose value is unknown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub n_total: u64,
    pub n_censored: u64,
    pub seed: u64,
}

impl Histogram {
    pub fn new(seed: u64) -> Self {
        Histogram { seed, ..Default::default() }
    }

    pub fn add(&mut self, v: u64) {
        let v = v as usize;
        if v >= self.counts.len() {
            self.counts.resize(v + 1, 0);
        }
        self.counts[v] += 1;
        self.n_total += 1;
    }

    pub fn add_censored(&mut self) {
        self.n_censored += 1;
        self.n_total += 1;
    }

    /// A run counted in the total but not in any bin (e.g. beyond a horizon).
    pub fn add_elsewhere(&mut self) {
        self.n_total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_total += other.n_total;
        self.n_censored += other.n_censored;
    }

    pub fn count(&self, v: usize) -> u64 {
        self.counts.get(v).copied().unwrap_or(0)
    }

    pub fn total_mass(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Runs with value in `lo..=hi`.
    pub fn mass_in(&self, lo: usize, hi: usize) -> u64 {
        (lo..=hi).map(|v| self.count(v)).sum()
    }

    pub fn estimate(&self, v: usize) -> MCEstimate {
        MCEstimate::from_counts(self.count(v), self.n_total, self.n_censored, self.seed)
    }

    /// Censored runs relative to the runs landing in `lo..=hi`.
    pub fn censored_share(&self, lo: usize, hi: usize) -> f64 {
        self.n_censored as f64 / self.mass_in(lo, hi).max(1) as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l", "count", "censored_lo", "censored_hi"])?;
        for (l, &c) in self.counts.iter().enumerate() {
            let e = self.estimate(l);
            w.write_record([l.to_string(), c.to_string(), format!("{:.9e}", e.bracket.0), format!("{:.9e}", e.bracket.1)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBin {
    pub lo: usize,
    pub hi: usize,
    pub mass: f64,
    /// `ln` of the geometric centre.
    pub x: f64,
    /// `ln` of the mass per unit length.
    pub y: f64,
}

/// Geometric bins over `lo..=hi` holding `masses[v]`; empty bins dropped.
pub fn log_bins(masses: &[f64], lo: usize, hi: usize, nbins: usize) -> Vec<LogBin> {
    let r = (hi as f64 / lo as f64).ln();
    let mut edges: Vec<usize> = (0..=nbins).map(|i| (lo as f64 * (r * i as f64 / nbins as f64).exp()).round() as usize).collect();
    edges.dedup();
    *edges.last_mut().unwrap() = hi + 1;
    edges
        .windows(2)
        .filter_map(|e| {
            let (a, b) = (e[0], e[1] - 1);
            let mass: f64 = (a..=b).map(|v| masses.get(v).copied().unwrap_or(0.0)).sum();
            (mass > 0.0).then(|| LogBin {
                lo: a,
                hi: b,
                mass,
                x: 0.5 * ((a as f64).ln() + (b as f64).ln()),
                y: (mass / (b + 1 - a) as f64).ln(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

fn weighted_fit(pts: &[(f64, f64, f64)]) -> SlopeFit {
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let n = pts.len();
    let rss: f64 = pts.iter().map(|p| p.2 * (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = if n > 2 { (rss / (n - 2) as f64 / sxx).sqrt() } else { f64::NAN };
    SlopeFit { slope, stderr, points: n }
}

/// Unweighted least squares of `y` on `x`.
pub fn ols_slope(bins: &[LogBin]) -> SlopeFit {
    let pts: Vec<_> = bins.iter().map(|b| (b.x, b.y, 1.0)).collect();
    weighted_fit(&pts)
}

/// Least squares weighted by bin counts (inverse Poisson variance of `y`).
pub fn wls_slope(bins: &[LogBin]) -> SlopeFit {
    let pts: Vec<_> = bins.iter().map(|b| (b.x, b.y, b.mass)).collect();
    weighted_fit(&pts)
}

/// Discrete Hill estimate over values `>= lo`, returned as the slope of
/// the mass function, `-(1 + alpha)`.
pub fn hill_slope(h: &Histogram, lo: usize) -> SlopeFit {
    let base = lo as f64 - 0.5;
    let (mut n, mut s) = (0.0, 0.0);
    for (v, &c) in h.counts.iter().enumerate().skip(lo) {
        n += c as f64;
        s += c as f64 * (v as f64 / base).ln();
    }
    let alpha = n / s;
    SlopeFit { slope: -(1.0 + alpha), stderr: alpha / n.sqrt(), points: n as usize }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_contain_point() {
        let e = MCEstimate::from_counts(30, 100, 5, 1);
        assert!(e.bracket.0 <= e.point && e.point <= e.bracket.1);
        assert!(e.bracket.1 - e.bracket.0 >= 5.0 / 100.0 - 1e-15);
    }

    #[test]
    fn merge_is_additive() {
        let mut a = Histogram::new(0);
        let mut b = Histogram::new(0);
        for v in [1, 2, 2, 9] {
            a.add(v);
        }
        b.add(3);
        b.add_censored();
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab, ba);
        assert_eq!(ab.total_mass() + ab.n_censored, ab.n_total);
    }

    #[test]
    fn exact_power_law_slopes() {
        let masses: Vec<f64> = (0..2000).map(|v| if v == 0 { 0.0 } else { (v as f64).powf(-2.5) }).collect();
        let bins = log_bins(&masses, 10, 500, 12);
        assert!(bins.len() >= 10);
        let s = ols_slope(&bins).slope;
        assert!((s + 2.5).abs() < 0.02, "{s}");
        let s = wls_slope(&bins).slope;
        assert!((s + 2.5).abs() < 0.02, "{s}");
    }

    #[test]
    fn hill_on_zeta_sample() {
        // deterministic sample: counts proportional to v^-2.5
        let mut h = Histogram::new(0);
        for v in 20..200_000usize {
            h.counts.resize(v + 1, 0);
            h.counts[v] = (1e9 * (v as f64).powf(-2.5)).round() as u64;
        }
        let s = hill_slope(&h, 20);
        assert!((s.slope + 2.5).abs() < 0.05, "{s:?}");
    }
}
