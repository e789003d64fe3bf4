//! Named numerical and Monte Carlo checks with pass/fail thresholds.

use num_complex::Complex64;

use crate::analytics::fourier::{
    beta_integral_closed, beta_integral_numeric, kernel_k, kernel_k_numeric, r_plus_hat, s_plus_numeric, wiener_hopf,
};
use crate::analytics::laws::perimeter_laws;
use crate::analytics::{
    asymptotic_ratio, partition_f_scaled, predicted_exponents, resolvent_w, ModelParams,
};
use crate::analytics::density::resolvent_equation_residual;
use crate::enumeration::enumerate_balanced_words;
use crate::maps::{map_to_word, word_to_map};
use crate::walks::{
    dictionary_histogram, geometric_coupling_check, hill_slope, log_bins, mc_perimeters, ols_slope, verify_dictionary,
    wls_slope, xi_centred_check, Caps,
};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst residual, or the statistic being thresholded.
    pub value: f64,
    pub threshold: f64,
    pub detail: Vec<String>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), passed: value < threshold, value, threshold, detail: Vec::new() }
    }

    fn failed(name: impl Into<String>, why: impl ToString) -> Self {
        Check { name: name.into(), passed: false, value: f64::NAN, threshold: f64::NAN, detail: vec![why.to_string()] }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: value={:.3e} threshold={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_of<I: IntoIterator<Item = Result<f64, String>>>(it: I) -> Result<f64, String> {
    let mut m: f64 = 0.0;
    for x in it {
        let x = x?;
        if !x.is_finite() {
            return Err(format!("non-finite residual {x}"));
        }
        m = m.max(x);
    }
    Ok(m)
}

fn params_or_fail(name: &str, q: f64) -> Result<ModelParams, Check> {
    ModelParams::from_q(q).map_err(|e| Check::failed(name, e))
}

/// `gamma_plus` against `1/(2 x_c)` and `2^{3/2} cos(pi theta/2)`.
pub fn parameter_identities(qs: &[f64]) -> Check {
    let name = "parameter identities";
    let r = max_of(qs.iter().map(|&q| {
        let m = ModelParams::from_q(q).map_err(|e| e.to_string())?;
        let r = m.residuals();
        Ok(r.gamma_plus_vs_x_c.max(r.gamma_plus_vs_trig))
    }));
    match r {
        Ok(v) => Check::new(name, v, 1e-12),
        Err(e) => Check::failed(name, e),
    }
}

/// `int rho = F_0 = 1`.
pub fn normalisation(qs: &[f64]) -> Check {
    let name = "density normalisation";
    let r = max_of(qs.iter().map(|&q| {
        let m = ModelParams::from_q(q).map_err(|e| e.to_string())?;
        let f = partition_f_scaled(0, &m, 1e-13).map_err(|e| e.to_string())?;
        Ok((f.value - 1.0).abs())
    }));
    match r {
        Ok(v) => Check::new(name, v, 1e-10),
        Err(e) => Check::failed(name, e),
    }
}

/// Resolvent equation on `points` interior points of the cut.
pub fn resolvent(q: f64, points: usize) -> Check {
    let name = format!("resolvent equation q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let r = max_of((1..=points).map(|i| {
        let x = m.gamma_minus + m.width() * i as f64 / (points + 1) as f64;
        resolvent_equation_residual(x, &m, 1e-12).map(f64::abs).map_err(|e| e.to_string())
    }));
    match r {
        Ok(v) => Check::new(name, v, 1e-6),
        Err(e) => Check::failed(name, e),
    }
}

/// `points` points of the strip `|Im w| < 1`.
pub fn strip_points(points: usize) -> Vec<Complex64> {
    let cols = 5;
    let rows = points.div_ceil(cols);
    let mut out = Vec::with_capacity(points);
    for i in 0..rows {
        for j in 0..cols {
            if out.len() == points {
                break;
            }
            let y = -0.8 + 1.6 * i as f64 / (rows.max(2) - 1) as f64;
            let x = -3.0 + 6.0 * j as f64 / (cols - 1) as f64 + 0.1;
            out.push(c(x, y));
        }
    }
    out
}

/// Closed-form kernel against its Fourier integral.
pub fn kernel(q: f64, points: usize) -> Check {
    let name = format!("kernel closed form q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let r = max_of(strip_points(points).into_iter().map(|w| {
        let a = kernel_k(w, &m).map_err(|e| e.to_string())?;
        let b = kernel_k_numeric(w, &m, 1e-12).map_err(|e| e.to_string())?;
        Ok((a - b).norm() / a.norm())
    }));
    match r {
        Ok(v) => Check::new(name, v, 1e-8),
        Err(e) => Check::failed(name, e),
    }
}

pub fn wiener_hopf_identity(q: f64, points: usize) -> Check {
    let name = format!("Wiener-Hopf factorisation q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let cols = 10;
    let r = max_of((0..points).map(|k| {
        let (i, j) = (k % cols, k / cols);
        let rows = points.div_ceil(cols).max(2);
        let w = c(-4.5 + 9.0 * i as f64 / (cols - 1) as f64, -0.95 + 1.9 * j as f64 / (rows - 1) as f64);
        wiener_hopf(w, &m).map(|x| x.residual).map_err(|e| e.to_string())
    }));
    match r {
        Ok(v) => Check::new(name, v, 1e-10),
        Err(e) => Check::failed(name, e),
    }
}

/// Inverse transform of `r_+`, the Beta integral, and `R_+(i) = 1/2`.
pub fn appendix(q: f64, points: usize) -> Check {
    let name = format!("inverse transform and Beta identity q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let pts: Vec<Complex64> = (0..points).map(|k| c(-3.0 + 6.0 * (k % 5) as f64 / 4.0, 0.25 + 0.5 * (k / 5) as f64)).collect();
    let transform = max_of(pts.iter().map(|&w| {
        let a = s_plus_numeric(w, &m, 1e-12).map_err(|e| e.to_string())?;
        Ok((a - r_plus_hat(w, &m)).norm())
    }));
    let beta = max_of(pts.iter().take(4).flat_map(|&w| {
        let a = (2.5 - Complex64::i() * w / 2.0) / 2.0;
        [(m.theta + 1.0) / 2.0, (m.theta - 1.0) / 2.0].map(|b| {
            let x = beta_integral_numeric(a, b, 1e-12).map_err(|e| e.to_string())?;
            Ok((x - beta_integral_closed(a, b)).norm())
        })
    }));
    let norm = (r_plus_hat(c(0.0, 1.0), &m) - 0.5).norm();
    match (transform, beta) {
        (Ok(t), Ok(b)) => {
            // scale each residual by its own threshold
            let worst = (t / 1e-6).max(b / 1e-8).max(norm / 1e-10);
            let mut ch = Check::new(name, worst, 1.0);
            ch.detail = vec![
                format!("max |S_+ - R_+| = {t:.3e} (< 1e-6)"),
                format!("max Beta integral error = {b:.3e} (< 1e-8)"),
                format!("|R_+(i) - 1/2| = {norm:.3e} (< 1e-10)"),
            ];
            ch
        }
        (Err(e), _) | (_, Err(e)) => Check::failed(name, e),
    }
}

/// `F_l l^{2-theta} / (c_F gamma_plus^l)` at `l = 10^2, 10^3, 10^4`: the last
/// within 5% of 1, with `|ratio - 1|` decreasing.
pub fn asymptotics(q: f64) -> Check {
    let name = format!("F_l asymptotics q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let rs: Result<Vec<f64>, String> = [100u32, 1000, 10000].iter().map(|&l| asymptotic_ratio(l, &m, 1e-12).map_err(|e| e.to_string())).collect();
    match rs {
        Ok(rs) => {
            let monotone = rs.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
            let mut ch = Check::new(name, (rs[2] - 1.0).abs(), 0.05);
            ch.passed &= monotone;
            ch.detail = vec![format!("ratios at 1e2, 1e3, 1e4: {:.5} {:.5} {:.5}; monotone approach: {monotone}", rs[0], rs[1], rs[2])];
            ch
        }
        Err(e) => Check::failed(name, e),
    }
}

/// `W(gamma_plus) = 2 / gamma_plus`.
pub fn edge_resolvent(q: f64) -> Check {
    let name = format!("W(gamma_plus) = 2/gamma_plus q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    match resolvent_w(c(m.gamma_plus, 0.0), &m, 1e-12) {
        Ok(w) => Check::new(name, (w - 2.0 / m.gamma_plus).norm(), 1e-8),
        Err(e) => Check::failed(name, e),
    }
}

/// Word -> map -> word for every balanced word with at most `k_max` burgers.
pub fn roundtrip(k_max: usize) -> Check {
    let name = format!("bijection round trip k<={k_max}");
    let mut bad = 0u64;
    let mut total = 0u64;
    for k in 1..=k_max {
        let words = match enumerate_balanced_words(k, k_max.max(crate::enumeration::DEFAULT_WORD_CAP)) {
            Ok(w) => w,
            Err(e) => return Check::failed(name, e),
        };
        for w in words {
            total += 1;
            match word_to_map(&w) {
                Ok((m, o)) if map_to_word(&m, &o) == w && m.edges() == k => {}
                _ => bad += 1,
            }
        }
    }
    let mut ch = Check::new(name, bad as f64, 0.5);
    ch.detail = vec![format!("{total} words, {bad} mismatches")];
    ch
}

/// Ratios `2 P(tau^h = l+1) gamma_plus^l / F_l` within 4 sigma of 1, the
/// estimates consistent with the recursion bounds, and at least
/// `min_resolved` uncensored runs.
pub fn dictionary(q: f64, samples: u64, seed: u64, caps: Caps, l_max: usize, min_resolved: u64) -> Check {
    let name = format!("hitting-time dictionary q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let h = match dictionary_histogram(&m, samples, seed, caps, l_max) {
        Ok(h) => h,
        Err(e) => return Check::failed(name, e),
    };
    let rep = match verify_dictionary(&h, &m, l_max, 30, 1e-12) {
        Ok(r) => r,
        Err(e) => return Check::failed(name, e),
    };
    let resolved = rep.n_total - rep.n_censored;
    let mut ch = Check::new(name, rep.max_abs_z(), 4.0);
    ch.passed &= rep.rows.iter().all(|r| r.bracketed) && rep.rows.len() == l_max + 1 && resolved >= min_resolved;
    ch.detail.push(format!("runs {} resolved {} censored {}", rep.n_total, resolved, rep.n_censored));
    for r in &rep.rows {
        ch.detail.push(format!(
            "l={:2} P={:.6e} ratio={:.5} se={:.5} z={:+.2} bounds=[{:.6e}, {:.6e}] bracketed={}",
            r.l, r.estimate.point, r.ratio, r.ratio_stderr, r.z, r.dp_bounds.lower, r.dp_bounds.upper, r.bracketed
        ));
    }
    ch.detail.extend(rep.notes);
    ch
}

pub fn coupling(q: f64, samples: u64, seed: u64, caps: Caps) -> Check {
    let name = format!("geometric coupling q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let r = match geometric_coupling_check(&m, samples, seed, 5, 64, caps) {
        Ok(r) => r,
        Err(e) => return Check::failed(name, e),
    };
    let zmax = r.factorization.iter().map(|f| f.z.abs()).fold(0.0, f64::max);
    let zmean = ((r.mean_gap - 2.0) / r.mean_gap_stderr).abs();
    let zcorr = (r.correlation / r.correlation_stderr).abs();
    let worst = zmax.max(zmean).max(zcorr);
    let mut ch = Check::new(name, worst, 4.0);
    ch.passed &= r.p_value > 1e-4;
    ch.detail.push(format!("gaps {} mean {:.5} ± {:.5}; chi2 {:.2} on {} dof, p = {:.4}", r.n_gaps, r.mean_gap, r.mean_gap_stderr, r.chi2, r.dof, r.p_value));
    for f in &r.factorization {
        ch.detail.push(format!("l={} joint={:.6e} product={:.6e} z={:+.2}", f.l, f.joint, f.product, f.z));
    }
    ch.detail.push(format!("step correlation {:+.5} ± {:.5}; censored {} undecided {}", r.correlation, r.correlation_stderr, r.n_censored, r.undecided));
    ch
}

/// Tail slopes of the cluster and loop perimeters over `[lo, hi]` against
/// `-(3 - 2 theta)`, plus the censored share of the fit range.
pub fn perimeter_slopes(q: f64, samples: u64, seed: u64, caps: Caps, lo: usize, hi: usize, tolerance: f64) -> Check {
    let name = format!("perimeter exponents q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let s = match mc_perimeters(&m, samples, seed, caps) {
        Ok(s) => s,
        Err(e) => return Check::failed(name, e),
    };
    let target = -predicted_exponents(&m).perimeter;
    let exact = perimeter_laws(hi, &m, 1e-11).ok();
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    let mut censored_ok = true;
    for (label, h, ex) in [("cluster", &s.cluster, exact.as_ref().map(|e| &e.cluster)), ("loop", &s.loops, exact.as_ref().map(|e| &e.loops))] {
        let masses: Vec<f64> = h.counts.iter().map(|&x| x as f64).collect();
        let bins = log_bins(&masses, lo, hi, 12);
        let ols = ols_slope(&bins);
        let wls = wls_slope(&bins);
        let hill = hill_slope(h, lo);
        let share = h.censored_share(lo, hi);
        censored_ok &= share < 0.05;
        worst = worst.max((ols.slope - target).abs());
        let law = ex.map(|e| ols_slope(&log_bins(e, lo, hi, 12)).slope).unwrap_or(f64::NAN);
        detail.push(format!(
            "{label}: ols {:.4} ± {:.4} (target {:.4}); wls {:.4}; hill {:.4}; exact-law ols {:.4}; censored bracket [{:.3e}, {:.3e}] share {:.2e}",
            ols.slope,
            ols.stderr,
            target,
            wls.slope,
            hill.slope,
            law,
            h.mass_in(lo, hi) as f64 / h.n_total as f64,
            (h.mass_in(lo, hi) + h.n_censored) as f64 / h.n_total as f64,
            share
        ));
    }
    let mut ch = Check::new(name, worst, tolerance);
    ch.passed &= censored_ok;
    detail.push(format!("runs {} h-first {} c-first {} coupling violations {}", samples, s.h_first, s.c_first, s.coupling_violations));
    ch.detail = detail;
    ch
}

/// Truncated means of the step `xi` at `levels`: the last below `bound` in
/// magnitude (censored steps included), decreasing along the levels.
pub fn xi_centred(q: f64, samples: u64, seed: u64, cap: u64, levels: &[u64], bound: f64) -> Check {
    let name = format!("centred steps q={q}");
    let m = match params_or_fail(&name, q) {
        Ok(m) => m,
        Err(c) => return c,
    };
    let r = match xi_centred_check(&m, samples, seed, levels, cap) {
        Ok(r) => r,
        Err(e) => return Check::failed(name, e),
    };
    let last = r.h.last().expect("levels");
    let worst = last.bracket.0.abs().max(last.bracket.1.abs());
    let mut ch = Check::new(name, worst, bound);
    ch.passed &= r.trend_decreasing();
    for (a, b) in r.h.iter().zip(&r.c) {
        ch.detail.push(format!(
            "M={:>6}: h {:+.5} ± {:.5} bracket [{:+.5}, {:+.5}]; c {:+.5} ± {:.5}",
            a.m, a.mean, a.stderr, a.bracket.0, a.bracket.1, b.mean, b.stderr
        ));
    }
    ch.detail.push(format!("samples {} censored h {} c {}", r.n_samples, r.censored_h, r.censored_c));
    ch
}
