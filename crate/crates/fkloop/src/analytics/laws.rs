//! Exact laws of `tau^h`, the cluster perimeter and the loop perimeter,
//! assembled from the moments `F_l`.

use statrs::function::gamma::ln_gamma;

use super::density::partition_f_scaled;
use super::params::ModelParams;
use super::quad::QuadError;

/// `P(tau^h = j) = F_{j-1} gamma_plus^{-(j-1)} / 2` for `j = 0..=j_max`
/// (index 0 holds 0).
pub fn tau_law(j_max: usize, params: &ModelParams, tol: f64) -> Result<Vec<f64>, QuadError> {
    let mut out = vec![0.0; j_max + 1];
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = 0.5 * partition_f_scaled((j - 1) as u32, params, tol)?.value;
    }
    Ok(out)
}

/// `S(m) = P(tau > m)` for `m = 0..law.len()-1`.
pub fn survival(law: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(law.len());
    let mut acc = 1.0;
    for &a in law {
        acc -= a;
        s.push(acc.max(0.0));
    }
    s
}

/// `P(N_k = m)` where `N_k` counts the failures before the `k`-th success of
/// a fair coin.
pub fn negbin_pmf(k: usize, m: usize) -> f64 {
    if k == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let (kf, mf) = (k as f64, m as f64);
    (ln_gamma(mf + kf) - ln_gamma(kf) - ln_gamma(mf + 1.0) - (mf + kf) * std::f64::consts::LN_2).exp()
}

fn negbin_reach(k: usize) -> usize {
    let kf = k as f64;
    (kf + 12.0 * (2.0 * kf).sqrt() + 60.0) as usize
}

#[derive(Debug, Clone)]
pub struct PerimeterLaws {
    pub tau: Vec<f64>,
    /// `P(|dK(0)| = l)`, `l = 0..=l_max`.
    pub cluster: Vec<f64>,
    /// `P(|L(0)| = l)`, `l = 0..=l_max`.
    pub loops: Vec<f64>,
}

pub fn perimeter_laws(l_max: usize, params: &ModelParams, tol: f64) -> Result<PerimeterLaws, QuadError> {
    let j_max = negbin_reach(l_max + 1).max(l_max + 1);
    let tau = tau_law(j_max, params, tol)?;
    let s = survival(&tau);
    let cluster = (0..=l_max)
        .map(|l| {
            let k = l + 1;
            let e: f64 = (0..=negbin_reach(k).min(j_max)).map(|m| negbin_pmf(k, m) * s[m]).sum();
            2.0 * tau[k] * e
        })
        .collect();
    let loops = (0..=l_max)
        .map(|l| {
            let acc: f64 = (1..=l).map(|k| tau[k] * negbin_pmf(k, l - k) * s[l - k]).sum();
            2.0 * acc
        })
        .collect();
    Ok(PerimeterLaws { tau, cluster, loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::predicted_exponents;

    #[test]
    fn negbin_normalised() {
        for k in [1, 5, 40] {
            let s: f64 = (0..2000).map(|m| negbin_pmf(k, m)).sum();
            assert!((s - 1.0).abs() < 1e-12);
            let mean: f64 = (0..2000).map(|m| m as f64 * negbin_pmf(k, m)).sum();
            assert!((mean - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn small_values_q2() {
        let m = ModelParams::from_q(2.0).unwrap();
        let laws = perimeter_laws(40, &m, 1e-12).unwrap();
        assert!((laws.tau[1] - 0.5).abs() < 1e-10);
        // the smallest loop surrounds a single burger: P = 1/2
        assert_eq!(laws.loops[0], 0.0);
        assert!((laws.loops[1] - 0.5).abs() < 1e-10);
        assert!(laws.loops.iter().sum::<f64>() < 1.0);
        assert!(laws.cluster.iter().sum::<f64>() < 1.0);
        // the loop is never shorter than the cluster boundary
        let mut cl = 0.0;
        let mut lo = 0.0;
        for l in 0..=40 {
            cl += laws.cluster[l];
            lo += laws.loops[l];
            assert!(lo <= cl + 1e-12);
        }
    }

    #[test]
    fn constants_approached() {
        for q in [1.0, 2.0] {
            let m = ModelParams::from_q(q).unwrap();
            let e = predicted_exponents(&m);
            let laws = perimeter_laws(800, &m, 1e-11).unwrap();
            let l = 800f64;
            let rc = laws.cluster[800] * l.powf(e.perimeter) / e.cluster_constant;
            let rl = laws.loops[800] * l.powf(e.perimeter) / e.loop_constant;
            assert!((rc - 1.0).abs() < 0.06, "q={q} cluster ratio {rc}");
            assert!((rl - 1.0).abs() < 0.08, "q={q} loop ratio {rl}");
        }
    }
}
