//! Spectral density on the cut and the moments `F_l`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::gamma_real;
use super::params::{DomainError, ModelParams};
use super::quad::{integrate, tanh_sinh, Estimate, QuadError};

const MAX_EVALS: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SpectralDensity {
    pub params: ModelParams,
    pref: f64,
}

impl SpectralDensity {
    pub fn new(params: ModelParams) -> Self {
        let th = params.theta;
        let pref = 2f64.powf(-th - 0.5) / (PI * th * params.width());
        SpectralDensity { params, pref }
    }

    /// `rho(y)` for `y` in the closed cut.
    pub fn eval(&self, y: f64) -> Result<f64, DomainError> {
        let (lo, hi) = (self.params.gamma_minus, self.params.gamma_plus);
        if !(y >= lo && y <= hi) {
            return Err(DomainError::OutsideCut { y, lo, hi });
        }
        Ok(self.at_gap(hi - y))
    }

    /// `rho(gamma_plus - d)` for `d` in `[0, width]`.
    pub fn at_gap(&self, d: f64) -> f64 {
        let w = self.params.width();
        if d <= 0.0 || d >= w {
            return 0.0;
        }
        self.at_gap_pair(d, w - d)
    }

    /// `rho` evaluated from both distances `d = gamma_plus - y` and
    /// `e = y - gamma_minus`, so that either endpoint is resolved exactly.
    pub fn at_gap_pair(&self, d: f64, e: f64) -> f64 {
        if d <= 0.0 || e <= 0.0 {
            return 0.0;
        }
        let th = self.params.theta;
        let w = self.params.width();
        let a = (w + d).sqrt();
        let b = e.sqrt();
        let s = a + b;
        let diff = -(2.0 * th * (-2.0 * b / s).ln_1p()).exp_m1();
        self.pref * d.powf(1.0 - th) * s.powf(2.0 * th) * diff
    }

    /// Leading coefficient of `rho(y) ~ c (gamma_plus - y)^(1-theta)`.
    pub fn edge_coefficient(&self) -> f64 {
        let th = self.params.theta;
        2f64.powf(th - 0.5) * self.params.width().powf(th - 1.0) / (PI * th)
    }
}

/// Integrate `g(d) * rho(gamma_plus - d) dy` over the cut with the
/// substitution `d = width * exp(-2u)`; the block `u < 1` uses `u = s^2`.
fn cut_integral<T, G>(rho: &SpectralDensity, g: G, centre: f64, tol: f64) -> Result<Estimate<T>, QuadError>
where
    T: super::quad::Value,
    G: Fn(f64) -> T,
{
    let w = rho.params.width();
    let th = rho.params.theta;
    let near = |s: f64| {
        let u = s * s;
        let d = w * (-2.0 * u).exp();
        let e = -w * (-2.0 * u).exp_m1();
        g(d) * (rho.at_gap_pair(d, e) * 2.0 * d * 2.0 * s)
    };
    let a = integrate(&near, &[0.0, 0.5, 1.0], tol * 1e-3, tol, MAX_EVALS)?;
    let far = |u: f64| {
        let d = w * (-2.0 * u).exp();
        let e = -w * (-2.0 * u).exp_m1();
        g(d) * (rho.at_gap_pair(d, e) * 2.0 * d)
    };
    let c = centre.max(1.0);
    let mut pts = vec![1.0];
    for off in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let x = c + off;
        if x > *pts.last().unwrap() {
            pts.push(x);
        }
    }
    // integrand decays like exp(-2(2-theta)(u - centre)) beyond the peak
    let u_max = c + 40.0 / (2.0 * (1.0 - th));
    pts.push(u_max);
    let b = integrate(&far, &pts, tol * 1e-3 * a.value.magnitude(), tol, MAX_EVALS)?;
    Ok(Estimate { value: a.value + b.value, error: a.error + b.error, evals: a.evals + b.evals })
}

/// Rescaled moment `F_l * gamma_plus^(-l)` with its error estimate.
pub fn partition_f_scaled(l: u32, params: &ModelParams, tol: f64) -> Result<Estimate<f64>, QuadError> {
    let rho = SpectralDensity::new(*params);
    let gp = params.gamma_plus;
    let lf = l as f64;
    let g = move |d: f64| {
        if l == 0 {
            1.0
        } else if d < gp {
            (lf * (-d / gp).ln_1p()).exp()
        } else {
            ((gp - d) / gp).powi(l as i32)
        }
    };
    let th = params.theta;
    let centre = if l == 0 { 1.0 } else { 0.5 * (lf * params.width() / ((2.0 - th) * gp)).ln() };
    cut_integral(&rho, g, centre, tol)
}

#[derive(Debug, Clone, Copy)]
pub struct FValue {
    pub l: u32,
    pub scaled: f64,
    pub log: f64,
    pub abs_err: f64,
}

pub fn partition_f(l: u32, params: &ModelParams, tol: f64) -> Result<FValue, QuadError> {
    let e = partition_f_scaled(l, params, tol)?;
    Ok(FValue {
        l,
        scaled: e.value,
        log: e.value.ln() + l as f64 * params.gamma_plus.ln(),
        abs_err: e.error,
    })
}

/// `F_l gamma_plus^(-l)` computed directly in `y` with tanh-sinh; used as an
/// independent check for moderate `l`.
pub fn partition_f_scaled_direct(l: u32, params: &ModelParams, tol: f64) -> Result<f64, QuadError> {
    let rho = SpectralDensity::new(*params);
    let gp = params.gamma_plus;
    let r = tanh_sinh(
        |y, e, d| rho.at_gap_pair(d, e) * (y / gp).powi(l as i32),
        params.gamma_minus,
        gp,
        tol,
        14,
    )?;
    Ok(r.value)
}

/// Constant `c_F` with `F_l ~ c_F gamma_plus^l l^(theta-2)`.
pub fn asymptotic_constant(params: &ModelParams) -> f64 {
    let rho = SpectralDensity::new(*params);
    let th = params.theta;
    rho.edge_coefficient() * params.gamma_plus.powf(2.0 - th) * gamma_real(2.0 - th)
}

/// `c_F gamma_plus^l / l^(2-theta)`, returned as its logarithm.
pub fn asymptotic_f_log(l: u32, params: &ModelParams) -> f64 {
    let lf = l as f64;
    asymptotic_constant(params).ln() + lf * params.gamma_plus.ln() - (2.0 - params.theta) * lf.ln()
}

/// Ratio `F_l / (c_F gamma_plus^l l^(theta-2))`.
pub fn asymptotic_ratio(l: u32, params: &ModelParams, tol: f64) -> Result<f64, QuadError> {
    let f = partition_f(l, params, tol)?;
    Ok((f.log - asymptotic_f_log(l, params)).exp())
}

/// Resolvent `W(z) = int rho(y)/(z-y) dy` off the open cut.
pub fn resolvent_w(z: Complex64, params: &ModelParams, tol: f64) -> Result<Complex64, DomainError> {
    if z.im == 0.0 && z.re > params.gamma_minus && z.re < params.gamma_plus {
        return Err(DomainError::OnCut(z.re));
    }
    let rho = SpectralDensity::new(*params);
    let gp = params.gamma_plus;
    let r = cut_integral(&rho, |d: f64| (z - gp + d).inv(), 1.0, tol)
        .map_err(|e| DomainError::Other(e.to_string()))?;
    Ok(r.value)
}

/// Principal value `PV int rho(y)/(x-y) dy` for `x` inside the cut, by
/// subtracting `rho(x)` and integrating the logarithm analytically.
pub fn resolvent_pv(x: f64, params: &ModelParams, tol: f64) -> Result<f64, DomainError> {
    let (lo, hi) = (params.gamma_minus, params.gamma_plus);
    if !(x > lo && x < hi) {
        return Err(DomainError::OutsideCut { y: x, lo, hi });
    }
    let rho = SpectralDensity::new(*params);
    let rx = rho.at_gap_pair(hi - x, x - lo);
    let left = tanh_sinh(|y, da, db| (rho.at_gap_pair(hi - y, da) - rx) / db, lo, x, tol, 14);
    let right = tanh_sinh(|y, da, db| (rho.at_gap_pair(db, y - lo) - rx) / -da, x, hi, tol, 14);
    let (left, right) = match (left, right) {
        (Ok(a), Ok(b)) => (a.value, b.value),
        (Err(e), _) | (_, Err(e)) => return Err(DomainError::Other(e.to_string())),
    };
    Ok(left + right + rx * ((x - lo) / (hi - x)).ln())
}

/// Left side minus right side of the resolvent equation at `x` in the cut.
pub fn resolvent_equation_residual(x: f64, params: &ModelParams, tol: f64) -> Result<f64, DomainError> {
    let pv = resolvent_pv(x, params, tol)?;
    let rho = SpectralDensity::new(*params);
    let shift = 1.0 / params.x_c;
    let gp = params.gamma_plus;
    // regular part: x + y - 1/x_c < 0 on the cut
    let reg = cut_integral(&rho, |d: f64| 1.0 / (x + gp - d - shift), 1.0, tol)
        .map_err(|e| DomainError::Other(e.to_string()))?;
    Ok(pv - 0.5 * params.n * reg.value - 0.5 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64) -> ModelParams {
        ModelParams::from_q(q).unwrap()
    }

    #[test]
    fn endpoints_vanish_and_interior_positive() {
        for q in [0.25, 1.0, 2.0, 3.0, 3.9] {
            let m = p(q);
            let r = SpectralDensity::new(m);
            assert_eq!(r.eval(m.gamma_plus).unwrap(), 0.0);
            assert_eq!(r.eval(m.gamma_minus).unwrap(), 0.0);
            for i in 1..200 {
                let y = m.gamma_minus + m.width() * i as f64 / 200.0;
                assert!(r.eval(y).unwrap() > 0.0);
            }
            assert!(r.eval(m.gamma_plus + 1e-9).is_err());
        }
    }

    #[test]
    fn edge_behaviour() {
        let m = p(2.0);
        let r = SpectralDensity::new(m);
        let c = r.edge_coefficient();
        for d in [1e-6, 1e-8, 1e-10] {
            let ratio = r.at_gap(d) / (c * d.powf(1.0 - m.theta));
            assert!((ratio - 1.0).abs() < 10.0 * d.sqrt(), "d={d} ratio={ratio}");
        }
    }

    #[test]
    fn stable_form_matches_literal_formula() {
        let m = p(1.5);
        let r = SpectralDensity::new(m);
        let (gp, gm, th) = (m.gamma_plus, m.gamma_minus, m.theta);
        for i in 1..50 {
            let y = gm + m.width() * i as f64 / 50.0;
            let a = (2.0 * gp - gm - y).sqrt();
            let b = (y - gm).sqrt();
            let lit = 2f64.powf(-th - 0.5) / (PI * th * m.width())
                * (gp - y).powf(1.0 - th)
                * ((a + b).powf(2.0 * th) - (a - b).powf(2.0 * th));
            assert!((r.eval(y).unwrap() - lit).abs() < 1e-13 * lit.abs().max(1e-3));
        }
    }

    #[test]
    fn normalisation() {
        for q in [0.25, 1.0, 2.0, 3.0, 3.9] {
            let f0 = partition_f_scaled(0, &p(q), 1e-13).unwrap().value;
            assert!((f0 - 1.0).abs() < 1e-10, "q={q}: {f0}");
        }
    }

    #[test]
    fn two_rules_agree() {
        for q in [1.0, 2.0, 3.0] {
            let m = p(q);
            for l in [1u32, 2, 5, 20] {
                let a = partition_f_scaled(l, &m, 1e-13).unwrap().value;
                let b = partition_f_scaled_direct(l, &m, 1e-13).unwrap();
                assert!((a - b).abs() < 1e-9 * b.abs(), "q={q} l={l}: {a} {b}");
            }
        }
    }

    #[test]
    fn first_moments_reference() {
        // 30-digit reference quadrature of the same integrals
        let cases = [
            (1.0, [0.11111111111111111111, 0.19444444444444444444, 0.021120535222865755559]),
            (2.0, [0.14213562373095048802, 0.18502884254440296362, 0.020442958419228062947]),
            (3.0, [0.16237101988094036461, 0.18032021231206307109, 0.020161741437432836306]),
        ];
        for (q, want) in cases {
            for (l, w) in [1u32, 2, 10].into_iter().zip(want) {
                let f = partition_f_scaled(l, &p(q), 1e-13).unwrap().value;
                assert!((f - w).abs() < 1e-11 * w, "q={q} l={l}: {f}");
            }
        }
    }

    #[test]
    fn large_l_is_finite_and_positive() {
        let m = p(2.0);
        let f = partition_f(100_000, &m, 1e-10).unwrap();
        assert!(f.scaled > 0.0 && f.log.is_finite());
    }

    #[test]
    fn resolvent_at_infinity_and_edge() {
        for q in [1.0, 2.0, 3.0] {
            let m = p(q);
            let z = Complex64::new(1e6, 0.0);
            let w = resolvent_w(z, &m, 1e-12).unwrap();
            assert!(((w * z).re - 1.0).abs() < 1e-5);
            let we = resolvent_w(Complex64::new(m.gamma_plus, 0.0), &m, 1e-12).unwrap();
            assert!((we.re - 2.0 / m.gamma_plus).abs() < 1e-8, "q={q}: {}", we.re);
            assert!(resolvent_w(Complex64::new(0.0, 0.0), &m, 1e-12).is_err());
        }
    }

    #[test]
    fn resolvent_equation_holds() {
        let m = p(2.0);
        for i in 1..10 {
            let x = m.gamma_minus + m.width() * (0.01 + 0.98 * i as f64 / 10.0);
            let r = resolvent_equation_residual(x, &m, 1e-12).unwrap();
            assert!(r.abs() < 1e-6, "x={x} r={r}");
        }
    }
}
