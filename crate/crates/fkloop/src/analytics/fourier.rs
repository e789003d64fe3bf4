//! Fourier-side functions: the kernel `K`, its Wiener-Hopf factors, `R_+`
//! and the inverse transform `r_+`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{beta, gamma, rgamma};
use super::params::{DomainError, ModelParams};
use super::quad::integrate;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_strip(w: Complex64) -> Result<(), DomainError> {
    if w.im.abs() < 1.0 && w.re.is_finite() {
        Ok(())
    } else {
        Err(DomainError::Strip(w))
    }
}

/// `K(w) = pi / cosh(pi w/2) * (n/2 + i sinh(pi w/2))`.
pub fn kernel_k(w: Complex64, params: &ModelParams) -> Result<Complex64, DomainError> {
    check_strip(w)?;
    let x = w * (0.5 * PI);
    Ok(PI / x.cosh() * (0.5 * params.n + I * x.sinh()))
}

/// Principal-value Fourier integral of `k(z) = 1/sinh z + (n/2)/cosh z`,
/// folded onto the half line where it is regular.
pub fn kernel_k_numeric(w: Complex64, params: &ModelParams, tol: f64) -> Result<Complex64, DomainError> {
    check_strip(w)?;
    let n = params.n;
    let f = |y: f64| {
        let wy = w * y;
        let odd = wy.sin() / y.sinh();
        2.0 * I * odd + n * wy.cos() / y.cosh()
    };
    let top = 40.0 / (1.0 - w.im.abs()) + 4.0;
    let mut pts: Vec<f64> = (0..).map(|k| k as f64).take_while(|&x| x < top).collect();
    pts.push(top);
    let r = integrate(f, &pts, tol * 1e-3, tol, 4_000_000).map_err(|e| DomainError::Other(e.to_string()))?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy)]
pub struct WienerHopf {
    pub k_plus: Complex64,
    pub k_minus: Complex64,
    /// `|K K_+ - 2 pi^2 K_-| / |2 pi^2 K_-|`, or the absolute residual where `K_-` vanishes.
    pub residual: f64,
}

pub fn k_plus(w: Complex64, params: &ModelParams) -> Complex64 {
    let th = params.theta;
    let iw = I * w;
    gamma((3.0 + 2.0 * th - iw) / 4.0) * gamma((3.0 - 2.0 * th - iw) / 4.0) * rgamma((1.0 - iw) / 2.0)
        / c(2.0, 0.0).powc(iw / 2.0)
}

/// Evaluated through `1/Gamma`, so the removable point `w = i(1 - 2 theta)`
/// needs no special casing.
pub fn k_minus(w: Complex64, params: &ModelParams) -> Complex64 {
    let th = params.theta;
    let iw = I * w;
    c(2.0, 0.0).powc(-iw / 2.0)
        * gamma((1.0 + iw) / 2.0)
        * rgamma((1.0 + 2.0 * th + iw) / 4.0)
        * rgamma((1.0 - 2.0 * th + iw) / 4.0)
}

pub fn wiener_hopf(w: Complex64, params: &ModelParams) -> Result<WienerHopf, DomainError> {
    let k = kernel_k(w, params)?;
    let kp = k_plus(w, params);
    let km = k_minus(w, params);
    let rhs = 2.0 * PI * PI * km;
    let diff = (k * kp - rhs).norm();
    let residual = if rhs.norm() > 0.0 { diff / rhs.norm() } else { diff };
    Ok(WienerHopf { k_plus: kp, k_minus: km, residual })
}

/// `R_+(w) = -(4 sqrt2/(pi theta)) sin(pi theta/2) K_+(w) / ((w+i)(w+3i))`.
pub fn r_plus_hat(w: Complex64, params: &ModelParams) -> Complex64 {
    let th = params.theta;
    let pref = -4.0 * 2f64.sqrt() / (PI * th) * (0.5 * PI * th).sin();
    pref * k_plus(w, params) / ((w + I) * (w + 3.0 * I))
}

/// Wiener-Hopf constant `S`.
pub fn s_constant(params: &ModelParams) -> f64 {
    -8.0 * PI * 2f64.sqrt() / params.theta * (0.5 * PI * params.theta).sin()
}

/// Closed forms `(c0, c1) = ((4/theta) cos sin, -(4/theta^2) sin^2)` at `pi theta/2`.
pub fn c0_c1(params: &ModelParams) -> (f64, f64) {
    let th = params.theta;
    let t = 0.5 * PI * th;
    (4.0 / th * t.cos() * t.sin(), -4.0 / (th * th) * t.sin().powi(2))
}

/// `(c0, c1)` as residues of `K_-(w) S / ((w+i)(w+3i))` at `w = -i, -3i`,
/// where `F_+` has its poles.
pub fn c0_c1_from_factorisation(params: &ModelParams) -> (f64, f64) {
    let s = s_constant(params);
    let c0 = -0.5 * s * k_minus(c(0.0, -1.0), params);
    let c1 = 0.5 * s * k_minus(c(0.0, -3.0), params);
    (c0.re, c1.re)
}

#[derive(Debug, Clone, Copy)]
pub struct C0C1Residuals {
    /// `|c0 - gamma_plus (gamma_plus - gamma_minus)/2|`
    pub c0: f64,
    /// `|c1 + (gamma_plus - gamma_minus)^2/2|`
    pub c1: f64,
    /// distance between closed forms and the residues of the factorisation
    pub residue: f64,
}

pub fn consistency_c0_c1(params: &ModelParams) -> C0C1Residuals {
    let (c0, c1) = c0_c1(params);
    let (r0, r1) = c0_c1_from_factorisation(params);
    let w = params.width();
    C0C1Residuals {
        c0: (c0 - 0.5 * params.gamma_plus * w).abs(),
        c1: (c1 + 0.5 * w * w).abs(),
        residue: (c0 - r0).abs().max((c1 - r1).abs()),
    }
}

/// `r_+(v)` for `v >= 0`.
pub fn r_plus(v: f64, params: &ModelParams) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let th = params.theta;
    let pref = params.width() / (2f64.sqrt() * PI * th);
    // e^{2v} + sqrt(e^{4v}-1) = e^{u} with cosh u = e^{2v}
    let u = (2.0 * v).exp().acosh();
    pref * (-3.0 * v).exp() * 2.0 * (th * u).sinh()
}

fn ln_cosh(u: f64) -> f64 {
    u + (-2.0 * u).exp().ln_1p() - 2f64.ln()
}

/// `S_+(w) = int_0^inf e^{iwv} r_+(v) dv` after `e^{2v} = cosh u`.
pub fn s_plus_numeric(w: Complex64, params: &ModelParams, tol: f64) -> Result<Complex64, DomainError> {
    if w.im <= 0.0 {
        return Err(DomainError::Other(format!("omega = {w} must lie in the upper half-plane")));
    }
    let th = params.theta;
    let cst = params.width() / (2f64.sqrt() * PI * th);
    let expo = I * w / 2.0 - 2.5;
    let f = |u: f64| (expo * ln_cosh(u)).exp() * ((th * u).sinh() * u.sinh());
    let rate = 1.5 - th + 0.5 * w.im;
    let top = 40.0 / rate;
    let mut pts: Vec<f64> = (0..).map(|k| 0.5 * k as f64).take_while(|&x| x < top).collect();
    pts.push(top);
    let r = integrate(f, &pts, tol * 1e-3, tol, 4_000_000).map_err(|e| DomainError::Other(e.to_string()))?;
    Ok(cst * r.value)
}

/// The same transform assembled from the two Beta integrals.
pub fn s_plus_beta(w: Complex64, params: &ModelParams) -> Complex64 {
    let th = params.theta;
    let cst = params.width() / (2f64.sqrt() * PI * th);
    let a = (2.5 - I * w / 2.0) / 2.0;
    let term = |b: f64| c(4.0, 0.0).powc(a - 1.0) * beta(a + b, a - b);
    cst / 2.0 * (term((th + 1.0) / 2.0) - term((th - 1.0) / 2.0))
}

/// `int_0^inf cosh(2bt) / cosh(t)^{2a} dt` by quadrature.
pub fn beta_integral_numeric(a: Complex64, b: f64, tol: f64) -> Result<Complex64, DomainError> {
    let f = |t: f64| (-2.0 * a * ln_cosh(t)).exp() * (2.0 * b * t).cosh();
    let rate = 2.0 * a.re - 2.0 * b.abs();
    if rate <= 0.0 {
        return Err(DomainError::Other("Beta integral diverges: need Re a > |b|".into()));
    }
    let top = 40.0 / rate;
    let mut pts: Vec<f64> = (0..).map(|k| 0.5 * k as f64).take_while(|&x| x < top).collect();
    pts.push(top);
    let r = integrate(f, &pts, tol * 1e-3, tol, 4_000_000).map_err(|e| DomainError::Other(e.to_string()))?;
    Ok(r.value)
}

pub fn beta_integral_closed(a: Complex64, b: f64) -> Complex64 {
    c(4.0, 0.0).powc(a - 1.0) * beta(a + b, a - b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64) -> ModelParams {
        ModelParams::from_q(q).unwrap()
    }

    #[test]
    fn kernel_at_zero() {
        let m = p(2.0);
        let k = kernel_k(c(0.0, 0.0), &m).unwrap();
        assert!((k - c(PI * m.n / 2.0, 0.0)).norm() < 1e-15);
        assert!(kernel_k(c(0.0, 1.0), &m).is_err());
    }

    #[test]
    fn kernel_closed_vs_numeric() {
        let m = p(2.0);
        for w in [c(0.5, 0.3), c(0.0, 0.0), c(-1.7, -0.6), c(2.5, 0.8)] {
            let a = kernel_k(w, &m).unwrap();
            let b = kernel_k_numeric(w, &m, 1e-12).unwrap();
            assert!((a - b).norm() / a.norm() < 1e-8, "w={w}: {a} {b}");
        }
    }

    #[test]
    fn kernel_real_line_symmetry() {
        let m = p(1.3);
        for k in -10..10 {
            let w = c(0.3 * k as f64, 0.0);
            let a = kernel_k(-w.conj(), &m).unwrap();
            let b = kernel_k(w, &m).unwrap().conj();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn factorisation_identity() {
        for q in [1.0, 2.0, 3.0, 3.9] {
            let m = p(q);
            for i in -5..5 {
                for j in -4..5 {
                    let w = c(0.9 * i as f64 + 0.1, 0.2 * j as f64);
                    let r = wiener_hopf(w, &m).unwrap().residual;
                    assert!(r < 1e-10, "q={q} w={w} r={r}");
                }
            }
        }
    }

    #[test]
    fn k_minus_removable_point() {
        let m = p(2.0);
        let w0 = c(0.0, 1.0 - 2.0 * m.theta);
        let v = k_minus(w0, &m);
        assert!(v.is_finite());
        let near = k_minus(w0 + c(1e-7, 0.0), &m);
        assert!((near - v).norm() < 1e-5);
    }

    #[test]
    fn k_plus_cauchy_riemann() {
        let m = p(2.0);
        let h = 1e-3;
        for w in [c(0.3, 0.2), c(-1.1, 0.7), c(2.0, 1.5)] {
            let d = |step: Complex64| {
                (-k_plus(w + 2.0 * step, &m) + 8.0 * k_plus(w + step, &m) - 8.0 * k_plus(w - step, &m)
                    + k_plus(w - 2.0 * step, &m))
                    / (12.0 * step)
            };
            let dx = d(c(h, 0.0));
            let dy = d(c(0.0, h));
            assert!((dx - dy).norm() / dx.norm() < 1e-8);
        }
    }

    #[test]
    fn r_plus_normalisation() {
        for q in [0.25, 1.0, 2.0, 3.0, 3.9] {
            let v = r_plus_hat(c(0.0, 1.0), &p(q));
            assert!((v - c(0.5, 0.0)).norm() < 1e-10, "q={q}: {v}");
        }
    }

    #[test]
    fn inverse_transform_matches() {
        let m = p(2.0);
        for w in [c(0.0, 2.0), c(1.5, 0.5), c(-3.0, 1.0)] {
            let a = s_plus_numeric(w, &m, 1e-12).unwrap();
            let b = r_plus_hat(w, &m);
            let d = s_plus_beta(w, &m);
            assert!((a - b).norm() < 1e-6, "w={w}: {a} {b}");
            assert!((d - b).norm() < 1e-10, "w={w}: {d} {b}");
        }
    }

    #[test]
    fn r_plus_vanishes_at_zero() {
        let m = p(2.0);
        assert_eq!(r_plus(0.0, &m), 0.0);
        assert!(r_plus(1e-12, &m) < 1e-5);
        assert!(r_plus(0.5, &m) > 0.0);
    }

    #[test]
    fn beta_identity() {
        let m = p(2.0);
        for w in [c(0.0, 1.0), c(2.0, 0.5)] {
            let a = (2.5 - I * w / 2.0) / 2.0;
            for b in [(m.theta + 1.0) / 2.0, (m.theta - 1.0) / 2.0] {
                let x = beta_integral_numeric(a, b, 1e-12).unwrap();
                let y = beta_integral_closed(a, b);
                assert!((x - y).norm() < 1e-8, "{x} {y}");
            }
        }
    }

    #[test]
    fn c0_c1_match_endpoints() {
        for q in [0.25, 1.0, 2.0, 3.0, 3.9] {
            let m = p(q);
            let r = consistency_c0_c1(&m);
            assert!(r.c0 < 1e-12 && r.c1 < 1e-12 && r.residue < 1e-12, "q={q}: {r:?}");
            assert!(s_constant(&m) < 0.0);
        }
    }
}
