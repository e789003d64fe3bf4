//! Complex Gamma function.
//!
//! Stirling series after an upward shift to `Re z >= 15`, reflection for
//! `Re z < 1/2`. Relative error is below 1e-13 on the strip used by the
//! Wiener-Hopf factors.

use num_complex::Complex64;
use std::f64::consts::PI;

const SHIFT: f64 = 15.0;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

fn stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + series
}

/// Logarithm of Gamma, defined up to a multiple of `2 pi i` (the branch is
/// not tracked; exponentiate before comparing).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.re < SHIFT {
        prod *= w;
        w += 1.0;
    }
    stirling(w) - prod.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return PI / ((z * PI).sin() * gamma(1.0 - z));
    }
    ln_gamma(z).exp()
}

/// `1/Gamma(z)`, entire; exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        return gamma(1.0 - z) * (z * PI).sin() / PI;
    }
    (-ln_gamma(z)).exp()
}

pub fn beta(a: Complex64, b: Complex64) -> Complex64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn integers_and_half() {
        let mut fact = 1.0;
        for n in 1..20 {
            assert!(rel(gamma(c(n as f64, 0.0)), c(fact, 0.0)) < 1e-14, "n={n}");
            fact *= n as f64;
        }
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // 30-digit reference values
        let cases = [
            (c(1.0, 1.0), c(0.498015668118356042713691117462, -0.154949828301810685124955130484)),
            (c(0.3, -2.5), c(0.0358318849841501300372818543754, 0.0202648143651750027042190125935)),
            (c(-2.7, 0.4), c(-0.426013648168737428919168976845, 0.0364824190598796688230264207477)),
        ];
        for (z, want) in cases {
            assert!(rel(gamma(z), want) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn recurrence_and_reflection() {
        for i in -12..12 {
            for j in -8..8 {
                let z = c(0.37 * i as f64 + 0.01, 0.61 * j as f64);
                let lhs = gamma(z + 1.0);
                assert!(rel(lhs, z * gamma(z)) < 1e-13, "recurrence z={z}");
                let refl = gamma(z) * gamma(1.0 - z) * (z * PI).sin();
                assert!((refl - c(PI, 0.0)).norm() / PI < 1e-13, "reflection z={z}");
            }
        }
    }

    #[test]
    fn duplication() {
        for i in 0..10 {
            for j in -5..5 {
                let z = c(0.2 + 0.45 * i as f64, 0.7 * j as f64);
                let lhs = gamma(z) * gamma(z + 0.5);
                let rhs = c(2.0, 0.0).powc(1.0 - 2.0 * z) * PI.sqrt() * gamma(2.0 * z);
                assert!(rel(lhs, rhs) < 1e-13, "z={z}");
            }
        }
    }

    #[test]
    fn modulus_on_vertical_lines() {
        for k in 1..30 {
            let y = 0.25 * k as f64;
            let g = gamma(c(0.0, y)).norm_sqr();
            assert!((g - PI / (y * (PI * y).sinh())).abs() / g < 1e-13);
            let h = gamma(c(0.5, y)).norm_sqr();
            assert!((h - PI / (PI * y).cosh()).abs() / h < 1e-13);
        }
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        for n in 0..6 {
            assert_eq!(rgamma(c(-(n as f64), 0.0)).norm(), 0.0);
        }
        let z = c(-1.3, 0.2);
        assert!(rel(rgamma(z) * gamma(z), c(1.0, 0.0)) < 1e-14);
    }

    #[test]
    fn beta_symmetry_and_value() {
        let b = beta(c(2.0, 0.0), c(3.0, 0.0));
        assert!((b.re - 1.0 / 12.0).abs() < 1e-15);
        let a = c(1.3, 0.4);
        let bb = c(0.7, -1.1);
        assert!(rel(beta(a, bb), beta(bb, a)) < 1e-14);
    }
}
