//! Closed-form parameters, the spectral density, Fourier-side identities and
//! the exact perimeter laws that follow from `F_l`.

pub mod density;
pub mod fourier;
pub mod gamma;
pub mod laws;
pub mod params;
pub mod quad;

pub use density::{
    asymptotic_constant, asymptotic_ratio, partition_f, partition_f_scaled, resolvent_pv, resolvent_w,
    FValue, SpectralDensity,
};
pub use params::{DomainError, ModelParams};

/// Tail exponents and constants predicted from the asymptotics of `F_l`.
#[derive(Debug, Clone, Copy)]
pub struct Exponents {
    /// `P(|dK| = l) ~ C l^-(3-2 theta)`; the loop perimeter has the same exponent.
    pub perimeter: f64,
    /// `P(tau = l) ~ c l^-(2-theta)`.
    pub tau: f64,
    /// `F_l ~ c_F gamma_plus^l l^-(2-theta)`.
    pub f: f64,
    pub c_f: f64,
    /// `c = c_F / 2`, so that `P(tau^h = l+1) ~ c l^(theta-2)`.
    pub c_tau: f64,
    pub cluster_constant: f64,
    pub loop_constant: f64,
}

pub fn predicted_exponents(params: &ModelParams) -> Exponents {
    let th = params.theta;
    let c_f = asymptotic_constant(params);
    let c = 0.5 * c_f;
    Exponents {
        perimeter: 3.0 - 2.0 * th,
        tau: 2.0 - th,
        f: 2.0 - th,
        c_f,
        c_tau: c,
        cluster_constant: 2.0 * c * c / (1.0 - th),
        loop_constant: 2f64.powf(3.0 - 2.0 * th) * c * c / (1.0 - th),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_values() {
        let e = predicted_exponents(&ModelParams::from_q(2.0).unwrap());
        assert!((e.perimeter - 2.5).abs() < 1e-15);
        let e1 = predicted_exponents(&ModelParams::from_q(1.0).unwrap());
        assert!((e1.tau - 5.0 / 3.0).abs() < 1e-15);
        for i in 1..40 {
            let e = predicted_exponents(&ModelParams::from_q(0.1 * i as f64).unwrap());
            assert!(e.c_f > 0.0 && e.loop_constant > 0.0 && e.cluster_constant > 0.0);
        }
    }
}
