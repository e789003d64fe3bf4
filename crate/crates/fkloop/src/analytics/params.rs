use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("q must lie in (0,4); got {0} (q = 4 is excluded)")]
    Q(f64),
    #[error("p must lie in (0,1/2); got {0}")]
    P(f64),
    #[error("y = {y} lies outside the cut [{lo}, {hi}]")]
    OutsideCut { y: f64, lo: f64, hi: f64 },
    #[error("z = {0} lies on the open cut; use the principal value")]
    OnCut(f64),
    #[error("omega = {0} lies outside the strip |Im| < 1")]
    Strip(num_complex::Complex64),
    #[error("{0}")]
    Other(String),
}

/// Coupled constants of the self-dual FK(q) / fully packed O(n) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub q: f64,
    pub p: f64,
    pub n: f64,
    pub theta: f64,
    pub x_c: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl ModelParams {
    pub fn from_q(q: f64) -> Result<Self, DomainError> {
        if !(q > 0.0 && q < 4.0) {
            return Err(DomainError::Q(q));
        }
        let n = q.sqrt();
        let p = n / (2.0 + n);
        let theta = (0.5 * n).acos() / PI;
        let x_c = 1.0 / (8.0 * (n + 2.0)).sqrt();
        let gamma_plus = 2f64.powf(1.5) * (0.5 * PI * theta).cos();
        let width = 2f64.powf(1.5) / theta * (0.5 * PI * theta).sin();
        Ok(ModelParams { q, p, n, theta, x_c, gamma_minus: gamma_plus - width, gamma_plus })
    }

    pub fn from_p(p: f64) -> Result<Self, DomainError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(DomainError::P(p));
        }
        let n = 2.0 * p / (1.0 - p);
        Self::from_q(n * n)
    }

    /// Cut width `gamma_plus - gamma_minus`.
    pub fn width(&self) -> f64 {
        self.gamma_plus - self.gamma_minus
    }

    pub fn residuals(&self) -> ParamResiduals {
        let t = 0.5 * PI * self.theta;
        ParamResiduals {
            gamma_plus_vs_x_c: (self.gamma_plus - 0.5 / self.x_c).abs(),
            gamma_plus_vs_trig: (self.gamma_plus - 2f64.powf(1.5) * t.cos()).abs(),
            n_vs_p: (self.n - 2.0 * self.p / (1.0 - self.p)).abs(),
            theta_vs_n: ((PI * self.theta).cos() - 0.5 * self.n).abs(),
            c0: (0.5 * self.gamma_plus * self.width() - 4.0 / self.theta * t.cos() * t.sin()).abs(),
            c1: (-0.5 * self.width().powi(2) + 4.0 / self.theta.powi(2) * t.sin().powi(2)).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamResiduals {
    pub gamma_plus_vs_x_c: f64,
    pub gamma_plus_vs_trig: f64,
    pub n_vs_p: f64,
    pub theta_vs_n: f64,
    pub c0: f64,
    pub c1: f64,
}

impl ParamResiduals {
    pub fn max(&self) -> f64 {
        [self.gamma_plus_vs_x_c, self.gamma_plus_vs_trig, self.n_vs_p, self.theta_vs_n, self.c0, self.c1]
            .into_iter()
            .fold(0.0, f64::max)
    }
}
