//! Problem parameters (N, s, p) and the derived exponent bundle.
//!
//! Everything downstream of the equation -Δu + (-Δ)^s u = |u|^{p-2} u depends
//! on the dimension N ≥ 3, the fractional order s ∈ (0, 1), and the
//! nonlinearity exponent p, which must lie strictly between the fractional
//! critical exponent 2N/(N-2s) and the critical Sobolev exponent 2N/(N-2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated problem parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    dim: u32,
    s: f64,
    p: f64,
}

impl Params {
    pub fn new(dim: u32, s: f64, p: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::parameter(format!("dimension N must be >= 3 (got {dim})")));
        }
        if !(s > 0.0 && s < 1.0) || !s.is_finite() {
            return Err(Error::parameter(format!("s must lie in (0, 1) (got {s})")));
        }
        let n = f64::from (dim);
        let two_s_star = 2.0 * n / (n - 2.0 * s);
        let two_star = 2.0 * n / (n - 2.0);
        if !p.is_finite() || p <= two_s_star {
            return Err(Error::parameter(format!(
                "p must exceed 2N/(N-2s) = {two_s_star} (got {p})"
            )));
        }
        if p >= two_star {
            return Err(Error::parameter(format!(
                "p must stay below 2N/(N-2) = {two_star} (got {p})"
            )));
        }
        Ok(Params { dim, s, p })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn dim_f(&self) -> f64 {
        f64::from(self.dim)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Fractional critical exponent 2N/(N-2s).
    pub fn two_s_star(&self) -> f64 {
        2.0 * self.dim_f() / (self.dim_f() - 2.0 * self.s)
    }

    /// Critical Sobolev exponent 2N/(N-2).
    pub fn two_star(&self) -> f64 {
        2.0 * self.dim_f() / (self.dim_f() - 2.0)
    }

    pub fn exponents(&self) -> ExponentBundle {
        ExponentBundle::new(self)
    }
}

/// All derived exponents and constants of the interpolation inequality.
///
/// `alpha` and `beta` are the exponents carried by the squared fractional and
/// local seminorms; `a1 = alpha/2`, `a2 = beta/2` act on the squared norms.
/// `r_a` and `r_b` are the mass fractions of the two seminorms on the ground
/// state (a = r_a·m, b = r_b·m), and `k_const = r_b^{a1}·r_a^{a2}` is the
/// constant tying the L^p mass of the normalized solution to the reciprocal
/// best constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExponentBundle {
    pub alpha: f64,
    pub beta: f64,
    pub a1: f64,
    pub a2: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub k_const: f64,
    pub two_s_star: f64,
    pub two_star: f64,
}

impl ExponentBundle {
    pub fn new(params: &Params) -> Self {
        let n = params.dim_f();
        let s = params.s();
        let p = params.p();
        let alpha = (2.0 * n - p * (n - 2.0)) / (2.0 * (1.0 - s));
        let beta = (p * (n - 2.0 * s) - 2.0 * n) / (2.0 * (1.0 - s));
        let r_a = (p * (n - 2.0 * s) - 2.0 * n) / (2.0 * p * (1.0 - s));
        let r_b = (2.0 * n - p * (n - 2.0)) / (2.0 * p * (1.0 - s));
        let a1 = alpha / 2.0;
        let a2 = beta / 2.0;
        ExponentBundle {
            alpha,
            beta,
            a1,
            a2,
            r_a,
            r_b,
            k_const: r_b.powf(a1) * r_a.powf(a2),
            two_s_star: params.two_s_star(),
            two_star: params.two_star(),
        }
    }

    /// Seminorm ratio a/b on the ground state, (p(N-2s)-2N)/(2N-p(N-2)).
    pub fn seminorm_ratio(&self) -> f64 {
        self.r_a / self.r_b
    }
}
