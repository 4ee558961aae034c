//! Exact, dimension-generic algebra over norm triples.
//!
//! A [`NormTriple`] carries the three scalars every identity consumes:
//! `a` = squared local seminorm, `b` = squared fractional seminorm,
//! `m` = p-th power of the L^p norm. The functions here implement the
//! variational functionals (energy, Weinstein quotient, Nehari and dilation
//! derivatives), the two-parameter scaling laws, the fibering maps and their
//! roots' coefficients, the Cramer determinants of the constrained linear
//! system, and both routes to the best interpolation constant. No grids are
//! involved; everything is scalar arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

/// The three norms of a function that the identities consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTriple {
    /// Squared D^{1,2} seminorm (gradient energy).
    pub a: f64,
    /// Squared D^{s,2} seminorm (fractional energy).
    pub b: f64,
    /// p-th power of the L^p norm.
    pub m: f64,
}

impl NormTriple {
    pub fn new(a: f64, b: f64, m: f64) -> Self {
        NormTriple { a, b, m }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.a > 0.0 && self.b > 0.0 && self.m > 0.0
    }

    /// Triple satisfying the ground-state proportionality a = r_a·m,
    /// b = r_b·m for the given mass. Useful as an exact synthetic input.
    pub fn ground_state_consistent(m: f64, params: &Params) -> Self {
        let e = params.exponents();
        NormTriple::new(e.r_a * m, e.r_b * m, m)
    }
}

/// Scale-invariant Weinstein quotient W = b^{A1}·a^{A2}/m.
pub fn weinstein(t: &NormTriple, params: &Params) -> Result<f64> {
    if t.m <= 0.0 {
        return Err(Error::degenerate("Weinstein undefined for zero L^p mass"));
    }
    let e = params.exponents();
    Ok(t.b.powf(e.a1) * t.a.powf(e.a2) / t.m)
}

/// Energy functional I = (a + b)/2 - m/p.
pub fn energy(t: &NormTriple, params: &Params) -> f64 {
    (t.a + t.b) / 2.0 - t.m / params.p()
}

/// Dilation (Pohozaev) functional P = (N-2)a/2 + (N-2s)b/2 - N·m/p.
pub fn pohozaev(t: &NormTriple, params: &Params) -> f64 {
    let n = params.dim_f();
    (n - 2.0) * t.a / 2.0 + (n - 2.0 * params.s()) * t.b / 2.0 - n * t.m / params.p()
}

/// Nehari functional Φ = ⟨I'(u), u⟩ = a + b - m.
pub fn nehari_phi(t: &NormTriple) -> f64 {
    t.a + t.b - t.m
}

/// Radial derivative ⟨Φ'(u), u⟩ = 2(a + b) - p·m; equals (2-p)(a+b) on the
/// Nehari set.
pub fn nehari_phi_prime(t: &NormTriple, params: &Params) -> f64 {
    2.0 * (t.a + t.b) - params.p() * t.m
}

/// Two-parameter scaling v(x) = λ₁·u(λ₂x):
/// (a, b, m) ↦ (λ₁²λ₂^{2-N}a, λ₁²λ₂^{2s-N}b, λ₁^pλ₂^{-N}m).
pub fn scale_triple(t: &NormTriple, lambda1: f64, lambda2: f64, params: &Params) -> Result<NormTriple> {
    if lambda2 <= 0.0 || !lambda2.is_finite() {
        return Err(Error::parameter(format!("lambda2 must be positive (got {lambda2})")));
    }
    let n = params.dim_f();
    let s = params.s();
    Ok(NormTriple::new(
        lambda1 * lambda1 * lambda2.powf(2.0 - n) * t.a,
        lambda1 * lambda1 * lambda2.powf(2.0 * s - n) * t.b,
        lambda1.abs().powf(params.p()) * lambda2.powf(-n) * t.m,
    ))
}

/// One-parameter dilation v(x) = u(x/t):
/// (a, b, m) ↦ (t^{N-2}a, t^{N-2s}b, t^N m).
pub fn dilation_triple(t: &NormTriple, dilation: f64, params: &Params) -> Result<NormTriple> {
    if dilation <= 0.0 || !dilation.is_finite() {
        return Err(Error::parameter(format!("dilation must be positive (got {dilation})")));
    }
    let n = params.dim_f();
    let s = params.s();
    Ok(NormTriple::new(
        dilation.powf(n - 2.0) * t.a,
        dilation.powf(n - 2.0 * s) * t.b,
        dilation.powf(n) * t.m,
    ))
}

/// Scaling factors (λ₁, λ₂) normalizing both seminorms to one:
/// λ₂ = (b/a)^{1/(2-2s)}, λ₁ = b^{(N-2)/(4(1-s))}·a^{-(N-2s)/(4(1-s))}.
pub fn rescale_unit_lambdas(t: &NormTriple, params: &Params) -> Result<(f64, f64)> {
    if t.a <= 0.0 || t.b <= 0.0 {
        return Err(Error::degenerate("unit rescaling needs strictly positive seminorms"));
    }
    let n = params.dim_f();
    let s = params.s();
    let lambda2 = (t.b / t.a).powf(1.0 / (2.0 - 2.0 * s));
    let lambda1 = t.b.powf((n - 2.0) / (4.0 * (1.0 - s)))
        * t.a.powf(-(n - 2.0 * s) / (4.0 * (1.0 - s)));
    Ok((lambda1, lambda2))
}

/// Scaling factors (λ₁, λ₂) carrying a function to the equation's natural
/// normalization Q = λ₁·u(λ₂x). The scaled triple lands exactly on the
/// proportionality a' = r_a·m', b' = r_b·m' (hence Nehari and the dilation
/// identity both vanish on it), whatever the input triple.
pub fn q_lambdas(t: &NormTriple, params: &Params) -> Result<(f64, f64)> {
    if !t.is_strictly_positive() {
        return Err(Error::degenerate("normalization needs a strictly positive triple"));
    }
    let n = params.dim_f();
    let s = params.s();
    let p = params.p();
    let ratio = (p * (n - 2.0 * s) - 2.0 * n) / (2.0 * n - p * (n - 2.0));
    let lambda2 = (ratio * t.b / t.a).powf(1.0 / (2.0 - 2.0 * s));
    let lambda1 = lambda2.powf(2.0 / (p - 2.0))
        * ((2.0 * p * (1.0 - s) / (p * (n - 2.0 * s) - 2.0 * n)) * (t.a / t.m))
            .powf(1.0 / (p - 2.0));
    Ok((lambda1, lambda2))
}

/// Unique amplitude t_u = ((a+b)/m)^{1/(p-2)} projecting u onto the Nehari
/// set via t_u·u.
pub fn nehari_t(t: &NormTriple, params: &Params) -> Result<f64> {
    if t.m <= 0.0 {
        return Err(Error::degenerate("Nehari projection needs positive L^p mass"));
    }
    Ok(((t.a + t.b) / t.m).powf(1.0 / (params.p() - 2.0)))
}

/// Fibering map g₁(t) = C₁t^{N-2} + C₂t^{N-2s} - C₃t^N and its derivative.
pub fn fibering_g1(t: f64, c1: f64, c2: f64, c3: f64, params: &Params) -> Result<(f64, f64)> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::parameter(format!("fibering parameter t must be positive (got {t})")));
    }
    let n = params.dim_f();
    let s = params.s();
    let g = c1 * t.powf(n - 2.0) + c2 * t.powf(n - 2.0 * s) - c3 * t.powf(n);
    let dg = c1 * (n - 2.0) * t.powf(n - 3.0) + c2 * (n - 2.0 * s) * t.powf(n - 2.0 * s - 1.0)
        - c3 * n * t.powf(n - 1.0);
    Ok((g, dg))
}

/// Second derivative of the fibering map, used to certify the root is the
/// maximum.
pub fn fibering_g1_second(t: f64, c1: f64, c2: f64, c3: f64, params: &Params) -> f64 {
    let n = params.dim_f();
    let s = params.s();
    c1 * (n - 2.0) * (n - 3.0) * t.powf(n - 4.0)
        + c2 * (n - 2.0 * s) * (n - 2.0 * s - 1.0) * t.powf(n - 2.0 * s - 2.0)
        - c3 * n * (n - 1.0) * t.powf(n - 2.0)
}

/// Comparison weights g₃(t) = 1/N + (N-2)t^N/(2N) - t^{N-2}/2 and
/// g₄(t) = s/N + (N-2s)t^N/(2N) - t^{N-2s}/2; both vanish at t = 1 and are
/// strictly positive elsewhere.
pub fn g3_g4(t: f64, dim: u32, s: f64) -> Result<(f64, f64)> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::parameter(format!("comparison weight t must be positive (got {t})")));
    }
    let n = f64::from(dim);
    let g3 = 1.0 / n + (n - 2.0) * t.powf(n) / (2.0 * n) - t.powf(n - 2.0) / 2.0;
    let g4 = s / n + (n - 2.0 * s) * t.powf(n) / (2.0 * n) - t.powf(n - 2.0 * s) / 2.0;
    Ok((g3, g4))
}

/// Determinants of the 3x3 system coupling energy level, dilation identity,
/// and vanishing radial derivative, with the closed-form solutions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CramerDets {
    pub det_d: f64,
    pub det_d1: f64,
    pub det_d2: f64,
    pub det_d3: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Evaluates the determinants by direct expansion and returns them together
/// with the closed-form solutions x₁ = k(N-2s)/(1-s), x₂ = -k(N-2)/(1-s),
/// x₃ = 0. Both routes agree to rounding.
pub fn cramer_dets(params: &Params, k: f64) -> Result<CramerDets> {
    if k < 0.0 || !k.is_finite() {
        return Err(Error::parameter(format!("energy level k must be non-negative (got {k})")));
    }
    let n = params.dim_f();
    let s = params.s();
    let p = params.p();
    let row1 = [0.5, 0.5, -1.0 / p];
    let row2 = [(n - 2.0) / 2.0, (n - 2.0 * s) / 2.0, -n / p];
    let row3 = [n - 2.0, n - 2.0 * s, -n];
    let rhs = [k, 0.0, 0.0];
    let d = [row1, row2, row3];
    let mut d1 = d;
    let mut d2 = d;
    let mut d3 = d;
    for i in 0..3 {
        d1[i][0] = rhs[i];
        d2[i][1] = rhs[i];
        d3[i][2] = rhs[i];
    }
    Ok(CramerDets {
        det_d: det3(d),
        det_d1: det3(d1),
        det_d2: det3(d2),
        det_d3: det3(d3),
        x1: k * (n - 2.0 * s) / (1.0 - s),
        x2: -k * (n - 2.0) / (1.0 - s),
        x3: 0.0,
    })
}

/// Auxiliary functional J(z) = e^{(N-2)z}a/2 + e^{(N-2s)z}b/2 - e^{Nz}m/p and
/// its z-derivative, which equals the dilation functional at t = e^z.
pub fn aux_j(z: f64, t: &NormTriple, params: &Params) -> Result<(f64, f64)> {
    let n = params.dim_f();
    let s = params.s();
    let j = (z * (n - 2.0)).exp() * t.a / 2.0 + (z * (n - 2.0 * s)).exp() * t.b / 2.0
        - (z * n).exp() * t.m / params.p();
    let djdz = pohozaev(&dilation_triple(t, z.exp(), params)?, params);
    Ok((j, djdz))
}

/// Best constant from the L^p mass of the normalized solution:
/// C = (K·m^{(p-2)/2})^{-1}.
pub fn best_constant_from_q(m: f64, params: &Params) -> Result<f64> {
    if m <= 0.0 {
        return Err(Error::degenerate("best constant needs positive L^p mass"));
    }
    let e = params.exponents();
    Ok(1.0 / (e.k_const * m.powf((params.p() - 2.0) / 2.0)))
}

/// Best constant from the ground-state energy level:
/// C = (K·[2pc/(p-2)]^{(p-2)/2})^{-1}.
pub fn best_constant_from_c(c: f64, params: &Params) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::parameter(format!("energy level must be positive (got {c})")));
    }
    let p = params.p();
    best_constant_from_q(2.0 * p * c / (p - 2.0), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs().max(1e-300)
    }

    fn reference() -> Params {
        Params::new(3, 0.5, 4.0).unwrap()
    }

    #[test]
    fn weinstein_examples() {
        let p = reference();
        assert_eq!(weinstein(&NormTriple::new(1.0, 1.0, 1.0), &p).unwrap(), 1.0);
        assert_eq!(weinstein(&NormTriple::new(4.0, 4.0, 2.0), &p).unwrap(), 8.0);
        assert!(weinstein(&NormTriple::new(1.0, 1.0, 0.0), &p).is_err());
    }

    #[test]
    fn weinstein_amplitude_invariance() {
        let p = reference();
        let t = NormTriple::new(2.3, 1.7, 0.9);
        let w = weinstein(&t, &p).unwrap();
        for c in [0.1, 3.0, 17.5] {
            let tc = NormTriple::new(c * c * t.a, c * c * t.b, c.powf(4.0) * t.m);
            assert!(rel_err(weinstein(&tc, &p).unwrap(), w) < 1e-13);
        }
    }

    #[test]
    fn energy_and_pohozaev_examples() {
        let p = reference();
        let zero = NormTriple::new(0.0, 0.0, 0.0);
        assert_eq!(energy(&zero, &p), 0.0);
        assert_eq!(pohozaev(&zero, &p), 0.0);
        let ones = NormTriple::new(1.0, 1.0, 1.0);
        assert_eq!(energy(&ones, &p), 0.75);
        assert_eq!(pohozaev(&ones, &p), 0.75);
        // On the Nehari set I = (1/2 - 1/p) m.
        let nh = NormTriple::new(1.0, 1.0, 2.0);
        assert_eq!(energy(&nh, &p), 0.5);
    }

    #[test]
    fn nehari_phi_examples() {
        let p = reference();
        assert_eq!(nehari_phi(&NormTriple::new(0.0, 0.0, 0.0)), 0.0);
        assert_eq!(nehari_phi(&NormTriple::new(1.0, 1.0, 2.0)), 0.0);
        let t = NormTriple::new(2.0, 2.0, 4.0);
        assert_eq!(nehari_phi(&t), 0.0);
        assert_eq!(nehari_phi_prime(&t, &p), -8.0);
    }

    #[test]
    fn scale_triple_examples() {
        let p = reference();
        let t = NormTriple::new(1.0, 1.0, 1.0);
        let id = scale_triple(&t, 1.0, 1.0, &p).unwrap();
        assert_eq!(id, t);
        let doubled = scale_triple(&t, 2.0, 1.0, &p).unwrap();
        assert_eq!(doubled, NormTriple::new(4.0, 4.0, 16.0));
        assert!(scale_triple(&t, 1.0, 0.0, &p).is_err());
    }

    #[test]
    fn dilation_triple_examples() {
        let p = reference();
        let t = NormTriple::new(1.0, 1.0, 1.0);
        assert_eq!(dilation_triple(&t, 1.0, &p).unwrap(), t);
        let d = dilation_triple(&t, 2.0, &p).unwrap();
        assert!(rel_err(d.a, 2.0) < 1e-15);
        assert!(rel_err(d.b, 4.0) < 1e-15);
        assert!(rel_err(d.m, 8.0) < 1e-15);
        assert!(dilation_triple(&t, -1.0, &p).is_err());
    }

    #[test]
    fn dilation_derivative_matches_pohozaev() {
        let p = reference();
        let t = NormTriple::new(1.9, 0.8, 2.6);
        let eps = 1e-6;
        let up = energy(&dilation_triple(&t, 1.0 + eps, &p).unwrap(), &p);
        let dn = energy(&dilation_triple(&t, 1.0 - eps, &p).unwrap(), &p);
        let fd = (up - dn) / (2.0 * eps);
        assert!(rel_err(fd, pohozaev(&t, &p)) < 1e-8);
    }

    #[test]
    fn rescale_unit_examples() {
        let p = reference();
        let (l1, l2) = rescale_unit_lambdas(&NormTriple::new(1.0, 1.0, 0.3), &p).unwrap();
        assert_eq!((l1, l2), (1.0, 1.0));
        let (l1, l2) = rescale_unit_lambdas(&NormTriple::new(4.0, 4.0, 0.3), &p).unwrap();
        assert!(rel_err(l1, 0.5) < 1e-14);
        assert!(rel_err(l2, 1.0) < 1e-14);
        let (l1, l2) = rescale_unit_lambdas(&NormTriple::new(1.0, 16.0, 0.3), &p).unwrap();
        assert!(rel_err(l1, 4.0) < 1e-14);
        assert!(rel_err(l2, 16.0) < 1e-14);
        assert!(rescale_unit_lambdas(&NormTriple::new(0.0, 1.0, 1.0), &p).is_err());
    }

    #[test]
    fn q_lambdas_reference_case() {
        let p = reference();
        let m = 2.7;
        let (l1, l2) = q_lambdas(&NormTriple::new(1.0, 1.0, m), &p).unwrap();
        assert!(rel_err(l2, 1.0) < 1e-14);
        assert!(rel_err(l1, (2.0 / m).sqrt()) < 1e-14);
    }

    #[test]
    fn q_lambdas_matches_product_form() {
        // The closed normalization constants for a = b = 1 are
        // λ₂ = ratio^{1/(2-2s)} and λ₁ = ratio^{1/((1-s)(p-2))}·(2p(1-s)/(p(N-2s)-2N)/m)^{1/(p-2)}.
        let params = Params::new(3, 0.25, 4.0).unwrap();
        let (n, s, p) = (3.0f64, 0.25f64, 4.0f64);
        let m = 1.9;
        let ratio = (p * (n - 2.0 * s) - 2.0 * n) / (2.0 * n - p * (n - 2.0));
        let l2_ref = ratio.powf(1.0 / (2.0 - 2.0 * s));
        let l1_ref = ratio.powf(1.0 / ((1.0 - s) * (p - 2.0)))
            * ((2.0 * p * (1.0 - s) / (p * (n - 2.0 * s) - 2.0 * n)) / m).powf(1.0 / (p - 2.0));
        let (l1, l2) = q_lambdas(&NormTriple::new(1.0, 1.0, m), &params).unwrap();
        assert!(rel_err(l2, l2_ref) < 1e-13);
        assert!(rel_err(l1, l1_ref) < 1e-13);
    }

    #[test]
    fn q_lambdas_scaling_consistency() {
        let p = reference();
        let t = NormTriple::new(1.3, 0.7, 2.2);
        let (l1, _) = q_lambdas(&t, &p).unwrap();
        let c = 3.7;
        let tc = scale_triple(&t, c, 1.0, &p).unwrap();
        let (l1c, _) = q_lambdas(&tc, &p).unwrap();
        assert!(rel_err(l1c, l1 / c) < 1e-12);
    }

    #[test]
    fn nehari_t_examples() {
        let p = reference();
        assert!(rel_err(nehari_t(&NormTriple::new(2.0, 2.0, 4.0), &p).unwrap(), 1.0) < 1e-15);
        assert!(rel_err(nehari_t(&NormTriple::new(1.0, 1.0, 1.0), &p).unwrap(), 2.0_f64.sqrt()) < 1e-15);
        assert!(nehari_t(&NormTriple::new(1.0, 1.0, 0.0), &p).is_err());
    }

    #[test]
    fn fibering_g1_examples() {
        let p = reference();
        let (g, dg) = fibering_g1(1.0, 1.0, 1.0, 1.0, &p).unwrap();
        assert_eq!(g, 1.0);
        assert!(dg.abs() < 1e-15);
        // Without the negative term the map is strictly increasing.
        for t in [0.3, 1.0, 4.2] {
            let (_, dg) = fibering_g1(t, 1.0, 1.0, 0.0, &p).unwrap();
            assert!(dg > 0.0);
        }
        assert!(fibering_g1(0.0, 1.0, 1.0, 1.0, &p).is_err());
    }

    #[test]
    fn g3_g4_examples() {
        let (g3, g4) = g3_g4(1.0, 3, 0.5).unwrap();
        assert!(g3.abs() < 1e-15);
        assert!(g4.abs() < 1e-15);
        let (g3, g4) = g3_g4(2.0, 3, 0.5).unwrap();
        assert!(rel_err(g3, 2.0 / 3.0) < 1e-14);
        assert!(rel_err(g4, 5.0 / 6.0) < 1e-14);
    }

    #[test]
    fn cramer_reference_values() {
        let p = reference();
        let d = cramer_dets(&p, 1.0).unwrap();
        assert!(rel_err(d.det_d, -0.375) < 1e-14);
        assert!(rel_err(d.det_d1, -1.5) < 1e-14);
        assert!(rel_err(d.det_d2, 0.75) < 1e-14);
        assert!(d.det_d3.abs() < 1e-14);
        assert!(rel_err(d.x1, 4.0) < 1e-14);
        assert!(rel_err(d.x2, -2.0) < 1e-14);
        assert_eq!(d.x3, 0.0);
        let d0 = cramer_dets(&p, 0.0).unwrap();
        assert_eq!(d0.det_d1, 0.0);
        assert_eq!(d0.det_d2, 0.0);
        assert_eq!(d0.x1, 0.0);
        assert_eq!(d0.x2, 0.0);
    }

    #[test]
    fn aux_j_examples() {
        let p = reference();
        let t = NormTriple::new(1.0, 1.0, 1.0);
        let (j, djdz) = aux_j(0.0, &t, &p).unwrap();
        assert_eq!(j, energy(&t, &p));
        assert!(rel_err(djdz, 0.75) < 1e-15);
    }

    #[test]
    fn best_constant_examples() {
        let p = reference();
        assert!(rel_err(best_constant_from_q(4.0, &p).unwrap(), 1.0) < 1e-15);
        let e = p.exponents();
        assert!(rel_err(best_constant_from_q(1.0, &p).unwrap(), 1.0 / e.k_const) < 1e-15);
        // For these parameters C^{-1} = c exactly.
        assert!(rel_err(best_constant_from_c(0.37, &p).unwrap(), 1.0 / 0.37) < 1e-14);
        assert!(best_constant_from_c(0.0, &p).is_err());
    }

    #[test]
    fn identity_chain_on_consistent_triple() {
        for (n, s, p) in [(3u32, 0.5, 4.0), (3, 0.25, 4.0), (4, 0.6, 3.0)] {
            let params = Params::new(n, s, p).unwrap();
            for m in [0.3, 1.0, 57.0] {
                let t = NormTriple::ground_state_consistent(m, &params);
                assert!(pohozaev(&t, &params).abs() / m < 1e-14);
                assert!(nehari_phi(&t).abs() / m < 1e-14);
                let w = weinstein(&t, &params).unwrap();
                let c_q = best_constant_from_q(m, &params).unwrap();
                assert!(rel_err(c_q, 1.0 / w) < 1e-12);
                let c_level = energy(&t, &params);
                let c_c = best_constant_from_c(c_level, &params).unwrap();
                assert!(rel_err(c_c, c_q) < 1e-12);
            }
        }
    }

    fn admissible_params() -> impl Strategy<Value = Params> {
        (3u32..=6, 0.05f64..0.95, 0.05f64..0.95).prop_map(|(n, s, frac)| {
            let nf = f64::from(n);
            let lo = 2.0 * nf / (nf - 2.0 * s);
            let hi = 2.0 * nf / (nf - 2.0);
            Params::new(n, s, lo + frac * (hi - lo)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn weinstein_scale_invariance(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0.1f64..10.0,
            l1 in 0.5f64..2.0, l2 in 0.5f64..2.0,
        ) {
            let t = NormTriple::new(a, b, m);
            let w = weinstein(&t, &params).unwrap();
            let ws = weinstein(&scale_triple(&t, l1, l2, &params).unwrap(), &params).unwrap();
            prop_assert!(rel_err(w, ws) < 1e-11);
        }

        #[test]
        fn rescale_unit_postcondition(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0,
        ) {
            let t = NormTriple::new(a, b, 1.0);
            let (l1, l2) = rescale_unit_lambdas(&t, &params).unwrap();
            let scaled = scale_triple(&t, l1, l2, &params).unwrap();
            prop_assert!(rel_err(scaled.a, 1.0) < 1e-12);
            prop_assert!(rel_err(scaled.b, 1.0) < 1e-12);
        }

        #[test]
        fn nehari_t_postcondition(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0.1f64..10.0,
        ) {
            let t = NormTriple::new(a, b, m);
            let tu = nehari_t(&t, &params).unwrap();
            let scaled = scale_triple(&t, tu, 1.0, &params).unwrap();
            prop_assert!(nehari_phi(&scaled).abs() / scaled.m < 1e-12);
        }

        #[test]
        fn q_lambdas_postconditions(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0.1f64..10.0,
        ) {
            let t = NormTriple::new(a, b, m);
            let (l1, l2) = q_lambdas(&t, &params).unwrap();
            let q = scale_triple(&t, l1, l2, &params).unwrap();
            let e = params.exponents();
            prop_assert!(nehari_phi(&q).abs() / q.m < 1e-12);
            prop_assert!(rel_err(q.a / q.b, e.seminorm_ratio()) < 1e-12);
        }

        #[test]
        fn fibering_derivative_matches_pohozaev(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0.1f64..10.0,
            t in 0.2f64..5.0,
        ) {
            let triple = NormTriple::new(a, b, m);
            let (_, dg) = fibering_g1(t, a / 2.0, b / 2.0, m / params.p(), &params).unwrap();
            let p_dil = pohozaev(&dilation_triple(&triple, t, &params).unwrap(), &params);
            prop_assert!((t * dg - p_dil).abs() / p_dil.abs().max(1.0) < 1e-12);
        }

        #[test]
        fn g3_g4_strictly_positive_off_one(
            n in 3u32..=6, s in 0.05f64..0.95, t in 0.01f64..8.0,
        ) {
            prop_assume!((t - 1.0).abs() > 1e-3);
            let (g3, g4) = g3_g4(t, n, s).unwrap();
            prop_assert!(g3 > 0.0);
            prop_assert!(g4 > 0.0);
        }

        #[test]
        fn cramer_closed_forms_match_determinants(
            params in admissible_params(), k in 0.0f64..100.0,
        ) {
            let d = cramer_dets(&params, k).unwrap();
            prop_assert!(rel_err(d.x1, d.det_d1 / d.det_d) < 1e-12 || d.x1.abs() < 1e-12);
            prop_assert!(rel_err(d.x2, d.det_d2 / d.det_d) < 1e-12 || d.x2.abs() < 1e-12);
            prop_assert!((d.det_d3 / d.det_d).abs() < 1e-12);
            if k > 0.0 {
                prop_assert!(d.x2 < 0.0);
            }
        }

        #[test]
        fn aux_j_derivative_matches_finite_difference(
            params in admissible_params(),
            a in 0.1f64..10.0, b in 0.1f64..10.0, m in 0.1f64..10.0,
            z in -0.5f64..0.5,
        ) {
            let t = NormTriple::new(a, b, m);
            let (_, djdz) = aux_j(z, &t, &params).unwrap();
            let eps = 1e-6;
            let (jp, _) = aux_j(z + eps, &t, &params).unwrap();
            let (jm, _) = aux_j(z - eps, &t, &params).unwrap();
            let fd = (jp - jm) / (2.0 * eps);
            prop_assert!((djdz - fd).abs() / djdz.abs().max(1.0) < 1e-6);
        }
    }
}
