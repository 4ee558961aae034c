//! Checks for everything checkable: equation residual, the identity chain on
//! norm triples, interpolation inequalities, closed-form Gaussian oracles,
//! derivative consistency, and inequality sampling against a reference
//! minimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{self, NormTriple};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::params::Params;
use crate::spectral::{self, Transform};

/// Relative defects of every identity the ground state satisfies.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// |a + b - m| / m.
    pub nehari_residual: f64,
    /// |P| / (N·m/p).
    pub pohozaev_residual: f64,
    /// Relative defect of a/b against the ground-state seminorm ratio.
    pub ratio_15_d12: f64,
    /// Relative defect of a/m against r_a.
    pub ratio_15_lp: f64,
    /// Relative defect of the dilation identity (N-2)a/2 + (N-2s)b/2 = N·m/p.
    pub identity_16_residual: f64,
    /// Relative gap between the mass route to the best constant and the
    /// reciprocal Weinstein quotient.
    pub c_consistency: f64,
    /// Relative defect of the energy form I = (p-2)m/(2p); meaningful on
    /// Nehari-satisfying triples.
    pub energy_form_residual: f64,
    /// Relative L² equation residual, present when a field was supplied.
    pub equation_residual: Option<f64>,
}

/// Published per-grid tolerances separating converged solutions from
/// non-solutions. The truncation-driven defects follow the box size
/// empirically like L^{-3/2} near the reference parameters, so the bounds
/// are anchored at a half-width of 12 and scaled by (12/L)^{3/2}; the
/// equation residual and the algebraic self-consistency gap do not feel the
/// box at all.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub equation: f64,
    pub nehari: f64,
    pub pohozaev: f64,
    pub ratio_15_d12: f64,
    pub ratio_15_lp: f64,
    pub identity_16: f64,
    pub c_consistency: f64,
    pub energy_form: f64,
}

impl Tolerances {
    pub fn published(grid: GridSpec) -> Self {
        let rho = (12.0 / grid.half_width()).powf(1.5);
        Tolerances {
            equation: 1e-4,
            nehari: 0.10 * rho,
            pohozaev: 0.20 * rho,
            ratio_15_d12: 0.50 * rho,
            ratio_15_lp: 0.50 * rho,
            identity_16: 0.20 * rho,
            c_consistency: 1e-10,
            energy_form: 0.10 * rho,
        }
    }

    /// True when every residual of the report sits within its bound.
    pub fn admits(&self, report: &IdentityReport) -> bool {
        report.nehari_residual <= self.nehari
            && report.pohozaev_residual <= self.pohozaev
            && report.ratio_15_d12 <= self.ratio_15_d12
            && report.ratio_15_lp <= self.ratio_15_lp
            && report.identity_16_residual <= self.identity_16
            && report.c_consistency <= self.c_consistency
            && report.energy_form_residual <= self.energy_form
            && report.equation_residual.is_none_or(|r| r <= self.equation)
    }
}

/// Relative L² residual ‖Ku - |u|^{p-2}u‖₂ / ‖|u|^{p-2}u‖₂ with the same
/// discrete (regularized) symbol the solver iterates.
pub fn equation_residual(u: &Field, params: &Params) -> Result<f64> {
    if u.lp_norm(params.p())? <= 0.0 {
        return Err(Error::degenerate("equation residual undefined for the zero field"));
    }
    let grid = u.grid();
    let plan = Transform::new(grid);
    let spec_u = plan.forward(u);
    let nl_values: Vec<f64> = u
        .values()
        .iter()
        .map(|v| v.abs().powf(params.p() - 2.0) * v)
        .collect();
    let spec_nl = plan.forward(&Field::from_values(grid, nl_values)?);
    let sym = spectral::mixed_symbol(grid, params.s())?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((cu, cn), k) in spec_u.coeffs().iter().zip(spec_nl.coeffs()).zip(&sym) {
        num += (k * cu - cn).norm_sqr();
        den += cn.norm_sqr();
    }
    Ok((num / den).sqrt())
}

/// Fill the identity report for a triple, with the field-level equation
/// residual when the field is available.
pub fn check_identities(
    triple: &NormTriple,
    params: &Params,
    field: Option<&Field>,
) -> Result<IdentityReport> {
    if !triple.is_strictly_positive() {
        return Err(Error::degenerate("identity checks need a strictly positive triple"));
    }
    let e = params.exponents();
    let n = params.dim_f();
    let p = params.p();
    let mass_scale = n * triple.m / p;

    let nehari_residual = algebra::nehari_phi(triple).abs() / triple.m;
    let pohozaev_residual = algebra::pohozaev(triple, params).abs() / mass_scale;
    let ratio_15_d12 =
        (triple.a / triple.b - e.seminorm_ratio()).abs() / e.seminorm_ratio();
    let ratio_15_lp = (triple.a / triple.m - e.r_a).abs() / e.r_a;
    let lhs_16 = (n - 2.0) * triple.a / 2.0 + (n - 2.0 * params.s()) * triple.b / 2.0;
    let identity_16_residual = (lhs_16 - mass_scale).abs() / mass_scale;

    let w = algebra::weinstein(triple, params)?;
    let (l1, l2) = algebra::q_lambdas(triple, params)?;
    let q_triple = algebra::scale_triple(triple, l1, l2, params)?;
    let c_from_q = algebra::best_constant_from_q(q_triple.m, params)?;
    let c_consistency = (c_from_q - 1.0 / w).abs() * w;

    let energy = algebra::energy(triple, params);
    let energy_form = (p - 2.0) * triple.m / (2.0 * p);
    let energy_form_residual = (energy - energy_form).abs() / energy_form.abs().max(1e-300);

    let equation_residual = match field {
        Some(u) => Some(equation_residual(u, params)?),
        None => None,
    };

    Ok(IdentityReport {
        nehari_residual,
        pohozaev_residual,
        ratio_15_d12,
        ratio_15_lp,
        identity_16_residual,
        c_consistency,
        energy_form_residual,
        equation_residual,
    })
}

/// Random-field generator: mixtures of 1-5 Gaussian bumps with log-uniform
/// widths, uniform centers in the half-box, uniform amplitudes, optionally
/// followed by a random dilation.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    grid: GridSpec,
    pub components: (usize, usize),
    pub width: (f64, f64),
    pub amplitude: (f64, f64),
    pub dilate: bool,
}

impl MixtureSampler {
    /// The documented general-purpose ensemble.
    pub fn standard(grid: GridSpec) -> Self {
        MixtureSampler {
            grid,
            components: (1, 5),
            width: (0.5, 2.0),
            amplitude: (-2.0, 2.0),
            dilate: true,
        }
    }

    /// Smooth positive sub-family (wider bumps, one sign, no dilation),
    /// suitable for rearrangement diagnostics.
    pub fn smooth_positive(grid: GridSpec) -> Self {
        MixtureSampler {
            grid,
            components: (1, 5),
            width: (1.0, 2.0),
            amplitude: (0.5, 2.0),
            dilate: false,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Field> {
        let l = self.grid.half_width();
        let count = rng.random_range(self.components.0..=self.components.1);
        let mut field = Field::zeros(self.grid);
        for _ in 0..count {
            let width = (rng.random_range(self.width.0.ln()..=self.width.1.ln())).exp();
            let center = [
                rng.random_range(-l / 2.0..l / 2.0),
                rng.random_range(-l / 2.0..l / 2.0),
                rng.random_range(-l / 2.0..l / 2.0),
            ];
            let amplitude = rng.random_range(self.amplitude.0..=self.amplitude.1);
            let bump = Field::gaussian(self.grid, amplitude, width, center)?;
            field = field.add_scaled(&bump, 1.0)?;
        }
        if self.dilate && rng.random_bool(0.5) {
            let lambda2 = (rng.random_range(0.7f64.ln()..=1.4f64.ln())).exp();
            field = field.dilate(1.0, lambda2)?;
        }
        Ok(field)
    }
}

/// Outcome of sampling the Weinstein quotient against a reference triple.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GnSample {
    /// min over samples of W(u)/W(reference); values at or above one certify
    /// the reference as a near-minimizer.
    pub min_ratio: f64,
    /// Generated fields discarded for falling below the mass floor.
    pub resampled: usize,
}

const MASS_FLOOR: f64 = 1e-10;

pub fn gn_sample(
    reference: &NormTriple,
    params: &Params,
    grid: GridSpec,
    seed: u64,
    count: usize,
) -> Result<GnSample> {
    if count < 1 {
        return Err(Error::parameter("sample count must be at least 1"));
    }
    let w_ref = algebra::weinstein(reference, params)?;
    let sampler = MixtureSampler::standard(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut resampled = 0usize;
    let mut accepted = 0usize;
    while accepted < count {
        let field = sampler.sample(&mut rng)?;
        let triple = spectral::norm_triple(&field, params)?;
        if triple.m < MASS_FLOOR {
            resampled += 1;
            continue;
        }
        let ratio = algebra::weinstein(&triple, params)? / w_ref;
        min_ratio = min_ratio.min(ratio);
        accepted += 1;
    }
    Ok(GnSample { min_ratio, resampled })
}

/// Interpolation-inequality check ∫|u|^t ≤ (∫|u|^{2*_s})^{θ_s}(∫|u|^{2*})^{θ_1}
/// on the discrete measure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub theta_s: f64,
    pub theta_1: f64,
}

impl HolderCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn holder_check(u: &Field, params: &Params, t_exp: f64) -> Result<HolderCheck> {
    let n = params.dim_f();
    let s = params.s();
    let two_s_star = params.two_s_star();
    let two_star = params.two_star();
    if !(t_exp >= two_s_star && t_exp <= two_star) {
        return Err(Error::parameter(format!(
            "interpolation exponent must lie in [{two_s_star}, {two_star}] (got {t_exp})"
        )));
    }
    let theta_s = (n - 2.0 * s) * (2.0 * n - t_exp * (n - 2.0)) / (4.0 * n * (1.0 - s));
    let theta_1 = (n - 2.0) * (t_exp * (n - 2.0 * s) - 2.0 * n) / (4.0 * n * (1.0 - s));
    let lhs = u.lp_norm(t_exp)?;
    let rhs = u.lp_norm(two_s_star)?.powf(theta_s) * u.lp_norm(two_star)?.powf(theta_1);
    Ok(HolderCheck { lhs, rhs, theta_s, theta_1 })
}

/// One row of the closed-form Gaussian comparison.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub name: &'static str,
    pub computed: f64,
    pub exact: f64,
    pub rel_err: f64,
    /// Published accuracy bound for this row on this grid.
    pub tol: f64,
}

/// Published accuracy of the fractional-seminorm lattice sum. The weight
/// |ξ|^{2s} has a conical kink at the origin, so the rectangle rule carries
/// an O((2L)^{-(3+2s)}) bias that resolution cannot remove; the prefactor is
/// calibrated by box-refinement (measured 27-67 over s in [0.25, 0.9],
/// published with ~2x headroom). The smooth rows are spectrally exact.
pub fn fractional_quadrature_tol(grid: GridSpec, s: f64) -> f64 {
    150.0 * (2.0 * grid.half_width()).powf(-(3.0 + 2.0 * s))
}

/// Compare the discrete functionals of the unit Gaussian against the exact
/// three-dimensional integrals: a = (3/2)π^{3/2}, b = π^{3/2}Γ((3+2s)/2)/Γ(3/2),
/// ‖u‖²₂ = π^{3/2}, ‖u‖⁴₄ = (π/2)^{3/2}.
pub fn gaussian_oracle(params: &Params, grid: GridSpec) -> Result<Vec<OracleRow>> {
    if grid.half_width() < 8.0 || grid.n() < 64 {
        return Err(Error::parameter(format!(
            "oracle grid must satisfy L >= 8 and n >= 64 (got n = {}, L = {})",
            grid.n(),
            grid.half_width()
        )));
    }
    let u = Field::gaussian(grid, 1.0, 1.0, [0.0; 3])?;
    let s = params.s();
    let pi = std::f64::consts::PI;
    let spec = spectral::transform(&u);
    let rows = vec![
        row("seminorm_d12", spectral::seminorm_d12_of(&spec), 1.5 * pi.powf(1.5), 1e-5),
        row(
            "seminorm_ds2",
            spectral::seminorm_ds2_of(&spec, s)?,
            pi.powf(1.5) * libm::tgamma((3.0 + 2.0 * s) / 2.0) / libm::tgamma(1.5),
            fractional_quadrature_tol(grid, s),
        ),
        row("l2_mass", u.l2_norm_sq(), pi.powf(1.5), 1e-5),
        row("l4_mass", u.lp_norm(4.0)?, (pi / 2.0).powf(1.5), 1e-5),
    ];
    Ok(rows)
}

fn row(name: &'static str, computed: f64, exact: f64, tol: f64) -> OracleRow {
    OracleRow { name, computed, exact, rel_err: (computed - exact).abs() / exact, tol }
}

/// Derivative-consistency summary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivativeChecks {
    /// Worst relative mismatch of dJ/dz against central differences.
    pub djdz_fd_relerr: f64,
    /// Worst relative mismatch of the analytic Weinstein derivative against
    /// symmetric differences.
    pub gateaux_fd_relerr: f64,
    /// Largest |dW[φ]|·‖u‖_E/(W·‖φ‖_E) over the sampled directions; small
    /// values certify criticality.
    pub criticality: f64,
}

/// Directional derivative of the Weinstein quotient at u along phi.
pub fn weinstein_derivative(u: &Field, phi: &Field, params: &Params) -> Result<f64> {
    let spec_u = spectral::transform(u);
    let spec_phi = spectral::transform(phi);
    let triple = spectral::norm_triple(u, params)?;
    if !triple.is_strictly_positive() {
        return Err(Error::degenerate("Weinstein derivative needs a strictly positive triple"));
    }
    let e = params.exponents();
    let p = params.p();
    let w = algebra::weinstein(&triple, params)?;
    let ip_1 = spectral::inner_d12(&spec_u, &spec_phi);
    let ip_s = spectral::inner_ds2(&spec_u, &spec_phi, params.s())?;
    let ip_nl = u.grid().weight_phys()
        * u.values()
            .iter()
            .zip(phi.values())
            .map(|(uv, pv)| uv.abs().powf(p - 2.0) * uv * pv)
            .sum::<f64>();
    Ok(w * (e.alpha * ip_s / triple.b + e.beta * ip_1 / triple.a - p * ip_nl / triple.m))
}

pub fn derivative_checks(u: &Field, params: &Params, seed: u64) -> Result<DerivativeChecks> {
    let triple = spectral::norm_triple(u, params)?;
    if !triple.is_strictly_positive() {
        return Err(Error::degenerate("derivative checks need a strictly positive triple"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut djdz_fd_relerr = 0.0f64;
    for _ in 0..5 {
        let z = rng.random_range(-0.5..0.5);
        let (_, djdz) = algebra::aux_j(z, &triple, params)?;
        let eps = 1e-6;
        let (jp, _) = algebra::aux_j(z + eps, &triple, params)?;
        let (jm, _) = algebra::aux_j(z - eps, &triple, params)?;
        let fd = (jp - jm) / (2.0 * eps);
        djdz_fd_relerr = djdz_fd_relerr.max((djdz - fd).abs() / djdz.abs().max(1.0));
    }

    let sampler = MixtureSampler {
        dilate: false,
        ..MixtureSampler::standard(u.grid())
    };
    let w = algebra::weinstein(&triple, params)?;
    let u_scale = (triple.a + triple.b).sqrt();
    let mut gateaux_fd_relerr = 0.0f64;
    let mut criticality = 0.0f64;
    for _ in 0..3 {
        let raw = sampler.sample(&mut rng)?;
        let phi_triple = spectral::norm_triple(&raw, params)?;
        let phi_scale = (phi_triple.a + phi_triple.b).sqrt();
        if phi_scale <= 0.0 {
            continue;
        }
        let phi = raw.scaled(u_scale / phi_scale);
        let analytic = weinstein_derivative(u, &phi, params)?;
        let eps = 3e-5;
        let wp = algebra::weinstein(
            &spectral::norm_triple(&u.add_scaled(&phi, eps)?, params)?,
            params,
        )?;
        let wm = algebra::weinstein(
            &spectral::norm_triple(&u.add_scaled(&phi, -eps)?, params)?,
            params,
        )?;
        let fd = (wp - wm) / (2.0 * eps);
        gateaux_fd_relerr =
            gateaux_fd_relerr.max((analytic - fd).abs() / analytic.abs().max(1e-3 * w));
        criticality = criticality.max(analytic.abs() / w);
    }

    Ok(DerivativeChecks { djdz_fd_relerr, gateaux_fd_relerr, criticality })
}
