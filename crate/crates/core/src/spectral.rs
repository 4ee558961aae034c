//! Spectral representation: 3-D discrete Fourier transforms, multiplier
//! seminorms, and the mixed symbol K(ξ) = |ξ|² + |ξ|^{2s}.
//!
//! Conventions: frequencies ξ_k = (π/L)·k with signed wrapped indices,
//! quadrature weight h³ in physical space and h³/n³ in frequency space, so
//! discrete sums approximate the continuum integrals directly. The zero mode
//! of K is regularized at the smallest resolved frequency, K₀ = K(π/L),
//! keeping the inverse well defined; the seminorms themselves give the zero
//! mode no weight.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::algebra::NormTriple;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::params::Params;

/// Discrete Fourier coefficients of a real field (Hermitian-symmetric).
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::parameter(format!(
                "coefficient buffer length {} does not match grid sample count {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Largest relative deviation from Hermitian symmetry c_{-k} = conj(c_k).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let n2 = n * n;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (flat, c) in self.coeffs.iter().enumerate() {
            scale = scale.max(c.norm());
            let (i, j, k) = self.grid.unravel(flat);
            let mirror = ((n - i) % n) * n2 + ((n - j) % n) * n + (n - k) % n;
            let d = (self.coeffs[mirror].conj() - c).norm();
            worst = worst.max(d);
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Reusable transform plan for one grid size.
pub struct Transform {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n());
        let inv = planner.plan_fft_inverse(grid.n());
        Transform { grid, fwd, inv }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn apply_axes(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let n2 = n * n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // axis 2: contiguous rows
        for row in data.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        // axis 1 (stride n, lines anchored at i*n2 + k) and axis 0 (stride
        // n2, lines anchored at j*n + k), gathered into a contiguous buffer
        let mut line = vec![Complex64::default(); n];
        for (stride, outer_stride) in [(n, n2), (n2, n)] {
            for outer in 0..n {
                for k in 0..n {
                    let start = outer * outer_stride + k;
                    for (t, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + t * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (t, c) in line.iter().enumerate() {
                        data[start + t * stride] = *c;
                    }
                }
            }
        }
    }

    /// Unnormalized forward transform c_k = Σ_j u_j e^{-i ξ_k·x_j'} (index
    /// convention; physical phases cancel in all quadratic functionals).
    pub fn forward(&self, field: &Field) -> Spectrum {
        debug_assert_eq!(field.grid(), self.grid);
        let mut data: Vec<Complex64> =
            field.values().iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.apply_axes(&mut data, &self.fwd);
        Spectrum { grid: self.grid, coeffs: data }
    }

    /// Inverse transform with 1/n³ normalization, returning the real part.
    pub fn inverse(&self, spectrum: &Spectrum) -> Field {
        debug_assert_eq!(spectrum.grid, self.grid);
        let mut data = spectrum.coeffs.clone();
        self.apply_axes(&mut data, &self.inv);
        let scale = 1.0 / self.grid.len() as f64;
        let values = data.into_iter().map(|c| c.re * scale).collect();
        Field::from_values(self.grid, values).expect("inverse transform yields finite values")
    }
}

pub fn transform(field: &Field) -> Spectrum {
    Transform::new(field.grid()).forward(field)
}

pub fn inverse(spectrum: &Spectrum) -> Field {
    Transform::new(spectrum.grid()).inverse(spectrum)
}

/// Per-axis squared frequencies (π/L · k)² for wrapped indices.
fn axis_freq_sq(grid: GridSpec) -> Vec<f64> {
    (0..grid.n()).map(|i| grid.freq(i) * grid.freq(i)).collect()
}

fn weighted_spectral_sum(spec: &Spectrum, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = spec.grid;
    let n = grid.n();
    let fsq = axis_freq_sq(grid);
    let mut total = 0.0;
    let mut flat = 0;
    for i in 0..n {
        for j in 0..n {
            let fij = fsq[i] + fsq[j];
            for fk in &fsq {
                let xi2 = fij + fk;
                if xi2 > 0.0 {
                    total += weight(xi2) * spec.coeffs[flat].norm_sqr();
                }
                flat += 1;
            }
        }
    }
    grid.weight_spec() * total
}

/// Squared D^{1,2} seminorm a = (h³/n³) Σ_k |ξ_k|²|c_k|².
pub fn seminorm_d12(u: &Field) -> f64 {
    seminorm_d12_of(&transform(u))
}

pub fn seminorm_d12_of(spec: &Spectrum) -> f64 {
    weighted_spectral_sum(spec, |xi2| xi2)
}

/// Squared D^{s,2} seminorm b = (h³/n³) Σ_k |ξ_k|^{2s}|c_k|²; the zero mode
/// contributes nothing.
pub fn seminorm_ds2(u: &Field, s: f64) -> Result<f64> {
    seminorm_ds2_of(&transform(u), s)
}

pub fn seminorm_ds2_of(spec: &Spectrum, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::parameter(format!("fractional order s must lie in (0, 1) (got {s})")));
    }
    Ok(weighted_spectral_sum(spec, |xi2| xi2.powf(s)))
}

/// All three norms of the triple in one pass.
pub fn norm_triple(u: &Field, params: &Params) -> Result<NormTriple> {
    let spec = transform(u);
    Ok(NormTriple::new(
        seminorm_d12_of(&spec),
        seminorm_ds2_of(&spec, params.s())?,
        u.lp_norm(params.p())?,
    ))
}

/// The discrete mixed symbol K(ξ_k) = |ξ_k|² + |ξ_k|^{2s} over the whole
/// grid, with the zero mode set to K₀ = K(π/L).
pub fn mixed_symbol(grid: GridSpec, s: f64) -> Result<Vec<f64>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::parameter(format!("fractional order s must lie in (0, 1) (got {s})")));
    }
    let n = grid.n();
    let fsq = axis_freq_sq(grid);
    let xi_min2 = grid.min_freq() * grid.min_freq();
    let k0 = xi_min2 + xi_min2.powf(s);
    let mut sym = Vec::with_capacity(grid.len());
    for i in 0..n {
        for j in 0..n {
            let fij = fsq[i] + fsq[j];
            for fk in &fsq {
                let xi2 = fij + fk;
                sym.push(if xi2 > 0.0 { xi2 + xi2.powf(s) } else { k0 });
            }
        }
    }
    Ok(sym)
}

/// Multiply a spectrum by the (regularized) mixed symbol.
pub fn apply_k(spec: &Spectrum, s: f64) -> Result<Spectrum> {
    let sym = mixed_symbol(spec.grid, s)?;
    let coeffs = spec.coeffs.iter().zip(&sym).map(|(c, k)| c * k).collect();
    Ok(Spectrum { grid: spec.grid, coeffs })
}

/// Divide a spectrum by the (regularized) mixed symbol; Hermitian symmetry
/// is preserved since the symbol is real and even.
pub fn apply_k_inverse(spec: &Spectrum, s: f64) -> Result<Spectrum> {
    let sym = mixed_symbol(spec.grid, s)?;
    let coeffs = spec.coeffs.iter().zip(&sym).map(|(c, k)| c / k).collect();
    Ok(Spectrum { grid: spec.grid, coeffs })
}

/// D^{1,2} pairing ⟨u, v⟩ = (h³/n³) Σ |ξ|² Re[c_u conj(c_v)].
pub fn inner_d12(u: &Spectrum, v: &Spectrum) -> f64 {
    paired_sum(u, v, |xi2| xi2)
}

/// D^{s,2} pairing with weight |ξ|^{2s}.
pub fn inner_ds2(u: &Spectrum, v: &Spectrum, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::parameter(format!("fractional order s must lie in (0, 1) (got {s})")));
    }
    Ok(paired_sum(u, v, |xi2| xi2.powf(s)))
}

fn paired_sum(u: &Spectrum, v: &Spectrum, weight: impl Fn(f64) -> f64) -> f64 {
    debug_assert_eq!(u.grid, v.grid);
    let grid = u.grid;
    let n = grid.n();
    let fsq = axis_freq_sq(grid);
    let mut total = 0.0;
    let mut flat = 0;
    for i in 0..n {
        for j in 0..n {
            let fij = fsq[i] + fsq[j];
            for fk in &fsq {
                let xi2 = fij + fk;
                if xi2 > 0.0 {
                    total += weight(xi2) * (u.coeffs[flat] * v.coeffs[flat].conj()).re;
                }
                flat += 1;
            }
        }
    }
    grid.weight_spec() * total
}
