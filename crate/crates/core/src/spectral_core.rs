//! Fields on the periodic interval, their Fourier coefficients and the
//! handful of operations the integrators are built from.
//!
//! Coefficients follow `f_m = (1/N) sum_j f(x_j) exp(-i k_m x_j)`, so a single
//! mode `exp(i k x)` has coefficient one and norms do not depend on `N`.
//! Slot `j` of a coefficient vector holds mode `j` for `j < N/2` and mode
//! `j - N` otherwise (the Nyquist slot is mode `-N/2`).

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{KgzError, Result};

const HERMITIAN_SAMPLE_TOL: f64 = 1e-13;
const HERMITIAN_MULTIPLIER_TOL: f64 = 1e-12;

/// Uniform grid on a torus of the given length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusGrid {
    num_points: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(num_points: usize, length: f64) -> Result<Self> {
        if num_points < 2 || !num_points.is_multiple_of(2) {
            return Err(KgzError::Parameter(format!(
                "grid size must be a positive even integer, got {num_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(KgzError::Parameter(format!(
                "domain length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { num_points, length })
    }

    /// `N` points on `[0, 2pi)`.
    pub fn with_points(num_points: usize) -> Result<Self> {
        Self::new(num_points, 2.0 * PI)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.num_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.node(j)).collect()
    }

    /// Mode index stored in slot `slot`.
    pub fn mode_index(&self, slot: usize) -> i64 {
        let n = self.num_points as i64;
        let s = slot as i64;
        if s < n / 2 {
            s
        } else {
            s - n
        }
    }

    /// Slot holding mode `m` (taken modulo `N`).
    pub fn slot(&self, mode: i64) -> usize {
        mode.rem_euclid(self.num_points as i64) as usize
    }

    pub fn wavenumber(&self, slot: usize) -> f64 {
        2.0 * PI * self.mode_index(slot) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.num_points).map(|s| self.wavenumber(s)).collect()
    }

    /// Slot of mode `-m` for the mode stored in `slot`.
    pub fn mirror(&self, slot: usize) -> usize {
        (self.num_points - slot) % self.num_points
    }
}

impl Default for TorusGrid {
    fn default() -> Self {
        Self {
            num_points: 128,
            length: 2.0 * PI,
        }
    }
}

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<usize, Plans>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> Plans {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(n)
            .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .clone()
    })
}

fn forward_in_place(data: &mut [Complex64]) {
    let n = data.len();
    plans(n).0.process(data);
    let scale = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn inverse_in_place(data: &mut [Complex64]) {
    plans(data.len()).1.process(data);
}

fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Fourier coefficients of a field on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_points()],
            hermitian: true,
        }
    }

    /// Wraps raw coefficients; the hermitian flag is detected from the data.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.num_points() {
            return Err(KgzError::Dimension {
                expected: grid.num_points(),
                got: coeffs.len(),
            });
        }
        let hermitian = coeffs_are_hermitian(&grid, &coeffs, HERMITIAN_MULTIPLIER_TOL);
        Ok(Self {
            grid,
            coeffs,
            hermitian,
        })
    }

    /// Forward transform of physical samples.
    pub fn to_spectral(grid: TorusGrid, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.num_points() {
            return Err(KgzError::Dimension {
                expected: grid.num_points(),
                got: samples.len(),
            });
        }
        let scale = max_abs(samples);
        let max_imag = samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let hermitian = max_imag <= HERMITIAN_SAMPLE_TOL * scale;
        let mut coeffs = samples.to_vec();
        forward_in_place(&mut coeffs);
        Ok(Self {
            grid,
            coeffs,
            hermitian,
        })
    }

    pub fn from_real_samples(grid: TorusGrid, samples: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut f = Self::to_spectral(grid, &c)?;
        f.hermitian = true;
        f.symmetrize();
        Ok(f)
    }

    /// Samples a real function at the grid nodes.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        Self::from_real_samples(grid, &samples).expect("sample count matches grid")
    }

    /// The single Fourier mode `amplitude * exp(i k_m x)`.
    pub fn mode(grid: TorusGrid, mode: i64, amplitude: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.num_points()];
        coeffs[grid.slot(mode)] = amplitude;
        let hermitian = coeffs_are_hermitian(&grid, &coeffs, HERMITIAN_MULTIPLIER_TOL);
        Self {
            grid,
            coeffs,
            hermitian,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mode: i64) -> Complex64 {
        self.coeffs[self.grid.slot(mode)]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        inverse_in_place(&mut data);
        data
    }

    /// Real parts of the physical samples.
    pub fn real_samples(&self) -> Vec<f64> {
        self.to_physical().into_iter().map(|v| v.re).collect()
    }

    /// Largest imaginary part of the physical samples.
    pub fn max_imag_sample(&self) -> f64 {
        self.to_physical()
            .into_iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Coefficients of the complex conjugate field in physical space.
    pub fn conj(&self) -> Self {
        let g = &self.grid;
        let coeffs = (0..g.num_points())
            .map(|s| self.coeffs[g.mirror(s)].conj())
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            hermitian: self.hermitian,
        }
    }

    /// `(f + conj f) / 2`, i.e. the real part in physical space.
    pub fn real_part(&self) -> Self {
        let mut out = self.clone();
        out.symmetrize();
        out.hermitian = true;
        out
    }

    fn symmetrize(&mut self) {
        let g = self.grid;
        let n = g.num_points();
        let old = self.coeffs.clone();
        for s in 0..n {
            self.coeffs[s] = 0.5 * (old[s] + old[g.mirror(s)].conj());
        }
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(KgzError::GridMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: Complex64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + factor * b)
                .collect(),
            hermitian: self.hermitian && other.hermitian && factor.im == 0.0,
        })
    }
}

fn coeffs_are_hermitian(grid: &TorusGrid, coeffs: &[Complex64], tol: f64) -> bool {
    let scale = max_abs(coeffs).max(f64::MIN_POSITIVE);
    (0..grid.num_points()).all(|s| (coeffs[s] - coeffs[grid.mirror(s)].conj()).norm() <= tol * scale)
}

/// Diagonal Fourier multiplier, one value per slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    values: Vec<Complex64>,
}

impl Multiplier {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn identity(grid: &TorusGrid) -> Self {
        Self::constant(grid, Complex64::new(1.0, 0.0))
    }

    pub fn constant(grid: &TorusGrid, value: Complex64) -> Self {
        Self {
            values: vec![value; grid.num_points()],
        }
    }

    /// Evaluates `symbol(k_m)` at every wavenumber of the grid.
    pub fn from_symbol(grid: &TorusGrid, symbol: impl Fn(f64) -> Complex64) -> Self {
        Self {
            values: grid.wavenumbers().into_iter().map(symbol).collect(),
        }
    }

    pub fn from_real_symbol(grid: &TorusGrid, symbol: impl Fn(f64) -> f64) -> Self {
        Self::from_symbol(grid, |k| Complex64::new(symbol(k), 0.0))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise product of the two symbol tables.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// True when `m(-k) = conj(m(k))`, which maps real fields to real fields.
    pub fn preserves_realness(&self, grid: &TorusGrid) -> bool {
        self.values.len() == grid.num_points()
            && coeffs_are_hermitian(grid, &self.values, HERMITIAN_MULTIPLIER_TOL)
    }
}

pub fn apply_multiplier(m: &Multiplier, f: &SpectralField) -> Result<SpectralField> {
    if m.len() != f.grid.num_points() {
        return Err(KgzError::GridMismatch);
    }
    Ok(SpectralField {
        grid: f.grid,
        coeffs: m.values.iter().zip(&f.coeffs).map(|(a, b)| a * b).collect(),
        hermitian: f.hermitian && m.preserves_realness(&f.grid),
    })
}

/// Product in physical space without dealiasing.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    pointwise_product_with(f, g, false)
}

/// Product in physical space, optionally with the 2/3 truncation rule.
pub fn pointwise_product_with(
    f: &SpectralField,
    g: &SpectralField,
    dealias: bool,
) -> Result<SpectralField> {
    f.check_grid(g)?;
    let grid = f.grid;
    let mut a = f.coeffs.clone();
    let mut b = g.coeffs.clone();
    if dealias {
        truncate_two_thirds(&grid, &mut a);
        truncate_two_thirds(&grid, &mut b);
    }
    inverse_in_place(&mut a);
    inverse_in_place(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    forward_in_place(&mut a);
    if dealias {
        truncate_two_thirds(&grid, &mut a);
    }
    let hermitian = f.hermitian && g.hermitian;
    let mut out = SpectralField {
        grid,
        coeffs: a,
        hermitian,
    };
    if hermitian {
        out.symmetrize();
    }
    Ok(out)
}

fn truncate_two_thirds(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    let cutoff = grid.num_points() as i64 / 3;
    for (s, v) in coeffs.iter_mut().enumerate() {
        if grid.mode_index(s).abs() > cutoff {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

/// Discrete `H^r` norm `sqrt(sum (1 + k^2)^r |f_m|^2)`.
pub fn sobolev_norm(f: &SpectralField, r: f64) -> f64 {
    f.coeffs
        .iter()
        .enumerate()
        .map(|(s, v)| {
            let k = f.grid.wavenumber(s);
            (1.0 + k * k).powf(r) * v.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}
