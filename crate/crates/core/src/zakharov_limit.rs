//! Reference solver for the limit system
//!
//! ```text
//! 2i u_t = Laplace u - n u,    n_tt - Laplace n = (1/2) Laplace |u|^2
//! ```
//!
//! reached by the twisted variable as `c -> infinity`, and the comparison of a
//! KGZ solution against it.
//!
//! The solver is Strang splitting into the linear flow (free Schroedinger
//! and free wave, both exact in Fourier space) and the coupling flow
//! `u_t = (i/2) n u`, `n_t = 0`, `ndot_t = (1/2) Laplace |u|^2`, which is also
//! exact because `|u|` and `n` stay frozen along it.

use num_complex::Complex64;

use crate::error::{KgzError, Result};
use crate::kgz_model::{to_physical_z, KgzState, ModelParams, PhysicalState};
use crate::oscillatory_kernels::{build_multiplier, SymbolSpec};
use crate::spectral_core::{
    apply_multiplier, sobolev_norm, Multiplier, SpectralField, TorusGrid,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ZakharovState {
    pub u_inf: SpectralField,
    pub n_inf: SpectralField,
    pub ndot_inf: SpectralField,
    pub time: f64,
}

impl ZakharovState {
    pub fn grid(&self) -> &TorusGrid {
        self.u_inf.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u_inf.is_finite() && self.n_inf.is_finite() && self.ndot_inf.is_finite()
    }

    /// `||u||_{L^2}`, conserved by the exact flow.
    pub fn mass(&self) -> f64 {
        sobolev_norm(&self.u_inf, 0.0)
    }
}

/// Tables for one step of size `tau`.
#[derive(Clone, Debug)]
pub struct ZakharovOperators {
    grid: TorusGrid,
    tau: f64,
    half_schroedinger: Multiplier,
    cos_half: Multiplier,
    tsinc_half: Multiplier,
    ksin_half: Multiplier,
    /// `(tau/2) Laplace`.
    kick: Multiplier,
}

impl ZakharovOperators {
    pub fn new(grid: TorusGrid, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(KgzError::Parameter(format!("step size must be positive, got {tau}")));
        }
        let h = 0.5 * tau;
        let b = |s: SymbolSpec| build_multiplier(&s, &grid);
        Ok(Self {
            grid,
            tau,
            half_schroedinger: Multiplier::from_symbol(&grid, |k| Complex64::from_polar(1.0, 0.5 * h * k * k)),
            cos_half: b(SymbolSpec::Cos0 { t: h })?,
            tsinc_half: b(SymbolSpec::TSinc0 { t: h })?,
            ksin_half: b(SymbolSpec::Bracket0Sin0 { t: h })?,
            kick: b(SymbolSpec::Laplace)?.scale(Complex64::new(0.5 * tau, 0.0)),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn linear_half(&self, s: &ZakharovState) -> Result<(SpectralField, SpectralField, SpectralField)> {
        let u = apply_multiplier(&self.half_schroedinger, &s.u_inf)?;
        let n = apply_multiplier(&self.cos_half, &s.n_inf)?
            .add(&apply_multiplier(&self.tsinc_half, &s.ndot_inf)?)?;
        let ndot = apply_multiplier(&self.cos_half, &s.ndot_inf)?
            .sub(&apply_multiplier(&self.ksin_half, &s.n_inf)?)?;
        Ok((u, n, ndot))
    }
}

/// One Strang step `L(tau/2) N(tau) L(tau/2)`.
pub fn zakharov_step(s: &ZakharovState, ops: &ZakharovOperators) -> Result<ZakharovState> {
    if *s.grid() != ops.grid {
        return Err(KgzError::GridMismatch);
    }
    let (u, n, ndot) = ops.linear_half(s)?;

    let n_samples = n.real_samples();
    let mut u_samples = u.to_physical();
    for (v, &m) in u_samples.iter_mut().zip(&n_samples) {
        *v *= Complex64::from_polar(1.0, 0.5 * ops.tau * m);
    }
    let u = SpectralField::to_spectral(ops.grid, &u_samples)?;
    let mass: Vec<f64> = u_samples.iter().map(|v| v.norm_sqr()).collect();
    let mass = SpectralField::from_real_samples(ops.grid, &mass)?;
    let ndot = ndot.add(&apply_multiplier(&ops.kick, &mass)?)?;

    let mid = ZakharovState {
        u_inf: u,
        n_inf: n,
        ndot_inf: ndot,
        time: s.time,
    };
    let (u, n, ndot) = ops.linear_half(&mid)?;
    Ok(ZakharovState {
        u_inf: u,
        n_inf: n.real_part(),
        ndot_inf: ndot.real_part(),
        time: s.time + ops.tau,
    })
}

pub fn propagate_zakharov(s0: &ZakharovState, tau: f64, num_steps: usize) -> Result<ZakharovState> {
    let ops = ZakharovOperators::new(*s0.grid(), tau)?;
    let mut s = s0.clone();
    for _ in 0..num_steps {
        s = zakharov_step(&s, &ops)?;
    }
    if !s.is_finite() {
        return Err(KgzError::Divergence { c: f64::INFINITY, tau });
    }
    Ok(s)
}

/// `u(0) = z(0) - i c^{-2} dz/dt(0)`, `n` and `dn/dt` unchanged.
pub fn limit_initial(p: &PhysicalState, params: &ModelParams) -> Result<ZakharovState> {
    params.validate()?;
    if *p.grid() != params.grid {
        return Err(KgzError::GridMismatch);
    }
    let c2 = params.c * params.c;
    Ok(ZakharovState {
        u_inf: p.z.axpy(Complex64::new(0.0, -1.0 / c2), &p.zdot)?,
        n_inf: p.n.real_part(),
        ndot_inf: p.ndot.real_part(),
        time: 0.0,
    })
}

/// Errors `(||z_lim - z||_{H^1}, ||n_lim - n||_{L^2})` at time `t`, where
/// `z_lim = Re(exp(i c^2 t) u_lim)` undoes the twist.
pub fn twisted_compare(
    kgz_final: &KgzState,
    zak_final: &ZakharovState,
    t: f64,
    c: f64,
) -> Result<(f64, f64)> {
    let tol = 1e-9 * t.abs().max(1.0);
    if (kgz_final.time - t).abs() > tol {
        return Err(KgzError::TimeMismatch(kgz_final.time, t));
    }
    if (zak_final.time - t).abs() > tol {
        return Err(KgzError::TimeMismatch(zak_final.time, t));
    }
    if kgz_final.grid() != zak_final.grid() {
        return Err(KgzError::GridMismatch);
    }
    let phase = Complex64::from_polar(1.0, c * c * t);
    let z_lim = zak_final.u_inf.scale(phase).real_part();
    let z = to_physical_z(&kgz_final.u);
    Ok((
        sobolev_norm(&z_lim.sub(&z)?, 1.0),
        sobolev_norm(&zak_final.n_inf.sub(&kgz_final.n)?, 0.0),
    ))
}
