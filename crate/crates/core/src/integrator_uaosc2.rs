//! Second-order uniformly accurate oscillatory integrator.
//!
//! The state's running sum starts at zero and `u` is rebuilt from
//! `u_0 + S`, so the initial twisted field is passed to every step.

use num_complex::Complex64;

use crate::error::{KgzError, Result};
use crate::integrator_uaosc1::CommonTables;
use crate::kgz_model::{KgzState, ModelParams};
use crate::oscillatory_kernels::{
    build_multiplier, phi1, psi2, phi_of_operator, PhiKind, SymbolSpec,
};
use crate::spectral_core::{Multiplier, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Switches between transcriptions of the second-order step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Uaosc2Options {
    /// Use `+Psi2(-i tau A_c)` in the bracket coupling `n` to `c<grad>_c u`
    /// instead of the `-Psi2` that the Duhamel expansion produces.
    pub literal_bracket_sign: bool,
    /// Use `A_c` itself in the correction term `I(u, n)` instead of the chord
    /// symbol `A_c phi1(i tau A_c)`, the exact one-step average of the phase.
    pub plain_dispersion: bool,
}

/// Precomputed multipliers for one step of the second-order scheme.
#[derive(Clone, Debug)]
pub struct StepOperators2 {
    common: CommonTables,
    options: Uaosc2Options,
    /// `(i tau / 2) e^{i tau c<grad>_c} <grad>_c^{-2}`.
    g_prefactor: Multiplier,
    filter: Multiplier,
    a_eff: Multiplier,
    phi1_ma: Multiplier,
    phi1_pa: Multiplier,
    phi1_pw: Multiplier,
    /// `tau psi Psi2(-i tau A_c)`.
    i_weight: Multiplier,
    /// `tau Psi2(-i tau (c<grad>_c + c^2))`.
    ib_weight: Multiplier,
    /// `(tau/2) psi`.
    bracket_weight: Multiplier,
    /// Coefficients of `n (c<grad>_c u)` and `n (c<grad>_c conj u)` inside the bracket.
    bracket_u: Multiplier,
    bracket_ub: Multiplier,
    /// `c<grad>_c^{-1} phi1[-i tau A_c, 2 i c^2 tau]`.
    j1_quotient: Multiplier,
    /// `c<grad>_c^{-1} phi2(-i tau (c<grad>_c + c^2))`.
    j2_weight: Multiplier,
    sinc0: Multiplier,
    /// `(tau/4) Laplace`.
    ndot_forcing: Multiplier,
    /// `(i/2) tau^2 c<grad>_c^{-1} Psi2(i tau c^2) phi1(i tau Laplace / 2)`.
    sum_coupling_1: Multiplier,
    /// `(i/2) tau^2 c<grad>_c^{-1} phi1[i tau c<grad>_c, -i tau c^2]`.
    sum_coupling_2: Multiplier,
    phi1_2ic2: Complex64,
    psi2_2ic2: Complex64,
}

impl StepOperators2 {
    pub fn new(params: &ModelParams, tau: f64) -> Result<Self> {
        Self::with_options(params, tau, Uaosc2Options::default())
    }

    pub fn with_options(params: &ModelParams, tau: f64, options: Uaosc2Options) -> Result<Self> {
        let common = CommonTables::new(params, tau)?;
        let c = params.c;
        let c2 = c * c;
        let g = &params.grid;
        let ac = SymbolSpec::Ac { c };
        let w = SymbolSpec::CBracketCPlusC2 { c };
        let phi = |kind, scale, base: &SymbolSpec| phi_of_operator(kind, scale, base, g);
        let quotient = |a_scale, a_base: SymbolSpec, b: Complex64| {
            build_multiplier(
                &SymbolSpec::Phi1Quotient {
                    a_scale,
                    a_base: Box::new(a_base),
                    b_scale: b,
                    b_base: Box::new(SymbolSpec::Constant(re(1.0))),
                },
                g,
            )
        };

        let filter = build_multiplier(&SymbolSpec::SincHalfLaplace { t: tau }, g)?;
        let a = build_multiplier(&ac, g)?;
        let phi1_pa = phi(PhiKind::Phi1, tau * I, &ac)?;
        let a_eff = if options.plain_dispersion {
            a.clone()
        } else {
            a.compose(&phi1_pa)
        };
        let psi2_ma = phi(PhiKind::Psi2, -tau * I, &ac)?;
        let psi2_mw = phi(PhiKind::Psi2, -tau * I, &w)?;
        let phi2_mw = phi(PhiKind::Phi2, -tau * I, &w)?;

        let q1 = quotient(tau * I, ac.clone(), -2.0 * c2 * tau * I)?;
        let sign = if options.literal_bracket_sign { 1.0 } else { -1.0 };
        let bracket_u = psi2_ma.scale(re(sign)).add_values(&q1);
        let bracket_ub = phi2_mw.add_values(&psi2_mw.scale(re(-1.0)));

        let qj = quotient(-tau * I, ac.clone(), 2.0 * c2 * tau * I)?;
        let qs = quotient(tau * I, SymbolSpec::CBracketC { c }, -c2 * tau * I)?;
        let half_tau_sq = 0.5 * tau * tau * I;

        Ok(Self {
            g_prefactor: common
                .rot
                .compose(&common.inv_sq)
                .scale(Complex64::new(0.0, 0.5 * tau)),
            i_weight: psi2_ma.compose(&filter).scale(re(tau)),
            ib_weight: psi2_mw.scale(re(tau)),
            bracket_weight: filter.scale(re(0.5 * tau)),
            j1_quotient: qj.compose(&common.c_inv),
            j2_weight: phi2_mw.compose(&common.c_inv),
            sinc0: build_multiplier(&SymbolSpec::Sinc0 { t: tau }, g)?,
            ndot_forcing: common.laplace.scale(re(tau / 4.0)),
            sum_coupling_1: common
                .c_inv
                .compose(&common.phi1_half_lap)
                .scale(half_tau_sq * psi2(c2 * tau * I)),
            sum_coupling_2: common.c_inv.compose(&qs).scale(half_tau_sq),
            phi1_ma: phi(PhiKind::Phi1, -tau * I, &ac)?,
            phi1_pw: phi(PhiKind::Phi1, tau * I, &w)?,
            phi1_2ic2: phi1(2.0 * c2 * tau * I),
            psi2_2ic2: psi2(2.0 * c2 * tau * I),
            filter,
            a_eff,
            phi1_pa,
            bracket_u,
            bracket_ub,
            options,
            common,
        })
    }

    pub fn tau(&self) -> f64 {
        self.common.tau
    }

    pub fn params(&self) -> &ModelParams {
        &self.common.params
    }

    pub fn options(&self) -> Uaosc2Options {
        self.options
    }
}

trait AddValues {
    fn add_values(&self, other: &Self) -> Self;
}

impl AddValues for Multiplier {
    fn add_values(&self, other: &Self) -> Self {
        Multiplier::new(
            self.values()
                .iter()
                .zip(other.values())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Advances `s` by one step; `u0` is the twisted field at time zero.
pub fn step2(s: &KgzState, u0: &SpectralField, ops: &StepOperators2) -> Result<KgzState> {
    let t = &ops.common;
    t.check_state(s)?;
    if u0.grid() != s.grid() {
        return Err(KgzError::GridMismatch);
    }
    let (u, n, ndot) = (&s.u, &s.n, &s.ndot);
    let ub = u.conj();
    let f = t.mul(&t.omega, &s.g)?;
    let fb = f.conj();
    let psi_n = t.mul(&ops.filter, n)?;

    // I(u, n) = u Laplace(n + (u + conj u)^2 / 4) + ndot (i A u + F) + i n A F
    let re2 = u.add(&ub)?;
    let inner = n.axpy(re(0.25), &t.prod(&re2, &re2)?)?;
    let a_u = t.mul(&ops.a_eff, u)?;
    let corr = t
        .prod(u, &t.mul(&t.laplace, &inner)?)?
        .add(&t.prod(ndot, &a_u.scale(I).add(&f)?)?)?
        .axpy(I, &t.prod(n, &t.mul(&ops.a_eff, &f)?)?)?;

    let n_wu = t.prod(n, &t.mul(&t.omega, u)?)?;
    let n_wub = t.prod(n, &t.mul(&t.omega, &ub)?)?;
    let bracket = t.mul(&ops.bracket_u, &n_wu)?.add(&t.mul(&ops.bracket_ub, &n_wub)?)?;
    let bracket_term = t.prod(n, &t.mul(&t.c_inv, &bracket)?)?;

    let inside = t
        .mul(&ops.phi1_ma, &t.prod(ndot, u)?.add(&t.prod(&psi_n, &f)?)?)?
        .add(&t.mul(&t.phi1_mw, &t.prod(ndot, &ub)?.add(&t.prod(&psi_n, &fb)?)?)?)?
        .add(&t.mul(&ops.i_weight, &corr)?)?
        .add(&t.mul(&ops.ib_weight, &corr.conj())?)?
        .add(&t.mul(&ops.bracket_weight, &bracket_term)?)?;
    let g_next = t.mul(&t.rot, &s.g)?.add(&t.mul(&ops.g_prefactor, &inside)?)?;

    let uu = t.prod(u, &ub)?.real_part();
    let u2 = t.prod(u, u)?;
    let n_next = t.next_n(n, ndot, &uu, &u2)?;

    let nu = t.prod(n, u)?;
    let nub = t.prod(n, &ub)?;
    let j1 = t
        .prod(u, &t.mul(&t.c_inv, &nu)?)?
        .scale(tau_i(t.tau) * ops.psi2_2ic2)
        .axpy(tau_i(t.tau), &t.prod(u, &t.mul(&ops.j1_quotient, &nub)?)?)?;
    let j2 = t
        .prod(&ub, &t.mul(&t.c_inv, &nu)?)?
        .scale(0.5 * tau_i(t.tau))
        .axpy(tau_i(t.tau), &t.prod(&ub, &t.mul(&ops.j2_weight, &nub)?)?)?;
    let j = t.mul(&ops.sinc0, &j1.add(&j2)?)?;

    // The brace is H + conj H: the conjugate partners of every oscillatory
    // product are implied rather than computed.
    let h = t
        .prod(&ub, &t.mul(&ops.phi1_pa, u)?)?
        .add(&t.prod(u, &t.mul(&ops.phi1_pw, u)?)?)?
        .scale(re(2.0))
        .sub(&uu)?
        .axpy(-ops.phi1_2ic2, &u2)?
        .add(&j)?;
    let brace = h.add(&h.conj())?;
    let ndot_next = t
        .mul(&t.ksin0, n)?
        .scale(re(-1.0))
        .add(&t.mul(&t.cos0, ndot)?)?
        .add(&t.mul(&ops.ndot_forcing, &brace)?)?
        .real_part();

    let (t1, t2) = t.coupling_pair(u, &ub, n, ndot)?;
    let s_next = s
        .s_f
        .add(&t.mul(&t.sum_increment, &s.g)?)?
        .add(&t.mul(&ops.sum_coupling_1, &t1)?)?
        .add(&t.mul(&ops.sum_coupling_2, &t2)?)?;
    let u_next = t.next_u(&g_next, &n_next, &u0.add(&s_next)?)?;

    Ok(KgzState {
        u: u_next,
        g: g_next,
        n: n_next,
        ndot: ndot_next,
        s_f: s_next,
        time: s.time + t.tau,
    })
}

fn tau_i(tau: f64) -> Complex64 {
    tau * I
}

/// Applies [`step2`] `num_steps` times with `s0.u` as the initial twisted field.
pub fn propagate2(
    s0: &KgzState,
    params: &ModelParams,
    tau: f64,
    num_steps: usize,
) -> Result<KgzState> {
    propagate2_with(s0, &s0.u.clone(), params, tau, num_steps, Uaosc2Options::default())
}

/// As [`propagate2`] with an explicit initial field and options, for
/// continuing a run that did not start at `s0`.
pub fn propagate2_with(
    s0: &KgzState,
    u0: &SpectralField,
    params: &ModelParams,
    tau: f64,
    num_steps: usize,
    options: Uaosc2Options,
) -> Result<KgzState> {
    let ops = StepOperators2::with_options(params, tau, options)?;
    let mut s = s0.clone();
    for _ in 0..num_steps {
        s = step2(&s, u0, &ops)?;
    }
    if !s.is_finite() {
        return Err(KgzError::Divergence { c: params.c, tau });
    }
    Ok(s)
}
