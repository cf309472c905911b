//! First-order uniformly accurate oscillatory integrator.
//!
//! Every operator of the step is diagonal in Fourier space, so the tables are
//! built once per `(tau, c, grid)` in [`StepOperators1`] and a step costs a
//! fixed number of FFTs.

use num_complex::Complex64;

use crate::error::{KgzError, Result};
use crate::kgz_model::{KgzState, ModelParams};
use crate::oscillatory_kernels::{build_multiplier, phi1, phi2, phi_of_operator, PhiKind, SymbolSpec};
use crate::spectral_core::{apply_multiplier, Multiplier, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tables shared by both schemes: the free linear flows and the n-update.
#[derive(Clone, Debug)]
pub(crate) struct CommonTables {
    pub params: ModelParams,
    pub tau: f64,
    /// `exp(i tau c <grad>_c)`.
    pub rot: Multiplier,
    /// `<grad>_c^{-2}`.
    pub inv_sq: Multiplier,
    /// `c <grad>_c`.
    pub omega: Multiplier,
    /// `c / <grad>_c`.
    pub c_inv: Multiplier,
    pub laplace: Multiplier,
    pub cos0: Multiplier,
    pub tsinc0: Multiplier,
    pub ksin0: Multiplier,
    /// `(tau^2/4) sinc(tau |k|) Laplace`.
    pub n_forcing: Multiplier,
    /// `phi1(i tau Laplace / 2)`.
    pub phi1_half_lap: Multiplier,
    /// `phi1(-i tau (c <grad>_c + c^2))`.
    pub phi1_mw: Multiplier,
    /// `-i (exp(i tau c <grad>_c) - 1)`, the increment of the running sum per unit `G`.
    pub sum_increment: Multiplier,
    pub phi2_2ic2: Complex64,
}

impl CommonTables {
    pub fn new(params: &ModelParams, tau: f64) -> Result<Self> {
        params.validate()?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(KgzError::Parameter(format!("step size must be positive, got {tau}")));
        }
        let c = params.c;
        let g = &params.grid;
        let b = |s: SymbolSpec| build_multiplier(&s, g);
        let laplace = b(SymbolSpec::Laplace)?;
        let rot = b(SymbolSpec::ExpITCBracket { c, t: tau })?;
        let n_forcing = b(SymbolSpec::Sinc0 { t: tau })?
            .compose(&laplace)
            .scale(Complex64::new(tau * tau / 4.0, 0.0));
        let sum_increment = Multiplier::new(rot.values().iter().map(|e| -I * (e - 1.0)).collect());
        Ok(Self {
            params: *params,
            tau,
            inv_sq: b(SymbolSpec::InvBracketCSq { c })?,
            omega: b(SymbolSpec::CBracketC { c })?,
            c_inv: b(SymbolSpec::CInvBracketC { c })?,
            cos0: b(SymbolSpec::Cos0 { t: tau })?,
            tsinc0: b(SymbolSpec::TSinc0 { t: tau })?,
            ksin0: b(SymbolSpec::Bracket0Sin0 { t: tau })?,
            phi1_half_lap: phi_of_operator(PhiKind::Phi1, 0.5 * tau * I, &SymbolSpec::Laplace, g)?,
            phi1_mw: phi_of_operator(PhiKind::Phi1, -tau * I, &SymbolSpec::CBracketCPlusC2 { c }, g)?,
            phi2_2ic2: phi2(2.0 * c * c * tau * I),
            laplace,
            rot,
            n_forcing,
            sum_increment,
        })
    }

    pub fn check_state(&self, s: &KgzState) -> Result<()> {
        if *s.grid() != self.params.grid {
            return Err(KgzError::Config(
                "state grid differs from the grid of the step operators".into(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, m: &Multiplier, f: &SpectralField) -> Result<SpectralField> {
        apply_multiplier(m, f)
    }

    pub fn prod(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.params.product(f, g)
    }

    /// `n_{l+1} = cos n + sin/|k| ndot + (tau^2/4) sinc Laplace (|u|^2 + 2 Re(phi2(2ic^2 tau) u^2))`.
    pub fn next_n(
        &self,
        n: &SpectralField,
        ndot: &SpectralField,
        uu: &SpectralField,
        u2: &SpectralField,
    ) -> Result<SpectralField> {
        let osc = u2.scale(self.phi2_2ic2);
        let quad = uu.add(&osc.add(&osc.conj())?)?;
        let out = self
            .mul(&self.cos0, n)?
            .add(&self.mul(&self.tsinc0, ndot)?)?
            .add(&self.mul(&self.n_forcing, &quad)?)?;
        Ok(out.real_part())
    }

    /// `u_{l+1} = -i G_{l+1} - (1/2) <grad>_c^{-2} (n_{l+1} (S + conj S))`.
    pub fn next_u(
        &self,
        g_next: &SpectralField,
        n_next: &SpectralField,
        sum: &SpectralField,
    ) -> Result<SpectralField> {
        let re2 = sum.add(&sum.conj())?;
        let corr = self.mul(&self.inv_sq, &self.prod(n_next, &re2)?)?;
        g_next.scale(-I).axpy(Complex64::new(-0.5, 0.0), &corr)
    }

    /// `ndot u + i n (c <grad>_c u)` and `ndot conj u - i n (c <grad>_c conj u)`.
    pub fn coupling_pair(
        &self,
        u: &SpectralField,
        ub: &SpectralField,
        n: &SpectralField,
        ndot: &SpectralField,
    ) -> Result<(SpectralField, SpectralField)> {
        let t1 = self
            .prod(ndot, u)?
            .axpy(I, &self.prod(n, &self.mul(&self.omega, u)?)?)?;
        let t2 = self
            .prod(ndot, ub)?
            .axpy(-I, &self.prod(n, &self.mul(&self.omega, ub)?)?)?;
        Ok((t1, t2))
    }
}

/// Precomputed multipliers for one step of the first-order scheme.
#[derive(Clone, Debug)]
pub struct StepOperators1 {
    pub(crate) common: CommonTables,
    /// `(i tau / 2) e^{i tau c<grad>_c} <grad>_c^{-2} phi1(i tau Laplace / 2)`.
    g_coupling_1: Multiplier,
    /// `(i tau / 2) e^{i tau c<grad>_c} <grad>_c^{-2} phi1(-i tau (c<grad>_c + c^2))`.
    g_coupling_2: Multiplier,
    /// `(tau/4) cos(tau |k|) Laplace`.
    ndot_forcing: Multiplier,
    phi1_2ic2: Complex64,
}

impl StepOperators1 {
    pub fn new(params: &ModelParams, tau: f64) -> Result<Self> {
        let common = CommonTables::new(params, tau)?;
        let c = params.c;
        let pre = common
            .rot
            .compose(&common.inv_sq)
            .scale(Complex64::new(0.0, 0.5 * tau));
        Ok(Self {
            g_coupling_1: pre.compose(&common.phi1_half_lap),
            g_coupling_2: pre.compose(&common.phi1_mw),
            ndot_forcing: common
                .cos0
                .compose(&common.laplace)
                .scale(Complex64::new(tau / 4.0, 0.0)),
            phi1_2ic2: phi1(2.0 * c * c * tau * I),
            common,
        })
    }

    pub fn tau(&self) -> f64 {
        self.common.tau
    }

    pub fn params(&self) -> &ModelParams {
        &self.common.params
    }
}

/// Advances `s` by one step of size `ops.tau()`.
pub fn step1(s: &KgzState, ops: &StepOperators1) -> Result<KgzState> {
    let t = &ops.common;
    t.check_state(s)?;
    let (u, n, ndot) = (&s.u, &s.n, &s.ndot);
    let ub = u.conj();

    let (t1, t2) = t.coupling_pair(u, &ub, n, ndot)?;
    let g_next = t
        .mul(&t.rot, &s.g)?
        .add(&t.mul(&ops.g_coupling_1, &t1)?)?
        .add(&t.mul(&ops.g_coupling_2, &t2)?)?;

    let uu = t.prod(u, &ub)?.real_part();
    let u2 = t.prod(u, u)?;
    let n_next = t.next_n(n, ndot, &uu, &u2)?;

    let osc = u2.scale(ops.phi1_2ic2);
    let quad = uu.scale(Complex64::new(2.0, 0.0)).add(&osc.add(&osc.conj())?)?;
    let ndot_next = t
        .mul(&t.ksin0, n)?
        .scale(Complex64::new(-1.0, 0.0))
        .add(&t.mul(&t.cos0, ndot)?)?
        .add(&t.mul(&ops.ndot_forcing, &quad)?)?
        .real_part();

    // S(t_{l+1}) = u_0 + sum_{k <= l} tau phi1(i tau c<grad>_c) F_k
    let s_next = s.s_f.add(&t.mul(&t.sum_increment, &s.g)?)?;
    let u_next = t.next_u(&g_next, &n_next, &s_next)?;

    Ok(KgzState {
        u: u_next,
        g: g_next,
        n: n_next,
        ndot: ndot_next,
        s_f: s_next,
        time: s.time + t.tau,
    })
}

/// Applies [`step1`] `num_steps` times with one set of tables.
pub fn propagate1(
    s0: &KgzState,
    params: &ModelParams,
    tau: f64,
    num_steps: usize,
) -> Result<KgzState> {
    let ops = StepOperators1::new(params, tau)?;
    let mut s = s0.clone();
    for _ in 0..num_steps {
        s = step1(&s, &ops)?;
    }
    if !s.is_finite() {
        return Err(KgzError::Divergence { c: params.c, tau });
    }
    Ok(s)
}
